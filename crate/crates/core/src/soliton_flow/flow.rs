use serde::{Deserialize, Serialize};

use super::velocity::{
    constraint_residual, kahler_residual, omega_velocity_residual, sign_candidates, skrf_components, skrf_velocity,
    FlowVariant,
};
use crate::bakry_emery::KahlerState;
use crate::error::{Error, Result};
use crate::kahler_ops::{endo_01, endo_10};
use crate::riemannian_core::{transpose_g, MetricField};
use crate::spectral_fields::{linf, relative_residual, TensorField};
use crate::variation_engine::{membership_f, VariationDatum};

fn default_c() -> f64 {
    0.2
}

fn default_blowup() -> f64 {
    1e3
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    pub steps: usize,
    /// dt <= c h^2 with h = 2 pi / resolution.
    #[serde(default = "default_c")]
    pub stability_c: f64,
    #[serde(default)]
    pub variant: FlowVariant,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Abort once the constraint residual exceeds this multiple of its
    /// initial value (floored at 1e-6).
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

impl FlowConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self { dt, steps, stability_c: default_c(), variant: FlowVariant::Skrf, dealias: true, blowup_factor: default_blowup() }
    }

    pub fn with_variant(mut self, variant: FlowVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn max_dt(&self, resolution: usize) -> f64 {
        let h = std::f64::consts::TAU / resolution as f64;
        self.stability_c * h * h
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowDiagnostics {
    /// ||dbar B - del A||, relative
    pub constraint: f64,
    /// F-membership residual of g'
    pub f_membership: f64,
    /// ||nabla J||
    pub kahler: f64,
    pub j_square: f64,
    pub j_skew: f64,
    /// B J-linear and g-symmetric, A J-anti-linear and g-symmetric (max defect)
    pub ab_structure: f64,
    pub omega_velocity: f64,
    /// distance of g' from +(Ric_g(Omega) - g) and from -(Ric_g(Omega) - g)
    pub soliton_ricci_gap: f64,
    pub reversed_gap: f64,
    pub spectral_tail: f64,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub state: KahlerState,
    pub b: TensorField,
    pub a: TensorField,
    pub diagnostics: FlowDiagnostics,
}

impl FlowState {
    pub fn new(t: f64, state: KahlerState, variant: FlowVariant) -> Result<Self> {
        let (b, a) = skrf_components(&state, variant)?;
        let (m, j) = (state.metric(), state.j());
        let (gdot, jdot) = skrf_velocity(&state, variant)?;
        let datum = VariationDatum::new(state.clone(), gdot.clone())?;
        let (plus, minus) = sign_candidates(&state, &gdot)?;
        let id = TensorField::identity(*state.grid());
        let structure = [
            linf(&b.sub(&endo_10(&b, j)?)?),
            relative_residual(&b, &transpose_g(&b, m)?)?,
            linf(&a.sub(&endo_01(&a, j)?)?),
            relative_residual(&a, &transpose_g(&a, m)?)?,
        ];
        let diagnostics = FlowDiagnostics {
            constraint: constraint_residual(&state, &b, &a)?,
            f_membership: membership_f(&datum)?.max(),
            kahler: kahler_residual(m, j)?,
            j_square: linf(&j.compose(j)?.add(&id)?),
            j_skew: linf(&j.add(&transpose_g(j, m)?)?),
            ab_structure: structure.into_iter().fold(0.0, f64::max),
            omega_velocity: omega_velocity_residual(&state, &b, &gdot, &jdot)?,
            soliton_ricci_gap: plus,
            reversed_gap: minus,
            spectral_tail: state.g().spectral_tail(),
        };
        Ok(Self { t, state, b, a, diagnostics })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowAbort {
    pub step: usize,
    pub t: f64,
    pub reason: String,
}

/// States at t = 0, dt, 2 dt, ... up to the last completed step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: FlowConfig,
    pub states: Vec<FlowState>,
    pub abort: Option<FlowAbort>,
    /// dt exceeded the stability bound
    pub unstable: bool,
}

fn build(g: &TensorField, j: &TensorField, rho: &TensorField) -> Result<KahlerState> {
    if !g.is_finite() || !j.is_finite() {
        return Err(Error::Numerical("non-finite field".into()));
    }
    KahlerState::new(MetricField::new(g.clone())?, j.clone(), rho.clone())
}

/// One classical RK4 step on (g, J), dealiasing after every stage.
pub fn flow_step(state: &KahlerState, dt: f64, config: &FlowConfig) -> Result<KahlerState> {
    let clean = |x: TensorField| if config.dealias { x.dealiased() } else { x };
    let (g0, j0, rho) = (state.g(), state.j(), state.rho());
    let k1 = skrf_velocity(state, config.variant)?;
    let mut ks = vec![k1];
    for c in [0.5 * dt, 0.5 * dt, dt] {
        let (kg, kj) = ks.last().expect("first stage present");
        let g = clean(g0.add(&kg.scale(c))?);
        let j = clean(j0.add(&kj.scale(c))?);
        ks.push(skrf_velocity(&build(&g, &j, rho)?, config.variant)?);
    }
    let w = [1.0, 2.0, 2.0, 1.0];
    let mut g = g0.clone();
    let mut j = j0.clone();
    for (wi, (kg, kj)) in w.iter().zip(&ks) {
        g.axpy(dt * wi / 6.0, kg)?;
        j.axpy(dt * wi / 6.0, kj)?;
    }
    build(&clean(g), &clean(j), rho)
}

/// Runs the flow. SPD loss, non-finite fields and constraint blow-up end the
/// run early with the trajectory so far. A dt above the stability bound is
/// not refused, only flagged, so that the abort path can be exercised.
pub fn run_flow(initial: KahlerState, config: &FlowConfig) -> Result<Trajectory> {
    if !(config.dt > 0.0) || config.steps == 0 {
        return Err(Error::Config(format!("need dt > 0 and at least one step, got dt = {:e}, steps = {}", config.dt, config.steps)));
    }
    let max_dt = config.max_dt(initial.grid().resolution());
    let unstable = config.dt > max_dt;
    let note = |msg: String| if unstable { format!("{msg} (dt = {:e} exceeds the stability bound {max_dt:e})", config.dt) } else { msg };
    let first = FlowState::new(0.0, initial, config.variant)?;
    let floor = first.diagnostics.constraint.max(1e-6);
    let mut traj = Trajectory { config: config.clone(), states: vec![first], abort: None, unstable };
    for step in 1..=config.steps {
        let prev = traj.states.last().expect("initial state present");
        let t = step as f64 * config.dt;
        let next = flow_step(&prev.state, config.dt, config).and_then(|s| FlowState::new(t, s, config.variant));
        match next {
            Ok(fs) if fs.diagnostics.constraint > config.blowup_factor * floor => {
                traj.abort = Some(FlowAbort { step, t, reason: note(format!("constraint residual {:e} blew up", fs.diagnostics.constraint)) });
                break;
            }
            Ok(fs) => traj.states.push(fs),
            Err(Error::Numerical(msg)) => {
                traj.abort = Some(FlowAbort { step, t, reason: note(msg) });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}
