//! Evolution equations of B and A along the flow, checked against forward
//! differences of the recorded trajectory.

use super::flow::{flow_step, FlowConfig, FlowState, Trajectory};
use super::velocity::FlowVariant;
use crate::bakry_emery::KahlerState;
use crate::error::{contract, Result};
use crate::kahler_ops::{hook, laplacian_dbar, laplacian_del, nabla_10};
use crate::report::{Residual, ResidualReport};
use crate::riemannian_core::{covariant_derivative, gradient, ricci, sharp};
use crate::spectral_fields::{relative_residual, TensorField};

pub const T0_TOL: f64 = 1e-3;
pub const MID_TOL: f64 = 1e-2;

/// Sign pattern of the evolution right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionForm {
    /// The equations as written.
    Printed,
    /// -2 A^2 in the B equation and -(A del grad f + del grad f A) in the A
    /// equation: the pattern the soliton-Ricci variant follows numerically.
    Observed,
}

impl EvolutionForm {
    fn signs(self) -> (f64, f64) {
        match self {
            Self::Printed => (2.0, 1.0),
            Self::Observed => (-2.0, -1.0),
        }
    }
}

/// -2 Delta' B - grad f _| nabla B - 2 B^2 + 2 A^2 + [B, A] - [Ric*, B] - 2 B
pub fn evol_b_rhs(state: &KahlerState, b: &TensorField, a: &TensorField) -> Result<TensorField> {
    evol_b_rhs_form(state, b, a, EvolutionForm::Printed)
}

/// -2 Delta'' A - grad f _| nabla A + A del grad f + del grad f A - 2 B A
pub fn evol_a_rhs(state: &KahlerState, b: &TensorField, a: &TensorField) -> Result<TensorField> {
    evol_a_rhs_form(state, b, a, EvolutionForm::Printed)
}

pub fn evol_b_rhs_form(state: &KahlerState, b: &TensorField, a: &TensorField, form: EvolutionForm) -> Result<TensorField> {
    let (m, j) = (state.metric(), state.j());
    let grad = gradient(state.f(), m)?;
    let ric = sharp(&ricci(m), m)?;
    TensorField::combine(&[
        (-2.0, &laplacian_del(b, m, j)?),
        (-1.0, &hook(&grad, &covariant_derivative(b, m)?)?),
        (-2.0, &b.compose(b)?),
        (form.signs().0, &a.compose(a)?),
        (1.0, &b.commutator(a)?),
        (-1.0, &ric.commutator(b)?),
        (-2.0, b),
    ])
}

pub fn evol_a_rhs_form(state: &KahlerState, b: &TensorField, a: &TensorField, form: EvolutionForm) -> Result<TensorField> {
    let (m, j) = (state.metric(), state.j());
    let grad = gradient(state.f(), m)?;
    let dgf = nabla_10(&grad, m, j)?;
    TensorField::combine(&[
        (-2.0, &laplacian_dbar(a, m, j)?),
        (-1.0, &hook(&grad, &covariant_derivative(a, m)?)?),
        (form.signs().1, &a.compose(&dgf)?.add(&dgf.compose(a)?)?),
        (-2.0, &b.compose(a)?),
    ])
}

/// Relative residuals of 2 (X_{k+1} - X_k) / dt against the right-hand sides
/// at step k, for B and A.
pub fn evolution_residuals(s0: &FlowState, s1: &FlowState, form: EvolutionForm) -> Result<(f64, f64)> {
    let dt = s1.t - s0.t;
    if !(dt > 0.0) {
        return contract("evolution check needs increasing times");
    }
    let bd = s1.b.sub(&s0.b)?.scale(2.0 / dt);
    let ad = s1.a.sub(&s0.a)?.scale(2.0 / dt);
    let rb = relative_residual(&bd, &evol_b_rhs_form(&s0.state, &s0.b, &s0.a, form)?)?;
    let ra = relative_residual(&ad, &evol_a_rhs_form(&s0.state, &s0.b, &s0.a, form)?)?;
    Ok((rb, ra))
}

pub const MIN_DECAY_ORDER: f64 = 0.9;

/// Residuals of the written equations at t = 0 and mid-run, plus the
/// observed sign pattern at t = 0 for comparison. All soft: see
/// `evolution_refinement` for the gating check.
pub fn check_evolution(traj: &Trajectory) -> Result<ResidualReport> {
    let n = traj.states.len();
    if n < 2 {
        return contract("evolution check needs at least two recorded states");
    }
    let mut rep = ResidualReport::new();
    let (rb, ra) = evolution_residuals(&traj.states[0], &traj.states[1], EvolutionForm::Printed)?;
    // single-step values carry the O(dt) forward-difference error; the
    // refinement records decide
    rep.push(Residual::new("evol_b_t0", "evolution of B at t = 0", "rel_linf", rb, T0_TOL).soft());
    rep.push(Residual::new("evol_a_t0", "evolution of A at t = 0", "rel_linf", ra, T0_TOL).soft());
    let (rb, ra) = evolution_residuals(&traj.states[0], &traj.states[1], EvolutionForm::Observed)?;
    rep.push(Residual::new("evol_b_t0_observed", "evolution of B at t = 0, -2A^2 sign", "rel_linf", rb, T0_TOL).soft());
    rep.push(Residual::new("evol_a_t0_observed", "evolution of A at t = 0, -(A del grad f + del grad f A) sign", "rel_linf", ra, T0_TOL).soft());
    if n >= 3 {
        let k = (n - 1) / 2;
        let (rb, ra) = evolution_residuals(&traj.states[k], &traj.states[k + 1], EvolutionForm::Printed)?;
        rep.push(Residual::new("evol_b_mid", "evolution of B mid-run", "rel_linf", rb, MID_TOL).soft());
        rep.push(Residual::new("evol_a_mid", "evolution of A mid-run", "rel_linf", ra, MID_TOL).soft());
    }
    Ok(rep)
}

/// t = 0 residuals (dt, B, A) for one RK4 step at each dt of the ladder.
pub fn evolution_ladder(initial: &KahlerState, dts: &[f64], variant: FlowVariant, form: EvolutionForm) -> Result<Vec<(f64, f64, f64)>> {
    let s0 = FlowState::new(0.0, initial.clone(), variant)?;
    dts.iter()
        .map(|&h| {
            let cfg = FlowConfig::new(h, 1).with_variant(variant);
            let s1 = FlowState::new(h, flow_step(initial, h, &cfg)?, variant)?;
            let (rb, ra) = evolution_residuals(&s0, &s1, form)?;
            Ok((h, rb, ra))
        })
        .collect()
}

/// log2(r1 / r2), infinite when both are at rounding level (exact solutions).
fn decay_order(r1: f64, r2: f64) -> f64 {
    if r1 <= 1e-12 && r2 <= 1e-12 {
        f64::INFINITY
    } else {
        (r1 / r2).log2()
    }
}

/// The forward difference carries an O(dt) error, so the t = 0 residual is
/// judged at the finest step of the halving ladder dt, dt/2, dt/4, with the
/// decay order of the last halving required to be about one.
pub fn evolution_refinement(initial: &KahlerState, dt: f64, variant: FlowVariant, form: EvolutionForm) -> Result<ResidualReport> {
    let rows = evolution_ladder(initial, &[dt, 0.5 * dt, 0.25 * dt], variant, form)?;
    let suffix = match form {
        EvolutionForm::Printed => "",
        EvolutionForm::Observed => "_observed",
    };
    let (_, b1, a1) = rows[1];
    let (_, b2, a2) = rows[2];
    let mut rep = ResidualReport::new();
    for (name, r1, r2) in [("b", b1, b2), ("a", a1, a2)] {
        let mut r = Residual::new(&format!("evol_{name}_refined{suffix}"), &format!("evolution of {} at t = 0 under dt refinement", name.to_uppercase()), "rel_linf", r2, T0_TOL)
            .with_order(decay_order(r1, r2), MIN_DECAY_ORDER);
        if form == EvolutionForm::Observed {
            r = r.soft();
        }
        rep.push(r);
    }
    Ok(rep)
}
