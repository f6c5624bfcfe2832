use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use super::config::ScenarioConfig;
use crate::bakry_emery::KahlerState;
use crate::error::{Error, Result};
use crate::kahler_ops::{chern_connection_check, structure_residuals};
use crate::report::{Residual, ResidualReport};
use crate::riemannian_core::omega_laplacian;
use crate::soliton_flow::{
    check_evolution, evolution_refinement, export_trajectory, run_flow, EvolutionForm, Trajectory,
};
use crate::spectral_fields::{linf, random_field, relative_residual, TensorField, BILINEAR, VECTOR};
use crate::variation_engine::{
    kahler_defect_check, membership_d, membership_f, project, sample_d_exact, static_identity_suite, variation_suite,
    Constraint, FormulaId, IdentitySamples, PathIntegrator, VariationDatum, MEMBERSHIP_TOL, STATIC_TOL,
};

/// What a command produced: the report, and an abort if the run ended early.
#[derive(Debug)]
pub struct Outcome {
    pub report: ResidualReport,
    pub abort: Option<String>,
}

pub fn initial_state(cfg: &ScenarioConfig) -> Result<KahlerState> {
    KahlerState::potential(&cfg.grid()?, &cfg.phi, &cfg.h)
}

/// Overrides from the config, then the command-line scale.
pub fn apply_tolerances(report: ResidualReport, cfg: &ScenarioConfig, scale: f64) -> ResidualReport {
    let records = report
        .records
        .into_iter()
        .map(|mut r| {
            if let Some(t) = cfg.tolerance {
                r = r.with_tolerance(t);
            }
            if let Some(&t) = cfg.tolerances.get(&r.check_id) {
                r = r.with_tolerance(t);
            }
            if scale != 1.0 {
                r = r.rescaled(scale);
            }
            r
        })
        .collect();
    ResidualReport { records }
}

fn ensure_unique(report: &ResidualReport) -> Result<()> {
    let mut seen = BTreeSet::new();
    match report.records.iter().find(|r| !seen.insert(r.check_id.as_str())) {
        Some(r) => Err(Error::Contract(format!("check_id {} reported twice", r.check_id))),
        None => Ok(()),
    }
}

/// Static identities, the decomposition identities and the structure
/// invariants of the configured state.
pub fn identities(cfg: &ScenarioConfig) -> Result<Outcome> {
    let start = Instant::now();
    let s = initial_state(cfg)?;
    let samples = IdentitySamples::random(&s, cfg.seed)?;
    let mut report = static_identity_suite(&s, &samples)?;
    let st = structure_residuals(s.metric(), s.j())?;
    for (id, anchor, value) in [
        ("j_square", "J^2 = -I", st.square),
        ("j_compatible", "g is J-invariant", st.compatibility),
        ("j_skew", "J is g-skew", st.skew),
        ("j_parallel", "J is parallel (Kähler)", st.kahler),
    ] {
        report.push(Residual::new(id, anchor, "linf", value, STATIC_TOL));
    }
    let chern = chern_connection_check(&samples.xi, s.metric(), s.j())?;
    report.push(Residual::new("chern_del", "Chern (1,0) derivative equals the typed Levi-Civita one", "linf", chern, STATIC_TOL));
    let elapsed = start.elapsed().as_secs_f64();
    report.records.iter_mut().for_each(|r| r.runtime_s = elapsed);
    Ok(Outcome { report, abort: None })
}

fn probe(cfg: &ScenarioConfig) -> Result<TensorField> {
    Ok(random_field(&cfg.grid()?, VECTOR, 3, 1, 0.5, cfg.seed ^ 0x9e37))
}

fn symmetric_raw(cfg: &ScenarioConfig, seed: u64, terms: usize, kmax: i64, amplitude: f64) -> Result<TensorField> {
    let v = random_field(&cfg.grid()?, BILINEAR, terms, kmax, amplitude, seed);
    Ok(v.add(&v.transpose_slots(0, 1)?)?.scale(0.5))
}

/// The variation data the config asks for, labelled.
pub fn variation_sources(cfg: &ScenarioConfig, s: &KahlerState) -> Result<Vec<(String, VariationDatum)>> {
    let grid = cfg.grid()?;
    let mut out = Vec::new();
    if cfg.variations.zero {
        out.push(("zero".to_string(), VariationDatum::zero(s.clone())?));
    }
    for (i, src) in cfg.variations.u.iter().enumerate() {
        let u = src.u.synthesize(&grid)?;
        let psi = src.psi.synthesize(&grid)?;
        out.push((format!("u{i}"), sample_d_exact(s, &u, &psi, src.c)?));
    }
    for (i, raw) in cfg.variations.raw_v.iter().enumerate() {
        let v = symmetric_raw(cfg, raw.seed, raw.terms, raw.kmax, raw.amplitude)?;
        if cfg.variations.project_d {
            out.push((format!("raw{i}_d"), project(s, &v, Constraint::D, 1e-8, 500)?.0));
        }
        if cfg.variations.project_f {
            out.push((format!("raw{i}_f"), project(s, &v, Constraint::F, 1e-8, 500)?.0));
        }
        out.push((format!("raw{i}"), VariationDatum::new(s.clone(), v)?));
    }
    Ok(out)
}

/// Every admissible formula for every source, plus the reductions on F and
/// the Kähler-defect exponent on D.
pub fn variations(cfg: &ScenarioConfig) -> Result<Outcome> {
    let s = initial_state(cfg)?;
    let xi = probe(cfg)?;
    let mut report = ResidualReport::new();
    for (label, datum) in variation_sources(cfg, &s)? {
        let in_d = membership_d(&datum)?.max() <= MEMBERSHIP_TOL;
        let in_f = in_d && membership_f(&datum)?.max() <= MEMBERSHIP_TOL;
        let path = PathIntegrator::new(datum.clone()).with_ladder(&cfg.eps_ladder);
        for mut r in variation_suite(&path, &xi)?.records {
            r.check_id = format!("{}@{label}", r.check_id);
            report.push(r);
        }
        if in_f {
            let start = Instant::now();
            let pair = |x: FormulaId, y: FormulaId| -> Result<f64> { relative_residual(&x.rhs(&datum, &xi)?, &y.rhs(&datum, &xi)?) };
            let lap = omega_laplacian(datum.v(), s.metric(), s.f())?.scale(-1.0);
            let om = relative_residual(&FormulaId::VarOmRic.rhs(&datum, &xi)?, &lap)?;
            for (id, anchor, value) in [
                ("thm_a_vs_part_a", "general anti-Hessian variation reduces on F", pair(FormulaId::ThmA, FormulaId::PartA)?),
                ("thm_b_vs_part_b", "general Ricci-endomorphism variation reduces on F", pair(FormulaId::ThmB, FormulaId::PartB)?),
                ("var_om_ric_vs_laplacian", "Bakry-Emery variation is minus the weighted Laplacian on F", om),
            ] {
                report.push(Residual::new(&format!("{id}@{label}"), anchor, "rel_linf", value, STATIC_TOL).timed(start));
            }
        }
        // in complex dimension one the defect vanishes identically and its
        // exponent is a ratio of rounding errors
        if in_d && cfg.n >= 2 && linf(datum.v()) > 0.0 {
            let start = Instant::now();
            let mut r = kahler_defect_check(&path)?.timed(start);
            r.check_id = format!("{}@{label}", r.check_id);
            report.push(r);
        }
    }
    Ok(Outcome { report, abort: None })
}

/// Runs the flow and checks it. The trajectory is returned even when the
/// run aborted.
pub fn flow(cfg: &ScenarioConfig) -> Result<(Outcome, Trajectory)> {
    let start = Instant::now();
    let s = initial_state(cfg)?;
    let traj = run_flow(s.clone(), &cfg.flow_config())?;
    let mut report = ResidualReport::new();
    let first = &traj.states[0].diagnostics;
    let states = &traj.states;
    let max_of = |f: &dyn Fn(&crate::soliton_flow::FlowDiagnostics) -> f64| states.iter().map(|st| f(&st.diagnostics)).fold(0.0, f64::max);

    if cfg.phi.is_empty() && cfg.h.is_empty() {
        let err = states
            .iter()
            .map(|st| Ok(linf(&st.state.g().sub(&s.g().scale((-st.t).exp()))?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        report.push(Residual::new("homothety", "g_t = e^{-t} g_0 from a flat unweighted start", "linf", err, 1e-10));
    }
    report.push(Residual::new("constraint_t0", "dbar B = del A at the start", "rel_linf", first.constraint, 1e-8));
    let growth = max_of(&|d| d.constraint) / first.constraint.max(1e-300);
    let growth = if max_of(&|d| d.constraint) <= 1e-12 { 1.0 } else { growth };
    report.push(Residual::new("constraint_growth", "constraint stays within 10x of its initial size", "ratio", growth, 10.0));
    let jinv = max_of(&|d| d.j_square.max(d.j_skew).max(d.kahler));
    report.push(Residual::new("j_invariants", "J^2 = -I, g-skew and parallel along the flow", "linf", jinv, 1e-9));
    report.push(Residual::new("ab_structure", "B J-linear, A J-anti-linear, both g-symmetric", "linf", max_of(&|d| d.ab_structure), 1e-8));
    report.push(Residual::new("omega_velocity", "omega'* = B along the flow", "rel_linf", max_of(&|d| d.omega_velocity), 1e-9));
    report.push(Residual::new("f_membership", "g' in F along the flow (diagnostic)", "rel_linf", max_of(&|d| d.f_membership), 1e-6).soft());
    report.push(Residual::new("soliton_ricci_gap_t0", "g' against Ric(Omega) - g at the start (diagnostic)", "rel_linf", first.soliton_ricci_gap, 1e-8).soft());
    report.push(Residual::new("reversed_gap_t0", "g' against g - Ric(Omega) at the start (diagnostic)", "rel_linf", first.reversed_gap, 1e-8).soft());
    if states.len() >= 2 {
        report.merge(check_evolution(&traj)?);
    }
    for form in [EvolutionForm::Printed, EvolutionForm::Observed] {
        match evolution_refinement(&s, cfg.dt, cfg.flow_variant, form) {
            Ok(r) => report.merge(r),
            // the run itself already broke down at this dt
            Err(Error::Numerical(_)) if traj.abort.is_some() => {}
            Err(e) => return Err(e),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.records.iter_mut().for_each(|r| r.runtime_s = elapsed);
    let abort = traj.abort.as_ref().map(|a| format!("step {} (t = {:e}): {}", a.step, a.t, a.reason));
    Ok((Outcome { report, abort }, traj))
}

/// Per-step diagnostics as CSV.
pub fn flow_series_csv(traj: &Trajectory) -> String {
    let mut s = String::from(
        "t,constraint,f_membership,kahler,j_square,j_skew,ab_structure,omega_velocity,soliton_ricci_gap,reversed_gap,spectral_tail\n",
    );
    for st in &traj.states {
        let d = &st.diagnostics;
        let _ = writeln!(
            s,
            "{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
            st.t, d.constraint, d.f_membership, d.kahler, d.j_square, d.j_skew, d.ab_structure, d.omega_velocity,
            d.soliton_ricci_gap, d.reversed_gap, d.spectral_tail
        );
    }
    s
}

pub fn write_report(dir: &Path, csv_name: &str, command: &str, cfg: &ScenarioConfig, outcome: &Outcome) -> Result<()> {
    ensure_unique(&outcome.report)?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(csv_name), outcome.report.to_csv())?;
    let mut summary: serde_json::Value = serde_json::from_str(&outcome.report.summary_json()?)?;
    summary["command"] = command.into();
    summary["config_hash"] = cfg.hash().into();
    summary["seed"] = cfg.seed.into();
    summary["abort"] = outcome.abort.clone().into();
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

pub fn write_flow_outputs(dir: &Path, cfg: &ScenarioConfig, traj: &Trajectory) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("flow_series.csv"), flow_series_csv(traj))?;
    export_trajectory(traj, &dir.join("trajectory"), &cfg.hash(), cfg.snapshot_every)?;
    Ok(())
}
