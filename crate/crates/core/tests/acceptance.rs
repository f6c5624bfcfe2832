//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see
//! the table. Failures listed in `KNOWN_FAILURES` are reported but do not fail
//! the test; any other failure, or a known one that starts passing, does.

use std::collections::BTreeSet;
use std::time::Instant;

use kvc_core::bakry_emery::{ricci_form_density, KahlerState};
use kvc_core::cli_harness::{self, ScenarioConfig};
use kvc_core::kahler_ops::*;
use kvc_core::report::ResidualReport;
use kvc_core::riemannian_core::omega_laplacian;
use kvc_core::spectral_fields::*;
use kvc_core::variation_engine::*;

mod common;
use common::*;

const STATIC_LIMIT: f64 = 1e-7;
const STATIC_RUNTIME_S: f64 = 60.0;
const FD_LIMIT: f64 = 1e-4;
const FD_ORDER: f64 = 1.9;
const VARIATION_RUNTIME_S: f64 = 300.0;
const CROSS_LIMIT: f64 = 1e-7;
const ORACLE_LIMIT: f64 = 1e-7;
const ADJOINT_LIMIT: f64 = 1e-8;
const ADJOINT_SAMPLES: u64 = 10;
const HOMOTHETY_LIMIT: f64 = 1e-10;
const J_INVARIANT_LIMIT: f64 = 1e-9;
const GROWTH_LIMIT: f64 = 10.0;
const EVOLUTION_LIMIT: f64 = 1e-3;
// observed order of the last dt halving; 1 is first order
const FIRST_ORDER: f64 = 0.9;
const CONSTRAINT_LIMIT: f64 = 1e-8;
const NEGATIVE_FLOOR: f64 = 1e-3;

/// Criteria the flow as written does not meet; see the README.
const KNOWN_FAILURES: &[&str] = &["6e", "6f"];

struct Table {
    rows: Vec<(String, bool)>,
}

impl Table {
    fn line(&mut self, id: &str, what: &str, pass: bool, detail: String, since: Instant) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {id:<3} {what:<46} {detail} ({:.1} s)", since.elapsed().as_secs_f64());
        self.rows.push((id.to_string(), pass));
    }
}

fn probe(s: &KahlerState) -> TensorField {
    TensorField::from_fn(*s.grid(), VECTOR, |idx, x| {
        let tau = std::f64::consts::TAU;
        match idx[0] {
            0 => 0.2 + 0.3 * (tau * x[1]).sin(),
            1 => 0.1 * (tau * x[0]).cos(),
            _ => 0.05 * (tau * (x[0] + x[idx[0]])).sin(),
        }
    })
}

fn d_sample(s: &KahlerState) -> VariationDatum {
    let u = random_field(s.grid(), SCALAR, 3, 1, 0.02, 21);
    let psi = random_field(s.grid(), SCALAR, 3, 1, 0.015, 22);
    sample_d_exact(s, &u, &psi, 0.1).unwrap()
}

fn f_sample(s: &KahlerState) -> VariationDatum {
    let u = random_field(s.grid(), SCALAR, 3, 1, 0.02, 23);
    sample_f(s, &u, 0.1, 1e-8).unwrap()
}

fn max_residual(rep: &ResidualReport) -> f64 {
    rep.records.iter().filter(|r| !r.soft).map(|r| r.residual).fold(0.0, f64::max)
}

fn static_suite(t: &mut Table) {
    let start = Instant::now();
    let mut count = usize::MAX;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for s in [curved_n1(), curved_n2()] {
        let rep = static_identity_suite(&s, &IdentitySamples::random(&s, 3).unwrap()).unwrap();
        let hard: Vec<_> = rep.records.iter().filter(|r| !r.soft).collect();
        count = count.min(hard.len());
        worst = worst.max(max_residual(&rep));
        ok &= hard.iter().all(|r| r.residual <= STATIC_LIMIT);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = ok && count >= 20 && secs <= STATIC_RUNTIME_S;
    t.line("1", "static identity suite, n=1 res 64 and n=2 res 16", pass, format!("{count} identities, max {worst:.2e} <= {STATIC_LIMIT:.0e}, {secs:.1} s <= {STATIC_RUNTIME_S} s"), start);
}

fn variation_formulas(t: &mut Table) {
    let start = Instant::now();
    let mut ids = BTreeSet::new();
    let mut worst: f64 = 0.0;
    let mut min_order = f64::INFINITY;
    let mut ok = true;
    let cases = [(curved_n1(), false), (curved_n2(), false), (pulled_back_n1(), true)];
    for (s, in_f) in cases {
        let datum = if in_f { f_sample(&s) } else { d_sample(&s) };
        let rep = variation_suite(&PathIntegrator::new(datum), &probe(&s)).unwrap();
        for r in &rep.records {
            ids.insert(r.check_id.clone());
            worst = worst.max(r.residual);
            if let Some(o) = r.order {
                min_order = min_order.min(o);
            }
            ok &= r.residual <= FD_LIMIT && r.order.map_or(true, |o| o >= FD_ORDER);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = ok && ids.len() == FormulaId::ALL.len() && secs <= VARIATION_RUNTIME_S;
    t.line("2", "variation formulas against FD + Richardson", pass, format!("{} formulas, max {worst:.2e} <= {FD_LIMIT:.0e}, min order {min_order:.2} >= {FD_ORDER}, {secs:.1} s", ids.len()), start);
}

fn cross_formula(t: &mut Table) {
    let start = Instant::now();
    let s = pulled_back_n1();
    let d = f_sample(&s);
    let xi = probe(&s);
    let pair = |x: FormulaId, y: FormulaId| relative_residual(&x.rhs(&d, &xi).unwrap(), &y.rhs(&d, &xi).unwrap()).unwrap();
    let a = pair(FormulaId::ThmA, FormulaId::PartA);
    let b = pair(FormulaId::ThmB, FormulaId::PartB);
    let lap = omega_laplacian(d.v(), s.metric(), s.f()).unwrap().scale(-1.0);
    let om = relative_residual(&FormulaId::VarOmRic.rhs(&d, &xi).unwrap(), &lap).unwrap();
    let pass = a.max(b).max(om) <= CROSS_LIMIT;
    t.line("3", "THM/PART reductions and weighted Laplacian on F", pass, format!("A {a:.2e}, B {b:.2e}, Laplacian {om:.2e} <= {CROSS_LIMIT:.0e}"), start);
}

fn oracles(t: &mut Table) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let phi1 = kvc_core::spectral_fields::FourierSpec::new().cos(&[1, 0], 0.05).sin(&[0, 1], 0.03);
    let flat_h = kvc_core::spectral_fields::FourierSpec::new();
    let frame_cases = [
        (KahlerState::potential(&grid(1, 64), &phi1, &flat_h).unwrap(), phi1.clone()),
        (curved_n2(), phi_n2()),
    ];
    for (s, phi) in &frame_cases {
        let (ga, gr) = complex_frame_oracle(s.metric(), phi).unwrap();
        worst = worst.max(ga).max(gr);
    }
    for s in [curved_n1(), generic_n1(), curved_n2()] {
        let r = relative_residual(&s.ricci_form_omega().unwrap(), &ricci_form_density(&s).unwrap()).unwrap();
        worst = worst.max(r);
    }
    t.line("4", "complex-frame and log-det density oracles", worst <= ORACLE_LIMIT, format!("max {worst:.2e} <= {ORACLE_LIMIT:.0e}"), start);
}

fn adjointness(t: &mut Table) {
    let start = Instant::now();
    let form2: &[Slot] = &[Slot::Co, Slot::Co, Slot::Contra];
    let s = curved_n1();
    let (m, j, f) = (s.metric(), s.j(), s.f());
    let pairing = |a: &TensorField, b: &TensorField| l2_omega(a, b, s.g(), m.ginv(), s.rho()).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..ADJOINT_SAMPLES {
        let a = random_field(s.grid(), ENDO, 3, 2, 0.2, 500 + seed);
        let beta = random_field(s.grid(), form2, 3, 2, 0.1, 600 + seed);
        let beta = beta.sub(&beta.transpose_slots(0, 1).unwrap()).unwrap();
        for (l, r) in [
            (pairing(&dbar_tx(&a, m, j).unwrap(), &beta), pairing(&a, &adjoint_dbar_omega(&beta, m, j, f).unwrap())),
            (pairing(&del_tx(&a, m, j).unwrap(), &beta), pairing(&a, &adjoint_del_omega(&beta, m, j, f).unwrap())),
        ] {
            worst = worst.max((l - r).abs() / l.abs().max(1.0));
        }
    }
    t.line("5", "L2(Omega) adjointness of dbar and del", worst <= ADJOINT_LIMIT, format!("{ADJOINT_SAMPLES} samples, max {worst:.2e} <= {ADJOINT_LIMIT:.0e}"), start);
}

fn flow(t: &mut Table) {
    let start = Instant::now();
    let cfg = ScenarioConfig::from_json(r#"{"n": 1, "resolution": 32, "dt": 1e-3, "steps": 10}"#).unwrap();
    let (out, _) = cli_harness::flow(&cfg).unwrap();
    let h = out.report.get("homothety").unwrap().residual;
    t.line("6a", "homothety over 10 RK4 steps at dt 1e-3", h <= HOMOTHETY_LIMIT, format!("{h:.2e} <= {HOMOTHETY_LIMIT:.0e}"), start);

    let start = Instant::now();
    let cfg = ScenarioConfig::from_json(
        r#"{"n": 1, "resolution": 64, "h": [{"mode": [1, 0], "amplitude": 0.1}], "dt": 1e-4, "steps": 100}"#,
    )
    .unwrap();
    let (out, traj) = cli_harness::flow(&cfg).unwrap();
    let rep = &out.report;
    let complete = traj.abort.is_none() && traj.states.len() == 101;
    let jinv = rep.get("j_invariants").unwrap().residual;
    t.line("6b", "perturbed run: J invariants over 100 steps", complete && jinv <= J_INVARIANT_LIMIT, format!("{jinv:.2e} <= {J_INVARIANT_LIMIT:.0e}"), start);
    let growth = rep.get("constraint_growth").unwrap().residual;
    t.line("6c", "perturbed run: constraint growth", complete && growth <= GROWTH_LIMIT, format!("{growth:.2} <= {GROWTH_LIMIT}x"), start);
    for (id, check, what) in [("6d", "evol_a_refined", "evol-A at t = 0, first-order decay"), ("6e", "evol_b_refined", "evol-B at t = 0, first-order decay")] {
        let r = rep.get(check).unwrap();
        let order = r.order.unwrap_or(f64::NAN);
        let pass = r.residual <= EVOLUTION_LIMIT && order >= FIRST_ORDER;
        t.line(id, what, pass, format!("{:.2e} <= {EVOLUTION_LIMIT:.0e}, order {order:.2} >= {FIRST_ORDER}", r.residual), start);
    }
    let c = rep.get("constraint_t0").unwrap().residual;
    t.line("6f", "flat start: dbar B = del A at t = 0", c <= CONSTRAINT_LIMIT, format!("{c:.2e} <= {CONSTRAINT_LIMIT:.0e}"), start);
}

fn negative_controls(t: &mut Table) {
    let start = Instant::now();
    // the commutation identity is vacuous in complex dimension one
    let s = KahlerState::flat(&grid(2, 8), &kvc_core::spectral_fields::FourierSpec::new().cos(&[1, 0, 0, 0], 0.1)).unwrap();
    let mut smp = IdentitySamples::random(&s, 11).unwrap();
    let raw = random_field(s.grid(), BILINEAR, 3, 1, 0.05, 7);
    let raw = raw.add(&raw.transpose_slots(0, 1).unwrap()).unwrap().scale(0.5);
    smp.f_datum = Some(VariationDatum::new(s.clone(), raw).unwrap());
    let dadd = static_identity_suite(&s, &smp).unwrap().get("dadd").unwrap().residual;

    let d = d_sample(&curved_n1());
    let w = random_field(d.state().grid(), ENDO, 2, 1, 0.05, 5);
    let path = PathIntegrator::new(d).with_skew_drift(w).unwrap();
    let lemma = check_formula(&path, FormulaId::VrORcFm, &probe(path.datum().state())).unwrap().residual;
    let pass = dadd > NEGATIVE_FLOOR && lemma > NEGATIVE_FLOOR;
    t.line("7", "negative controls: v not in F, skew J' path", pass, format!("dadd {dadd:.2e}, Ricci variation {lemma:.2e} > {NEGATIVE_FLOOR:.0e}"), start);
}

fn determinism(t: &mut Table) {
    let start = Instant::now();
    let cfg = ScenarioConfig::from_json(
        r#"{"n": 1, "resolution": 32, "phi": [{"mode": [1, 0], "amplitude": 0.05}], "h": [{"mode": [0, 1], "amplitude": 0.1}],
            "variations": {"u": [{"u": [{"mode": [1, 1], "amplitude": 0.02}]}]}, "dt": 1e-4, "steps": 5, "seed": 9}"#,
    )
    .unwrap();
    let run = || {
        [
            cli_harness::identities(&cfg).unwrap().report.to_csv(),
            cli_harness::variations(&cfg).unwrap().report.to_csv(),
            cli_harness::flow(&cfg).unwrap().0.report.to_csv(),
        ]
    };
    let (a, b) = (run(), run());
    t.line("8", "repeated runs give byte-identical CSV", a == b, format!("{} bytes compared", a.iter().map(String::len).sum::<usize>()), start);
}

#[test]
fn acceptance() {
    let mut t = Table { rows: Vec::new() };
    static_suite(&mut t);
    variation_formulas(&mut t);
    cross_formula(&mut t);
    oracles(&mut t);
    adjointness(&mut t);
    flow(&mut t);
    negative_controls(&mut t);
    determinism(&mut t);

    let failed: Vec<&str> = t.rows.iter().filter(|(_, p)| !p).map(|(id, _)| id.as_str()).collect();
    let unexpected: Vec<_> = failed.iter().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    let fixed: Vec<_> = KNOWN_FAILURES.iter().filter(|id| !failed.contains(id)).collect();
    println!("{} of {} criteria pass; known failures: {KNOWN_FAILURES:?}", t.rows.len() - failed.len(), t.rows.len());
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
    assert!(fixed.is_empty(), "known failures now pass, update KNOWN_FAILURES: {fixed:?}");
}
