use std::f64::consts::PI;

use kvc_core::kahler_ops::complex_frame_oracle;
use kvc_core::riemannian_core::*;
use kvc_core::spectral_fields::*;
use proptest::prelude::*;

mod common;
use common::*;

#[test]
fn flat_derivative_is_partial() {
    let g = grid(1, 32);
    let m = MetricField::flat(g);
    let t = random_field(&g, ENDO, 3, 3, 1.0, 4);
    let a = covariant_derivative(&t, &m).unwrap();
    assert!(linf(&a.sub(&t.partials()).unwrap()) <= 1e-14);
    assert!(linf(&curvature(&m)) == 0.0);
}

#[test]
fn metric_compatibility_and_torsion_free() {
    for s in [curved_n1(), generic_n1(), curved_n2(), pulled_back_n1()] {
        let m = s.metric();
        assert!(linf(&covariant_derivative(m.g(), m).unwrap()) <= 1e-9);
        assert!(m.inverse_residual() <= 1e-10);
        let u = FourierSpec::random(m.grid(), 3, 2, 0.1, 7).synthesize(m.grid()).unwrap();
        let h = hessian(&u, m).unwrap();
        assert!(linf(&h.sub(&h.transpose_slots(0, 1).unwrap()).unwrap()) <= 1e-9);
    }
}

#[test]
fn ricci_is_symmetric() {
    for s in [curved_n1(), curved_n2()] {
        let r = ricci(s.metric());
        let gap = linf(&r.sub(&r.transpose_slots(0, 1).unwrap()).unwrap());
        assert!(gap <= 1e-10, "asymmetry {gap:e} of {:e}", linf(&r));
    }
}

#[test]
fn pulled_back_flat_has_zero_curvature() {
    let s = pulled_back_n1();
    assert!(linf(s.metric().christoffel()) > 1e-3);
    assert!(linf(&curvature(s.metric())) <= 1e-8);
}

#[test]
fn contracted_bianchi() {
    for s in [curved_n1(), curved_n2()] {
        let m = s.metric();
        let div = divergence(&ricci(m), m).unwrap();
        let ds = scalar_curvature(m).partials().scale(0.5);
        assert!(relative_residual(&div, &ds).unwrap() <= 1e-7);
    }
}

#[test]
fn flat_laplacian_positive_convention() {
    let g = grid(1, 64);
    let m = MetricField::flat(g);
    let c = FourierSpec::new().cos(&[1, 0], 1.0).synthesize(&g).unwrap();
    let l = rough_laplacian(&c, &m).unwrap();
    assert!(linf(&l.sub(&c.scale(4.0 * PI * PI)).unwrap()) <= 1e-9);
    let k = TensorField::constant_scalar(g, 2.0);
    assert!(linf(&hessian(&k, &m).unwrap()) <= 1e-14);
}

#[test]
fn omega_divergence_two_routes() {
    let s = curved_n1();
    let m = s.metric();
    let f = s.f();
    for (slots, seed) in [(COVECTOR, 1u64), (BILINEAR, 2), (ENDO, 3)] {
        let a = random_field(m.grid(), slots, 3, 3, 1.0, seed);
        let direct = omega_divergence(&a, m, f).unwrap();
        let w = f.map(|x| (-x).exp());
        let via = divergence(&a.mul_scalar(&w).unwrap(), m).unwrap().mul_scalar(&f.map(f64::exp)).unwrap();
        assert!(relative_residual(&direct, &via).unwrap() <= 1e-9, "{slots:?}");
    }
    // f = 0 reduces to div
    let flat_vol = s.with_riemannian_volume().unwrap();
    assert!(linf(flat_vol.f()) <= 1e-12);
}

#[test]
fn constant_one_form_is_divergence_free() {
    let g = grid(2, 8);
    let a = TensorField::constant(g, COVECTOR, &[1.0, -2.0, 0.5, 3.0]).unwrap();
    assert!(linf(&divergence(&a, &MetricField::flat(g)).unwrap()) <= 1e-14);
}

#[test]
fn d_operator_kills_metric() {
    for s in [curved_n1(), curved_n2()] {
        assert!(linf(&d_operator(s.g(), s.metric()).unwrap()) <= 1e-8);
    }
    let s = curved_n1();
    let u = FourierSpec::new().cos(&[1, 1], 0.1).synthesize(s.grid()).unwrap();
    let a = symmetrized_nabla(&u, s.metric()).unwrap();
    assert_eq!(a, covariant_derivative(&u, s.metric()).unwrap());
}

#[test]
fn musical_round_trips() {
    let s = curved_n1();
    let m = s.metric();
    let id = TensorField::identity(*m.grid());
    assert!(linf(&sharp(m.g(), m).unwrap().sub(&id).unwrap()) <= 1e-12);
    let v = random_field(m.grid(), BILINEAR, 3, 3, 1.0, 8);
    assert!(linf(&flat(&sharp(&v, m).unwrap(), m).unwrap().sub(&v).unwrap()) <= 1e-12);
    let jt = transpose_g(s.j(), m).unwrap();
    assert!(linf(&jt.add(s.j()).unwrap()) <= 1e-10);
}

#[test]
fn laplacian_adjointness_in_weighted_l2() {
    let s = generic_n1();
    let m = s.metric();
    let f = s.f();
    let rho = s.rho();
    for seed in 0..3u64 {
        let t = random_field(m.grid(), ENDO, 3, 3, 1.0, seed);
        let u = random_field(m.grid(), ENDO, 3, 3, 1.0, 100 + seed);
        let lhs = l2_omega(&omega_laplacian(&t, m, f).unwrap(), &u, m.g(), m.ginv(), rho).unwrap();
        let nt = covariant_derivative(&t, m).unwrap();
        let nu = covariant_derivative(&u, m).unwrap();
        let rhs = l2_omega(&nt, &nu, m.g(), m.ginv(), rho).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0), "{lhs} {rhs}");
        // nabla^* = -div^Omega
        let ss = random_field(m.grid(), &[Slot::Co, Slot::Co, Slot::Contra], 3, 3, 1.0, 200 + seed);
        let a = l2_omega(&nt, &ss, m.g(), m.ginv(), rho).unwrap();
        let b = l2_omega(&t, &omega_divergence(&ss, m, f).unwrap().scale(-1.0), m.g(), m.ginv(), rho).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
    }
}

#[test]
fn frame_oracle_matches_real_route() {
    let g = grid(1, 64);
    let phi = FourierSpec::new().cos(&[1, 0], 0.05).sin(&[0, 1], 0.03);
    let s = kvc_core::bakry_emery::KahlerState::potential(&g, &phi, &FourierSpec::new()).unwrap();
    let (ga, gr) = complex_frame_oracle(s.metric(), &phi).unwrap();
    assert!(ga <= 1e-8, "connection gap {ga}");
    assert!(gr <= 1e-7, "ricci gap {gr}");
    let s2 = curved_n2();
    let (ga, gr) = complex_frame_oracle(s2.metric(), &phi_n2()).unwrap();
    assert!(ga <= 1e-8, "connection gap {ga}");
    assert!(gr <= 1e-7, "ricci gap {gr}");
}

#[test]
fn flat_frame_connection_vanishes() {
    let g = grid(1, 16);
    let (ga, gr) = complex_frame_oracle(&MetricField::flat(g), &FourierSpec::new()).unwrap();
    assert!(ga == 0.0 && gr <= 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn covariant_leibniz_rule(seed in 0u64..1000) {
        let s = curved_n1();
        let m = s.metric();
        let a = random_field(m.grid(), COVECTOR, 2, 3, 1.0, seed);
        let xi = random_field(m.grid(), VECTOR, 2, 3, 1.0, seed + 7);
        let pair = a.contract(0, &xi, 0).unwrap();
        let lhs = pair.partials();
        let rhs = covariant_derivative(&a, m).unwrap().contract(1, &xi, 0).unwrap()
            .add(&covariant_derivative(&xi, m).unwrap().contract(1, &a, 0).unwrap()).unwrap();
        prop_assert!(relative_residual(&lhs, &rhs).unwrap() <= 1e-9);
    }
}

#[test]
fn ricci_is_trace_of_riemann() {
    for s in [curved_n1(), curved_n2()] {
        let a = ricci(s.metric());
        let b = curvature(s.metric()).trace(0, 3).unwrap();
        assert!(relative_residual(&b, &a).unwrap() <= 1e-8);
    }
}
