//! The Chern-connection side of the Levi-Civita connection on a Kähler state,
//! evaluated with complex-valued forms split into real and imaginary parts.

use super::complex_ops::nabla_10;
use super::types::{kahler_form, pullback_j};
use crate::error::{contract, Result};
use crate::riemannian_core::{exterior_derivative, sharp, MetricField};
use crate::spectral_fields::{linf, TensorField, VECTOR};

/// Residuals of xi _| h = -2i xi^{1,0} _| omega, h = g - i omega, as
/// (real part gap, imaginary part gap).
pub fn key_contract_residual(xi: &TensorField, m: &MetricField, j: &TensorField) -> Result<(f64, f64)> {
    if xi.slots() != VECTOR {
        return contract("key contraction needs a vector field");
    }
    let omega = kahler_form(m, j)?;
    let jxi = j.apply(xi)?;
    // left: g(xi, .) - i omega(xi, .)
    let l_re = m.g().insert(0, xi)?;
    let l_im = omega.insert(0, xi)?.scale(-1.0);
    // right: -2i * 1/2 (omega(xi, .) - i omega(J xi, .))
    let r_re = omega.insert(0, &jxi)?.scale(-1.0);
    let r_im = omega.insert(0, xi)?.scale(-1.0);
    Ok((linf(&l_re.sub(&r_re)?), linf(&l_im.sub(&r_im)?)))
}

/// The displayed g-inverse expression for the (1,0) Chern derivative of a
/// real vector field, as an endomorphism eta -> mu(eta).
pub fn chern_del(xi: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    if xi.slots() != VECTOR {
        return contract("chern_del needs a vector field");
    }
    // beta = g(xi^{1,0}, .) = 1/2 (g(xi, .) - i g(J xi, .))
    let b_re = m.g().insert(0, xi)?.scale(0.5);
    let b_im = m.g().insert(0, &j.apply(xi)?)?.scale(-0.5);
    let da_re = exterior_derivative(&b_re)?;
    let da_im = exterior_derivative(&b_im)?;
    // (1,1) part of a 2-form is its J-invariant part
    let d_re = da_re.add(&pullback_j(&da_re, j)?)?.scale(0.5);
    let d_im = da_im.add(&pullback_j(&da_im, j)?)?.scale(0.5);
    // 2 Re[eta^{1,0} _| i D] = -Im D(eta, .) + Re D(J eta, .)
    let two_re = d_re.precompose_slot(0, j)?.sub(&d_im)?;
    let e = sharp(&two_re, m)?;
    Ok(j.compose(&e)?.scale(-1.0))
}

/// ||chern_del(xi) - nabla^{1,0} xi||_inf
pub fn chern_connection_check(xi: &TensorField, m: &MetricField, j: &TensorField) -> Result<f64> {
    let a = chern_del(xi, m, j)?;
    let b = nabla_10(xi, m, j)?;
    Ok(linf(&a.sub(&b)?))
}
