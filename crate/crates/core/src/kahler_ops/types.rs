use crate::error::{contract, Result};
use crate::riemannian_core::{covariant_derivative, flat, sharp, transpose_g, MetricField};
use crate::spectral_fields::{linf, TensorField, BILINEAR, ENDO};

fn check_endo(s: &TensorField, j: &TensorField) -> Result<()> {
    if s.slots() != ENDO || j.slots() != ENDO {
        return contract("expected endomorphism fields");
    }
    Ok(())
}

/// J S J
pub fn conjugate_by_j(s: &TensorField, j: &TensorField) -> Result<TensorField> {
    check_endo(s, j)?;
    j.compose(&s.compose(j)?)
}

/// J-linear part 1/2 (S - J S J).
pub fn endo_10(s: &TensorField, j: &TensorField) -> Result<TensorField> {
    let jsj = conjugate_by_j(s, j)?;
    Ok(s.sub(&jsj)?.scale(0.5))
}

/// J-anti-linear part 1/2 (S + J S J).
pub fn endo_01(s: &TensorField, j: &TensorField) -> Result<TensorField> {
    let jsj = conjugate_by_j(s, j)?;
    Ok(s.add(&jsj)?.scale(0.5))
}

pub fn type_project_endo(s: &TensorField, j: &TensorField) -> Result<(TensorField, TensorField)> {
    Ok((endo_10(s, j)?, endo_01(s, j)?))
}

/// (J^* h J)(xi, eta) = h(J xi, J eta)
pub fn pullback_j(h: &TensorField, j: &TensorField) -> Result<TensorField> {
    if h.slots() != BILINEAR {
        return contract("expected a covariant 2-tensor");
    }
    h.precompose_slot(0, j)?.precompose_slot(1, j)
}

/// (h A)(xi, eta) = h(A xi, eta)
pub fn form_times_endo(h: &TensorField, a: &TensorField) -> Result<TensorField> {
    if h.slots() != BILINEAR {
        return contract("expected a covariant 2-tensor");
    }
    h.precompose_slot(0, a)
}

/// J-invariant part h' and J-anti-invariant part h''.
pub fn type_project_form(h: &TensorField, j: &TensorField) -> Result<(TensorField, TensorField)> {
    let jhj = pullback_j(h, j)?;
    Ok((h.add(&jhj)?.scale(0.5), h.sub(&jhj)?.scale(0.5)))
}

/// omega = g J, omega(xi, eta) = g(J xi, eta).
pub fn kahler_form(m: &MetricField, j: &TensorField) -> Result<TensorField> {
    form_times_endo(m.g(), j)
}

/// alpha*_g = omega^{-1} alpha, i.e. omega(alpha* xi, eta) = alpha(xi, eta).
pub fn omega_sharp(alpha: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    Ok(j.compose(&sharp(alpha, m)?)?.scale(-1.0))
}

/// Algebraic and differential residuals of a (g, J) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResiduals {
    /// ||J^2 + I||
    pub square: f64,
    /// ||g - J^* g J||
    pub compatibility: f64,
    /// ||J + J^T_g||
    pub skew: f64,
    /// ||nabla_g J||
    pub kahler: f64,
}

pub fn structure_residuals(m: &MetricField, j: &TensorField) -> Result<StructureResiduals> {
    let id = TensorField::identity(*m.grid());
    let square = linf(&j.compose(j)?.add(&id)?);
    let compatibility = linf(&m.g().sub(&pullback_j(m.g(), j)?)?);
    let skew = linf(&j.add(&transpose_g(j, m)?)?);
    let kahler = linf(&covariant_derivative(j, m)?);
    Ok(StructureResiduals { square, compatibility, skew, kahler })
}

/// ||h'' - g (h*)^{0,1}|| and ||h' - g (h*)^{1,0}|| (trivial identities of the type split).
pub fn form_endo_type_gap(h: &TensorField, m: &MetricField, j: &TensorField) -> Result<(f64, f64)> {
    let (hp, hpp) = type_project_form(h, j)?;
    let (s10, s01) = type_project_endo(&sharp(h, m)?, j)?;
    Ok((linf(&hp.sub(&flat(&s10, m)?)?), linf(&hpp.sub(&flat(&s01, m)?)?)))
}
