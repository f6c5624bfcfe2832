use super::field::{Slot, TensorField};
use crate::error::Result;

pub fn linf(t: &TensorField) -> f64 {
    t.data().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// L2 norm against the flat Lebesgue measure of the unit torus, summed over
/// components.
pub fn l2(t: &TensorField) -> f64 {
    let s: f64 = t.data().iter().map(|v| v * v).sum();
    (s / t.npts() as f64).sqrt()
}

/// ||a - b||_inf / max(1, ||b||_inf)
pub fn relative_residual(a: &TensorField, b: &TensorField) -> Result<f64> {
    let diff = a.sub(b)?;
    Ok(linf(&diff) / linf(b).max(1.0))
}

/// Like `relative_residual` but normalised by the larger of the two sides;
/// used when neither side is privileged.
pub fn symmetric_residual(a: &TensorField, b: &TensorField) -> Result<f64> {
    let diff = a.sub(b)?;
    Ok(linf(&diff) / linf(a).max(linf(b)).max(1.0))
}

/// Flat-measure integral of a scalar field.
pub fn integral(s: &TensorField) -> f64 {
    s.data().iter().sum::<f64>() / s.npts() as f64
}

/// Pointwise full contraction <S, T>_g using g on covariant slots and g^{-1}
/// on contravariant ones (no combinatorial factors).
pub fn pointwise_inner(s: &TensorField, t: &TensorField, g: &TensorField, ginv: &TensorField) -> Result<TensorField> {
    s.check_same(t)?;
    let mut acc = t.clone();
    for i in 0..acc.rank() {
        acc = match acc.slots()[i] {
            Slot::Co => acc.raise(i, ginv)?,
            Slot::Contra => acc.lower(i, g)?,
        };
    }
    let mut out = vec![0.0; s.npts()];
    for c in 0..s.ncomp() {
        for ((o, x), y) in out.iter_mut().zip(s.comp(c)).zip(acc.comp(c)) {
            *o += x * y;
        }
    }
    TensorField::scalar(*s.grid(), out)
}

/// L2(Omega) pairing: integral of <S, T>_g * rho, rho the density of Omega
/// against the flat measure.
pub fn l2_omega(s: &TensorField, t: &TensorField, g: &TensorField, ginv: &TensorField, rho: &TensorField) -> Result<f64> {
    let p = pointwise_inner(s, t, g, ginv)?;
    Ok(integral(&p.mul_scalar(rho)?))
}
