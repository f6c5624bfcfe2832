use super::metric::MetricField;
use crate::error::{contract, Result};
use crate::spectral_fields::{Slot, TensorField, BILINEAR, ENDO, SCALAR};

fn fma_into(dst: &mut [f64], s: f64, a: &[f64], b: &[f64]) {
    for ((o, x), y) in dst.iter_mut().zip(a).zip(b) {
        *o += s * x * y;
    }
}

/// Levi-Civita derivative. The derivative slot is prepended:
/// (nabla T)(a; ...) = (nabla_a T)(...).
pub fn covariant_derivative(t: &TensorField, m: &MetricField) -> Result<TensorField> {
    if t.grid() != m.grid() {
        return contract("tensor and metric live on different grids");
    }
    let d = t.dim();
    let r = t.rank();
    let nc = t.ncomp();
    let n = t.npts();
    let gam = m.christoffel();
    let mut out = t.partials();
    let mut idx = vec![0usize; r];
    for (i, kind) in t.slots().iter().enumerate() {
        let stride = d.pow((r - 1 - i) as u32);
        for a in 0..d {
            for c in 0..nc {
                let mut x = c;
                for k in (0..r).rev() {
                    idx[k] = x % d;
                    x /= d;
                }
                let mi = idx[i];
                let base = c - mi * stride;
                let dst = &mut out.data_mut()[(a * nc + c) * n..(a * nc + c + 1) * n];
                for e in 0..d {
                    let src = t.comp(base + e * stride);
                    match kind {
                        Slot::Co => fma_into(dst, -1.0, gam.comp((a * d + mi) * d + e), src),
                        Slot::Contra => fma_into(dst, 1.0, gam.comp((a * d + e) * d + mi), src),
                    }
                }
            }
        }
    }
    Ok(out)
}

/// R^d_{abc} with slots (Co a, Co b, Co c, Contra d), so that
/// R(d_a, d_b) d_c = R^d_{abc} d_d.
pub fn curvature(m: &MetricField) -> TensorField {
    let gam = m.christoffel();
    let d = gam.dim();
    let dgam = gam.partials();
    let mut out = TensorField::zeros(*m.grid(), &[Slot::Co, Slot::Co, Slot::Co, Slot::Contra]);
    let gi = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    let oc = ((a * d + b) * d + c) * d + dd;
                    let (x, y) = (dgam.comp((a * d + b) * d * d + c * d + dd), dgam.comp((b * d + a) * d * d + c * d + dd));
                    let mut acc: Vec<f64> = x.iter().zip(y).map(|(u, v)| u - v).collect();
                    for e in 0..d {
                        fma_into(&mut acc, 1.0, gam.comp(gi(a, e, dd)), gam.comp(gi(b, c, e)));
                        fma_into(&mut acc, -1.0, gam.comp(gi(b, e, dd)), gam.comp(gi(a, c, e)));
                    }
                    out.comp_mut(oc).copy_from_slice(&acc);
                }
            }
        }
    }
    out
}

/// Ric_{bc} = R^a_{abc}, evaluated as
/// d_a Gamma^a_{bc} - d_b d_c log sqrt(det g) + Gamma^a_{ae} Gamma^e_{bc} - Gamma^a_{be} Gamma^e_{ac},
/// which is symmetric by construction.
pub fn ricci(m: &MetricField) -> TensorField {
    let gam = m.christoffel();
    let d = gam.dim();
    let n = gam.npts();
    let gi = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
    let dgam = gam.partials();
    let logvol = m.volume_density().map(f64::ln);
    let hl = logvol.partials().partials();
    let mut trace = vec![vec![0.0; n]; d];
    for (e, tr) in trace.iter_mut().enumerate() {
        for a in 0..d {
            for (t, v) in tr.iter_mut().zip(gam.comp(gi(a, e, a))) {
                *t += v;
            }
        }
    }
    let mut out = TensorField::zeros(*m.grid(), BILINEAR);
    for b in 0..d {
        for c in b..d {
            let mut acc: Vec<f64> = hl.comp(b * d + c).iter().map(|v| -v).collect();
            for a in 0..d {
                // d_a Gamma^a_{bc}: derivative slot a, then (b, c, a)
                let src = dgam.comp(a * d * d * d + gi(b, c, a));
                for (o, v) in acc.iter_mut().zip(src) {
                    *o += v;
                }
                for e in 0..d {
                    fma_into(&mut acc, -1.0, gam.comp(gi(b, e, a)), gam.comp(gi(a, c, e)));
                }
            }
            for e in 0..d {
                fma_into(&mut acc, 1.0, &trace[e], gam.comp(gi(b, c, e)));
            }
            out.comp_mut(b * d + c).copy_from_slice(&acc);
            if b != c {
                out.comp_mut(c * d + b).copy_from_slice(&acc);
            }
        }
    }
    out
}

pub fn scalar_curvature(m: &MetricField) -> TensorField {
    ricci(m).metric_trace(0, 1, m.ginv()).expect("ricci shape")
}

fn check_scalar(f: &TensorField) -> Result<()> {
    if f.slots() != SCALAR {
        return contract("expected a scalar field");
    }
    Ok(())
}

pub fn differential(f: &TensorField) -> Result<TensorField> {
    check_scalar(f)?;
    Ok(f.partials())
}

/// nabla d f, symmetric (Co, Co).
pub fn hessian(f: &TensorField, m: &MetricField) -> Result<TensorField> {
    covariant_derivative(&differential(f)?, m)
}

pub fn gradient(f: &TensorField, m: &MetricField) -> Result<TensorField> {
    differential(f)?.raise(0, m.ginv())
}

/// Rough Laplacian -tr_g nabla^2 T (nonnegative spectrum).
pub fn rough_laplacian(t: &TensorField, m: &MetricField) -> Result<TensorField> {
    let nn = covariant_derivative(&covariant_derivative(t, m)?, m)?;
    Ok(nn.metric_trace(0, 1, m.ginv())?.scale(-1.0))
}

/// Contract the first slot of nabla T into the first slot of T.
pub fn divergence(t: &TensorField, m: &MetricField) -> Result<TensorField> {
    if t.rank() == 0 {
        return contract("divergence of a scalar");
    }
    let nt = covariant_derivative(t, m)?;
    match t.slots()[0] {
        Slot::Co => nt.metric_trace(0, 1, m.ginv()),
        Slot::Contra => nt.trace(0, 1),
    }
}

/// xi inserted into the first slot of T (raising or lowering as needed).
pub fn interior(xi: &TensorField, t: &TensorField, m: &MetricField) -> Result<TensorField> {
    if t.rank() == 0 {
        return contract("interior product into a scalar");
    }
    match t.slots()[0] {
        Slot::Co => t.insert(0, xi),
        Slot::Contra => t.contract(0, &xi.lower(0, m.g())?, 0),
    }
}

/// div^Omega T = div T - nabla f _| T
pub fn omega_divergence(t: &TensorField, m: &MetricField, f: &TensorField) -> Result<TensorField> {
    let grad = gradient(f, m)?;
    divergence(t, m)?.sub(&interior(&grad, t, m)?)
}

/// Twisted rough Laplacian Delta^Omega T = Delta T + nabla f _| nabla T.
pub fn omega_laplacian(t: &TensorField, m: &MetricField, f: &TensorField) -> Result<TensorField> {
    let nt = covariant_derivative(t, m)?;
    Ok(omega_divergence(&nt, m, f)?.scale(-1.0))
}

/// Sum over j of nabla alpha(xi_j, xi_0, .., ^xi_j, .., xi_p).
pub fn symmetrized_nabla(alpha: &TensorField, m: &MetricField) -> Result<TensorField> {
    let na = covariant_derivative(alpha, m)?;
    let r = na.rank();
    let mut out = na.clone();
    for j in 1..r {
        // output slot j <- derivative slot 0, output slots before j shift down by one
        out = out.add(&na.move_first_to(j)?)?;
    }
    Ok(out)
}

/// Sum over j of (-1)^j N(xi_j, xi_0, .., ^xi_j, .., xi_q, ...) where N carries
/// a fresh derivative slot in front of `q` form slots.
pub fn alternating_sum(nt: &TensorField, q: usize) -> Result<TensorField> {
    if q + 1 > nt.rank() {
        return contract("alternating sum over more slots than available");
    }
    let mut out = nt.clone();
    for j in 1..=q {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.axpy(s, &nt.move_first_to(j)?)?;
    }
    Ok(out)
}

/// Exterior derivative of a scalar-valued p-form (partials suffice on the torus).
pub fn exterior_derivative(alpha: &TensorField) -> Result<TensorField> {
    if alpha.slots().iter().any(|s| *s != Slot::Co) {
        return contract("exterior derivative expects a covariant form");
    }
    alternating_sum(&alpha.partials(), alpha.rank())
}

/// D_g u = nablahat u - 2 nabla u
pub fn d_operator(u: &TensorField, m: &MetricField) -> Result<TensorField> {
    if u.slots() != BILINEAR {
        return contract("D_g acts on covariant 2-tensors");
    }
    let hat = symmetrized_nabla(u, m)?;
    let nu = covariant_derivative(u, m)?;
    hat.sub(&nu.scale(2.0))
}

/// v* = g^{-1} v as an endomorphism, g(v* xi, eta) = v(xi, eta).
pub fn sharp(v: &TensorField, m: &MetricField) -> Result<TensorField> {
    if v.slots() != BILINEAR {
        return contract("sharp expects a covariant 2-tensor");
    }
    v.raise(1, m.ginv())
}

/// Inverse of sharp: (flat A)(xi, eta) = g(A xi, eta).
pub fn flat(a: &TensorField, m: &MetricField) -> Result<TensorField> {
    if a.slots() != ENDO {
        return contract("flat expects an endomorphism");
    }
    a.lower(1, m.g())
}

/// g-transpose, g(A xi, eta) = g(xi, A^T eta).
pub fn transpose_g(a: &TensorField, m: &MetricField) -> Result<TensorField> {
    sharp(&flat(a, m)?.transpose_slots(0, 1)?, m)
}
