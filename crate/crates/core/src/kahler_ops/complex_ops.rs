use crate::error::{contract, Result};
use crate::riemannian_core::{alternating_sum, covariant_derivative, MetricField};
use crate::spectral_fields::{Slot, TensorField};

/// Degree of a T_X-valued form: q covariant slots followed by one
/// contravariant slot.
pub fn form_degree(s: &TensorField) -> Result<usize> {
    let sl = s.slots();
    match sl.split_last() {
        Some((Slot::Contra, rest)) if rest.iter().all(|k| *k == Slot::Co) => Ok(rest.len()),
        _ => contract(format!("{sl:?} is not a T_X-valued form")),
    }
}

/// The two halves of nabla split on the derivative slot:
/// returns (1/2 nabla S, 1/2 J nabla_{J .} S), J acting on the value slot.
fn nabla_halves(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<(TensorField, TensorField)> {
    form_degree(s)?;
    let ns = covariant_derivative(s, m)?;
    let twisted = ns.precompose_slot(0, j)?.postcompose(j)?;
    Ok((ns.scale(0.5), twisted.scale(0.5)))
}

/// nabla^{1,0} S (xi, ..) = 1/2 [nabla S(xi, ..) - J nabla S(J xi, ..)]
pub fn nabla_10(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    let (a, b) = nabla_halves(s, m, j)?;
    a.sub(&b)
}

/// nabla^{0,1} S (xi, ..) = 1/2 [nabla S(xi, ..) + J nabla S(J xi, ..)]
pub fn nabla_01(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    let (a, b) = nabla_halves(s, m, j)?;
    a.add(&b)
}

/// del on T_X-valued q-forms: unweighted alternating sum of nabla^{1,0}.
pub fn del_tx(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    let q = form_degree(s)?;
    alternating_sum(&nabla_10(s, m, j)?, q)
}

pub fn dbar_tx(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    let q = form_degree(s)?;
    alternating_sum(&nabla_01(s, m, j)?, q)
}

/// Covariant exterior derivative nabla_{T_X}.
pub fn d_nabla(s: &TensorField, m: &MetricField) -> Result<TensorField> {
    let q = form_degree(s)?;
    alternating_sum(&covariant_derivative(s, m)?, q)
}

fn trace_adjoint(nt: TensorField, p: usize, m: &MetricField) -> Result<TensorField> {
    Ok(nt.metric_trace(0, 1, m.ginv())?.scale(-(p as f64)))
}

fn check_positive_degree(s: &TensorField) -> Result<usize> {
    let p = form_degree(s)?;
    if p == 0 {
        return contract("adjoint of a degree-0 form is undefined");
    }
    Ok(p)
}

/// del^* alpha = -p Tr_g nabla^{0,1} alpha
pub fn adjoint_del(alpha: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    let p = check_positive_degree(alpha)?;
    trace_adjoint(nabla_01(alpha, m, j)?, p, m)
}

/// dbar^* alpha = -p Tr_g nabla^{1,0} alpha
pub fn adjoint_dbar(alpha: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    let p = check_positive_degree(alpha)?;
    trace_adjoint(nabla_10(alpha, m, j)?, p, m)
}

/// nabla^* alpha = -p Tr_g nabla alpha
pub fn adjoint_nabla(alpha: &TensorField, m: &MetricField) -> Result<TensorField> {
    let p = check_positive_degree(alpha)?;
    trace_adjoint(covariant_derivative(alpha, m)?, p, m)
}

/// e^f P^*(e^{-f} alpha), the formal adjoint in L^2(e^{-f} dV_g).
pub fn twisted(
    p_star: impl Fn(&TensorField) -> Result<TensorField>,
    alpha: &TensorField,
    f: &TensorField,
) -> Result<TensorField> {
    let w = f.map(|x| (-x).exp());
    let inner = p_star(&alpha.mul_scalar(&w)?)?;
    inner.mul_scalar(&f.map(f64::exp))
}

pub fn adjoint_del_omega(alpha: &TensorField, m: &MetricField, j: &TensorField, f: &TensorField) -> Result<TensorField> {
    twisted(|a| adjoint_del(a, m, j), alpha, f)
}

pub fn adjoint_dbar_omega(alpha: &TensorField, m: &MetricField, j: &TensorField, f: &TensorField) -> Result<TensorField> {
    twisted(|a| adjoint_dbar(a, m, j), alpha, f)
}

pub fn adjoint_nabla_omega(alpha: &TensorField, m: &MetricField, f: &TensorField) -> Result<TensorField> {
    twisted(|a| adjoint_nabla(a, m), alpha, f)
}

/// (1/q) P P^* S + (1/(q+1)) P^* P S, dropping the first term in degree 0.
fn hodge(
    s: &TensorField,
    d: impl Fn(&TensorField) -> Result<TensorField>,
    d_star: impl Fn(&TensorField) -> Result<TensorField>,
) -> Result<TensorField> {
    let q = form_degree(s)?;
    let mut out = d_star(&d(s)?)?.scale(1.0 / (q as f64 + 1.0));
    if q > 0 {
        out.axpy(1.0 / q as f64, &d(&d_star(s)?)?)?;
    }
    Ok(out)
}

pub fn laplacian_del(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    hodge(s, |x| del_tx(x, m, j), |x| adjoint_del(x, m, j))
}

pub fn laplacian_dbar(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<TensorField> {
    hodge(s, |x| dbar_tx(x, m, j), |x| adjoint_dbar(x, m, j))
}

pub fn laplacian_nabla(s: &TensorField, m: &MetricField) -> Result<TensorField> {
    hodge(s, |x| d_nabla(x, m), |x| adjoint_nabla(x, m))
}

/// (Delta' S, Delta'' S)
pub fn hodge_laplacians(s: &TensorField, m: &MetricField, j: &TensorField) -> Result<(TensorField, TensorField)> {
    Ok((laplacian_del(s, m, j)?, laplacian_dbar(s, m, j)?))
}

/// Interior product xi _| T into the first slot of a form-valued tensor.
pub fn hook(xi: &TensorField, t: &TensorField) -> Result<TensorField> {
    t.insert(0, xi)
}
