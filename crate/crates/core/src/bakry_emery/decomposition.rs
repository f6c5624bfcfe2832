use super::state::KahlerState;
use crate::error::{contract, Result};
use crate::kahler_ops::{endo_01, form_times_endo, omega_sharp};
use crate::riemannian_core::{covariant_derivative, exterior_derivative, flat, gradient, hessian, ricci};
use crate::report::{Residual, ResidualReport};
use crate::spectral_fields::{integral, linf, relative_residual, TensorField, SCALAR};

/// i d dbar u = -1/2 d(du o J), valid for integrable J.
pub fn i_ddbar(u: &TensorField, j: &TensorField) -> Result<TensorField> {
    if u.slots() != SCALAR {
        return contract("i ddbar acts on scalars");
    }
    let dcu = u.partials().precompose_slot(0, j)?;
    Ok(exterior_derivative(&dcu)?.scale(-0.5))
}

fn require_standard_j(state: &KahlerState) -> Result<()> {
    // x + i y are holomorphic coordinates only for the standard structure
    let gap = linf(&state.j().sub(&TensorField::standard_j(*state.grid()))?);
    if gap > 1e-12 {
        return contract("density oracle needs the standard complex structure");
    }
    Ok(())
}

/// Ric_J(Omega) from the density alone: -i ddbar log rho, with rho taken
/// against the coordinate volume of the standard holomorphic chart.
pub fn ricci_form_density(state: &KahlerState) -> Result<TensorField> {
    require_standard_j(state)?;
    let log_rho = state.rho().map(f64::ln);
    Ok(i_ddbar(&log_rho, state.j())?.scale(-1.0))
}

/// Ric_J(omega) = -i ddbar log det(g_{k lbar}) = -1/2 i ddbar log det g.
pub fn ricci_form_volume(state: &KahlerState) -> Result<TensorField> {
    require_standard_j(state)?;
    let logdet = state.g().determinant()?.map(f64::ln);
    Ok(i_ddbar(&logdet, state.j())?.scale(-0.5))
}

/// Ric_J(Omega) = Ric(g) J + i ddbar f, from the Levi-Civita Ricci form and
/// the weight. Independent of the type projection of Ric_g(Omega).
pub fn ricci_form_weighted(state: &KahlerState) -> Result<TensorField> {
    let rj = form_times_endo(&ricci(state.metric()), state.j())?;
    rj.add(&i_ddbar(state.f(), state.j())?)
}

/// dbar grad f through the vector route 1/2 (nabla_xi grad f + J nabla_{J xi} grad f).
pub fn anti_hessian_vector_route(state: &KahlerState) -> Result<TensorField> {
    let m = state.metric();
    let nf = covariant_derivative(&gradient(state.f(), m)?, m)?;
    let tw = nf.precompose_slot(0, state.j())?.postcompose(state.j())?;
    Ok(nf.add(&tw)?.scale(0.5))
}

/// Integral of alpha ^ omega^{n-1} (top-degree coefficient) for a 2-form alpha.
pub fn integral_against_omega(alpha: &TensorField, state: &KahlerState) -> Result<f64> {
    let n = state.grid().n();
    match n {
        1 => {
            // dx ^ dy coefficient
            Ok(integral(&TensorField::scalar(*state.grid(), alpha.comp(1).to_vec())?))
        }
        2 => {
            let om = state.omega()?;
            let d = 4;
            let a = |i: usize, k: usize| alpha.comp(i * d + k);
            let b = |i: usize, k: usize| om.comp(i * d + k);
            let np = alpha.npts();
            let mut top = vec![0.0; np];
            let terms = [((0, 1), (2, 3), 1.0), ((0, 2), (1, 3), -1.0), ((0, 3), (1, 2), 1.0)];
            for ((i1, k1), (i2, k2), s) in terms {
                for (p, t) in top.iter_mut().enumerate() {
                    *t += s * (a(i1, k1)[p] * b(i2, k2)[p] + a(i2, k2)[p] * b(i1, k1)[p]);
                }
            }
            Ok(integral(&TensorField::scalar(*state.grid(), top)?))
        }
        _ => contract("unsupported dimension"),
    }
}

/// Named residuals of the Hessian and Bakry-Emery decompositions.
pub fn decomposition_residuals(state: &KahlerState) -> Result<ResidualReport> {
    let m = state.metric();
    let j = state.j();
    let mut rep = ResidualReport::new();
    let dbar_grad = anti_hessian_vector_route(state)?;
    let g_dbar_grad = flat(&dbar_grad, m)?;

    // nabla df = -(i ddbar f) J + g dbar grad f
    let hess = hessian(state.f(), m)?;
    let rhs = form_times_endo(&i_ddbar(state.f(), j)?, j)?.scale(-1.0).add(&g_dbar_grad)?;
    rep.push(Residual::new("cx_dec_hess", "complex decomposition of the Hessian", "rel_linf", relative_residual(&hess, &rhs)?, 1e-7));

    // Ric_g(Omega) = -Ric_J(Omega) J + g dbar grad f
    let ric_form = ricci_form_weighted(state)?;
    let rhs = form_times_endo(&ric_form, j)?.scale(-1.0).add(&g_dbar_grad)?;
    rep.push(Residual::new(
        "cx_dec_ric",
        "complex decomposition of the Bakry-Emery tensor",
        "rel_linf",
        relative_residual(state.bakry_emery_tensor(), &rhs)?,
        1e-7,
    ));

    // Ric*_g(Omega) = Ric*_J(Omega)_g + dbar grad f
    let rhs = omega_sharp(&ric_form, m, j)?.add(&dbar_grad)?;
    rep.push(Residual::new(
        "dec_end_ric",
        "endomorphism decomposition of the Bakry-Emery tensor",
        "rel_linf",
        relative_residual(state.bakry_emery_endo(), &rhs)?,
        1e-7,
    ));

    rep.push(Residual::new(
        "anti_hessian_part",
        "anti-linear part of the Bakry-Emery endomorphism",
        "rel_linf",
        relative_residual(&endo_01(state.bakry_emery_endo(), j)?, &state.anti_hessian()?)?,
        1e-7,
    ));
    Ok(rep)
}
