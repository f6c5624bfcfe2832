use serde::{Deserialize, Serialize};

use crate::bakry_emery::KahlerState;
use crate::error::Result;
use crate::kahler_ops::{dbar_tx, del_tx, form_times_endo};
use crate::riemannian_core::{covariant_derivative, flat, sharp, MetricField};
use crate::spectral_fields::{linf, relative_residual, TensorField};

/// Which metric velocity drives (g, J).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowVariant {
    /// g'* = B - A with B = Ric*_J(Omega) - I and A = dbar grad f, as written.
    #[default]
    Skrf,
    /// g' = Ric_g(Omega) - g, whose anti-linear part is +dbar grad f, so that
    /// A = -g'^{0,1} = -dbar grad f.
    SolitonRicci,
}

/// B = g'^{1,0} = Ric*_J(Omega) - I and A = -g'^{0,1}, which is
/// dbar_{T_X} grad f for the system as written and its negative for the
/// soliton-Ricci variant. Either way g'* = B - A.
pub fn skrf_components(state: &KahlerState, variant: FlowVariant) -> Result<(TensorField, TensorField)> {
    let b = state.ricci_endo_j()?.sub(&TensorField::identity(*state.grid()))?;
    let a = state.anti_hessian()?;
    Ok(match variant {
        FlowVariant::Skrf => (b, a),
        FlowVariant::SolitonRicci => (b, a.scale(-1.0)),
    })
}

/// (g', J') with 2 J' = J g'* - g'* J.
pub fn skrf_velocity(state: &KahlerState, variant: FlowVariant) -> Result<(TensorField, TensorField)> {
    let m = state.metric();
    let (b, a) = skrf_components(state, variant)?;
    let gdot = flat(&b.sub(&a)?, m)?;
    // exact symmetry, so rounding does not feed an antisymmetric drift into g
    let gdot = gdot.add(&gdot.transpose_slots(0, 1)?)?.scale(0.5);
    let s = sharp(&gdot, m)?;
    let j = state.j();
    let jdot = j.compose(&s)?.sub(&s.compose(j)?)?.scale(0.5);
    Ok((gdot, jdot))
}

/// ||dbar B - del A|| / max(1, ||dbar B||)
pub fn constraint_residual(state: &KahlerState, b: &TensorField, a: &TensorField) -> Result<f64> {
    let (m, j) = (state.metric(), state.j());
    let db = dbar_tx(b, m, j)?;
    Ok(linf(&db.sub(&del_tx(a, m, j)?)?) / linf(&db).max(1.0))
}

/// omega' = g' J + g J' against the form g(B J ., .): the two routes to
/// omega'* = B.
pub fn omega_velocity_residual(state: &KahlerState, b: &TensorField, gdot: &TensorField, jdot: &TensorField) -> Result<f64> {
    let m = state.metric();
    let direct = form_times_endo(gdot, state.j())?.add(&form_times_endo(state.g(), jdot)?)?;
    let via_b = form_times_endo(&flat(&b, m)?, state.j())?;
    relative_residual(&direct, &via_b)
}

/// Relative distance of g' from +(Ric_g(Omega) - g) and from -(Ric_g(Omega) - g).
pub fn sign_candidates(state: &KahlerState, gdot: &TensorField) -> Result<(f64, f64)> {
    let r = state.bakry_emery_tensor().sub(state.g())?;
    Ok((relative_residual(gdot, &r)?, relative_residual(gdot, &r.scale(-1.0))?))
}

/// ||nabla J||, zero exactly on Kähler states.
pub fn kahler_residual(m: &MetricField, j: &TensorField) -> Result<f64> {
    Ok(linf(&covariant_derivative(j, m)?))
}
