use crate::bakry_emery::KahlerState;
use crate::error::{contract, Result};
use crate::kahler_ops::{endo_01, endo_10};
use crate::riemannian_core::{sharp, transpose_g};
use crate::spectral_fields::{linf, relative_residual, TensorField, BILINEAR};

/// A symmetric variation v = g'(0) at a Kähler state, with its type
/// components and the J-velocity forced by 2 J' = J v* - v* J.
#[derive(Clone, Debug)]
pub struct VariationDatum {
    state: KahlerState,
    v: TensorField,
    v_sharp: TensorField,
    v10: TensorField,
    v01: TensorField,
    jdot: TensorField,
}

impl VariationDatum {
    pub fn new(state: KahlerState, v: TensorField) -> Result<Self> {
        if v.slots() != BILINEAR || v.grid() != state.grid() {
            return contract("a variation is a covariant 2-tensor on the state grid");
        }
        let asym = linf(&v.sub(&v.transpose_slots(0, 1)?)?);
        if asym > 1e-14 * linf(&v).max(1.0) {
            return contract(format!("variation is not symmetric ({asym:.2e})"));
        }
        let v_sharp = sharp(&v, state.metric())?;
        let v10 = endo_10(&v_sharp, state.j())?;
        let v01 = endo_01(&v_sharp, state.j())?;
        let j = state.j();
        let jdot = j.compose(&v_sharp)?.sub(&v_sharp.compose(j)?)?.scale(0.5);
        Ok(Self { state, v, v_sharp, v10, v01, jdot })
    }

    pub fn zero(state: KahlerState) -> Result<Self> {
        let v = TensorField::zeros(*state.grid(), BILINEAR);
        Self::new(state, v)
    }

    pub fn state(&self) -> &KahlerState {
        &self.state
    }

    pub fn v(&self) -> &TensorField {
        &self.v
    }

    pub fn v_sharp(&self) -> &TensorField {
        &self.v_sharp
    }

    /// g'^{1,0}, the J-linear part of v*.
    pub fn v10(&self) -> &TensorField {
        &self.v10
    }

    /// g'^{0,1}, the J-anti-linear part of v*.
    pub fn v01(&self) -> &TensorField {
        &self.v01
    }

    pub fn jdot(&self) -> &TensorField {
        &self.jdot
    }

    /// A = -g'^{0,1}
    pub fn a(&self) -> TensorField {
        self.v01.scale(-1.0)
    }

    /// B = g'^{1,0}
    pub fn b(&self) -> &TensorField {
        &self.v10
    }

    /// ||J' - (J')^T_g||, relative.
    pub fn jdot_symmetry_residual(&self) -> Result<f64> {
        relative_residual(&self.jdot, &transpose_g(&self.jdot, self.state.metric())?)
    }

    /// ||A - J J'||, relative.
    pub fn a_residual(&self) -> Result<f64> {
        relative_residual(&self.a(), &self.state.j().compose(&self.jdot)?)
    }

    /// ||v10 + v01 - v*||
    pub fn split_residual(&self) -> Result<f64> {
        Ok(linf(&self.v10.add(&self.v01)?.sub(&self.v_sharp)?))
    }
}
