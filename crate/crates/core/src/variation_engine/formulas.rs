//! Right-hand sides of the first-variation formulas, and the matching
//! left-hand quantities evaluated along a path.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::datum::VariationDatum;
use super::membership::{require_d, require_f};
use crate::bakry_emery::KahlerState;
use crate::error::{contract, Error, Result};
use crate::kahler_ops::{
    adjoint_dbar, adjoint_dbar_omega, adjoint_del, adjoint_del_omega, dbar_tx, del_tx, form_times_endo, hook,
    nabla_10, type_project_form,
};
use crate::riemannian_core::{
    covariant_derivative, d_operator, differential, exterior_derivative, flat, gradient, omega_divergence,
    omega_laplacian, ricci, sharp, transpose_g,
};
use crate::spectral_fields::{TensorField, VECTOR};

/// Membership tolerance used for formula preconditions.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaId {
    VarOmRic,
    VrORcFm,
    DecVrORc,
    RmVrRcFm,
    VrAntHess,
    ThmB,
    ThmA,
    ThmBAlt,
    VrOmEndrc,
    PartA,
    PartB,
    VarDbarVf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    None,
    D,
    F,
}

impl FormulaId {
    pub const ALL: [FormulaId; 12] = [
        FormulaId::VarOmRic,
        FormulaId::VrORcFm,
        FormulaId::DecVrORc,
        FormulaId::RmVrRcFm,
        FormulaId::VrAntHess,
        FormulaId::ThmB,
        FormulaId::ThmA,
        FormulaId::ThmBAlt,
        FormulaId::VrOmEndrc,
        FormulaId::PartA,
        FormulaId::PartB,
        FormulaId::VarDbarVf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::VarOmRic => "VAR_OM_RIC",
            FormulaId::VrORcFm => "VR_O_RC_FM",
            FormulaId::DecVrORc => "DEC_VR_O_RC",
            FormulaId::RmVrRcFm => "RM_VR_RC_FM",
            FormulaId::VrAntHess => "VR_ANT_HESS",
            FormulaId::ThmB => "THM_B",
            FormulaId::ThmA => "THM_A",
            FormulaId::ThmBAlt => "THM_B_ALT",
            FormulaId::VrOmEndrc => "VR_OM_ENDRC",
            FormulaId::PartA => "PART_A",
            FormulaId::PartB => "PART_B",
            FormulaId::VarDbarVf => "VAR_DBAR_VF",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            FormulaId::VarOmRic => "variation of the Bakry-Emery-Ricci tensor",
            FormulaId::VrORcFm => "variation of the Omega-Ricci form",
            FormulaId::DecVrORc => "Omega-Ricci form variation via the real trace 1-form",
            FormulaId::RmVrRcFm => "variation of Ric_J(Omega) J",
            FormulaId::VrAntHess => "variation of g times the anti-Hessian",
            FormulaId::ThmB => "variation of the J-linear Bakry-Emery component",
            FormulaId::ThmA => "variation of the J-anti-linear Bakry-Emery component",
            FormulaId::ThmBAlt => "alternative variation of the J-linear component",
            FormulaId::VrOmEndrc => "variation of the Bakry-Emery endomorphism on F",
            FormulaId::PartA => "variation of the anti-Hessian on F",
            FormulaId::PartB => "variation of the J-linear component on F",
            FormulaId::VarDbarVf => "variation of dbar on a fixed vector field",
        }
    }

    pub fn requirement(self) -> Requirement {
        match self {
            FormulaId::VarOmRic => Requirement::None,
            FormulaId::VrOmEndrc | FormulaId::PartA | FormulaId::PartB => Requirement::F,
            _ => Requirement::D,
        }
    }

    /// The quantity whose doubled time derivative the formula computes.
    pub fn lhs(self, state: &KahlerState, probe: &TensorField) -> Result<TensorField> {
        let (m, j) = (state.metric(), state.j());
        match self {
            FormulaId::VarOmRic => Ok(state.bakry_emery_tensor().clone()),
            FormulaId::VrORcFm | FormulaId::DecVrORc => state.ricci_form_omega(),
            FormulaId::RmVrRcFm => form_times_endo(&state.ricci_form_omega()?, j),
            FormulaId::VrAntHess => flat(&state.anti_hessian()?, m),
            FormulaId::ThmB | FormulaId::ThmBAlt | FormulaId::PartB => state.ricci_endo_j(),
            FormulaId::ThmA | FormulaId::PartA => state.anti_hessian(),
            FormulaId::VrOmEndrc => Ok(state.bakry_emery_endo().clone()),
            FormulaId::VarDbarVf => {
                check_probe(probe)?;
                dbar_tx(probe, m, j)
            }
        }
    }

    /// The right-hand side at the base state, after checking the membership
    /// precondition.
    pub fn rhs(self, datum: &VariationDatum, probe: &TensorField) -> Result<TensorField> {
        match self.requirement() {
            Requirement::None => {}
            Requirement::D => require_d(datum, MEMBERSHIP_TOL)?,
            Requirement::F => require_f(datum, MEMBERSHIP_TOL)?,
        }
        self.rhs_unchecked(datum, probe)
    }

    pub fn rhs_unchecked(self, datum: &VariationDatum, probe: &TensorField) -> Result<TensorField> {
        let s = datum.state();
        let (m, j, f) = (s.metric(), s.j(), s.f());
        let t = |x: &TensorField| transpose_g(x, m);
        match self {
            FormulaId::VarOmRic => omega_divergence(&d_operator(datum.v(), m)?, m, f),
            FormulaId::VrORcFm => {
                let gj = flat(datum.jdot(), m)?;
                exterior_derivative(&omega_divergence(&gj, m, f)?)
            }
            FormulaId::DecVrORc => {
                let tr = real_trace_form(datum)?;
                let dfj = differential(f)?.precompose_slot(0, datum.jdot())?;
                exterior_derivative(&tr.sub(&dfj)?)
            }
            FormulaId::RmVrRcFm => {
                let (_, v2) = type_project_form(datum.v(), j)?;
                let div = omega_divergence(&d_operator(&v2, m)?, m, f)?;
                div.scale(-1.0).sub(&flat(&f_block(datum)?, m)?)
            }
            FormulaId::VrAntHess => {
                let (v1, _) = type_project_form(datum.v(), j)?;
                let div = omega_divergence(&d_operator(&v1, m)?, m, f)?;
                div.sub(&flat(&f_block(datum)?, m)?)
            }
            FormulaId::ThmB => {
                let ric_j = s.ricci_endo_j()?;
                let x = del_tx(&adjoint_dbar_omega(datum.v01(), m, j, f)?, m, j)?;
                TensorField::combine(&[
                    (-1.0, &x),
                    (-1.0, &t(&x)?),
                    (1.0, &ric_j.commutator(datum.v01())?),
                    (-2.0, &datum.v10().compose(&ric_j)?),
                ])
            }
            FormulaId::ThmA => {
                let y = dbar_tx(&adjoint_del_omega(datum.v10(), m, j, f)?, m, j)?;
                let grad = gradient(f, m)?;
                let jgrad = j.apply(&grad)?;
                let twist = hook(&jgrad, &covariant_derivative(datum.v01(), m)?)?;
                let (dgf, dbgf) = (del_grad_f(s)?, s.anti_hessian()?);
                TensorField::combine(&[
                    (-1.0, &y),
                    (-1.0, &t(&y)?),
                    (-1.0, &j.compose(&twist)?),
                    (1.0, &dbgf.commutator(datum.v_sharp())?),
                    (-1.0, &datum.v01().compose(&dgf)?),
                    (-1.0, &dgf.compose(datum.v01())?),
                ])
            }
            FormulaId::ThmBAlt => {
                let a = datum.a();
                let ric_j = s.ricci_endo_j()?;
                let dbgf = s.anti_hessian()?;
                let z = adjoint_dbar_omega(&del_tx(&a, m, j)?, m, j, f)?;
                TensorField::combine(&[
                    (-0.5, &z),
                    (-0.5, &t(&z)?),
                    (1.0, &a.compose(&dbgf)?),
                    (1.0, &dbgf.compose(&a)?),
                    (-1.0, &ric_j.commutator(&a)?),
                    (-2.0, &datum.b().compose(&ric_j)?),
                ])
            }
            FormulaId::VrOmEndrc => {
                let lap = omega_laplacian(datum.v_sharp(), m, f)?;
                Ok(lap.scale(-1.0).sub(&datum.v_sharp().compose(s.bakry_emery_endo())?.scale(2.0))?)
            }
            FormulaId::PartA => {
                let grad = gradient(f, m)?;
                let (dgf, dbgf) = (del_grad_f(s)?, s.anti_hessian()?);
                let lap = dbar_tx(&adjoint_dbar(datum.v01(), m, j)?, m, j)?;
                let hk = hook(&grad, &covariant_derivative(datum.v01(), m)?)?;
                TensorField::combine(&[
                    (-2.0, &lap),
                    (-1.0, &hk),
                    (-1.0, &datum.v01().compose(&dgf)?),
                    (-1.0, &dgf.compose(datum.v01())?),
                    (1.0, &dbgf.commutator(datum.v01())?),
                    (-2.0, &datum.v10().compose(&dbgf)?),
                ])
            }
            FormulaId::PartB => {
                let grad = gradient(f, m)?;
                let dbgf = s.anti_hessian()?;
                let ric_j = s.ricci_endo_j()?;
                let ric = sharp(&ricci(m), m)?;
                let lap = del_tx(&adjoint_del(datum.v10(), m, j)?, m, j)?;
                let hk = hook(&grad, &covariant_derivative(datum.v10(), m)?)?;
                TensorField::combine(&[
                    (-2.0, &lap),
                    (-1.0, &hk),
                    (-1.0, &datum.v01().compose(&dbgf)?),
                    (-1.0, &dbgf.compose(datum.v01())?),
                    (-1.0, &ric.commutator(datum.v10())?),
                    (1.0, &ric_j.commutator(datum.v01())?),
                    (-2.0, &datum.v10().compose(&ric_j)?),
                ])
            }
            FormulaId::VarDbarVf => {
                check_probe(probe)?;
                let jd = datum.jdot();
                let nx = covariant_derivative(probe, m)?;
                let nj = hook(probe, &covariant_derivative(jd, m)?)?;
                TensorField::combine(&[
                    (-1.0, &j.compose(&nj)?),
                    (1.0, &j.compose(&nx.compose(jd)?)?),
                    (1.0, &jd.compose(&nx.compose(j)?)?),
                ])
            }
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown formula id `{s}`")))
    }
}

fn check_probe(probe: &TensorField) -> Result<()> {
    if probe.slots() != VECTOR {
        return contract("the dbar variation needs a vector-field probe");
    }
    Ok(())
}

/// del_{T_X} grad f, the J-linear part of the Hessian endomorphism.
pub fn del_grad_f(state: &KahlerState) -> Result<TensorField> {
    let grad = gradient(state.f(), state.metric())?;
    nabla_10(&grad, state.metric(), state.j())
}

/// (Tr_R nabla J')(xi) = Tr(eta -> (nabla_eta J') xi).
pub fn real_trace_form(datum: &VariationDatum) -> Result<TensorField> {
    covariant_derivative(datum.jdot(), datum.state().metric())?.trace(0, 2)
}

/// J grad f _| nabla J' + J' Hess f J - J Hess f J' (endomorphism form).
pub fn f_block(datum: &VariationDatum) -> Result<TensorField> {
    let s = datum.state();
    let (m, j) = (s.metric(), s.j());
    let grad = gradient(s.f(), m)?;
    let jd = datum.jdot();
    let h = sharp(&crate::riemannian_core::hessian(s.f(), m)?, m)?;
    let nj = hook(&j.apply(&grad)?, &covariant_derivative(jd, m)?)?;
    TensorField::combine(&[(1.0, &nj), (1.0, &jd.compose(&h.compose(j)?)?), (-1.0, &j.compose(&h.compose(jd)?)?)])
}
