//! The linear spaces D (tangent to Kähler structures, Kah-D) and F
//! (d^nabla v* = 0), membership residuals, and samplers.

use super::datum::VariationDatum;
use crate::bakry_emery::KahlerState;
use crate::error::{Error, Result};
use crate::kahler_ops::{
    adjoint_dbar, adjoint_del, adjoint_nabla, d_nabla, dbar_tx, del_tx, endo_01, endo_10, nabla_01, nabla_10,
    type_project_form,
};
use crate::riemannian_core::{covariant_derivative, flat, hessian, transpose_g, MetricField};
use crate::spectral_fields::{l2_omega, linf, TensorField};

/// Residuals of the two Kah-D constraints, each scaled by max(1, ||nabla v*||).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DResiduals {
    /// ||del (v*)^{1,0}||
    pub del_10: f64,
    /// ||dbar (v*)^{0,1}||
    pub dbar_01: f64,
}

impl DResiduals {
    pub fn max(&self) -> f64 {
        self.del_10.max(self.dbar_01)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FResiduals {
    /// ||d^nabla v*||, the defining form.
    pub d_nabla: f64,
    /// max of the Kah-D residuals and ||dbar (v*)^{1,0} + del (v*)^{0,1}||.
    pub kah_f: f64,
    /// |d_nabla - kah_f|
    pub gap: f64,
    /// max of the Kah-D residuals and the sup-Kh-sm symmetry defect.
    pub sup_kh_sm: f64,
}

impl FResiduals {
    pub fn max(&self) -> f64 {
        self.d_nabla.max(self.kah_f)
    }
}

fn scale_of(s: &TensorField, m: &MetricField) -> Result<f64> {
    Ok(linf(&covariant_derivative(s, m)?).max(1.0))
}

pub fn membership_d(datum: &VariationDatum) -> Result<DResiduals> {
    let (m, j) = (datum.state().metric(), datum.state().j());
    let sc = scale_of(datum.v_sharp(), m)?;
    Ok(DResiduals {
        del_10: linf(&del_tx(datum.v10(), m, j)?) / sc,
        dbar_01: linf(&dbar_tx(datum.v01(), m, j)?) / sc,
    })
}

pub fn membership_f(datum: &VariationDatum) -> Result<FResiduals> {
    let (m, j) = (datum.state().metric(), datum.state().j());
    let sc = scale_of(datum.v_sharp(), m)?;
    let d = membership_d(datum)?.max();
    let dn = linf(&d_nabla(datum.v_sharp(), m)?) / sc;
    let mixed = dbar_tx(datum.v10(), m, j)?.add(&del_tx(datum.v01(), m, j)?)?;
    let kah_f = d.max(linf(&mixed) / sc);
    let n01 = nabla_01(datum.v10(), m, j)?;
    let n10 = nabla_10(datum.v01(), m, j)?.transpose_slots(0, 1)?;
    let sup = d.max(linf(&n01.sub(&n10)?) / sc);
    Ok(FResiduals { d_nabla: dn, kah_f, gap: (dn - kah_f).abs(), sup_kh_sm: sup })
}

pub fn require_d(datum: &VariationDatum, tol: f64) -> Result<()> {
    let r = membership_d(datum)?.max();
    if !(r <= tol) {
        return Err(Error::Precondition { what: "variation in D".into(), residual: r });
    }
    Ok(())
}

pub fn require_f(datum: &VariationDatum, tol: f64) -> Result<()> {
    let r = membership_f(datum)?.max();
    if !(r <= tol) {
        return Err(Error::Precondition { what: "variation in F".into(), residual: r });
    }
    Ok(())
}

/// v = Hess u + (Hess psi)' + c g: a diffeomorphism direction plus a
/// Kähler-potential direction, both tangent to the Kähler structures.
pub fn sample_d_exact(state: &KahlerState, u: &TensorField, psi: &TensorField, c: f64) -> Result<VariationDatum> {
    let m = state.metric();
    let (hp, _) = type_project_form(&hessian(psi, m)?, state.j())?;
    let v = hessian(u, m)?.add(&hp)?.add(&m.g().scale(c))?;
    VariationDatum::new(state.clone(), symmetrize(&v)?)
}

/// v = Hess u + c g. Lies in F whenever the base metric is flat (flat torus or
/// a pulled-back flat state); refused otherwise.
pub fn sample_f(state: &KahlerState, u: &TensorField, c: f64, tol: f64) -> Result<VariationDatum> {
    let m = state.metric();
    let v = hessian(u, m)?.add(&m.g().scale(c))?;
    let d = VariationDatum::new(state.clone(), symmetrize(&v)?)?;
    require_f(&d, tol)?;
    Ok(d)
}

fn symmetrize(v: &TensorField) -> Result<TensorField> {
    Ok(v.add(&v.transpose_slots(0, 1)?)?.scale(0.5))
}

/// Which linear constraint a projection enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    D,
    F,
}

struct Projector<'a> {
    state: &'a KahlerState,
    vol: TensorField,
    kind: Constraint,
}

impl Projector<'_> {
    fn sym(&self, s: &TensorField) -> Result<TensorField> {
        Ok(s.add(&transpose_g(s, self.state.metric())?)?.scale(0.5))
    }

    fn apply(&self, s: &TensorField) -> Result<Vec<TensorField>> {
        let (m, j) = (self.state.metric(), self.state.j());
        Ok(match self.kind {
            Constraint::D => vec![del_tx(&endo_10(s, j)?, m, j)?, dbar_tx(&endo_01(s, j)?, m, j)?],
            Constraint::F => vec![d_nabla(s, m)?],
        })
    }

    fn adjoint(&self, r: &[TensorField]) -> Result<TensorField> {
        let (m, j) = (self.state.metric(), self.state.j());
        let out = match self.kind {
            Constraint::D => endo_10(&adjoint_del(&r[0], m, j)?, j)?.add(&endo_01(&adjoint_dbar(&r[1], m, j)?, j)?)?,
            Constraint::F => adjoint_nabla(&r[0], m)?,
        };
        self.sym(&out)
    }

    fn dot(&self, a: &[TensorField], b: &[TensorField]) -> Result<f64> {
        let (g, ginv) = (self.state.g(), self.state.metric().ginv());
        a.iter().zip(b).map(|(x, y)| l2_omega(x, y, g, ginv, &self.vol)).sum()
    }

    fn residual(&self, s: &TensorField) -> Result<f64> {
        let d = VariationDatum::new(self.state.clone(), symmetrize(&flat(s, self.state.metric())?)?)?;
        Ok(match self.kind {
            Constraint::D => membership_d(&d)?.max(),
            Constraint::F => membership_f(&d)?.max(),
        })
    }
}

/// Least-squares projection of a raw symmetric v onto D or F by conjugate
/// gradients on the normal equations (restarted every 25 steps).
pub fn project(state: &KahlerState, v: &TensorField, kind: Constraint, tol: f64, max_iter: usize) -> Result<(VariationDatum, usize)> {
    let p = Projector { state, vol: state.metric().volume_density(), kind };
    let m = state.metric();
    let mut x = p.sym(&crate::riemannian_core::sharp(&symmetrize(v)?, m)?)?;
    let mut res = p.residual(&x)?;
    let mut it = 0;
    while res > tol && it < max_iter {
        let mut r: Vec<TensorField> = p.apply(&x)?.iter().map(|t| t.scale(-1.0)).collect();
        let mut s = p.adjoint(&r)?;
        let mut dir = s.clone();
        let mut gamma = p.dot(std::slice::from_ref(&s), std::slice::from_ref(&s))?;
        for _ in 0..25 {
            if it >= max_iter || gamma == 0.0 {
                break;
            }
            it += 1;
            let q = p.apply(&dir)?;
            let qq = p.dot(&q, &q)?;
            if qq == 0.0 {
                break;
            }
            let alpha = gamma / qq;
            x.axpy(alpha, &dir)?;
            for (ri, qi) in r.iter_mut().zip(&q) {
                ri.axpy(-alpha, qi)?;
            }
            s = p.adjoint(&r)?;
            let gnew = p.dot(std::slice::from_ref(&s), std::slice::from_ref(&s))?;
            dir = s.add(&dir.scale(gnew / gamma))?;
            gamma = gnew;
        }
        res = p.residual(&x)?;
        if gamma == 0.0 {
            break;
        }
    }
    if !(res <= tol) {
        return Err(Error::Projection { residual: res, iterations: it });
    }
    let datum = VariationDatum::new(state.clone(), symmetrize(&flat(&x, m)?)?)?;
    Ok((datum, it))
}

/// Projection of a raw variation onto D with the default budget (500 steps, 1e-8).
pub fn sample_d(state: &KahlerState, v: &TensorField) -> Result<VariationDatum> {
    Ok(project(state, v, Constraint::D, 1e-8, 500)?.0)
}
