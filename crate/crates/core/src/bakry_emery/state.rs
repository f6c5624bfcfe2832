use crate::error::{contract, Error, Result};
use crate::kahler_ops::{endo_01, endo_10, form_times_endo, kahler_form, pullback_j, type_project_form};
use crate::riemannian_core::{hessian, ricci, sharp, MetricField};
use crate::spectral_fields::{invert_matrix, FourierSpec, TensorField, TorusGrid, ENDO, SCALAR};

/// A triple (g, J, Omega) with Omega = rho dx, and the Bakry-Emery data
/// derived from it.
#[derive(Clone, Debug)]
pub struct KahlerState {
    m: MetricField,
    j: TensorField,
    rho: TensorField,
    f: TensorField,
    ric_omega: TensorField,
    ric_omega_endo: TensorField,
}

impl KahlerState {
    pub fn new(m: MetricField, j: TensorField, rho: TensorField) -> Result<Self> {
        if j.slots() != ENDO || rho.slots() != SCALAR {
            return contract("J must be an endomorphism and rho a scalar");
        }
        if j.grid() != m.grid() || rho.grid() != m.grid() {
            return contract("state fields live on different grids");
        }
        if rho.data().iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Numerical("volume density must stay positive".into()));
        }
        let vol = m.volume_density();
        let mut fv = vol.clone();
        for (o, r) in fv.data_mut().iter_mut().zip(rho.data()) {
            *o = (*o / r).ln();
        }
        let f = fv;
        let ric_omega = ricci(&m).add(&hessian(&f, &m)?)?;
        let ric_omega_endo = sharp(&ric_omega, &m)?;
        Ok(Self { m, j, rho, f, ric_omega, ric_omega_endo })
    }

    /// Flat metric, standard J and Omega = e^{-h} dx.
    pub fn flat(grid: &TorusGrid, h: &FourierSpec) -> Result<Self> {
        let rho = h.synthesize(grid)?.map(|x| (-x).exp());
        Self::new(MetricField::flat(*grid), TensorField::standard_j(*grid), rho)
    }

    /// Potential metric g = delta + 1/2 (Hess phi)' at the standard J, i.e.
    /// omega_{k lbar} = delta_{kl} + d_k d_lbar phi.
    pub fn potential(grid: &TorusGrid, phi: &FourierSpec, h: &FourierSpec) -> Result<Self> {
        let j = TensorField::standard_j(*grid);
        let g = potential_metric(grid, phi, &j)?;
        let rho = h.synthesize(grid)?.map(|x| (-x).exp());
        Self::new(MetricField::new(g)?, j, rho)
    }

    /// Pull-back of the flat Kähler structure by Phi(x) = x + eps grad psi:
    /// curved coordinates, zero curvature, non-constant J.
    pub fn pulled_back_flat(grid: &TorusGrid, psi: &FourierSpec, eps: f64, h: &FourierSpec) -> Result<Self> {
        psi.validate(grid)?;
        let d = grid.dim();
        let psi_f = psi.synthesize(grid)?;
        let hess = psi_f.partials().partials();
        let j0 = TensorField::standard_j(*grid);
        let mut g = TensorField::zeros(*grid, crate::spectral_fields::BILINEAR);
        let mut j = TensorField::zeros(*grid, ENDO);
        let n = grid.npts();
        // M0 = usual matrix of J0: M0[b][a] = J0(a, b)
        let mut m0 = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                m0[b * d + a] = j0.comp(a * d + b)[0];
            }
        }
        let mut dphi = vec![0.0; d * d];
        let mut inv = vec![0.0; d * d];
        for p in 0..n {
            for a in 0..d {
                for b in 0..d {
                    dphi[a * d + b] = if a == b { 1.0 } else { 0.0 } + eps * hess.comp(a * d + b)[p];
                }
            }
            if !invert_matrix(&dphi, d, &mut inv) {
                return Err(Error::Numerical("pull-back map is not a local diffeomorphism".into()));
            }
            for a in 0..d {
                for b in 0..d {
                    let gab: f64 = (0..d).map(|c| dphi[c * d + a] * dphi[c * d + b]).sum();
                    g.comp_mut(a * d + b)[p] = gab;
                    // usual matrix M = DPhi^{-1} M0 DPhi, stored J(a, b) = M[b][a]
                    let mut mba = 0.0;
                    for c in 0..d {
                        for e in 0..d {
                            mba += inv[b * d + c] * m0[c * d + e] * dphi[e * d + a];
                        }
                    }
                    j.comp_mut(a * d + b)[p] = mba;
                }
            }
        }
        let rho = h.synthesize(grid)?.map(|x| (-x).exp());
        Self::new(MetricField::new(g)?, j, rho)
    }

    /// Same (g, J), volume form replaced by dV_g (so f = 0).
    pub fn with_riemannian_volume(&self) -> Result<Self> {
        Self::new(self.m.clone(), self.j.clone(), self.m.volume_density())
    }

    pub fn grid(&self) -> &TorusGrid {
        self.m.grid()
    }

    pub fn metric(&self) -> &MetricField {
        &self.m
    }

    pub fn g(&self) -> &TensorField {
        self.m.g()
    }

    pub fn j(&self) -> &TensorField {
        &self.j
    }

    pub fn rho(&self) -> &TensorField {
        &self.rho
    }

    /// f = log(dV_g / Omega)
    pub fn f(&self) -> &TensorField {
        &self.f
    }

    pub fn omega(&self) -> Result<TensorField> {
        kahler_form(&self.m, &self.j)
    }

    /// Ric_g(Omega) = Ric(g) + Hess f
    pub fn bakry_emery_tensor(&self) -> &TensorField {
        &self.ric_omega
    }

    /// Ric*_g(Omega) = g^{-1} Ric_g(Omega)
    pub fn bakry_emery_endo(&self) -> &TensorField {
        &self.ric_omega_endo
    }

    /// Ric_J(Omega) = Ric_g(Omega)' J as a 2-form.
    pub fn ricci_form_omega(&self) -> Result<TensorField> {
        let (rp, _) = type_project_form(&self.ric_omega, &self.j)?;
        form_times_endo(&rp, &self.j)
    }

    /// J-linear part of Ric*_g(Omega); equals Ric*_J(Omega)_g on Kähler states.
    pub fn ricci_endo_j(&self) -> Result<TensorField> {
        endo_10(&self.ric_omega_endo, &self.j)
    }

    /// dbar_{T_X} grad f = 1/2 (nabla nabla f + J nabla nabla f J).
    pub fn anti_hessian(&self) -> Result<TensorField> {
        let h = sharp(&hessian(&self.f, &self.m)?, &self.m)?;
        endo_01(&h, &self.j)
    }

    /// J-anti-linear part of Ric*_g(Omega).
    pub fn ricci_endo_anti(&self) -> Result<TensorField> {
        endo_01(&self.ric_omega_endo, &self.j)
    }

    /// ||g - J^* g J||
    pub fn compatibility_residual(&self) -> Result<f64> {
        Ok(crate::spectral_fields::linf(&self.g().sub(&pullback_j(self.g(), &self.j)?)?))
    }
}

/// g = delta + 1/2 (Hess phi)' with the given J.
pub fn potential_metric(grid: &TorusGrid, phi: &FourierSpec, j: &TensorField) -> Result<TensorField> {
    phi.validate(grid)?;
    let d = grid.dim();
    let mut hess = TensorField::zeros(*grid, crate::spectral_fields::BILINEAR);
    for a in 0..d {
        for b in 0..d {
            let v = phi.derivative(a).derivative(b).synthesize(grid)?.into_data();
            hess.comp_mut(a * d + b).copy_from_slice(&v);
        }
    }
    let (hp, _) = type_project_form(&hess, j)?;
    TensorField::flat_metric(*grid).add(&hp.scale(0.5))
}
