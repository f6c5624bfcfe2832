use crate::error::{contract, Error, Result};
use crate::spectral_fields::{linf, Slot, TensorField, TorusGrid, BILINEAR};

/// A Riemannian metric field with its inverse and Levi-Civita symbols.
#[derive(Clone, Debug)]
pub struct MetricField {
    g: TensorField,
    ginv: TensorField,
    /// Gamma^c_{ab} stored with slots (Co a, Co b, Contra c).
    christoffel: TensorField,
}

/// Symmetric positive definiteness of a row-major d x d matrix by Cholesky.
pub fn is_spd(m: &[f64], d: usize) -> bool {
    let mut l = [0.0f64; 16];
    for i in 0..d {
        for j in 0..=i {
            let mut s = m[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    true
}

impl MetricField {
    pub fn new(g: TensorField) -> Result<Self> {
        if g.slots() != BILINEAR {
            return contract("metric must have two covariant slots");
        }
        let asym = linf(&g.sub(&g.transpose_slots(0, 1)?)?);
        if asym > 1e-14 * linf(&g).max(1.0) {
            return contract(format!("metric not symmetric (gap {asym:.2e})"));
        }
        let d = g.dim();
        let spd = g.matrix_scalar(|m| if is_spd(m, d) { 1.0 } else { 0.0 })?;
        if spd.data().iter().any(|&v| v == 0.0) {
            return Err(Error::Numerical("metric lost positive definiteness".into()));
        }
        let ginv = g.inverse_matrix()?;
        let christoffel = christoffel(&g, &ginv);
        Ok(Self { g, ginv, christoffel })
    }

    pub fn flat(grid: TorusGrid) -> Self {
        Self::new(TensorField::flat_metric(grid)).expect("flat metric is valid")
    }

    pub fn grid(&self) -> &TorusGrid {
        self.g.grid()
    }

    pub fn g(&self) -> &TensorField {
        &self.g
    }

    pub fn ginv(&self) -> &TensorField {
        &self.ginv
    }

    pub fn christoffel(&self) -> &TensorField {
        &self.christoffel
    }

    /// sqrt(det g), the density of dV_g against the flat measure.
    pub fn volume_density(&self) -> TensorField {
        self.g.determinant().expect("rank 2").map(f64::sqrt)
    }

    /// ||g^{-1} g - I||_inf
    pub fn inverse_residual(&self) -> f64 {
        let prod = self.g.contract(1, &self.ginv, 0).expect("shapes");
        let id = TensorField::identity(*self.grid());
        linf(&prod.relabel(&[Slot::Co, Slot::Contra]).expect("rank").sub(&id).expect("shapes"))
    }
}

/// Gamma^c_{ab} = 1/2 g^{cd} (d_a g_{bd} + d_b g_{ad} - d_d g_{ab})
fn christoffel(g: &TensorField, ginv: &TensorField) -> TensorField {
    let d = g.dim();
    let n = g.npts();
    let dg = g.partials();
    let mut out = TensorField::zeros(*g.grid(), &[Slot::Co, Slot::Co, Slot::Contra]);
    let mut lower = vec![0.0; n];
    for a in 0..d {
        for b in 0..=a {
            for e in 0..d {
                // first-kind symbol [ab, e]
                let (x, y, z) = (dg.comp((a * d + b) * d + e), dg.comp((b * d + a) * d + e), dg.comp((e * d + a) * d + b));
                for p in 0..n {
                    lower[p] = 0.5 * (x[p] + y[p] - z[p]);
                }
                for c in 0..d {
                    let gi = ginv.comp(c * d + e);
                    let dst = out.comp_mut((a * d + b) * d + c);
                    for p in 0..n {
                        dst[p] += gi[p] * lower[p];
                    }
                }
            }
            if a != b {
                for c in 0..d {
                    let src = out.comp((a * d + b) * d + c).to_vec();
                    out.comp_mut((b * d + a) * d + c).copy_from_slice(&src);
                }
            }
        }
    }
    out
}
