use std::sync::{Arc, Mutex};

use super::datum::VariationDatum;
use crate::bakry_emery::KahlerState;
use crate::error::{contract, Error, Result};
use crate::riemannian_core::{transpose_g, MetricField};
use crate::spectral_fields::{invert_matrix, linf, TensorField, ENDO};

/// The straight metric path g_t = g + t v with J_t from the ODE
/// 2 J' = J g_t^{-1} v - g_t^{-1} v J, integrated pointwise with RK4.
#[derive(Clone, Debug)]
pub struct PathIntegrator {
    datum: VariationDatum,
    pub(crate) ladder: Vec<f64>,
    /// Largest RK4 step.
    pub(crate) max_step: f64,
    drift: Option<TensorField>,
    /// States already built by `state_at`, keyed by the bits of t. Every
    /// formula in a suite evaluates on the same ladder, so they share these.
    states: Arc<Mutex<Vec<(u64, KahlerState)>>>,
}

pub const DEFAULT_LADDER: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

impl PathIntegrator {
    pub fn new(datum: VariationDatum) -> Self {
        Self { datum, ladder: DEFAULT_LADDER.to_vec(), max_step: 6.25e-4, drift: None, states: Arc::default() }
    }

    /// Adds J' += [J, W], which keeps J^2 = -I but breaks J' = (J')^T.
    /// Used as a negative control.
    pub fn with_skew_drift(mut self, w: TensorField) -> Result<Self> {
        if w.slots() != ENDO || w.grid() != self.datum.state().grid() {
            return contract("drift must be an endomorphism on the state grid");
        }
        self.drift = Some(w);
        self.states = Arc::default();
        Ok(self)
    }

    pub fn with_ladder(mut self, ladder: &[f64]) -> Self {
        self.ladder = ladder.to_vec();
        self
    }

    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn datum(&self) -> &VariationDatum {
        &self.datum
    }

    pub fn g_at(&self, t: f64) -> Result<TensorField> {
        self.datum.state().g().add(&self.datum.v().scale(t))
    }

    pub fn j_at(&self, t: f64) -> Result<TensorField> {
        let base = self.datum.state();
        let grid = *base.grid();
        let d = grid.dim();
        let npts = grid.npts();
        let steps = ((t.abs() / self.max_step).ceil() as usize).max(1);
        let h = t / steps as f64;
        let (g0, v, j0) = (base.g(), self.datum.v(), base.j());
        let mut out = TensorField::zeros(grid, ENDO);
        // usual matrices: M[b][a] = T(a, b) for endomorphisms, plain for forms
        let mut gm = vec![0.0; d * d];
        let mut vm = vec![0.0; d * d];
        let mut wm = vec![0.0; d * d];
        let mut jm = vec![0.0; d * d];
        let mut inv = vec![0.0; d * d];
        let mut k = [vec![0.0; d * d], vec![0.0; d * d], vec![0.0; d * d], vec![0.0; d * d]];
        let mut tmp = vec![0.0; d * d];
        for p in 0..npts {
            for a in 0..d {
                for b in 0..d {
                    gm[a * d + b] = g0.comp(a * d + b)[p];
                    vm[a * d + b] = v.comp(a * d + b)[p];
                    jm[b * d + a] = j0.comp(a * d + b)[p];
                    if let Some(w) = &self.drift {
                        wm[b * d + a] = w.comp(a * d + b)[p];
                    }
                }
            }
            let mut s = 0.0;
            for _ in 0..steps {
                let nodes = [(s, 0.0, None), (s + 0.5 * h, 0.5 * h, Some(0)), (s + 0.5 * h, 0.5 * h, Some(1)), (s + h, h, Some(2))];
                for (stage, (ts, c, prev)) in nodes.into_iter().enumerate() {
                    for i in 0..d * d {
                        tmp[i] = jm[i] + prev.map_or(0.0, |q: usize| c * k[q][i]);
                    }
                    let mut gt = gm.clone();
                    gt.iter_mut().zip(&vm).for_each(|(x, y)| *x += ts * y);
                    if !invert_matrix(&gt, d, &mut inv) {
                        return Err(Error::Numerical("metric along the path became singular".into()));
                    }
                    let sm = matmul(&inv, &vm, d);
                    let js = matmul(&tmp, &sm, d);
                    let sj = matmul(&sm, &tmp, d);
                    let (jw, wj) = (matmul(&tmp, &wm, d), matmul(&wm, &tmp, d));
                    for i in 0..d * d {
                        k[stage][i] = 0.5 * (js[i] - sj[i]) + (jw[i] - wj[i]);
                    }
                }
                for i in 0..d * d {
                    jm[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
                }
                s += h;
            }
            for a in 0..d {
                for b in 0..d {
                    out.comp_mut(a * d + b)[p] = jm[b * d + a];
                }
            }
        }
        Ok(out)
    }

    pub fn state_at(&self, t: f64) -> Result<KahlerState> {
        if t == 0.0 {
            return Ok(self.datum.state().clone());
        }
        let key = t.to_bits();
        if let Some((_, s)) = self.states.lock().expect("state cache").iter().find(|(k, _)| *k == key) {
            return Ok(s.clone());
        }
        let m = MetricField::new(self.g_at(t)?)?;
        let s = KahlerState::new(m, self.j_at(t)?, self.datum.state().rho().clone())?;
        self.states.lock().expect("state cache").push((key, s.clone()));
        Ok(s)
    }

    /// (||J_t^2 + I||, ||J_t + (J_t)^T_{g_t}||)
    pub fn invariant_residuals(&self, t: f64) -> Result<(f64, f64)> {
        let j = self.j_at(t)?;
        let m = MetricField::new(self.g_at(t)?)?;
        let sq = linf(&j.compose(&j)?.add(&TensorField::identity(*m.grid()))?);
        let skew = linf(&j.add(&transpose_g(&j, &m)?)?);
        Ok((sq, skew))
    }
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}
