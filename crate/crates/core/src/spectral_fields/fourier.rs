use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::TensorField;
use super::grid::TorusGrid;
use crate::error::{contract, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Cos,
    Sin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub mode: Vec<i64>,
    pub amplitude: f64,
    #[serde(default = "default_basis")]
    pub basis: Basis,
}

fn default_basis() -> Basis {
    Basis::Cos
}

/// Band-limited real scalar: sum of a * cos(2 pi k.x) or a * sin(2 pi k.x).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourierSpec {
    pub terms: Vec<FourierTerm>,
}

impl FourierSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, mode: &[i64], amplitude: f64, basis: Basis) -> Self {
        self.terms.push(FourierTerm { mode: mode.to_vec(), amplitude, basis });
        self
    }

    pub fn cos(self, mode: &[i64], amplitude: f64) -> Self {
        self.term(mode, amplitude, Basis::Cos)
    }

    pub fn sin(self, mode: &[i64], amplitude: f64) -> Self {
        self.term(mode, amplitude, Basis::Sin)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    /// Sum of absolute amplitudes (a bound on the sup norm).
    pub fn total_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.abs()).sum()
    }

    pub fn max_mode(&self) -> i64 {
        self.terms.iter().flat_map(|t| t.mode.iter().map(|k| k.abs())).max().unwrap_or(0)
    }

    pub fn validate(&self, grid: &TorusGrid) -> Result<()> {
        for t in &self.terms {
            if t.mode.len() != grid.dim() {
                return contract(format!("mode {:?} has {} entries, grid dimension is {}", t.mode, t.mode.len(), grid.dim()));
            }
            if !t.amplitude.is_finite() {
                return contract("non-finite amplitude");
            }
        }
        if self.max_mode() > grid.band_limit() {
            return contract(format!(
                "mode {} exceeds band limit {} at resolution {}",
                self.max_mode(),
                grid.band_limit(),
                grid.resolution()
            ));
        }
        Ok(())
    }

    pub fn eval_at(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let ph = 2.0 * PI * t.mode.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>();
                match t.basis {
                    Basis::Cos => t.amplitude * ph.cos(),
                    Basis::Sin => t.amplitude * ph.sin(),
                }
            })
            .sum()
    }

    /// Analytic partial along `axis`, again a FourierSpec.
    pub fn derivative(&self, axis: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let w = 2.0 * PI * t.mode[axis] as f64;
                match t.basis {
                    Basis::Cos => FourierTerm { mode: t.mode.clone(), amplitude: -w * t.amplitude, basis: Basis::Sin },
                    Basis::Sin => FourierTerm { mode: t.mode.clone(), amplitude: w * t.amplitude, basis: Basis::Cos },
                }
            })
            .collect();
        Self { terms }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.amplitude *= s);
        out
    }

    pub fn synthesize(&self, grid: &TorusGrid) -> Result<TensorField> {
        self.validate(grid)?;
        let mut x = vec![0.0; grid.dim()];
        let vals = (0..grid.npts())
            .map(|p| {
                grid.coords(p, &mut x);
                self.eval_at(&x)
            })
            .collect();
        TensorField::scalar(*grid, vals)
    }

    /// Seeded random spec with `nterms` terms, modes in [-kmax, kmax], amplitudes
    /// scaled so that the sum of |a| equals `amplitude`.
    pub fn random(grid: &TorusGrid, nterms: usize, kmax: i64, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kmax = kmax.min(grid.band_limit());
        let mut terms: Vec<FourierTerm> = (0..nterms)
            .map(|_| {
                let mode = (0..grid.dim()).map(|_| rng.gen_range(-kmax..=kmax)).collect();
                let basis = if rng.gen_bool(0.5) { Basis::Cos } else { Basis::Sin };
                FourierTerm { mode, amplitude: rng.gen_range(-1.0..1.0), basis }
            })
            .collect();
        let total: f64 = terms.iter().map(|t| t.amplitude.abs()).sum();
        if total > 0.0 {
            terms.iter_mut().for_each(|t| t.amplitude *= amplitude / total);
        }
        Self { terms }
    }
}

/// Deterministic random band-limited tensor field, each component an
/// independent FourierSpec.
pub fn random_field(
    grid: &TorusGrid,
    slots: &[super::field::Slot],
    nterms: usize,
    kmax: i64,
    amplitude: f64,
    seed: u64,
) -> TensorField {
    let mut out = TensorField::zeros(*grid, slots);
    for c in 0..out.ncomp() {
        let spec = FourierSpec::random(grid, nterms, kmax, amplitude, seed.wrapping_mul(0x9E37_79B9).wrapping_add(c as u64));
        let vals = spec.synthesize(grid).expect("random spec within band").into_data();
        out.comp_mut(c).copy_from_slice(&vals);
    }
    out
}
