use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::soliton_flow::{FlowConfig, FlowVariant};
use crate::spectral_fields::{FourierSpec, TorusGrid};
use crate::variation_engine::DEFAULT_LADDER;

/// Largest admissible Fourier amplitude anywhere in a scenario.
pub const MAX_AMPLITUDE: f64 = 0.1;

/// Hess u + (Hess psi)' + c g.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSource {
    pub u: FourierSpec,
    #[serde(default)]
    pub psi: FourierSpec,
    #[serde(default)]
    pub c: f64,
}

/// A seeded random symmetric 2-tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    pub seed: u64,
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default = "default_kmax")]
    pub kmax: i64,
    pub amplitude: f64,
}

fn default_terms() -> usize {
    3
}

fn default_kmax() -> i64 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationSources {
    #[serde(default)]
    pub u: Vec<PotentialSource>,
    #[serde(default)]
    pub raw_v: Vec<RawSource>,
    /// Project every raw v onto D (least squares) and check the projection too.
    #[serde(default)]
    pub project_d: bool,
    #[serde(default)]
    pub project_f: bool,
    /// Include the zero variation.
    #[serde(default = "yes")]
    pub zero: bool,
}

impl Default for VariationSources {
    fn default() -> Self {
        Self { u: Vec::new(), raw_v: Vec::new(), project_d: false, project_f: false, zero: true }
    }
}

fn default_ladder() -> Vec<f64> {
    DEFAULT_LADDER.to_vec()
}

fn default_dt() -> f64 {
    1e-4
}

fn default_steps() -> usize {
    100
}

fn default_every() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub resolution: usize,
    /// Kähler potential of the metric; empty means flat.
    #[serde(default)]
    pub phi: FourierSpec,
    /// Omega = e^{-h} dx.
    #[serde(default)]
    pub h: FourierSpec,
    #[serde(default)]
    pub variations: VariationSources,
    #[serde(default = "default_ladder")]
    pub eps_ladder: Vec<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub flow_variant: FlowVariant,
    #[serde(default = "default_every")]
    pub snapshot_every: usize,
    #[serde(default)]
    pub seed: u64,
    /// Replaces every tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Per check_id tolerances, applied after `tolerance`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n, self.resolution).map_err(|e| bad(e.to_string()))
    }

    /// Every schema rule beyond what serde enforces. All failures are
    /// `Error::Config`.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let mut specs = vec![("phi", &self.phi), ("h", &self.h)];
        for s in &self.variations.u {
            specs.push(("variations.u", &s.u));
            specs.push(("variations.psi", &s.psi));
        }
        for (name, spec) in specs {
            spec.validate(&grid).map_err(|e| bad(format!("{name}: {e}")))?;
            if let Some(t) = spec.terms.iter().find(|t| t.amplitude.abs() > MAX_AMPLITUDE) {
                return Err(bad(format!("{name}: amplitude {} exceeds {MAX_AMPLITUDE}", t.amplitude)));
            }
        }
        for s in &self.variations.u {
            if !(s.c.abs() <= MAX_AMPLITUDE) {
                return Err(bad(format!("variations.u: c = {} exceeds {MAX_AMPLITUDE}", s.c)));
            }
        }
        for r in &self.variations.raw_v {
            if !(r.amplitude.abs() <= MAX_AMPLITUDE) {
                return Err(bad(format!("variations.raw_v: amplitude {} exceeds {MAX_AMPLITUDE}", r.amplitude)));
            }
            if r.kmax < 0 || r.kmax > grid.band_limit() || r.terms == 0 {
                return Err(bad(format!("variations.raw_v: need 1 <= terms and 0 <= kmax <= {}", grid.band_limit())));
            }
        }
        let l = &self.eps_ladder;
        if l.len() < 3 || l.iter().any(|e| !(*e > 0.0)) || l.windows(2).any(|w| (w[0] / w[1] - 2.0).abs() > 1e-12) {
            return Err(bad("eps_ladder needs at least three positive entries, each half the previous"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() || self.steps == 0 {
            return Err(bad("flow needs dt > 0 and steps >= 1"));
        }
        let tols = self.tolerance.iter().chain(self.tolerances.values());
        if tols.into_iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(bad("tolerances must be positive and finite"));
        }
        Ok(())
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig::new(self.dt, self.steps).with_variant(self.flow_variant)
    }

    /// Hex SHA-256 of the canonical JSON serialisation, output directory excluded.
    pub fn hash(&self) -> String {
        let scenario = Self { out: None, ..self.clone() };
        let bytes = serde_json::to_vec(&scenario).expect("config serialises");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
