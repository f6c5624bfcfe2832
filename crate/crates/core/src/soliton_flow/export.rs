use std::path::Path;

use serde::Serialize;

use super::flow::{FlowAbort, FlowConfig, FlowDiagnostics, Trajectory};
use crate::error::Result;
use crate::spectral_fields::write_snapshot;

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryManifest {
    pub config_hash: String,
    pub config: FlowConfig,
    pub n: usize,
    pub resolution: usize,
    pub times: Vec<f64>,
    pub diagnostics: Vec<FlowDiagnostics>,
    pub snapshots: Vec<String>,
    pub abort: Option<FlowAbort>,
    pub unstable: bool,
}

/// Writes g and J at every `every`-th recorded state (and the last one) into
/// `dir`, then `trajectory.json` describing the run.
pub fn export_trajectory(traj: &Trajectory, dir: &Path, config_hash: &str, every: usize) -> Result<TrajectoryManifest> {
    std::fs::create_dir_all(dir)?;
    let every = every.max(1);
    let last = traj.states.len().saturating_sub(1);
    let mut snapshots = Vec::new();
    for (k, s) in traj.states.iter().enumerate() {
        if k % every != 0 && k != last {
            continue;
        }
        for (name, field) in [("g", s.state.g()), ("j", s.state.j())] {
            let file = format!("{name}_{k:05}.bin");
            write_snapshot(&dir.join(&file), field, &format!("{name} at t = {:e}", s.t))?;
            snapshots.push(file);
        }
    }
    let grid = traj.states.first().map(|s| *s.state.grid());
    let manifest = TrajectoryManifest {
        config_hash: config_hash.to_string(),
        config: traj.config.clone(),
        n: grid.map_or(0, |g| g.n()),
        resolution: grid.map_or(0, |g| g.resolution()),
        times: traj.states.iter().map(|s| s.t).collect(),
        diagnostics: traj.states.iter().map(|s| s.diagnostics.clone()).collect(),
        snapshots,
        abort: traj.abort.clone(),
        unstable: traj.unstable,
    };
    std::fs::write(dir.join("trajectory.json"), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}
