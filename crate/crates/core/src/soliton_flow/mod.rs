//! Spectral RK4 integration of the soliton-Kähler-Ricci flow on (g, J) with
//! Omega held fixed, plus the diagnostics that are tracked along it.

pub mod evolution;
pub mod export;
pub mod flow;
pub mod velocity;

pub use evolution::{
    check_evolution, evol_a_rhs, evol_a_rhs_form, evol_b_rhs, evol_b_rhs_form, evolution_ladder, evolution_refinement,
    evolution_residuals, EvolutionForm, MID_TOL, MIN_DECAY_ORDER, T0_TOL,
};
pub use export::{export_trajectory, TrajectoryManifest};
pub use flow::{flow_step, run_flow, FlowAbort, FlowConfig, FlowDiagnostics, FlowState, Trajectory};
pub use velocity::{
    constraint_residual, kahler_residual, omega_velocity_residual, sign_candidates, skrf_components, skrf_velocity,
    FlowVariant,
};
