//! Paths of Kähler structures, the admissible variation spaces, the
//! finite-difference oracle and the first-variation formulas.

pub mod datum;
pub mod fd;
pub mod formulas;
pub mod membership;
pub mod path;
pub mod suite;

pub use datum::VariationDatum;
pub use fd::{fd_derivative, FdDerivative};
pub use formulas::{FormulaId, Requirement, MEMBERSHIP_TOL};
pub use membership::{
    membership_d, membership_f, project, require_d, require_f, sample_d, sample_d_exact, sample_f, Constraint,
    DResiduals, FResiduals,
};
pub use path::{PathIntegrator, DEFAULT_LADDER};
pub use suite::{
    check_formula, kahler_defect_check, kahler_defect_exponent, static_identity_suite, variation_suite,
    IdentitySamples, FD_TOL, MIN_ORDER, STATIC_TOL,
};
