//! Complex-structure algebra, type decompositions and the complex covariant
//! exterior operators on tangent-valued forms with their adjoints.

pub mod chern;
pub mod complex_ops;
pub mod frame;
pub mod types;

pub use chern::{chern_connection_check, chern_del, key_contract_residual};
pub use complex_ops::{
    adjoint_dbar, adjoint_dbar_omega, adjoint_del, adjoint_del_omega, adjoint_nabla, adjoint_nabla_omega, d_nabla,
    dbar_tx, del_tx, form_degree, hodge_laplacians, hook, laplacian_dbar, laplacian_del, laplacian_nabla, nabla_01,
    nabla_10, twisted,
};
pub use frame::{complex_frame_oracle, PotentialFrame};
pub use types::{
    conjugate_by_j, endo_01, endo_10, form_endo_type_gap, form_times_endo, kahler_form, omega_sharp, pullback_j,
    structure_residuals, type_project_endo, type_project_form, StructureResiduals,
};
