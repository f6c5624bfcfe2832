//! Periodic grids, spectral differentiation and pointwise tensor algebra.

pub mod field;
pub mod fourier;
pub mod grid;
pub mod norms;
pub mod snapshot;
pub mod spectral;

pub use field::{
    determinant as matrix_determinant, invert as invert_matrix, Slot, TensorField, BILINEAR, BIVECTOR, COVECTOR, ENDO,
    SCALAR, VECTOR,
};
pub use fourier::{random_field, Basis, FourierSpec, FourierTerm};
pub use grid::TorusGrid;
pub use norms::{integral, l2, l2_omega, linf, pointwise_inner, relative_residual, symmetric_residual};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader};
