//! Levi-Civita calculus: Christoffel symbols, curvature, Hessians, divergences
//! and their volume-twisted versions.

pub mod calculus;
pub mod metric;

pub use calculus::{
    alternating_sum, covariant_derivative, curvature, d_operator, differential, divergence, exterior_derivative, flat, gradient, hessian, interior,
    omega_divergence, omega_laplacian, ricci, rough_laplacian, scalar_curvature, sharp, symmetrized_nabla,
    transpose_g,
};
pub use metric::{is_spd, MetricField};
