//! The weighted volume f = log(dV_g / Omega), the Bakry-Emery-Ricci tensor,
//! its Ricci-form and anti-Hessian components, and their decompositions.

pub mod decomposition;
pub mod state;

pub use decomposition::{
    anti_hessian_vector_route, decomposition_residuals, i_ddbar, integral_against_omega, ricci_form_density,
    ricci_form_volume, ricci_form_weighted,
};
pub use state::{potential_metric, KahlerState};
