//! Spectral verification engine for first-variation formulas of Kähler
//! structures and the Bakry-Emery-Ricci tensor on flat complex tori.

pub mod error;
pub mod report;

pub mod spectral_fields;
pub mod riemannian_core;
pub mod kahler_ops;
pub mod bakry_emery;
pub mod variation_engine;
pub mod soliton_flow;
pub mod cli_harness;

pub use error::{Error, Result};
