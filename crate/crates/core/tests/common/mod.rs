#![allow(dead_code)]

use kvc_core::bakry_emery::KahlerState;
use kvc_core::spectral_fields::{FourierSpec, TorusGrid};

pub fn grid(n: usize, res: usize) -> TorusGrid {
    TorusGrid::new(n, res).unwrap()
}

/// The curved sample configuration in one complex dimension.
pub fn curved_n1() -> KahlerState {
    let g = grid(1, 64);
    let phi = FourierSpec::new().cos(&[1, 0], 0.05).sin(&[0, 1], 0.03);
    let h = FourierSpec::new().cos(&[1, 0], 0.1);
    KahlerState::potential(&g, &phi, &h).unwrap()
}

/// A less symmetric potential state in one complex dimension.
pub fn generic_n1() -> KahlerState {
    let g = grid(1, 64);
    let phi = FourierSpec::new().cos(&[1, 1], 0.01).sin(&[2, -1], 0.004).cos(&[0, 1], 0.02);
    let h = FourierSpec::new().cos(&[1, 0], 0.1).sin(&[1, 2], 0.03);
    KahlerState::potential(&g, &phi, &h).unwrap()
}

pub fn phi_n2() -> FourierSpec {
    FourierSpec::new().cos(&[1, 0, 0, 1], 0.002).sin(&[0, 1, 1, 0], 0.0015).cos(&[0, 0, 1, 0], 0.0015)
}

pub fn curved_n2() -> KahlerState {
    let g = grid(2, 16);
    let h = FourierSpec::new().cos(&[1, 0, 0, 0], 0.05).sin(&[0, 0, 0, 1], 0.02);
    KahlerState::potential(&g, &phi_n2(), &h).unwrap()
}

pub fn pulled_back_n1() -> KahlerState {
    let g = grid(1, 64);
    let psi = FourierSpec::new().cos(&[1, 0], 1.0).sin(&[1, 1], 0.5);
    let h = FourierSpec::new().cos(&[0, 1], 0.08);
    KahlerState::pulled_back_flat(&g, &psi, 0.003, &h).unwrap()
}
