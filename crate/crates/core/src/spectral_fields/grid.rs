use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// Uniform periodic sampling of the unit torus R^{2n}/Z^{2n}.
///
/// Axes are ordered (x_1..x_n, y_1..y_n) so that z_k = x_k + i y_k. Point
/// indices are row-major with the last axis fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
    resolution: usize,
}

impl TorusGrid {
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return contract(format!("complex dimension {n} unsupported (1 or 2)"));
        }
        if resolution < 8 || !resolution.is_power_of_two() {
            return contract(format!("resolution {resolution} must be a power of two >= 8"));
        }
        Ok(Self { n, resolution })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Real dimension 2n.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn npts(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// Largest admissible |mode| per axis for synthesized data.
    pub fn band_limit(&self) -> i64 {
        (self.resolution / 3) as i64
    }

    pub fn axis_stride(&self, axis: usize) -> usize {
        self.resolution.pow((self.dim() - 1 - axis) as u32)
    }

    pub fn axis_index(&self, p: usize, axis: usize) -> usize {
        (p / self.axis_stride(axis)) % self.resolution
    }

    /// Coordinates of sample `p`, written into the first `dim` entries.
    pub fn coords(&self, p: usize, out: &mut [f64]) {
        let h = self.spacing();
        for (a, x) in out.iter_mut().enumerate().take(self.dim()) {
            *x = self.axis_index(p, a) as f64 * h;
        }
    }

    /// Signed integer frequency of FFT bin `i`; the Nyquist bin maps to +res/2.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.resolution / 2 {
            i as i64
        } else {
            i as i64 - self.resolution as i64
        }
    }

    /// Index of the x-axis of complex coordinate k (0-based).
    pub fn x_axis(&self, k: usize) -> usize {
        k
    }

    pub fn y_axis(&self, k: usize) -> usize {
        self.n + k
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim() {
            return contract(format!("axis {axis} out of range for dimension {}", self.dim()));
        }
        Ok(())
    }
}
