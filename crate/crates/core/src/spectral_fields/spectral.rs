use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, Plans>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(len: usize) -> Plans {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry(len)
            .or_insert_with(|| (planner.plan_fft_forward(len), planner.plan_fft_inverse(len)))
            .clone()
    })
}

/// In-place multidimensional FFT, axis by axis. The inverse is normalized by 1/N.
pub fn fft_nd(grid: &TorusGrid, buf: &mut [Complex64], inverse: bool) {
    let res = grid.resolution();
    let (fwd, inv) = plans(res);
    let fft = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); res];
    let npts = buf.len();
    for axis in 0..grid.dim() {
        let stride = grid.axis_stride(axis);
        if stride == 1 {
            fft.process_with_scratch(buf, &mut scratch);
            continue;
        }
        let block = res * stride;
        for outer in (0..npts).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, z) in line.iter_mut().enumerate() {
                    *z = buf[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, z) in line.iter().enumerate() {
                    buf[base + j * stride] = *z;
                }
            }
        }
    }
    if inverse {
        let s = 1.0 / npts as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }
}

pub fn forward(grid: &TorusGrid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(grid, &mut buf, false);
    buf
}

pub fn inverse_real(grid: &TorusGrid, mut spec: Vec<Complex64>) -> Vec<f64> {
    fft_nd(grid, &mut spec, true);
    spec.into_iter().map(|z| z.re).collect()
}

/// Angular wavenumber 2*pi*k along `axis` for every spectral bin; the Nyquist
/// bin is zeroed so that derivatives of real data stay real.
fn derivative_symbol(grid: &TorusGrid, axis: usize) -> Vec<f64> {
    let res = grid.resolution();
    (0..grid.npts())
        .map(|p| {
            let i = grid.axis_index(p, axis);
            if 2 * i == res {
                0.0
            } else {
                2.0 * PI * grid.wavenumber(i) as f64
            }
        })
        .collect()
}

thread_local! {
    static SYMBOLS: RefCell<HashMap<(TorusGrid, usize), Arc<Vec<f64>>>> = RefCell::new(HashMap::new());
}

fn symbol(grid: &TorusGrid, axis: usize) -> Arc<Vec<f64>> {
    SYMBOLS.with(|cell| {
        cell.borrow_mut()
            .entry((*grid, axis))
            .or_insert_with(|| Arc::new(derivative_symbol(grid, axis)))
            .clone()
    })
}

fn apply_symbol(spec: &[Complex64], sym: &[f64]) -> Vec<Complex64> {
    spec.iter()
        .zip(sym)
        .map(|(z, &k)| Complex64::new(-k * z.im, k * z.re))
        .collect()
}

/// Spectral partial derivative of one scalar component along `axis`.
pub fn partial(grid: &TorusGrid, values: &[f64], axis: usize) -> Vec<f64> {
    let spec = forward(grid, values);
    inverse_real(grid, apply_symbol(&spec, &symbol(grid, axis)))
}

/// All first partials of one scalar component, sharing the forward transform.
pub fn gradient(grid: &TorusGrid, values: &[f64]) -> Vec<Vec<f64>> {
    let spec = forward(grid, values);
    (0..grid.dim())
        .map(|axis| inverse_real(grid, apply_symbol(&spec, &symbol(grid, axis))))
        .collect()
}

/// Zero every mode with some |k_a| above the band limit.
pub fn truncate(grid: &TorusGrid, values: &[f64], limit: i64) -> Vec<f64> {
    let mut spec = forward(grid, values);
    for (p, z) in spec.iter_mut().enumerate() {
        if (0..grid.dim()).any(|a| grid.wavenumber(grid.axis_index(p, a)).abs() > limit) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    inverse_real(grid, spec)
}

/// Fraction of spectral energy carried by modes beyond the band limit.
pub fn tail_fraction(grid: &TorusGrid, values: &[f64], limit: i64) -> f64 {
    let spec = forward(grid, values);
    let mut total = 0.0;
    let mut tail = 0.0;
    for (p, z) in spec.iter().enumerate() {
        let e = z.norm_sqr();
        total += e;
        if (0..grid.dim()).any(|a| grid.wavenumber(grid.axis_index(p, a)).abs() > limit) {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}
