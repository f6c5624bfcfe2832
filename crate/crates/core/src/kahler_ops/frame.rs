//! Holomorphic-frame oracle at the standard complex structure.
//!
//! zeta_k = 1/2 (d/dx_k - i d/dy_k). For a potential metric the hermitian
//! matrix omega_{k lbar} = delta_{kl} + d_k d_lbar phi is built from analytic
//! derivatives of the Fourier potential, so none of the real-route spectral
//! machinery enters the oracle side except for log det below.

use rustfft::num_complex::Complex64;

use crate::error::{contract, Result};
use crate::riemannian_core::{ricci, MetricField};
use crate::spectral_fields::{FourierSpec, TensorField, TorusGrid};

type C = Complex64;

/// Complex components of zeta_k in the real basis.
fn zeta(grid: &TorusGrid, k: usize) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); grid.dim()];
    v[grid.x_axis(k)] = C::new(0.5, 0.0);
    v[grid.y_axis(k)] = C::new(0.0, -0.5);
    v
}

/// dz_k(d/dx_a): 1 on x_k, i on y_k.
fn dz(grid: &TorusGrid, k: usize) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); grid.dim()];
    v[grid.x_axis(k)] = C::new(1.0, 0.0);
    v[grid.y_axis(k)] = C::new(0.0, 1.0);
    v
}

/// d_k d_lbar of an analytic spec: 1/4 [F_xkxl + F_ykyl + i (F_xkyl - F_ykxl)]
fn ddbar_spec(phi: &FourierSpec, grid: &TorusGrid, k: usize, l: usize) -> (FourierSpec, FourierSpec) {
    let (xk, yk, xl, yl) = (grid.x_axis(k), grid.y_axis(k), grid.x_axis(l), grid.y_axis(l));
    let mut re = phi.derivative(xk).derivative(xl);
    re.terms.extend(phi.derivative(yk).derivative(yl).terms);
    let mut im = phi.derivative(xk).derivative(yl);
    im.terms.extend(phi.derivative(yk).derivative(xl).scaled(-1.0).terms);
    (re.scaled(0.25), im.scaled(0.25))
}

/// Pointwise complex n x n matrices stored as [p][row*n + col].
pub type ComplexMatrices = Vec<Vec<C>>;

fn inverse(mat: &[C], n: usize) -> Vec<C> {
    match n {
        1 => vec![mat[0].inv()],
        2 => {
            let det = mat[0] * mat[3] - mat[1] * mat[2];
            vec![mat[3] / det, -mat[1] / det, -mat[2] / det, mat[0] / det]
        }
        _ => unreachable!("complex dimension is 1 or 2"),
    }
}

fn det(mat: &[C], n: usize) -> C {
    match n {
        1 => mat[0],
        _ => mat[0] * mat[3] - mat[1] * mat[2],
    }
}

/// omega_{k lbar} and its derivatives zeta_p . omega_{l rbar} for g = delta + 1/2 (Hess phi)'.
pub struct PotentialFrame {
    grid: TorusGrid,
    omega: ComplexMatrices,
    /// d_omega[p][pt][l*n + r] = zeta_p . omega_{l rbar}
    d_omega: Vec<ComplexMatrices>,
}

impl PotentialFrame {
    pub fn new(grid: &TorusGrid, phi: &FourierSpec) -> Result<Self> {
        phi.validate(grid)?;
        let n = grid.n();
        let npts = grid.npts();
        let mut omega = vec![vec![C::new(0.0, 0.0); n * n]; npts];
        let mut d_omega = vec![vec![vec![C::new(0.0, 0.0); n * n]; npts]; n];
        let mut x = vec![0.0; grid.dim()];
        for l in 0..n {
            for r in 0..n {
                let (re, im) = ddbar_spec(phi, grid, l, r);
                let derivs: Vec<_> = (0..n)
                    .map(|p| {
                        // zeta_p = 1/2 (d_xp - i d_yp) applied to re + i im
                        let (xp, yp) = (grid.x_axis(p), grid.y_axis(p));
                        let a = re.derivative(xp).scaled(0.5);
                        let b = im.derivative(yp).scaled(0.5);
                        let c = im.derivative(xp).scaled(0.5);
                        let d = re.derivative(yp).scaled(-0.5);
                        (a, b, c, d)
                    })
                    .collect();
                for pt in 0..npts {
                    grid.coords(pt, &mut x);
                    let delta = if l == r { 1.0 } else { 0.0 };
                    omega[pt][l * n + r] = C::new(delta + re.eval_at(&x), im.eval_at(&x));
                    for (p, (a, b, c, d)) in derivs.iter().enumerate() {
                        d_omega[p][pt][l * n + r] =
                            C::new(a.eval_at(&x) + b.eval_at(&x), c.eval_at(&x) + d.eval_at(&x));
                    }
                }
            }
        }
        Ok(Self { grid: *grid, omega, d_omega })
    }

    /// A^p_{k,l} = (zeta_p . omega_{l rbar}) omega^{r kbar}, indexed [p][pt][k*n + l].
    pub fn connection_coefficients(&self) -> Vec<ComplexMatrices> {
        let n = self.grid.n();
        (0..n)
            .map(|p| {
                self.omega
                    .iter()
                    .zip(&self.d_omega[p])
                    .map(|(om, dom)| {
                        let inv = inverse(om, n);
                        let mut a = vec![C::new(0.0, 0.0); n * n];
                        for k in 0..n {
                            for l in 0..n {
                                a[k * n + l] = (0..n).map(|r| dom[l * n + r] * inv[r * n + k]).sum();
                            }
                        }
                        a
                    })
                    .collect()
            })
            .collect()
    }

    /// log det omega_{k lbar} as a real scalar field.
    pub fn log_det(&self) -> Result<TensorField> {
        let n = self.grid.n();
        let vals = self.omega.iter().map(|om| det(om, n).re.ln()).collect();
        TensorField::scalar(self.grid, vals)
    }

    /// R_{k lbar} = -d_k d_lbar log det omega, indexed [pt][k*n + l].
    pub fn ricci_components(&self) -> Result<ComplexMatrices> {
        let n = self.grid.n();
        let f = self.log_det()?;
        let grads = f.partials();
        let hess = grads.partials();
        let d = self.grid.dim();
        let h = |a: usize, b: usize| hess.comp(a * d + b);
        let mut out = vec![vec![C::new(0.0, 0.0); n * n]; self.grid.npts()];
        for k in 0..n {
            for l in 0..n {
                let (xk, yk, xl, yl) = (self.grid.x_axis(k), self.grid.y_axis(k), self.grid.x_axis(l), self.grid.y_axis(l));
                for (pt, o) in out.iter_mut().enumerate() {
                    let re = 0.25 * (h(xk, xl)[pt] + h(yk, yl)[pt]);
                    let im = 0.25 * (h(xk, yl)[pt] - h(yk, xl)[pt]);
                    o[k * n + l] = -C::new(re, im);
                }
            }
        }
        Ok(out)
    }
}

/// Real-route A^p_{k,l} = dz_k(nabla_{zeta_p} zeta_l) from Christoffel symbols.
pub fn real_route_connection(m: &MetricField) -> Vec<ComplexMatrices> {
    let grid = *m.grid();
    let n = grid.n();
    let d = grid.dim();
    let gam = m.christoffel();
    (0..n)
        .map(|p| {
            let zp = zeta(&grid, p);
            (0..grid.npts())
                .map(|pt| {
                    let mut a = vec![C::new(0.0, 0.0); n * n];
                    for k in 0..n {
                        let dk = dz(&grid, k);
                        for l in 0..n {
                            let zl = zeta(&grid, l);
                            let mut s = C::new(0.0, 0.0);
                            for ia in 0..d {
                                for ib in 0..d {
                                    let w = zp[ia] * zl[ib];
                                    if w.norm_sqr() == 0.0 {
                                        continue;
                                    }
                                    for ic in 0..d {
                                        s += w * gam.comp((ia * d + ib) * d + ic)[pt] * dk[ic];
                                    }
                                }
                            }
                            a[k * n + l] = s;
                        }
                    }
                    a
                })
                .collect()
        })
        .collect()
}

/// Real-route Ric(zeta_k, zetabar_l), indexed [pt][k*n + l].
pub fn real_route_ricci(m: &MetricField) -> ComplexMatrices {
    let grid = *m.grid();
    let n = grid.n();
    let d = grid.dim();
    let ric = ricci(m);
    (0..grid.npts())
        .map(|pt| {
            let mut r = vec![C::new(0.0, 0.0); n * n];
            for k in 0..n {
                let zk = zeta(&grid, k);
                for l in 0..n {
                    let zl: Vec<C> = zeta(&grid, l).iter().map(|z| z.conj()).collect();
                    r[k * n + l] =
                        (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| zk[a] * zl[b] * ric.comp(a * d + b)[pt]).sum();
                }
            }
            r
        })
        .collect()
}

pub fn max_gap(a: &ComplexMatrices, b: &ComplexMatrices) -> Result<f64> {
    if a.len() != b.len() {
        return contract("frame data of different sizes");
    }
    Ok(a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max))
}

/// (connection gap, Ricci gap) between the analytic frame oracle and the real route.
pub fn complex_frame_oracle(m: &MetricField, phi: &FourierSpec) -> Result<(f64, f64)> {
    let frame = PotentialFrame::new(m.grid(), phi)?;
    let a_oracle = frame.connection_coefficients();
    let a_real = real_route_connection(m);
    let mut gap_a: f64 = 0.0;
    for (x, y) in a_oracle.iter().zip(&a_real) {
        gap_a = gap_a.max(max_gap(x, y)?);
    }
    let gap_r = max_gap(&frame.ricci_components()?, &real_route_ricci(m))?;
    Ok((gap_a, gap_r))
}
