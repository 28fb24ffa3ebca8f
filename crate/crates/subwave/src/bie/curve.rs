//! Nyström discretization on smooth closed curves.
//!
//! The single layer splits the kernel as `G = A0 ln|x-y| I + smooth`, integrating the
//! periodic logarithm `ln(4 sin^2((t-s)/2))` with Kress weights and the rest with the
//! trapezoid rule. The traction kernel has a Cauchy-type part; it is integrated with the
//! alternating rule (nodes at odd index offsets, doubled weights), which is spectrally
//! accurate for principal-value integrals of this form.
//!
//! The `k^2`-series coefficients `G_l`, `l >= 1`, carry the logarithmic part
//! `P_l(z) ln|z|` with the polynomial `P_l` below; it is treated like `A0 ln|z| I`.

use super::geometry::BoundaryDiscretization;
use crate::error::Result;
use crate::greens::free::{dyadic_coefficient, planar_coefficients, static_with_gradient};
use crate::greens::{KernelDerivs, QuasiKernel};
use crate::materials::LameMaterial;
use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `R_m` with `int_0^{2 pi} ln(4 sin^2((t_i - s)/2)) f(s) ds ~ sum_j R_{i-j} f(t_j)`.
pub fn kress_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let hf = half as f64;
    (0..n)
        .map(|m| {
            let arg = 2.0 * PI * m as f64 / n as f64;
            let s: f64 = (1..half).map(|k| (k as f64 * arg).cos() / k as f64).sum();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / hf * s - PI / (hf * hf) * sign
        })
        .collect()
}

/// Coefficient of `rho^{2m-2} ln rho` in the planar polyharmonic kernel of `|xi|^{-2m}`.
fn log_coefficient(m: usize) -> f64 {
    let f: f64 = (1..m).map(|k| k as f64).product();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign / (2f64.powi(2 * m as i32 - 1) * PI * f * f)
}

/// `P_l` (value and gradient) such that `G_l - P_l ln|z|` is smooth.
fn log_part(z: &[f64; 3], l: usize, mat: &LameMaterial) -> KernelDerivs {
    let a = log_coefficient(l + 1) / mat.mu.powi(l as i32 + 1);
    let c = dyadic_coefficient(mat, l) * log_coefficient(l + 2) * (2 * l + 2) as f64;
    let r2 = z[0] * z[0] + z[1] * z[1];
    let lf = l as f64;
    let p2l2 = r2.powi(l as i32 - 1); // rho^{2l-2}
    let p2l = p2l2 * r2;
    let mut out = KernelDerivs::default();
    for i in 0..2 {
        for j in 0..2 {
            let dij = if i == j { 1.0 } else { 0.0 };
            let v = -a * p2l * dij - c * p2l2 * (2.0 * lf * z[i] * z[j] + r2 * dij);
            out.g[i][j] = C64::new(v, 0.0);
            for k in 0..2 {
                let dik = if i == k { 1.0 } else { 0.0 };
                let djk = if j == k { 1.0 } else { 0.0 };
                let mut w = -a * 2.0 * lf * p2l2 * z[k] * dij
                    - c * p2l2 * (2.0 * lf * (dik * z[j] + z[i] * djk) + 2.0 * z[k] * dij);
                if l >= 2 {
                    let p2l4 = r2.powi(l as i32 - 2);
                    w -= c * (2.0 * lf - 2.0) * p2l4 * z[k] * (2.0 * lf * z[i] * z[j] + r2 * dij);
                }
                out.dg[k][i][j] = C64::new(w, 0.0);
            }
        }
    }
    out
}

/// Operator coefficient matrices `S_l` and `K_l` (`l = 0..=lmax`) on a curve.
pub(crate) struct CurveOperators {
    pub single: Vec<Mat<C64>>,
    pub traction: Vec<Mat<C64>>,
}

fn add_block(m: &mut Mat<C64>, i: usize, j: usize, b: &[[C64; 3]; 3], scale: f64) {
    for a in 0..2 {
        for c in 0..2 {
            m[(2 * i + a, 2 * j + c)] += b[a][c] * scale;
        }
    }
}

fn add_identity_block(m: &mut Mat<C64>, i: usize, j: usize, v: f64) {
    for a in 0..2 {
        m[(2 * i + a, 2 * j + a)] += C64::new(v, 0.0);
    }
}

/// Assembles the coefficient operators; `kernel = None` gives the whole-space static case.
pub(crate) fn assemble(
    disc: &BoundaryDiscretization,
    kernel: Option<&QuasiKernel>,
    mat: &LameMaterial,
    want_single: bool,
    want_traction: bool,
) -> Result<CurveOperators> {
    let n = disc.len();
    let dn = 2 * n;
    let lmax = kernel.map_or(0, |k| k.lmax());
    let h = 2.0 * PI / n as f64;
    let alt = 4.0 * PI / n as f64;
    let kress = kress_weights(n);
    let (a0, b0) = planar_coefficients(mat);
    let mut single: Vec<Mat<C64>> =
        if want_single { (0..=lmax).map(|_| Mat::zeros(dn, dn)).collect() } else { Vec::new() };
    let mut traction: Vec<Mat<C64>> =
        if want_traction { (0..=lmax).map(|_| Mat::zeros(dn, dn)).collect() } else { Vec::new() };
    let s = &disc.speeds;

    for i in 0..n {
        for j in i..n {
            let off = j - i;
            let z = sub(&disc.nodes[i], &disc.nodes[j]);
            let odd = off % 2 == 1;
            let grad = want_traction && odd;
            let (rem, series) = match kernel {
                Some(k) if want_single || grad || lmax > 0 => k.terms(&z, grad)?,
                _ => (KernelDerivs::default(), Vec::new()),
            };
            if i == j {
                if want_single {
                    let t = tangent(disc, i);
                    let m0 = &mut single[0];
                    add_identity_block(m0, i, i, 0.5 * a0 * kress[0] * s[i]);
                    let mut blk = rem.g;
                    for a in 0..2 {
                        for c in 0..2 {
                            blk[a][c] -= b0 * t[a] * t[c];
                        }
                        blk[a][a] += a0 * s[i].ln();
                    }
                    add_block(m0, i, i, &blk, h * s[i]);
                    for l in 1..=lmax {
                        add_block(&mut single[l], i, i, &series[l - 1].g, h * s[i]);
                    }
                }
                continue;
            }
            let rw = kress[off];
            let lsin = (4.0 * (PI * off as f64 / n as f64).sin().powi(2)).ln();
            let free = static_with_gradient(&z, mat, 2, grad);
            let mut g0 = free;
            g0.add_scaled(&rem, C64::new(1.0, 0.0));
            let g0r = g0.reflected_conj();
            if want_single {
                let m0 = &mut single[0];
                let mut smooth = g0.g;
                let mut smooth_r = g0r.g;
                for a in 0..2 {
                    smooth[a][a] -= 0.5 * a0 * lsin;
                    smooth_r[a][a] -= 0.5 * a0 * lsin;
                }
                add_identity_block(m0, i, j, 0.5 * a0 * rw * s[j]);
                add_block(m0, i, j, &smooth, h * s[j]);
                add_identity_block(m0, j, i, 0.5 * a0 * rw * s[i]);
                add_block(m0, j, i, &smooth_r, h * s[i]);
                for l in 1..=lmax {
                    let p = log_part(&z, l, mat);
                    let gl = &series[l - 1];
                    let glr = gl.reflected_conj();
                    let ml = &mut single[l];
                    for (src, row, col, sc) in [(&gl.g, i, j, s[j]), (&glr.g, j, i, s[i])] {
                        let mut b = *src;
                        for a in 0..2 {
                            for c in 0..2 {
                                b[a][c] = b[a][c] * h + p.g[a][c] * (0.5 * rw - 0.5 * h * lsin);
                            }
                        }
                        add_block(ml, row, col, &b, sc);
                    }
                }
            }
            if want_traction {
                let (ni, nj) = (&disc.normals[i], &disc.normals[j]);
                if odd {
                    add_block(&mut traction[0], i, j, &g0.traction(mat, ni, 2), alt * s[j]);
                    add_block(&mut traction[0], j, i, &g0r.traction(mat, nj, 2), alt * s[i]);
                }
                for l in 1..=lmax {
                    let p = log_part(&z, l, mat);
                    let pr = p.reflected_conj();
                    let (tp_i, tp_j) = (p.traction(mat, ni, 2), pr.traction(mat, nj, 2));
                    let ml = &mut traction[l];
                    add_block(ml, i, j, &tp_i, 0.5 * rw * s[j]);
                    add_block(ml, j, i, &tp_j, 0.5 * rw * s[i]);
                    if odd {
                        let gl = &series[l - 1];
                        let glr = gl.reflected_conj();
                        let mut bi = gl.traction(mat, ni, 2);
                        let mut bj = glr.traction(mat, nj, 2);
                        for a in 0..2 {
                            for c in 0..2 {
                                bi[a][c] -= tp_i[a][c] * (0.5 * lsin);
                                bj[a][c] -= tp_j[a][c] * (0.5 * lsin);
                            }
                        }
                        add_block(ml, i, j, &bi, alt * s[j]);
                        add_block(ml, j, i, &bj, alt * s[i]);
                    }
                }
            }
        }
    }
    Ok(CurveOperators { single, traction })
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn tangent(disc: &BoundaryDiscretization, i: usize) -> [f64; 2] {
    let n = disc.normals[i];
    [-n[1], n[0]]
}

/// Trigonometric interpolation matrix from `n` equispaced samples to `m` equispaced points.
pub(crate) fn trig_interpolation(n: usize, m: usize) -> Mat<f64> {
    Mat::from_fn(m, n, |q, j| {
        let t = 2.0 * PI * (q as f64 / m as f64 - j as f64 / n as f64);
        periodic_sinc(n, t)
    })
}

/// Cardinal function of `n` (even) equispaced points on the circle.
pub(crate) fn periodic_sinc(n: usize, t: f64) -> f64 {
    let half = n / 2;
    let mut s = 1.0 + (half as f64 * t).cos();
    for k in 1..half {
        s += 2.0 * (k as f64 * t).cos();
    }
    s / n as f64
}
