//! Gaussian-regularized Fourier sums with Richardson extrapolation in the regulator.
//!
//! Independent of the Ewald split: the series `sum_xi G^(xi) e^{i xi.x} e^{-eps |xi|^2}` is
//! the heat-smoothed tensor `e^{eps Delta} G`. Away from lattice points the smoothing error is
//! `eps * Delta G` plus terms of order `exp(-dist^2 / (4 eps))`, and `Delta^2 G` vanishes there,
//! so two regulator levels remove it.

use super::free::dyadic_coefficient;
use crate::materials::{LameMaterial, QuasiMomentum};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
/// Truncate where `eps |xi|^2` exceeds this.
const DECAY: f64 = 40.0;

fn truncation(eps: f64) -> i64 {
    (((DECAY / eps).sqrt() + PI) / (2.0 * PI)).ceil() as i64 + 1
}

/// Regularized sum of the Fourier series of `G^{alpha,0}` at `x` for one `eps`.
pub fn regularized_sum(x: &[f64], alpha: &QuasiMomentum, mat: &LameMaterial, eps: f64) -> [[C64; 3]; 3] {
    let d = alpha.dim();
    let a = alpha.padded();
    let nmax = truncation(eps);
    let len = (2 * nmax + 1) as usize;
    let c0 = dyadic_coefficient(mat, 0);
    let mut xi = vec![[0.0; 3]; len];
    let mut ph = vec![[ZERO; 3]; len];
    let mut gauss = vec![[0.0; 3]; len];
    for (idx, n) in (-nmax..=nmax).enumerate() {
        for c in 0..d {
            let v = 2.0 * PI * n as f64 + a[c];
            xi[idx][c] = v;
            ph[idx][c] = C64::from_polar(1.0, v * x[c]);
            gauss[idx][c] = (-eps * v * v).exp();
        }
    }
    let mut acc = [[ZERO; 3]; 3];
    let n3 = if d == 3 { len } else { 1 };
    for i0 in 0..len {
        for i1 in 0..len {
            let p01 = ph[i0][0] * ph[i1][1];
            let g01 = gauss[i0][0] * gauss[i1][1];
            for i2 in 0..n3 {
                let k = [xi[i0][0], xi[i1][1], if d == 3 { xi[i2][2] } else { 0.0 }];
                let q = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if eps * q > DECAY + 5.0 {
                    continue;
                }
                let (phase, g) = if d == 3 { (p01 * ph[i2][2], g01 * gauss[i2][2]) } else { (p01, g01) };
                let w = phase * g;
                let iso = -1.0 / (mat.mu * q);
                let dy = c0 / (q * q);
                for i in 0..d {
                    for j in i..d {
                        let mut c = dy * k[i] * k[j];
                        if i == j {
                            c += iso;
                        }
                        acc[i][j] += w * c;
                    }
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            acc[i][j] = acc[j][i];
        }
    }
    acc
}

/// `G^{alpha,0}(x)` from regulator levels `eps0` and `eps0 / 2`, extrapolated to zero.
///
/// The neglected heat-kernel tail is of order `exp(-dist^2 / (4 eps0))`: at distance
/// `11 sqrt(eps0)` from the nearest lattice point it is below `1e-14`.
pub fn quasi_static_regularized(x: &[f64], alpha: &QuasiMomentum, mat: &LameMaterial, eps0: f64) -> [[C64; 3]; 3] {
    let a = regularized_sum(x, alpha, mat, eps0);
    let b = regularized_sum(x, alpha, mat, 0.5 * eps0);
    richardson(&a, &b)
}

/// `R^alpha(0)` in three dimensions from the regularized lattice sum minus the regularized
/// whole-space integral `(-1/mu + c_0/3) I / (4 pi^{3/2} sqrt(eps))`.
pub fn remainder_origin_regularized(alpha: &QuasiMomentum, mat: &LameMaterial, eps0: f64) -> [[C64; 3]; 3] {
    assert_eq!(alpha.dim(), 3, "the whole-space integral is only convergent in three dimensions");
    let c0 = dyadic_coefficient(mat, 0);
    let level = |eps: f64| {
        let mut s = regularized_sum(&[0.0; 3], alpha, mat, eps);
        let free = (-1.0 / mat.mu + c0 / 3.0) / (4.0 * PI.powf(1.5) * eps.sqrt());
        for (i, row) in s.iter_mut().enumerate() {
            row[i] -= free;
        }
        s
    };
    richardson(&level(eps0), &level(0.5 * eps0))
}

fn richardson(a: &[[C64; 3]; 3], b: &[[C64; 3]; 3]) -> [[C64; 3]; 3] {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = b[i][j] * 2.0 - a[i][j];
        }
    }
    out
}
