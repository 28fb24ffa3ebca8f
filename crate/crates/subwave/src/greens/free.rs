//! Whole-space Kelvin and Kupradze tensors.

use super::KernelDerivs;
use crate::materials::LameMaterial;
use crate::special::hankel01;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Log coefficient `A0` and dyadic coefficient `B0` of the planar static tensor
/// `A0 ln|x| I - B0 x x^T / |x|^2`.
pub fn planar_coefficients(mat: &LameMaterial) -> (f64, f64) {
    let (mu, p) = (mat.mu, mat.p_modulus());
    ((1.0 / mu + 1.0 / p) / (4.0 * PI), (1.0 / mu - 1.0 / p) / (4.0 * PI))
}

/// `c_l = mu^{-(l+1)} - (lambda + 2 mu)^{-(l+1)}`.
pub fn dyadic_coefficient(mat: &LameMaterial, l: usize) -> f64 {
    mat.mu.powi(-(l as i32 + 1)) - mat.p_modulus().powi(-(l as i32 + 1))
}

/// Static tensor and its gradient at `x != 0`.
pub fn static_with_gradient(x: &[f64; 3], mat: &LameMaterial, d: usize, want_grad: bool) -> KernelDerivs {
    let r2: f64 = x[..d].iter().map(|v| v * v).sum();
    let r = r2.sqrt();
    let mut out = KernelDerivs::default();
    if d == 2 {
        let (a0, b0) = planar_coefficients(mat);
        let lr = r.ln();
        for i in 0..2 {
            for j in 0..2 {
                let mut v = -b0 * x[i] * x[j] / r2;
                if i == j {
                    v += a0 * lr;
                }
                out.g[i][j] = C64::new(v, 0.0);
            }
        }
        if want_grad {
            let r4 = r2 * r2;
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let mut v = 2.0 * b0 * x[i] * x[j] * x[k] / r4;
                        if i == j {
                            v += a0 * x[k] / r2;
                        }
                        if i == k {
                            v -= b0 * x[j] / r2;
                        }
                        if j == k {
                            v -= b0 * x[i] / r2;
                        }
                        out.dg[k][i][j] = C64::new(v, 0.0);
                    }
                }
            }
        }
    } else {
        let c0 = dyadic_coefficient(mat, 0);
        let a = 1.0 / (4.0 * PI * mat.mu) - c0 / (8.0 * PI);
        let b = c0 / (8.0 * PI);
        let r3 = r2 * r;
        for i in 0..3 {
            for j in 0..3 {
                let mut v = -b * x[i] * x[j] / r3;
                if i == j {
                    v -= a / r;
                }
                out.g[i][j] = C64::new(v, 0.0);
            }
        }
        if want_grad {
            let r5 = r3 * r2;
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut v = 3.0 * b * x[i] * x[j] * x[k] / r5;
                        if i == j {
                            v += a * x[k] / r3;
                        }
                        if i == k {
                            v -= b * x[j] / r3;
                        }
                        if j == k {
                            v -= b * x[i] / r3;
                        }
                        out.dg[k][i][j] = C64::new(v, 0.0);
                    }
                }
            }
        }
    }
    out
}

/// Radial profile `(Phi, Phi', Phi'')` of the outgoing Helmholtz kernel with `(Delta + kappa^2) Phi = delta`.
fn helmholtz_radial(kappa: C64, r: f64, d: usize) -> (C64, C64, C64) {
    if d == 2 {
        let (h0, h1) = hankel01(kappa * r);
        let q = C64::new(0.0, 0.25);
        (-q * h0, q * kappa * h1, q * kappa * kappa * (h0 - h1 / (kappa * r)))
    } else {
        let e = (C64::i() * kappa * r).exp() / (-4.0 * PI);
        let ik = C64::i() * kappa;
        (
            e / r,
            e * (ik / r - 1.0 / (r * r)),
            e * (-kappa * kappa / r - 2.0 * ik / (r * r) + 2.0 / (r * r * r)),
        )
    }
}

/// Time-harmonic tensor `(1/mu) Phi_s I + k^{-2} grad grad (Phi_s - Phi_p)` at `x != 0`, `k != 0`.
pub fn dynamic(x: &[f64; 3], k: C64, mat: &LameMaterial, d: usize) -> [[C64; 3]; 3] {
    let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
    let ks = k / mat.mu.sqrt();
    let kp = k / mat.p_modulus().sqrt();
    let (fs, fs1, fs2) = helmholtz_radial(ks, r, d);
    let (_, fp1, fp2) = helmholtz_radial(kp, r, d);
    let k2 = k * k;
    let f1 = (fs1 - fp1) / k2;
    let f2 = (fs2 - fp2) / k2;
    let mut g = [[ZERO; 3]; 3];
    for i in 0..d {
        for j in 0..d {
            let xx = x[i] * x[j] / (r * r);
            let delta = if i == j { 1.0 } else { 0.0 };
            g[i][j] = f2 * xx + f1 / r * (delta - xx);
            if i == j {
                g[i][j] += fs / mat.mu;
            }
        }
    }
    g
}
