//! Nyström discretization on a sphere by a pole-rotated product rule.
//!
//! For each target the surface integral is taken in spherical coordinates whose pole
//! sits at the target. The Jacobian `sin(theta)` cancels the `1/|x-y|` singularity of
//! the Kelvin kernel, and the odd Cauchy-type part of its traction is annihilated by the
//! azimuthal trapezoid rule, so Gauss-Legendre in `theta` converges spectrally. Nodal
//! densities are carried to the rotated points by double-Fourier interpolation.
//!
//! Targets on one polar ring share their rotated grid up to an azimuthal shift, which
//! permutes nodes cyclically, so one interpolation matrix per ring suffices.

use super::curve::periodic_sinc;
use super::geometry::{BoundaryDiscretization, SphereGrid};
use crate::error::Result;
use crate::greens::free::static_with_gradient;
use crate::greens::QuasiKernel;
use crate::materials::LameMaterial;
use crate::special::gauss_legendre;
use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Extra azimuthal points of the rotated rule beyond the node grid.
const EXTRA_AZIMUTHS: usize = 8;

type M3 = [[f64; 3]; 3];

fn rot_y(t: f64) -> M3 {
    let (s, c) = t.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn rot_z(t: f64) -> M3 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn mul(a: &M3, b: &M3) -> M3 {
    let mut o = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            o[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    o
}

fn apply(a: &M3, v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

/// Rotated quadrature on the unit sphere: points and weights (Jacobian included).
struct LocalRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

fn local_rule(grid: &SphereGrid) -> LocalRule {
    let nt = 2 * grid.rings;
    let np = grid.azimuths() + EXTRA_AZIMUTHS;
    let (x, w) = gauss_legendre(nt);
    let mut points = Vec::with_capacity(nt * np);
    let mut weights = Vec::with_capacity(nt * np);
    for (xi, wi) in x.iter().zip(&w) {
        let th = 0.5 * PI * (xi + 1.0);
        let (st, ct) = th.sin_cos();
        for k in 0..np {
            let (sp, cp) = (2.0 * PI * k as f64 / np as f64).sin_cos();
            points.push([st * cp, st * sp, ct]);
            weights.push(0.5 * PI * wi * st * 2.0 * PI / np as f64);
        }
    }
    LocalRule { points, weights }
}

/// Interpolation weights from the nodes to the rotated points of ring `j` (azimuth 0).
fn ring_interpolation(grid: &SphereGrid, rule: &LocalRule, j: usize) -> Mat<f64> {
    let m = grid.rings;
    let np = grid.azimuths();
    let rot = rot_y(grid.polar(j));
    let mut out = Mat::<f64>::zeros(rule.points.len(), 2 * m * m);
    let mut dt = vec![[0.0; 2]; m];
    let mut dp = vec![[0.0; 2]; np];
    for (q, y) in rule.points.iter().enumerate() {
        let u = apply(&rot, y);
        let th = u[2].clamp(-1.0, 1.0).acos();
        let ph = u[1].atan2(u[0]);
        for (jj, v) in dt.iter_mut().enumerate() {
            let tj = grid.polar(jj);
            *v = [periodic_sinc(2 * m, th - tj), periodic_sinc(2 * m, th + tj)];
        }
        for (kk, v) in dp.iter_mut().enumerate() {
            let pk = grid.azimuth(kk);
            *v = [periodic_sinc(np, ph - pk), periodic_sinc(np, ph - pk - PI)];
        }
        for jj in 0..m {
            for kk in 0..np {
                out[(q, grid.index(jj, kk))] = dt[jj][0] * dp[kk][0] + dt[jj][1] * dp[kk][1];
            }
        }
    }
    out
}

/// Whole-space static single layer and traction operator on a sphere, plus the smooth
/// quasi-periodic remainder by the plain node rule when `kernel` is given.
pub(crate) fn assemble(
    disc: &BoundaryDiscretization,
    kernel: Option<&QuasiKernel>,
    mat: &LameMaterial,
    want_single: bool,
    want_traction: bool,
) -> Result<(Option<Mat<C64>>, Option<Mat<C64>>)> {
    let grid = disc.sphere.as_ref().expect("sphere discretization");
    let n = disc.len();
    let np = grid.azimuths();
    let r = grid.radius;
    let rule = local_rule(grid);
    let mq = rule.points.len();

    // target-independent kernel values in the rotated frame, 9 rows per operator
    let mut kern_s = Mat::<f64>::zeros(9, mq);
    let mut kern_t = Mat::<f64>::zeros(9, mq);
    let pole = [0.0, 0.0, 1.0];
    for q in 0..mq {
        let y = rule.points[q];
        let z = [r * (pole[0] - y[0]), r * (pole[1] - y[1]), r * (pole[2] - y[2])];
        let g = static_with_gradient(&z, mat, 3, want_traction);
        let w = rule.weights[q] * r * r;
        let t = if want_traction { g.traction(mat, &pole, 3) } else { [[C64::new(0.0, 0.0); 3]; 3] };
        for a in 0..3 {
            for b in 0..3 {
                kern_s[(3 * a + b, q)] = g.g[a][b].re * w;
                kern_t[(3 * a + b, q)] = t[a][b].re * w;
            }
        }
    }

    let mut single = want_single.then(|| Mat::<C64>::zeros(3 * n, 3 * n));
    let mut traction = want_traction.then(|| Mat::<C64>::zeros(3 * n, 3 * n));
    for j in 0..grid.rings {
        let interp = ring_interpolation(grid, &rule, j);
        let cs = want_single.then(|| &kern_s * &interp);
        let ct = want_traction.then(|| &kern_t * &interp);
        let ry = rot_y(grid.polar(j));
        for b in 0..np {
            let rot = mul(&rot_z(grid.azimuth(b)), &ry);
            let a = grid.index(j, b);
            for node in 0..n {
                let (jj, kk) = (node / np, node % np);
                let col = grid.index(jj, (kk + np - b) % np);
                for (c, out) in [(&cs, &mut single), (&ct, &mut traction)] {
                    if let (Some(c), Some(out)) = (c, out.as_mut()) {
                        let mut loc = [[0.0; 3]; 3];
                        for p in 0..3 {
                            for s in 0..3 {
                                loc[p][s] = c[(3 * p + s, col)];
                            }
                        }
                        let glob = rotate_tensor(&rot, &loc);
                        for p in 0..3 {
                            for s in 0..3 {
                                out[(3 * a + p, 3 * node + s)] = C64::new(glob[p][s], 0.0);
                            }
                        }
                    }
                }
            }
        }
    }

    if let Some(kernel) = kernel {
        for a in 0..n {
            for m in a..n {
                let z = [0, 1, 2].map(|c| disc.nodes[a][c] - disc.nodes[m][c]);
                let (rem, _) = kernel.terms(&z, want_traction)?;
                let rr = rem.reflected_conj();
                if let Some(s) = single.as_mut() {
                    add3(s, a, m, &rem.g, disc.weights[m]);
                    if m != a {
                        add3(s, m, a, &rr.g, disc.weights[a]);
                    }
                }
                if let Some(t) = traction.as_mut() {
                    add3(t, a, m, &rem.traction(mat, &disc.normals[a], 3), disc.weights[m]);
                    if m != a {
                        add3(t, m, a, &rr.traction(mat, &disc.normals[m], 3), disc.weights[a]);
                    }
                }
            }
        }
    }
    Ok((single, traction))
}

fn rotate_tensor(rot: &M3, t: &M3) -> M3 {
    let mut tmp = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tmp[i][j] = (0..3).map(|k| rot[i][k] * t[k][j]).sum();
        }
    }
    let mut o = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            o[i][j] = (0..3).map(|k| tmp[i][k] * rot[j][k]).sum();
        }
    }
    o
}

fn add3(m: &mut Mat<C64>, i: usize, j: usize, b: &[[C64; 3]; 3], w: f64) {
    for p in 0..3 {
        for s in 0..3 {
            m[(3 * i + p, 3 * j + s)] += b[p][s] * w;
        }
    }
}

#[cfg(test)]
/// Double-Fourier interpolation of nodal values at a point given by its unit direction.
pub(crate) fn interpolate(grid: &SphereGrid, values: &[f64], u: &[f64; 3]) -> f64 {
    let m = grid.rings;
    let np = grid.azimuths();
    let th = u[2].clamp(-1.0, 1.0).acos();
    let ph = u[1].atan2(u[0]);
    let mut s = 0.0;
    for j in 0..m {
        let tj = grid.polar(j);
        let (d1, d2) = (periodic_sinc(2 * m, th - tj), periodic_sinc(2 * m, th + tj));
        for k in 0..np {
            let pk = grid.azimuth(k);
            s += values[grid.index(j, k)] * (d1 * periodic_sinc(np, ph - pk) + d2 * periodic_sinc(np, ph - pk - PI));
        }
    }
    s
}
