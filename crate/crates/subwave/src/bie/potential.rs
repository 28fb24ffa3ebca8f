//! Off-boundary evaluation of single-layer potentials.
//!
//! Curves are resampled four times finer by trigonometric interpolation of the density
//! before the trapezoid rule is applied; the sphere uses its node rule directly. Points
//! closer to the boundary than twice the local node spacing are refused.

use super::curve::trig_interpolation;
use super::{assemble_single_layer, Background, BoundaryDiscretization, Factorized};
use crate::error::{Error, Result};
use crate::greens::free::static_with_gradient;
use crate::greens::{KernelDerivs, LatticeSumConfig, QuasiKernel, series_order, check_window};
use crate::materials::{LameMaterial, QuasiMomentum};
use faer::Mat;
use num_complex::Complex64 as C64;

const UPSAMPLE: usize = 4;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Source rule: points, weights and the density carried onto them.
struct Sources {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    density: Vec<[C64; 3]>,
}

fn sources(disc: &BoundaryDiscretization, density: &[C64]) -> Result<Sources> {
    let d = disc.dim;
    if density.len() != disc.unknowns() {
        return Err(Error::Dimension(format!("density of length {} for {} unknowns", density.len(), disc.unknowns())));
    }
    if d == 3 {
        let density = (0..disc.len()).map(|n| [density[3 * n], density[3 * n + 1], density[3 * n + 2]]).collect();
        return Ok(Sources { points: disc.nodes.clone(), weights: disc.weights.clone(), density });
    }
    let (points, _, weights) = disc.upsampled_curve(UPSAMPLE);
    let n = disc.len();
    let interp = trig_interpolation(n, UPSAMPLE * n);
    let mut fine = vec![[ZERO; 3]; points.len()];
    for a in 0..2 {
        let coarse = Mat::from_fn(n, 1, |i, _| density[2 * i + a]);
        let re = &interp * Mat::from_fn(n, 1, |i, _| coarse[(i, 0)].re);
        let im = &interp * Mat::from_fn(n, 1, |i, _| coarse[(i, 0)].im);
        for (q, v) in fine.iter_mut().enumerate() {
            v[a] = C64::new(re[(q, 0)], im[(q, 0)]);
        }
    }
    Ok(Sources { points, weights, density: fine })
}

fn nearest_image(z: [f64; 3], d: usize) -> ([f64; 3], [f64; 3]) {
    let mut shift = [0.0; 3];
    let mut r = z;
    for a in 0..d {
        shift[a] = z[a].round();
        r[a] -= shift[a];
    }
    (r, shift)
}

/// Distance to the boundary, periodically reduced in the quasi-periodic setting.
fn boundary_distance(disc: &BoundaryDiscretization, background: &Background, x: &[f64; 3], src: &[[f64; 3]]) -> f64 {
    let d = disc.dim;
    src.iter()
        .map(|y| {
            let mut z = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
            if matches!(background, Background::Quasi(_)) {
                z = nearest_image(z, d).0;
            }
            z[..d].iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Refuses points within twice the local node spacing of the boundary.
pub fn check_far_field(disc: &BoundaryDiscretization, background: &Background, points: &[[f64; 3]]) -> Result<()> {
    let (fine, _, _) = if disc.dim == 2 {
        disc.upsampled_curve(UPSAMPLE)
    } else {
        (disc.nodes.clone(), Vec::new(), Vec::new())
    };
    for x in points {
        let distance = boundary_distance(disc, background, x, &fine);
        let nearest = (0..disc.len())
            .min_by(|&i, &j| {
                let di = boundary_distance(disc, background, x, &disc.nodes[i..=i]);
                let dj = boundary_distance(disc, background, x, &disc.nodes[j..=j]);
                di.total_cmp(&dj)
            })
            .unwrap_or(0);
        let h_min = 2.0 * disc.spacing(nearest);
        if distance < h_min {
            return Err(Error::NearField { distance, h_min });
        }
    }
    Ok(())
}

/// Whether `x` (periodically reduced in the quasi-periodic setting) lies inside `D`.
pub fn contains(disc: &BoundaryDiscretization, background: &Background, x: &[f64; 3]) -> bool {
    let c = disc.shape.center();
    let d = disc.dim;
    let mut z = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
    if matches!(background, Background::Quasi(_)) {
        z = nearest_image(z, d).0;
    }
    if let Some(g) = &disc.sphere {
        return z.iter().map(|v| v * v).sum::<f64>().sqrt() < g.radius;
    }
    let (fine, _, _) = disc.upsampled_curve(UPSAMPLE);
    let mut winding = 0.0;
    for q in 0..fine.len() {
        let a = &fine[q];
        let b = &fine[(q + 1) % fine.len()];
        let (ax, ay) = (a[0] - c[0] - z[0], a[1] - c[1] - z[1]);
        let (bx, by) = (b[0] - c[0] - z[0], b[1] - c[1] - z[1]);
        winding += (ax * by - ay * bx).atan2(ax * bx + ay * by);
    }
    winding.abs() > std::f64::consts::PI
}

/// Kernel `G^{alpha,k}` (or whole-space `G^0`) with gradient at arbitrary `z` off the lattice.
struct PointKernel {
    d: usize,
    mat: LameMaterial,
    quasi: Option<(QuasiKernel, QuasiMomentum)>,
    k2: C64,
}

impl PointKernel {
    fn new(background: &Background, k: C64, mat: &LameMaterial, cfg: &LatticeSumConfig, d: usize) -> Result<Self> {
        let mat = mat.validated(d)?;
        let quasi = match background {
            Background::Quasi(a) => {
                let lmax = if k == ZERO {
                    0
                } else {
                    if d == 3 {
                        return Err(Error::Unsupported("three-dimensional potentials are static only".into()));
                    }
                    check_window(k, a, &mat)?;
                    series_order(k, a, &mat, cfg.target_tol)
                };
                Some((QuasiKernel::new(a, &mat, cfg, lmax)?, a.clone()))
            }
            Background::Free => {
                if k != ZERO {
                    return Err(Error::Unsupported("whole-space potentials are static only".into()));
                }
                None
            }
        };
        Ok(Self { d, mat, quasi, k2: k * k })
    }

    fn eval(&self, z: [f64; 3], grad: bool) -> Result<KernelDerivs> {
        let Some((kernel, alpha)) = &self.quasi else {
            return Ok(static_with_gradient(&z, &self.mat, self.d, grad));
        };
        let (z, shift) = nearest_image(z, self.d);
        let a = alpha.padded();
        let phase = C64::from_polar(1.0, a[0] * shift[0] + a[1] * shift[1] + a[2] * shift[2]);
        let (rem, series) = kernel.terms(&z, grad)?;
        let mut g = static_with_gradient(&z, &self.mat, self.d, grad);
        g.add_scaled(&rem, C64::new(1.0, 0.0));
        let mut kp = self.k2;
        for s in &series {
            g.add_scaled(s, kp);
            kp *= self.k2;
        }
        let mut out = KernelDerivs::default();
        out.add_scaled(&g, phase);
        Ok(out)
    }
}

fn evaluate(
    disc: &BoundaryDiscretization,
    background: &Background,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    density: &[C64],
    points: &[[f64; 3]],
    normals: Option<&[[f64; 3]]>,
) -> Result<Vec<[C64; 3]>> {
    let d = disc.dim;
    check_far_field(disc, background, points)?;
    let src = sources(disc, density)?;
    let kernel = PointKernel::new(background, k, mat, cfg, d)?;
    let mut out = Vec::with_capacity(points.len());
    for (p, x) in points.iter().enumerate() {
        let mut u = [ZERO; 3];
        for ((y, w), phi) in src.points.iter().zip(&src.weights).zip(&src.density) {
            let z = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
            let g = kernel.eval(z, normals.is_some())?;
            let m = match normals {
                Some(nu) => g.traction(&kernel.mat, &nu[p], d),
                None => g.g,
            };
            for a in 0..d {
                for b in 0..d {
                    u[a] += m[a][b] * phi[b] * *w;
                }
            }
        }
        out.push(u);
    }
    Ok(out)
}

/// `S~[phi](x)` at points away from the boundary.
pub fn single_layer_potential(
    disc: &BoundaryDiscretization,
    background: &Background,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    density: &[C64],
    points: &[[f64; 3]],
) -> Result<Vec<[C64; 3]>> {
    evaluate(disc, background, k, mat, cfg, density, points, None)
}

/// Traction `d S~[phi] / d nu` at points away from the boundary, for the given unit normals.
#[allow(clippy::too_many_arguments)]
pub fn single_layer_traction(
    disc: &BoundaryDiscretization,
    background: &Background,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    density: &[C64],
    points: &[[f64; 3]],
    normals: &[[f64; 3]],
) -> Result<Vec<[C64; 3]>> {
    if normals.len() != points.len() {
        return Err(Error::Dimension("one normal per evaluation point is required".into()));
    }
    evaluate(disc, background, k, mat, cfg, density, points, Some(normals))
}

/// Exterior field `S~^{alpha,k}[(S^{alpha,k})^{-1}[f]]` with `k = sqrt(rho) omega` for a
/// boundary trace `f`, at points of `Y \ D` away from the boundary.
pub fn exterior_field(
    disc: &BoundaryDiscretization,
    alpha: &QuasiMomentum,
    omega: f64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    trace: &[C64],
    points: &[[f64; 3]],
) -> Result<Vec<[C64; 3]>> {
    let bg = Background::Quasi(alpha.clone());
    if let Some(x) = points.iter().find(|x| contains(disc, &bg, x)) {
        return Err(Error::Geometry(format!("evaluation point {:?} lies inside the inclusion", &x[..disc.dim])));
    }
    check_far_field(disc, &bg, points)?;
    let k = C64::new(mat.rho.sqrt() * omega, 0.0);
    let s = assemble_single_layer(disc, &bg, k, mat, cfg)?;
    let f = Factorized::new(s.entries)?;
    let rhs = Mat::from_fn(trace.len(), 1, |i, _| trace[i]);
    let psi: Vec<C64> = f.solve(rhs.as_ref()).col(0).iter().copied().collect();
    single_layer_potential(disc, &bg, k, mat, cfg, &psi, points)
}
