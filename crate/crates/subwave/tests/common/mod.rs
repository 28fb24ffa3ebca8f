//! Shared fixtures and oracles for the integration tests.
#![allow(dead_code)]

use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use subwave::bie::{
    assemble_neumann_poincare, compute_Q_alpha, discretize_boundary, discretize_unconfined, single_layer_traction,
    Background, BoundaryDiscretization, Shape,
};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{LameMaterial, QuasiMomentum};
use subwave::spectrum::{density_integrals, dilute_q, remainder_at_origin, DiluteScaling};

pub fn unit() -> LameMaterial {
    LameMaterial::new(1.0, 1.0, 1.0)
}

pub fn cfg() -> LatticeSumConfig {
    LatticeSumConfig::default()
}

pub fn qm(a: &[f64]) -> QuasiMomentum {
    QuasiMomentum::with_default_cutoff(a).unwrap()
}

pub fn quasi(a: &[f64]) -> Background {
    Background::Quasi(qm(a))
}

pub fn circle(n: usize) -> BoundaryDiscretization {
    discretize_boundary(&Shape::circle(0.25), n).unwrap()
}

/// Max-entry difference of two matrices.
pub fn max_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn max_abs(a: &Mat<C64>) -> f64 {
    max_diff(a, &Mat::zeros(a.nrows(), a.ncols()))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Value at `h = 0` of the interpolating polynomial through `(h_j, v_j)` (Neville).
pub fn extrapolate_to_zero(h: &[f64], v: &[C64]) -> C64 {
    let mut p = v.to_vec();
    let n = h.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (p[i] * h[i + m] - p[i + 1] * h[i]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

/// Smooth nodal density on a curve, as a function of the polar angle about the centre.
pub fn smooth_density(disc: &BoundaryDiscretization) -> Vec<C64> {
    let c = disc.shape.center();
    let mut out = Vec::with_capacity(disc.unknowns());
    for x in &disc.nodes {
        let t = (x[1] - c[1]).atan2(x[0] - c[0]);
        out.push(C64::new(t.cos() + 0.5 * (2.0 * t).sin(), 0.2 * t.sin()));
        out.push(C64::new(0.3 - (3.0 * t).cos(), 0.1 * (2.0 * t).cos()));
    }
    out
}

/// Offsets (in units of the node spacing) for the one-sided traction limits.
const OFFSETS: [f64; 6] = [2.5, 3.0, 3.5, 4.0, 4.5, 5.0];

/// Worst relative mismatch between extrapolated one-sided tractions of `S[phi]` and
/// `(+-1/2 I + K*)[phi]` at eight fixed boundary points of the circle.
pub fn jump_error(n: usize) -> f64 {
    let disc = circle(n);
    let bg = quasi(&[2.0, 1.0]);
    let zero = C64::new(0.0, 0.0);
    let phi = smooth_density(&disc);
    let kstar = assemble_neumann_poincare(&disc, &bg, zero, &unit(), &cfg()).unwrap();
    let kphi = kstar.apply(&phi).unwrap();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..8 {
        let node = j * n / 8;
        let (x, nu) = (disc.nodes[node], disc.normals[node]);
        let h: Vec<f64> = OFFSETS.iter().map(|c| c * disc.spacing(node)).collect();
        for side in [1.0, -1.0] {
            let pts: Vec<[f64; 3]> = h.iter().map(|t| [0, 1, 2].map(|a| x[a] + side * t * nu[a])).collect();
            let normals = vec![nu; pts.len()];
            let tr = single_layer_traction(&disc, &bg, zero, &unit(), &cfg(), &phi, &pts, &normals).unwrap();
            for a in 0..2 {
                let v: Vec<C64> = tr.iter().map(|t| t[a]).collect();
                let limit = extrapolate_to_zero(&h, &v);
                let target = kphi[2 * node + a] + phi[2 * node + a] * (0.5 * side);
                worst = worst.max((limit - target).norm());
                scale = scale.max(target.norm());
            }
        }
    }
    worst / scale
}

/// Residuals `|Q_direct - Q_dilute|` for the sphere `r = s/2` at `s = 0.1, 0.05`, and the
/// relative defect of the whole-space scaling law `Q^{sD} = s Q^D`.
pub struct DiluteCheck {
    pub residuals: [f64; 2],
    pub scaling_defect: f64,
}

pub fn dilute_check(nodes: usize) -> DiluteCheck {
    let alpha = qm(&[PI, PI, PI]);
    let unit_shape = discretize_unconfined(&Shape::sphere(0.5), nodes).unwrap();
    let qd = compute_Q_alpha(&unit_shape, &Background::Free, &unit(), &cfg()).unwrap().entries;
    let r0 = remainder_at_origin(&alpha, &unit(), &cfg()).unwrap();
    let xi = density_integrals(&qd);
    let mut residuals = [0.0; 2];
    let mut scaling_defect = 0.0f64;
    for (slot, s) in [0.1, 0.05].into_iter().enumerate() {
        let shape = Shape::sphere(0.5 * s);
        let small_free = discretize_unconfined(&shape, nodes).unwrap();
        let qs = compute_Q_alpha(&small_free, &Background::Free, &unit(), &cfg()).unwrap().entries;
        let scaled: Mat<C64> = &qd * faer::Scale(C64::new(s, 0.0));
        scaling_defect = scaling_defect.max(max_diff(&qs, &scaled) / max_abs(&scaled));
        let disc = discretize_boundary(&shape, nodes).unwrap();
        let direct = compute_Q_alpha(&disc, &Background::Quasi(alpha), &unit(), &cfg()).unwrap().entries;
        let dilute = dilute_q(&qd, &DiluteScaling::new(s, 1e-6).unwrap(), &r0, &xi).unwrap();
        residuals[slot] = (&direct - &dilute).norm_l2();
    }
    DiluteCheck { residuals, scaling_defect }
}
