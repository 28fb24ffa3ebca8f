//! Leading-order subwavelength bands, bandgap reports, the dilute expansion and the
//! closed forms for a ball.
//!
//! The leading resonant frequencies at quasi-momentum `alpha` are
//! `omega_i = sqrt(beta_i / (rho |D|)) sqrt(epsilon)` with `beta_i` the eigenvalues of
//! `Q^alpha`. At `alpha = 0` the resonance `omega = 0` has multiplicity `d`; such points
//! are recorded analytically.

use crate::bie::{
    compute_Q_alpha, exterior_field, inclusion_measure, BoundaryDiscretization, Background, QAlphaMatrix,
    HERMITIAN_TOL,
};
use crate::error::{Error, Result};
use crate::greens::{smooth_remainder, LatticeSumConfig};
use crate::materials::{ContrastRegime, LameMaterial, QuasiMomentum};
use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `sqrt(beta / (rho |D|)) sqrt(epsilon)`; the single formula behind every stored frequency.
pub fn frequency_from_beta(beta: f64, rho: f64, measure: f64, epsilon: f64) -> f64 {
    (beta / (rho * measure)).sqrt() * epsilon.sqrt()
}

/// Ascending leading frequencies of the eigenvalues of `Q`.
pub fn leading_frequencies(q: &QAlphaMatrix, rho: f64, measure: f64, epsilon: f64) -> Result<Vec<f64>> {
    if let Some(b) = q.beta.iter().find(|b| **b <= 0.0) {
        return Err(Error::Positivity(*b));
    }
    if !(rho > 0.0 && measure > 0.0 && epsilon >= 0.0) {
        return Err(Error::Input("rho and |D| must be positive and epsilon non-negative".into()));
    }
    Ok(q.beta.iter().map(|b| frequency_from_beta(*b, rho, measure, epsilon)).collect())
}

/// How a band sample was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleFlag {
    Computed,
    /// Inside the near-zero cutoff: `omega = 0` with multiplicity `d`, not computed.
    Analytic,
    Failed(String),
}

impl SampleFlag {
    pub fn label(&self) -> &'static str {
        match self {
            SampleFlag::Computed => "computed",
            SampleFlag::Analytic => "analytic",
            SampleFlag::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSample {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub omega: Vec<f64>,
    pub flag: SampleFlag,
}

/// Leading-order bands sampled along a path in the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDiagram {
    pub dim: usize,
    pub samples: Vec<BandSample>,
    pub epsilon: f64,
    pub rho: f64,
    pub measure: f64,
}

impl BandDiagram {
    pub fn computed(&self) -> impl Iterator<Item = &BandSample> {
        self.samples.iter().filter(|s| s.flag == SampleFlag::Computed)
    }

    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| matches!(s.flag, SampleFlag::Failed(_))).count()
    }
}

/// A polyline through high-symmetry points of `[-pi, pi]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrillouinPath {
    pub points: Vec<Vec<f64>>,
}

impl BrillouinPath {
    /// `Gamma -> X -> M -> Gamma` in 2D, `Gamma -> X -> M -> R -> Gamma` in 3D, with
    /// `per_segment` points on each segment (start included) and the final point appended.
    pub fn standard(dim: usize, per_segment: usize) -> Result<Self> {
        let corners: Vec<Vec<f64>> = match dim {
            2 => vec![vec![0.0, 0.0], vec![PI, 0.0], vec![PI, PI], vec![0.0, 0.0]],
            3 => vec![
                vec![0.0, 0.0, 0.0],
                vec![PI, 0.0, 0.0],
                vec![PI, PI, 0.0],
                vec![PI, PI, PI],
                vec![0.0, 0.0, 0.0],
            ],
            _ => return Err(Error::Dimension(format!("no standard path in {dim} dimensions"))),
        };
        if per_segment == 0 {
            return Err(Error::Input("a path needs at least one point per segment".into()));
        }
        let mut points = Vec::new();
        for w in corners.windows(2) {
            for j in 0..per_segment {
                let t = j as f64 / per_segment as f64;
                points.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
        points.push(corners.last().unwrap().clone());
        Ok(Self { points })
    }

    pub fn from_points(points: Vec<Vec<f64>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Computes `Q^alpha` and the leading frequencies at every path point.
///
/// Points inside `alpha_min` are recorded analytically; failures are recorded and the
/// sweep fails only when more than 10% of the points fail.
pub fn sweep_brillouin(
    path: &BrillouinPath,
    disc: &BoundaryDiscretization,
    mat: &LameMaterial,
    contrast: &ContrastRegime,
    cfg: &LatticeSumConfig,
    alpha_min: f64,
) -> Result<BandDiagram> {
    let d = disc.dim;
    let measure = inclusion_measure(disc);
    let mut samples = Vec::with_capacity(path.len());
    for a in &path.points {
        if a.len() != d {
            return Err(Error::Dimension(format!("path point {a:?} in a {d}-dimensional problem")));
        }
        let alpha = QuasiMomentum::new(a, alpha_min)?;
        if alpha.near_zero() {
            samples.push(BandSample { alpha: a.clone(), beta: vec![0.0; d], omega: vec![0.0; d], flag: SampleFlag::Analytic });
            continue;
        }
        let sample = compute_Q_alpha(disc, &Background::Quasi(alpha), mat, cfg).and_then(|q| {
            let omega = leading_frequencies(&q, mat.rho, measure, contrast.epsilon)?;
            Ok(BandSample { alpha: a.clone(), beta: q.beta, omega, flag: SampleFlag::Computed })
        });
        samples.push(sample.unwrap_or_else(|e| BandSample {
            alpha: a.clone(),
            beta: Vec::new(),
            omega: Vec::new(),
            flag: SampleFlag::Failed(e.to_string()),
        }));
    }
    let diagram = BandDiagram { dim: d, samples, epsilon: contrast.epsilon, rho: mat.rho, measure };
    let failed = diagram.failures();
    if failed * 10 > diagram.samples.len() {
        return Err(Error::SweepFailed { failed, total: diagram.samples.len() });
    }
    Ok(diagram)
}

/// Leading-order gap `[omega* + eta, omega_sharp]` above the first `d` bands.
#[derive(Debug, Clone, PartialEq)]
pub struct BandgapReport {
    /// Maximum of the top leading frequency over computed samples.
    pub omega_star: f64,
    pub eta: f64,
    pub omega_sharp: f64,
    /// `None` when `omega_sharp <= omega_star + eta`.
    pub gap: Option<[f64; 2]>,
    pub epsilon_note: String,
}

impl BandgapReport {
    pub fn lower_edge(&self) -> f64 {
        self.omega_star + self.eta
    }
}

/// Default margin `0.05 omega*`.
pub const DEFAULT_ETA_FRACTION: f64 = 0.05;

/// Gap report from a band diagram; `eta = None` uses `0.05 omega*`.
pub fn bandgap_estimate(diagram: &BandDiagram, eta: Option<f64>, omega_sharp: f64) -> Result<BandgapReport> {
    let omega_star = diagram
        .computed()
        .filter_map(|s| s.omega.last().copied())
        .fold(None, |m: Option<f64>, w| Some(m.map_or(w, |m| m.max(w))))
        .ok_or_else(|| Error::Input("band diagram has no computed samples".into()))?;
    let eta = eta.unwrap_or(DEFAULT_ETA_FRACTION * omega_star);
    if !(eta > 0.0) {
        return Err(Error::Input(format!("margin eta must be positive, got {eta}")));
    }
    let lower = omega_star + eta;
    Ok(BandgapReport {
        omega_star,
        eta,
        omega_sharp,
        gap: (omega_sharp > lower).then_some([lower, omega_sharp]),
        epsilon_note: format!(
            "leading-order estimate; the interval lies in a gap only for epsilon below an \
             unquantified threshold epsilon_0 (epsilon = {:.6e})",
            diagram.epsilon
        ),
    })
}

/// Shrink factor `s` of `B = s D` with the regime check `epsilon / s^2 << 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiluteScaling {
    pub s: f64,
    pub note: Option<String>,
}

impl DiluteScaling {
    pub fn new(s: f64, epsilon: f64) -> Result<Self> {
        if !(s > 0.0 && s < 0.5) {
            return Err(Error::Input(format!("shrink factor must lie in (0, 0.5), got {s}")));
        }
        let ratio = epsilon / (s * s);
        let note = (ratio > 0.1).then(|| format!("epsilon / s^2 = {ratio:.3e} is not small; the dilute regime does not apply"));
        Ok(Self { s, note })
    }
}

/// `Q^{B,alpha}_ij ~ s Q^D_ij - s^2 sum_l (R^alpha(0) xi_i)_l Q^D_lj` with
/// `xi_i = int_{dD} (S_D)^{-1}[e_i] dsigma` (whole-space quantities of the unit shape `D`).
pub fn dilute_q(qd: &Mat<C64>, scaling: &DiluteScaling, r0: &[[C64; 3]; 3], xi: &[Vec<C64>]) -> Result<Mat<C64>> {
    let d = qd.nrows();
    if d != 3 {
        return Err(Error::Unsupported("the dilute expansion is three-dimensional only".into()));
    }
    if xi.len() != d || xi.iter().any(|v| v.len() != d) {
        return Err(Error::Dimension("need d density integrals of length d".into()));
    }
    let s = scaling.s;
    Ok(Mat::from_fn(d, d, |i, j| {
        let corr: C64 = (0..d)
            .map(|l| {
                let rx: C64 = (0..d).map(|m| r0[l][m] * xi[i][m]).sum();
                rx * qd[(l, j)]
            })
            .sum();
        qd[(i, j)] * s - corr * (s * s)
    }))
}

/// `int_{dD} S^{-1}[e_i] dsigma` from whole-space `Q^D`: equals `-(row i of Q^D)`.
pub fn density_integrals(qd: &Mat<C64>) -> Vec<Vec<C64>> {
    (0..qd.nrows()).map(|i| (0..qd.ncols()).map(|j| -qd[(i, j)]).collect()).collect()
}

/// `R^alpha(0)` as a 3x3 array.
pub fn remainder_at_origin(alpha: &QuasiMomentum, mat: &LameMaterial, cfg: &LatticeSumConfig) -> Result<[[C64; 3]; 3]> {
    let d = alpha.dim();
    Ok(smooth_remainder(&vec![0.0; d], alpha, mat, cfg)?.entries)
}

/// Closed-form ball quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallClosedForm {
    /// `Q^B_ii = 12 mu pi r (2 mu + lambda) / (5 mu + 2 lambda)`.
    pub q_diag: f64,
    /// Triple eigenvalue, equal to `q_diag`.
    pub beta: f64,
    /// `sqrt(9 mu (2 mu + lambda) / ((5 mu + 2 lambda) rho r^2))`, times `sqrt(epsilon)`.
    pub omega_min_coeff: f64,
    /// `sqrt(15 mu / (rho r^2))`, times `sqrt(epsilon)`.
    pub omega_max_coeff: f64,
    /// `S_B[e_i] = single_layer_constant * e_i` on the sphere.
    pub single_layer_constant: f64,
}

pub fn ball_closed_form(r: f64, mat: &LameMaterial) -> Result<BallClosedForm> {
    let m = mat.validated(3)?;
    if !(r > 0.0) {
        return Err(Error::Input(format!("ball radius must be positive, got {r}")));
    }
    let (mu, la, rho) = (m.mu, m.lambda, m.rho);
    let q = 12.0 * mu * PI * r * (2.0 * mu + la) / (5.0 * mu + 2.0 * la);
    Ok(BallClosedForm {
        q_diag: q,
        beta: q,
        omega_min_coeff: (9.0 * mu * (2.0 * mu + la) / ((5.0 * mu + 2.0 * la) * rho * r * r)).sqrt(),
        omega_max_coeff: (15.0 * mu / (rho * r * r)).sqrt(),
        single_layer_constant: -(5.0 * mu + 2.0 * la) * r / (3.0 * mu * (2.0 * mu + la)),
    })
}

/// Leading-order resonant mode of branch `i`: the constant `h_i / |D|` inside `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantMode {
    pub branch: usize,
    /// Interior constants; one per basis vector of the eigenspace of `beta_i`.
    pub interior: Vec<Vec<C64>>,
    /// Set when `beta_i` is repeated; `interior` then spans the eigenspace.
    pub degenerate: bool,
    pub measure: f64,
}

impl ResonantMode {
    /// Exterior leading-order field `S~^{alpha,0}[(S^{alpha,0})^{-1}[c]]` for the first
    /// interior constant `c`.
    pub fn exterior(
        &self,
        disc: &BoundaryDiscretization,
        alpha: &QuasiMomentum,
        mat: &LameMaterial,
        cfg: &LatticeSumConfig,
        points: &[[f64; 3]],
    ) -> Result<Vec<[C64; 3]>> {
        let c = &self.interior[0];
        let trace: Vec<C64> = (0..disc.unknowns()).map(|r| c[r % disc.dim]).collect();
        exterior_field(disc, alpha, 0.0, mat, cfg, &trace, points)
    }
}

/// Interior constant `h_i / |D|` of branch `i`, or the eigenspace when `beta_i` repeats.
pub fn resonant_mode_leading(q: &QAlphaMatrix, i: usize, measure: f64) -> Result<ResonantMode> {
    let d = q.dim();
    if i >= d {
        return Err(Error::Input(format!("branch {i} out of range for d = {d}")));
    }
    let tol = 10.0 * HERMITIAN_TOL * q.beta[i].abs().max(1.0);
    let cluster: Vec<usize> = (0..d).filter(|&j| (q.beta[j] - q.beta[i]).abs() <= tol).collect();
    let interior = cluster
        .iter()
        .map(|&j| q.eigenvector(j).into_iter().map(|v| v / measure).collect())
        .collect();
    Ok(ResonantMode { branch: i, interior, degenerate: cluster.len() > 1, measure })
}

/// Rigid-rotation resonances of the inclusion.
///
/// Rigid rotations, like translations, have zero interior traction, so the exterior
/// torque response is `K_kl = -int S^{-1}[R_k] . R_l dsigma` with `R_k` the rotation
/// fields about the centre. With the inertia `J_kl = int_D R_k . R_l dx` the leading
/// frequencies are `sqrt(kappa / rho) sqrt(epsilon)`, `kappa` the eigenvalues of
/// `J^{-1/2} K J^{-1/2}`. For a ball this reproduces `sqrt(15 mu / (rho r^2))`.
#[derive(Debug, Clone)]
pub struct RotationalModes {
    pub stiffness: Mat<C64>,
    pub inertia: Mat<C64>,
    /// Ascending eigenvalues of `J^{-1/2} K J^{-1/2}`.
    pub kappa: Vec<f64>,
}

impl RotationalModes {
    /// `sqrt(kappa_i / rho) sqrt(epsilon)`, ascending.
    pub fn frequencies(&self, rho: f64, epsilon: f64) -> Vec<f64> {
        self.kappa.iter().map(|k| (k / rho).sqrt() * epsilon.sqrt()).collect()
    }
}

fn rotation_fields(disc: &BoundaryDiscretization) -> Vec<Vec<C64>> {
    let c = disc.shape.center();
    let d = disc.dim;
    let rel = |n: usize| [0, 1, 2].map(|a| disc.nodes[n][a] - c[a]);
    let axes: Vec<[f64; 3]> = if d == 2 { vec![[0.0, 0.0, 1.0]] } else { vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };
    axes.iter()
        .map(|e| {
            let mut v = Vec::with_capacity(disc.unknowns());
            for n in 0..disc.len() {
                let x = rel(n);
                let r = [e[1] * x[2] - e[2] * x[1], e[2] * x[0] - e[0] * x[2], e[0] * x[1] - e[1] * x[0]];
                v.extend(r[..d].iter().map(|t| C64::new(*t, 0.0)));
            }
            v
        })
        .collect()
}

/// Second moments `int_D x_k x_l dx = (1/(d+2)) int x_k x_l (x . nu) dsigma` about the centre.
fn second_moments(disc: &BoundaryDiscretization) -> [[f64; 3]; 3] {
    let c = disc.shape.center();
    let d = disc.dim;
    let mut m = [[0.0; 3]; 3];
    for n in 0..disc.len() {
        let x = [0, 1, 2].map(|a| disc.nodes[n][a] - c[a]);
        let xn: f64 = (0..d).map(|a| x[a] * disc.normals[n][a]).sum();
        for k in 0..d {
            for l in 0..d {
                m[k][l] += x[k] * x[l] * xn * disc.weights[n] / (d + 2) as f64;
            }
        }
    }
    m
}

/// Rotational stiffness, inertia and their generalized eigenvalues.
pub fn rotational_modes(
    disc: &BoundaryDiscretization,
    background: &Background,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<RotationalModes> {
    let s = crate::bie::assemble_single_layer(disc, background, C64::new(0.0, 0.0), mat, cfg)?;
    let f = crate::bie::Factorized::new(s.entries)?;
    let fields = rotation_fields(disc);
    let r = fields.len();
    let rhs = Mat::from_fn(disc.unknowns(), r, |i, k| fields[k][i]);
    let phi = f.solve(rhs.as_ref());
    let w = |i: usize| disc.weights[i / disc.dim];
    let stiffness = Mat::from_fn(r, r, |k, l| -(0..disc.unknowns()).map(|i| phi[(i, k)] * rhs[(i, l)] * w(i)).sum::<C64>());
    let m = second_moments(disc);
    let inertia = if disc.dim == 2 {
        Mat::from_fn(1, 1, |_, _| C64::new(m[0][0] + m[1][1], 0.0))
    } else {
        let tr = m[0][0] + m[1][1] + m[2][2];
        Mat::from_fn(3, 3, |k, l| C64::new(if k == l { tr } else { 0.0 } - m[k][l], 0.0))
    };
    let sym = (&stiffness + stiffness.adjoint()) * faer::Scale(C64::new(0.5, 0.0));
    let (jv, ju) = crate::bie::linalg::hermitian_eigen(inertia.as_ref())?;
    let jinv_half = &ju * Mat::from_fn(r, r, |a, b| C64::new(if a == b { 1.0 / jv[a].sqrt() } else { 0.0 }, 0.0)) * ju.adjoint();
    let reduced = &jinv_half * &sym * &jinv_half;
    let (kappa, _) = crate::bie::linalg::hermitian_eigen(reduced.as_ref())?;
    Ok(RotationalModes { stiffness, inertia, kappa })
}

/// Default number of sampled points per path segment.
pub fn default_per_segment(dim: usize) -> usize {
    if dim == 2 { 11 } else { 6 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_values() {
        let b = ball_closed_form(1.0, &LameMaterial::new(1.0, 1.0, 1.0)).unwrap();
        assert!((b.q_diag - 36.0 * PI / 7.0).abs() < 1e-12);
        assert!((b.omega_min_coeff - (27.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert!((b.omega_max_coeff - 15f64.sqrt()).abs() < 1e-12);
        assert!((b.single_layer_constant + 7.0 / 9.0).abs() < 1e-15);
        let c = ball_closed_form(0.25, &LameMaterial::new(3.0, 2.0, 1.0)).unwrap();
        // 12 * 2 * pi * 0.25 * 7 / 16
        assert!((c.q_diag - 21.0 * PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn ball_frequency_matches_omega_min() {
        // beta / (rho |B|) for the unit ball reproduces the closed-form omega_min
        let b = ball_closed_form(1.0, &LameMaterial::new(1.0, 1.0, 1.0)).unwrap();
        let w = frequency_from_beta(b.beta, 1.0, 4.0 * PI / 3.0, 1.0);
        assert!((w - b.omega_min_coeff).abs() < 1e-12);
    }

    #[test]
    fn ball_rotation_reproduces_omega_max() {
        let disc = crate::bie::discretize_unconfined(&crate::bie::Shape::sphere(1.0), crate::bie::sphere_node_count(12)).unwrap();
        let mat = LameMaterial::new(1.0, 1.0, 1.0);
        let rot = rotational_modes(&disc, &Background::Free, &mat, &LatticeSumConfig::default()).unwrap();
        let b = ball_closed_form(1.0, &mat).unwrap();
        for w in rot.frequencies(1.0, 1.0) {
            assert!((w - b.omega_max_coeff).abs() < 1e-8 * b.omega_max_coeff, "{w}");
        }
    }

    #[test]
    fn standard_paths() {
        let p = BrillouinPath::standard(2, 11).unwrap();
        assert_eq!(p.len(), 34);
        assert_eq!(p.points[11], vec![PI, 0.0]);
        assert_eq!(p.points[22], vec![PI, PI]);
        let q = BrillouinPath::standard(3, 6).unwrap();
        assert_eq!(q.len(), 25);
    }

    fn diagram(omegas: &[Vec<f64>]) -> BandDiagram {
        BandDiagram {
            dim: 2,
            samples: omegas
                .iter()
                .map(|w| BandSample { alpha: vec![1.0, 1.0], beta: w.clone(), omega: w.clone(), flag: SampleFlag::Computed })
                .collect(),
            epsilon: 1e-4,
            rho: 1.0,
            measure: 1.0,
        }
    }

    #[test]
    fn gap_interval_logic() {
        let r = bandgap_estimate(&diagram(&[vec![1.0, 2.0]]), Some(0.1), 3.0).unwrap();
        assert_eq!(r.gap, Some([2.1, 3.0]));
        let e = bandgap_estimate(&diagram(&[vec![1.0, 2.0]]), Some(0.1), 2.05).unwrap();
        assert_eq!(e.gap, None);
        assert!((e.lower_edge() - 2.1).abs() < 1e-15);
        let empty = BandDiagram { samples: Vec::new(), ..diagram(&[]) };
        assert!(bandgap_estimate(&empty, None, 1.0).is_err());
    }

    #[test]
    fn dilute_rejects_two_dimensions() {
        let q = Mat::<C64>::identity(2, 2);
        let s = DiluteScaling::new(0.1, 1e-4).unwrap();
        assert!(matches!(dilute_q(&q, &s, &[[C64::new(0.0, 0.0); 3]; 3], &[]), Err(Error::Unsupported(_))));
        assert!(DiluteScaling::new(0.01, 1e-4).unwrap().note.is_some());
    }
}
