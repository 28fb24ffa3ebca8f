//! Resonances of the full transmission problem as singular points of a block
//! boundary-integral system, located without reference to `Q^alpha`.
//!
//! With `u = S~^{alpha,k_i}[phi]` in `D` and `u = S~^{alpha,k_e}[psi]` outside,
//! `k_i = sqrt(rho) tau omega`, `k_e = sqrt(rho) omega`, the transmission conditions read
//!
//! ```text
//! [ S(k_i)             -S(k_e)                ] [phi]   [0]
//! [ -1/2 I + K*(k_i)   -delta (1/2 I + K*(k_e)) ] [psi] = [0]
//! ```
//!
//! A resonance is a frequency at which the smallest singular value of this matrix dips
//! to zero.

use crate::bie::linalg::singular_values;
use crate::bie::{compute_Q_alpha, inclusion_measure, Background, BoundaryDiscretization, OperatorSeries};
use crate::error::{Error, Result};
use crate::greens::{check_window, series_order, LatticeSumConfig};
use crate::materials::{LameMaterial, QuasiMomentum};
use crate::spectrum::rotational_modes;
use faer::Mat;
use num_complex::Complex64 as C64;

/// Dip threshold relative to the median of the sweep.
pub const DIP_THRESHOLD: f64 = 1e-3;
/// Golden-section iteration cap.
pub const GOLDEN_ITERATIONS: usize = 40;
/// Relative frequency tolerance of the golden-section refinement.
pub const OMEGA_REL_TOL: f64 = 1e-6;

/// Assembled transmission matrix at one trial frequency.
#[derive(Debug, Clone)]
pub struct TransmissionSystem {
    pub alpha: QuasiMomentum,
    pub omega: f64,
    pub delta: f64,
    pub tau: f64,
    /// Dense `2dN x 2dN` matrix acting on `(phi, psi)`.
    pub matrix: Mat<C64>,
}

impl TransmissionSystem {
    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        singular_values(self.matrix.as_ref())
    }

    pub fn min_singular_value(&self) -> Result<f64> {
        Ok(*self.singular_values()?.last().expect("non-empty system"))
    }
}

/// Series coefficients of `S` and `K*` reused across trial frequencies.
#[derive(Debug, Clone)]
pub struct TransmissionOperators {
    pub alpha: QuasiMomentum,
    pub rho: f64,
    pub omega_max: f64,
    series: OperatorSeries,
}

impl TransmissionOperators {
    /// Prepares operators valid for `omega <= omega_max` and interior speed ratio `tau`.
    pub fn new(
        disc: &BoundaryDiscretization,
        alpha: &QuasiMomentum,
        mat: &LameMaterial,
        cfg: &LatticeSumConfig,
        omega_max: f64,
        tau: f64,
    ) -> Result<Self> {
        if disc.dim != 2 {
            return Err(Error::Unsupported("the transmission oracle is two-dimensional".into()));
        }
        if !(tau > 0.0 && omega_max >= 0.0) {
            return Err(Error::Input("tau must be positive and omega_max non-negative".into()));
        }
        let k_max = C64::new(mat.rho.sqrt() * omega_max * tau.max(1.0), 0.0);
        check_window(k_max, alpha, mat)?;
        let lmax = if omega_max == 0.0 { 0 } else { series_order(k_max, alpha, mat, cfg.target_tol) };
        let series = OperatorSeries::new(disc, &Background::Quasi(*alpha), mat, cfg, lmax, true, true)?;
        Ok(Self { alpha: *alpha, rho: mat.rho, omega_max, series })
    }

    pub fn system(&self, omega: f64, delta: f64, tau: f64) -> Result<TransmissionSystem> {
        if !(0.0..=self.omega_max * (1.0 + 1e-12)).contains(&omega) {
            return Err(Error::Input(format!("omega = {omega} outside the prepared range [0, {}]", self.omega_max)));
        }
        if !(delta >= 0.0) {
            return Err(Error::Input(format!("delta must be non-negative, got {delta}")));
        }
        let ki = C64::new(self.rho.sqrt() * tau * omega, 0.0);
        let ke = C64::new(self.rho.sqrt() * omega, 0.0);
        let (si, se) = (self.series.single_layer(ki)?, self.series.single_layer(ke)?);
        let (ti, te) = (self.series.neumann_poincare(ki)?, self.series.neumann_poincare(ke)?);
        let n = si.nrows();
        let half = C64::new(0.5, 0.0);
        let matrix = Mat::from_fn(2 * n, 2 * n, |r, c| {
            let (rb, cb) = (r / n, c / n);
            let (i, j) = (r % n, c % n);
            let id = if i == j { half } else { C64::new(0.0, 0.0) };
            match (rb, cb) {
                (0, 0) => si[(i, j)],
                (0, _) => -se[(i, j)],
                (_, 0) => ti[(i, j)] - id,
                _ => -(te[(i, j)] + id) * delta,
            }
        });
        Ok(TransmissionSystem { alpha: self.alpha, omega, delta, tau, matrix })
    }

    pub fn min_singular(&self, omega: f64, delta: f64, tau: f64) -> Result<f64> {
        self.system(omega, delta, tau)?.min_singular_value()
    }
}

/// Transmission matrix at a single frequency.
pub fn assemble_transmission(
    disc: &BoundaryDiscretization,
    alpha: &QuasiMomentum,
    omega: f64,
    delta: f64,
    tau: f64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<TransmissionSystem> {
    TransmissionOperators::new(disc, alpha, mat, cfg, omega, tau)?.system(omega, delta, tau)
}

/// A located dip of the smallest singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceEstimate {
    pub omega_hat: f64,
    pub dip_value: f64,
    pub bracket: [f64; 2],
    /// `dip_value < DIP_THRESHOLD * median` of the sweep.
    pub converged: bool,
    /// Number of singular values below the threshold at `omega_hat`.
    pub multiplicity: usize,
}

/// Sweep tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub dip_threshold: f64,
    pub golden_iterations: usize,
    pub omega_rel_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { dip_threshold: DIP_THRESHOLD, golden_iterations: GOLDEN_ITERATIONS, omega_rel_tol: OMEGA_REL_TOL }
    }
}

/// Smallest singular values along a grid, with a continuity check.
pub fn sigma_profile(ops: &TransmissionOperators, delta: f64, tau: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let values = grid.iter().map(|w| ops.min_singular(*w, delta, tau)).collect::<Result<Vec<_>>>()?;
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Accuracy(format!(
            "smallest singular value is not finite at omega = {:.6e}; profile: {:?}",
            grid[j], values
        )));
    }
    Ok(values)
}

/// Locates the dips of the smallest singular value on `grid` and refines each one.
pub fn sweep_operators(
    ops: &TransmissionOperators,
    delta: f64,
    tau: f64,
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<ResonanceEstimate>> {
    if grid.len() < 3 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input("the frequency grid must be increasing with at least 3 points".into()));
    }
    let values = sigma_profile(ops, delta, tau, grid)?;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = opts.dip_threshold * median;
    let mut out = Vec::new();
    for j in 1..grid.len() - 1 {
        if !(values[j] <= values[j - 1] && values[j] < values[j + 1]) {
            continue;
        }
        let bracket = [grid[j - 1], grid[j + 1]];
        let (omega_hat, dip_value) = golden_section(|w| ops.min_singular(w, delta, tau), bracket, opts)?;
        let sv = ops.system(omega_hat, delta, tau)?.singular_values()?;
        let multiplicity = sv.iter().filter(|s| **s < threshold).count();
        out.push(ResonanceEstimate { omega_hat, dip_value, bracket, converged: dip_value < threshold, multiplicity });
    }
    Ok(out)
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, bracket: [f64; 2], opts: &SweepOptions) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (bracket[0], bracket[1]);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..opts.golden_iterations {
        if (b - a) <= opts.omega_rel_tol * 0.5 * (a + b).abs() {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Dips of the smallest singular value over `omega_grid`.
pub fn min_singular_sweep(
    disc: &BoundaryDiscretization,
    alpha: &QuasiMomentum,
    delta: f64,
    tau: f64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    omega_grid: &[f64],
) -> Result<Vec<ResonanceEstimate>> {
    let top = omega_grid.iter().copied().fold(0.0, f64::max);
    let ops = TransmissionOperators::new(disc, alpha, mat, cfg, top, tau)?;
    sweep_operators(&ops, delta, tau, omega_grid, &SweepOptions::default())
}

/// Uniform grid on `[hi / n, hi]` with `hi = window sqrt(delta)`.
pub fn scaled_grid(delta: f64, window: f64, n: usize) -> Vec<f64> {
    let hi = window * delta.sqrt();
    (1..=n).map(|j| hi * j as f64 / n as f64).collect()
}

/// Oracle run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Upper end of the swept band in units of `sqrt(delta)`.
    pub window: f64,
    pub grid_points: usize,
    pub sweep: SweepOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { window: 16.0, grid_points: 160, sweep: SweepOptions::default() }
    }
}

/// Fitted `omega_hat = C delta^p` for one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchFit {
    pub branch: usize,
    /// Free least-squares slope of `log omega_hat` against `log delta`.
    pub exponent: f64,
    /// `exp(mean(log omega_hat - log delta / 2))`.
    pub coefficient: f64,
    /// RMS residual of the free fit.
    pub residual: f64,
    /// Leading-order prediction: `sqrt(beta_i / (rho tau^2 |D|))` from `Q^alpha` for the
    /// lowest `d` branches, the rigid-rotation frequencies above them.
    pub predicted: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub deltas: Vec<f64>,
    /// Branch frequencies (ascending, dips repeated by multiplicity) per delta.
    pub omegas: Vec<Vec<f64>>,
    pub fits: Vec<BranchFit>,
    /// Eigenvalues of `Q^alpha` used for the comparison.
    pub beta: Vec<f64>,
    /// Rotational eigenvalues `kappa` used for branches above `d`.
    pub kappa: Vec<f64>,
}

/// Sweeps every `delta`, pairs the dips by order and fits the power law per branch.
#[allow(clippy::too_many_arguments)]
pub fn verify_asymptotics(
    disc: &BoundaryDiscretization,
    alpha: &QuasiMomentum,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    tau: f64,
    deltas: &[f64],
    opts: &OracleOptions,
) -> Result<AsymptoticsReport> {
    if deltas.len() < 3 {
        return Err(Error::Input("the fit needs at least 3 delta values".into()));
    }
    let (lo, hi) = deltas.iter().fold((f64::INFINITY, 0.0f64), |(l, h), d| (l.min(*d), h.max(*d)));
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Input("delta values must be positive and span at least one decade".into()));
    }
    let ops = TransmissionOperators::new(disc, alpha, mat, cfg, opts.window * hi.sqrt(), tau)?;
    let mut omegas = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let grid = scaled_grid(delta, opts.window, opts.grid_points);
        let dips = sweep_operators(&ops, delta, tau, &grid, &opts.sweep)?;
        let mut branches = Vec::new();
        for dip in dips.iter().filter(|d| d.converged) {
            branches.extend(std::iter::repeat(dip.omega_hat).take(dip.multiplicity.max(1)));
        }
        omegas.push(branches);
    }
    let count = omegas[0].len();
    if count == 0 || omegas.iter().any(|b| b.len() != count) {
        let counts: Vec<usize> = omegas.iter().map(Vec::len).collect();
        return Err(Error::Pairing(format!("branch counts per delta differ or vanish: {counts:?}")));
    }
    let bg = Background::Quasi(*alpha);
    let q = compute_Q_alpha(disc, &bg, mat, cfg)?;
    let rot = rotational_modes(disc, &bg, mat, cfg)?;
    let measure = inclusion_measure(disc);
    let d = disc.dim;
    let predict = |b: usize| -> Option<f64> {
        let scale = mat.rho * tau * tau;
        if b < d {
            Some((q.beta[b] / (scale * measure)).sqrt())
        } else {
            rot.kappa.get(b - d).map(|k| (k / scale).sqrt())
        }
    };
    let x: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let fits = (0..count)
        .map(|b| {
            let y: Vec<f64> = omegas.iter().map(|w| w[b].ln()).collect();
            let (slope, intercept) = least_squares(&x, &y);
            let residual =
                (x.iter().zip(&y).map(|(xi, yi)| (yi - slope * xi - intercept).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
            let coefficient = (y.iter().zip(&x).map(|(yi, xi)| yi - 0.5 * xi).sum::<f64>() / x.len() as f64).exp();
            let predicted = predict(b);
            BranchFit {
                branch: b,
                exponent: slope,
                coefficient,
                residual,
                predicted,
                relative_error: predicted.map(|p| (coefficient - p).abs() / p),
            }
        })
        .collect();
    Ok(AsymptoticsReport { deltas: deltas.to_vec(), omegas, fits, beta: q.beta, kappa: rot.kappa })
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_a_v_minimum() {
        let (w, v) = golden_section(|x| Ok((x - 0.3137).abs()), [0.2, 0.5], &SweepOptions::default()).unwrap();
        assert!((w - 0.3137).abs() < 1e-6 && v < 1e-6);
    }

    #[test]
    fn least_squares_recovers_a_power_law() {
        let x: Vec<f64> = [1e-3f64, 3e-4, 1e-4].iter().map(|d| d.ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + 2.0).collect();
        let (s, c) = least_squares(&x, &y);
        assert!((s - 0.5).abs() < 1e-12 && (c - 2.0).abs() < 1e-12);
    }
}
