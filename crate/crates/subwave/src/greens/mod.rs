//! Free-space and quasi-periodic elastic Green's tensors.
//!
//! The quasi-periodic static tensor is assembled from two scalar lattice sums,
//! `G = -(1/mu) sigma_1 I - c_0 grad grad sigma_2` with
//! `sigma_m(x) = sum_n e^{i xi.x} |xi|^{-2m}` and `xi = 2 pi n + alpha`.
//! The `k^2`-series coefficients reuse the same sums at higher `m`.

pub mod fourier;
pub mod free;
pub mod lattice;

use crate::error::{Error, Result};
use crate::materials::{LameMaterial, QuasiMomentum, DEFAULT_ALPHA_MIN};
use lattice::{min_shifted_norm, Derivs, LatticeSummer, SelfImage, Spectral};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Truncation and splitting of the lattice sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSumConfig {
    /// Ewald split `eta`: reciprocal terms decay like `exp(-eta |xi|^2)`.
    pub split_parameter: f64,
    /// Largest `|n|_inf` in the reciprocal sum.
    pub fourier_truncation: usize,
    /// Largest `|m|_inf` (around the nearest lattice point) in the image sum.
    pub spatial_truncation: usize,
    pub target_tol: f64,
    /// Repeat every sum with doubled truncations and fail on disagreement.
    pub verify: bool,
}

impl Default for LatticeSumConfig {
    fn default() -> Self {
        Self {
            split_parameter: 0.04,
            fourier_truncation: 5,
            spatial_truncation: 2,
            target_tol: 1e-8,
            verify: false,
        }
    }
}

impl LatticeSumConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fourier_truncation < 1 || self.spatial_truncation < 1 {
            return Err(Error::Input("lattice truncations must be at least 1".into()));
        }
        if !(self.target_tol > 0.0 && self.split_parameter > 0.0) {
            return Err(Error::Input("target_tol and split_parameter must be positive".into()));
        }
        Ok(())
    }

    pub fn verifying(mut self) -> Self {
        self.verify = true;
        self
    }
}

/// Which tensor a [`GreensTensor`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreensKind {
    FreeStatic,
    FreeDynamic,
    QuasiStatic,
    QuasiDynamic,
    SeriesCoeff(usize),
    SmoothRemainder,
}

/// A `d x d` tensor value together with its evaluation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensTensor {
    pub dim: usize,
    pub x: [f64; 3],
    pub k: C64,
    pub kind: GreensKind,
    pub entries: [[C64; 3]; 3],
}

impl GreensTensor {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn max_abs_diff(&self, other: &GreensTensor) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max(self.entries[i][j].norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Tensor `g[i][j]` and gradient `dg[k][i][j] = d_k g[i][j]`.
#[derive(Debug, Clone, Copy)]
pub struct KernelDerivs {
    pub g: [[C64; 3]; 3],
    pub dg: [[[C64; 3]; 3]; 3],
}

impl Default for KernelDerivs {
    fn default() -> Self {
        Self { g: [[ZERO; 3]; 3], dg: [[[ZERO; 3]; 3]; 3] }
    }
}

impl KernelDerivs {
    /// Traction of column `j` with respect to `x` along `nu`:
    /// `t_ij = lambda nu_i div g_.j + mu (d_k g_ij + d_i g_kj) nu_k`.
    pub fn traction(&self, mat: &LameMaterial, nu: &[f64; 3], d: usize) -> [[C64; 3]; 3] {
        let mut t = [[ZERO; 3]; 3];
        for j in 0..d {
            let div: C64 = (0..d).map(|k| self.dg[k][k][j]).sum();
            for i in 0..d {
                let mut v = div * (mat.lambda * nu[i]);
                for k in 0..d {
                    v += (self.dg[k][i][j] + self.dg[i][k][j]) * (mat.mu * nu[k]);
                }
                t[i][j] = v;
            }
        }
        t
    }

    /// Value at `-x` for a kernel with real Fourier coefficients.
    pub fn reflected_conj(&self) -> Self {
        let mut o = *self;
        for i in 0..3 {
            for j in 0..3 {
                o.g[i][j] = self.g[i][j].conj();
                for k in 0..3 {
                    o.dg[k][i][j] = -self.dg[k][i][j].conj();
                }
            }
        }
        o
    }

    pub fn add_scaled(&mut self, other: &KernelDerivs, c: C64) {
        for i in 0..3 {
            for j in 0..3 {
                self.g[i][j] += other.g[i][j] * c;
                for k in 0..3 {
                    self.dg[k][i][j] += other.dg[k][i][j] * c;
                }
            }
        }
    }
}

/// `a * s_id I - c * grad grad s_dy`, with gradient when requested.
fn compose(a: C64, s_id: &Derivs, c: C64, s_dy: &Derivs, d: usize, grad: bool) -> KernelDerivs {
    let mut out = KernelDerivs::default();
    for i in 0..d {
        for j in 0..d {
            let mut v = -c * s_dy.h[i][j];
            if i == j {
                v += a * s_id.v;
            }
            out.g[i][j] = v;
            if grad {
                for k in 0..d {
                    let mut w = -c * s_dy.t[k][i][j];
                    if i == j {
                        w += a * s_id.g[k];
                    }
                    out.dg[k][i][j] = w;
                }
            }
        }
    }
    out
}

fn point(x: &[f64], d: usize) -> Result<[f64; 3]> {
    if x.len() != d {
        return Err(Error::Dimension(format!("point has {} components, expected {d}", x.len())));
    }
    let mut p = [0.0; 3];
    p[..d].copy_from_slice(x);
    Ok(p)
}

fn tensor(g: [[C64; 3]; 3], dim: usize, x: [f64; 3], k: C64, kind: GreensKind) -> GreensTensor {
    GreensTensor { dim, x, k, kind, entries: g }
}

fn lattice_distance(x: &[f64; 3], d: usize) -> f64 {
    x[..d].iter().map(|v| (v - v.round()).powi(2)).sum::<f64>().sqrt()
}

fn check_alpha(alpha: &QuasiMomentum) -> Result<()> {
    alpha.require_nonzero(DEFAULT_ALPHA_MIN)
}

/// Whole-space static (Kelvin) tensor.
pub fn green_free_static(x: &[f64], mat: &LameMaterial, d: usize) -> Result<GreensTensor> {
    let mat = mat.validated(d)?;
    let p = point(x, d)?;
    if p.iter().all(|v| *v == 0.0) {
        return Err(Error::Singularity);
    }
    let kd = free::static_with_gradient(&p, &mat, d, false);
    Ok(tensor(kd.g, d, p, ZERO, GreensKind::FreeStatic))
}

/// Whole-space time-harmonic tensor with wavenumber `k = sqrt(rho) omega`.
pub fn green_free_dynamic(x: &[f64], k: C64, mat: &LameMaterial, d: usize) -> Result<GreensTensor> {
    let mat = mat.validated(d)?;
    let p = point(x, d)?;
    if p.iter().all(|v| *v == 0.0) {
        return Err(Error::Singularity);
    }
    if k == ZERO {
        return Err(Error::Input("k = 0: use green_free_static".into()));
    }
    Ok(tensor(free::dynamic(&p, k, &mat, d), d, p, k, GreensKind::FreeDynamic))
}

/// Quasi-periodic static tensor `G^{alpha,0}`.
pub fn green_quasi_static(
    x: &[f64],
    alpha: &QuasiMomentum,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<GreensTensor> {
    let d = alpha.dim();
    let mat = mat.validated(d)?;
    check_alpha(alpha)?;
    cfg.validate()?;
    let p = point(x, d)?;
    if lattice_distance(&p, d) == 0.0 {
        return Err(Error::Singularity);
    }
    let g = series_term(&p, alpha, 0, &mat, cfg, false)?;
    Ok(tensor(g.g, d, p, ZERO, GreensKind::QuasiStatic))
}

/// `l`-th coefficient `G_l = -sigma_{l+1} / mu^{l+1} I - c_l grad grad sigma_{l+2}` of the `k^2`-series.
pub fn green_quasi_series_coeff(
    x: &[f64],
    alpha: &QuasiMomentum,
    l: usize,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<GreensTensor> {
    if l == 0 {
        return Err(Error::Input("series coefficients start at l = 1".into()));
    }
    let d = alpha.dim();
    let mat = mat.validated(d)?;
    check_alpha(alpha)?;
    cfg.validate()?;
    let p = point(x, d)?;
    let g = series_term(&p, alpha, l, &mat, cfg, false)?;
    Ok(tensor(g.g, d, p, ZERO, GreensKind::SeriesCoeff(l)))
}

fn series_term(
    p: &[f64; 3],
    alpha: &QuasiMomentum,
    l: usize,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    grad: bool,
) -> Result<KernelDerivs> {
    let d = alpha.dim();
    let summer = LatticeSummer::new(d, alpha.padded(), *cfg);
    let kinds = [
        Spectral::Power { m: l + 1, self_image: SelfImage::Include },
        Spectral::Power { m: l + 2, self_image: SelfImage::Include },
    ];
    let s = summer.sums(*p, &kinds, if grad { 3 } else { 2 })?;
    let a = C64::new(-mat.mu.powi(-(l as i32 + 1)), 0.0);
    let c = C64::new(free::dyadic_coefficient(mat, l), 0.0);
    Ok(compose(a, &s[0], c, &s[1], d, grad))
}

/// Evaluation route for the time-harmonic quasi-periodic tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicMethod {
    /// Series below `0.1 min|xi|`, direct shifted sum above.
    Auto,
    /// Truncated `k^2`-series.
    Series,
    /// Ewald sum of the shifted denominators.
    Direct,
}

/// `|k| / sqrt(mu)` relative to `min_n |2 pi n + alpha|`.
pub fn wavenumber_ratio(k: C64, alpha: &QuasiMomentum, mat: &LameMaterial) -> f64 {
    k.norm() / mat.mu.sqrt() / min_shifted_norm(alpha.as_slice())
}

/// Admissible window `|k| / sqrt(mu) < 0.5 min|xi|`.
pub fn check_window(k: C64, alpha: &QuasiMomentum, mat: &LameMaterial) -> Result<()> {
    let ratio = wavenumber_ratio(k, alpha, mat);
    if ratio < 0.5 {
        Ok(())
    } else {
        Err(Error::ResonantDenominator { ratio, limit: 0.5 })
    }
}

/// Number of series terms so that the first omitted one falls below `tol / 10`.
pub fn series_order(k: C64, alpha: &QuasiMomentum, mat: &LameMaterial, tol: f64) -> usize {
    let xi = min_shifted_norm(alpha.as_slice());
    let base = mat.mu * xi * xi;
    let r = k.norm_sqr() / base;
    let mut l = 1;
    while l < 60 && 16.0 * r.powi(l as i32 + 1) / base >= 0.1 * tol {
        l += 1;
    }
    l
}

/// Quasi-periodic time-harmonic tensor `G^{alpha,k}` by the automatic route.
pub fn green_quasi_dynamic(
    x: &[f64],
    alpha: &QuasiMomentum,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<GreensTensor> {
    green_quasi_dynamic_with(x, alpha, k, mat, cfg, DynamicMethod::Auto)
}

/// Quasi-periodic time-harmonic tensor with an explicit evaluation route.
pub fn green_quasi_dynamic_with(
    x: &[f64],
    alpha: &QuasiMomentum,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    method: DynamicMethod,
) -> Result<GreensTensor> {
    let d = alpha.dim();
    let mat = mat.validated(d)?;
    check_alpha(alpha)?;
    cfg.validate()?;
    let p = point(x, d)?;
    if lattice_distance(&p, d) == 0.0 {
        return Err(Error::Singularity);
    }
    if k == ZERO {
        let mut g = green_quasi_static(x, alpha, &mat, cfg)?;
        g.kind = GreensKind::QuasiDynamic;
        return Ok(g);
    }
    check_window(k, alpha, &mat)?;
    let use_series = match method {
        DynamicMethod::Auto => wavenumber_ratio(k, alpha, &mat) <= 0.1,
        DynamicMethod::Series => true,
        DynamicMethod::Direct => false,
    };
    let g = if use_series {
        let lmax = series_order(k, alpha, &mat, cfg.target_tol);
        let kd = series_sum(&p, alpha, k, lmax, &mat, cfg, false)?;
        kd.g
    } else {
        direct_dynamic(&p, alpha, k, &mat, cfg, false)?.g
    };
    Ok(tensor(g, d, p, k, GreensKind::QuasiDynamic))
}

/// `G^{alpha,0} + sum_{l<=lmax} k^{2l} G_l`, sharing one lattice pass.
pub(crate) fn series_sum(
    p: &[f64; 3],
    alpha: &QuasiMomentum,
    k: C64,
    lmax: usize,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    grad: bool,
) -> Result<KernelDerivs> {
    let d = alpha.dim();
    let summer = LatticeSummer::new(d, alpha.padded(), *cfg);
    let kinds: Vec<Spectral> =
        (1..=lmax + 2).map(|m| Spectral::Power { m, self_image: SelfImage::Include }).collect();
    let s = summer.sums(*p, &kinds, if grad { 3 } else { 2 })?;
    let mut total = KernelDerivs::default();
    let k2 = k * k;
    let mut kp = C64::new(1.0, 0.0);
    for l in 0..=lmax {
        let a = C64::new(-mat.mu.powi(-(l as i32 + 1)), 0.0);
        let c = C64::new(free::dyadic_coefficient(mat, l), 0.0);
        let term = compose(a, &s[l], c, &s[l + 1], d, grad);
        total.add_scaled(&term, kp);
        kp *= k2;
    }
    Ok(total)
}

/// `-(1/mu) H_s I - k^{-2} grad grad (H_s - H_p)` with `H_kappa = sum e^{i xi.x} / (|xi|^2 - kappa^2)`.
pub(crate) fn direct_dynamic(
    p: &[f64; 3],
    alpha: &QuasiMomentum,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    grad: bool,
) -> Result<KernelDerivs> {
    let d = alpha.dim();
    let summer = LatticeSummer::new(d, alpha.padded(), *cfg);
    let k2 = k * k;
    let ks2 = k2 / mat.mu;
    let kp2 = k2 / mat.p_modulus();
    let kinds = [Spectral::Shifted { kappa2: ks2 }, Spectral::ShiftedDiff { a: ks2, b: kp2, scale: k2 }];
    let s = summer.sums(*p, &kinds, if grad { 3 } else { 2 })?;
    Ok(compose(C64::new(-1.0 / mat.mu, 0.0), &s[0], C64::new(1.0, 0.0), &s[1], d, grad))
}

/// Smooth remainder `R^alpha = G^{alpha,0} - G^0`, finite at `x = 0`.
pub fn smooth_remainder(
    x: &[f64],
    alpha: &QuasiMomentum,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<GreensTensor> {
    let d = alpha.dim();
    let mat = mat.validated(d)?;
    check_alpha(alpha)?;
    cfg.validate()?;
    let p = point(x, d)?;
    let kernel = QuasiKernel::new(alpha, &mat, cfg, 0)?;
    let (r, _) = kernel.terms(&p, false)?;
    Ok(tensor(r.g, d, p, ZERO, GreensKind::SmoothRemainder))
}

/// Per-pair evaluator used by the layer-operator assembly.
///
/// Returns the smooth static remainder and the series coefficients `G_1..G_lmax`
/// (with gradients on request) from a single lattice pass.
#[derive(Clone, Debug)]
pub struct QuasiKernel {
    d: usize,
    mat: LameMaterial,
    summer: LatticeSummer,
    lmax: usize,
    kinds: Vec<Spectral>,
}

impl QuasiKernel {
    pub fn new(alpha: &QuasiMomentum, mat: &LameMaterial, cfg: &LatticeSumConfig, lmax: usize) -> Result<Self> {
        let d = alpha.dim();
        check_alpha(alpha)?;
        cfg.validate()?;
        let mut kinds = vec![
            Spectral::Power { m: 1, self_image: SelfImage::Complement },
            Spectral::Power { m: 2, self_image: SelfImage::Complement },
        ];
        if lmax >= 1 {
            kinds.extend((2..=lmax + 2).map(|m| Spectral::Power { m, self_image: SelfImage::Include }));
        }
        Ok(Self { d, mat: *mat, summer: LatticeSummer::new(d, alpha.padded(), *cfg), lmax, kinds })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn terms(&self, z: &[f64; 3], grad: bool) -> Result<(KernelDerivs, Vec<KernelDerivs>)> {
        let d = self.d;
        let mat = &self.mat;
        let s = self.summer.sums(*z, &self.kinds, if grad { 3 } else { 2 })?;
        let c0 = free::dyadic_coefficient(mat, 0);
        let mut rem = compose(C64::new(-1.0 / mat.mu, 0.0), &s[0], C64::new(c0, 0.0), &s[1], d, grad);
        if d == 2 {
            for i in 0..2 {
                rem.g[i][i] -= c0 / (8.0 * PI);
            }
        }
        let mut series = Vec::with_capacity(self.lmax);
        for l in 1..=self.lmax {
            // sigma_m sits at index m for m >= 2
            let a = C64::new(-mat.mu.powi(-(l as i32 + 1)), 0.0);
            let c = C64::new(free::dyadic_coefficient(mat, l), 0.0);
            series.push(compose(a, &s[l + 1], c, &s[l + 2], d, grad));
        }
        Ok((rem, series))
    }
}
