//! Isotropic Lamé media, the high-contrast regime and quasi-momenta.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default radius of the excluded neighbourhood of `alpha = 0`.
pub const DEFAULT_ALPHA_MIN: f64 = 1e-2;

/// Lamé parameters and mass density of one medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LameMaterial {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

impl LameMaterial {
    pub const fn new(lambda: f64, mu: f64, rho: f64) -> Self {
        Self { lambda, mu, rho }
    }

    /// Returns the material if it is admissible in dimension `d`.
    pub fn validated(self, d: usize) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(Error::Dimension(format!("d = {d}, expected 2 or 3")));
        }
        if !(self.lambda.is_finite() && self.mu.is_finite() && self.rho.is_finite()) {
            return Err(Error::InvalidMaterial("non-finite parameter".into()));
        }
        if !validate_convexity(&self, d) {
            return Err(Error::InvalidMaterial(format!(
                "strong convexity requires mu > 0 and d*lambda + 2*mu > 0 (mu = {}, {}*lambda + 2*mu = {})",
                self.mu,
                d,
                d as f64 * self.lambda + 2.0 * self.mu
            )));
        }
        if self.rho <= 0.0 {
            return Err(Error::InvalidMaterial(format!("rho = {} must be positive", self.rho)));
        }
        Ok(self)
    }

    /// `lambda + 2 mu`, the P-wave modulus.
    pub fn p_modulus(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    /// Same density, Lamé pair multiplied by `c`.
    pub fn scaled_moduli(&self, c: f64) -> Self {
        Self::new(self.lambda * c, self.mu * c, self.rho)
    }
}

/// Strong convexity: `mu > 0` and `d lambda + 2 mu > 0`.
pub fn validate_convexity(mat: &LameMaterial, d: usize) -> bool {
    mat.mu > 0.0 && d as f64 * mat.lambda + 2.0 * mat.mu > 0.0
}

/// Shear and compressional speeds `(c_s, c_p)`.
pub fn wave_velocities(mat: &LameMaterial, d: usize) -> Result<(f64, f64)> {
    let m = mat.validated(d)?;
    Ok(((m.mu / m.rho).sqrt(), (m.p_modulus() / m.rho).sqrt()))
}

/// Contrast parameters of a soft matrix hosting hard, heavy inclusions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastRegime {
    pub delta: f64,
    pub epsilon: f64,
    pub tau: f64,
}

impl ContrastRegime {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        if !(delta > 0.0 && epsilon > 0.0 && delta.is_finite() && epsilon.is_finite()) {
            return Err(Error::Input(format!(
                "contrast needs delta > 0 and epsilon > 0 (got {delta}, {epsilon})"
            )));
        }
        Ok(Self { delta, epsilon, tau: (delta / epsilon).sqrt() })
    }

    /// Builds the regime from `delta` and `tau`, with `epsilon = delta / tau^2`.
    pub fn from_tau(delta: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Input(format!("tau = {tau} must be positive")));
        }
        let epsilon = delta / (tau * tau);
        let mut c = Self::new(delta, epsilon)?;
        c.tau = tau;
        Ok(c)
    }

    /// Warning text when `tau` leaves the band [0.1, 10].
    pub fn tau_warning(&self) -> Option<String> {
        (!(0.1..=10.0).contains(&self.tau))
            .then(|| format!("tau = {:.4} lies outside the O(1) band [0.1, 10]", self.tau))
    }
}

/// Reads `(delta, epsilon)` off a background/inclusion pair.
pub fn contrast_from_materials(
    background: &LameMaterial,
    inclusion: &LameMaterial,
) -> Result<ContrastRegime> {
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    let delta = background.mu / inclusion.mu;
    let lambda_ok = if inclusion.lambda == 0.0 {
        background.lambda == 0.0
    } else {
        rel(background.lambda / inclusion.lambda, delta)
    };
    if !(delta > 0.0 && lambda_ok) {
        return Err(Error::NonProportional);
    }
    ContrastRegime::new(delta, background.rho / inclusion.rho)
}

/// A point of the Brillouin zone `[-pi, pi]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiMomentum {
    components: [f64; 3],
    dim: usize,
    near_zero: bool,
}

impl QuasiMomentum {
    pub fn new(alpha: &[f64], alpha_min: f64) -> Result<Self> {
        let dim = alpha.len();
        if dim != 2 && dim != 3 {
            return Err(Error::Dimension(format!("alpha has {dim} components")));
        }
        let mut components = [0.0; 3];
        for (c, &a) in components.iter_mut().zip(alpha) {
            if !(a.abs() <= std::f64::consts::PI * (1.0 + 1e-14)) {
                return Err(Error::AlphaOutOfZone(a));
            }
            *c = a;
        }
        let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(Self { components, dim, near_zero: norm < alpha_min })
    }

    /// Convenience constructor with the default cutoff.
    pub fn with_default_cutoff(alpha: &[f64]) -> Result<Self> {
        Self::new(alpha, DEFAULT_ALPHA_MIN)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components[..self.dim]
    }

    /// Components padded with zeros to length three.
    pub fn padded(&self) -> [f64; 3] {
        self.components
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn near_zero(&self) -> bool {
        self.near_zero
    }

    pub fn norm(&self) -> f64 {
        self.as_slice().iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn negated(&self) -> Self {
        let mut q = *self;
        for c in &mut q.components {
            *c = -*c;
        }
        q
    }

    /// Fails for momenta inside the near-zero cutoff.
    pub fn require_nonzero(&self, cutoff: f64) -> Result<()> {
        if self.near_zero || self.norm() == 0.0 {
            Err(Error::NearZeroAlpha { norm: self.norm(), cutoff })
        } else {
            Ok(())
        }
    }
}
