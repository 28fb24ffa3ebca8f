//! JSON run configuration with strict schema and validation.

use crate::bie::{sphere_node_count, Shape};
use crate::greens::LatticeSumConfig;
use crate::materials::{ContrastRegime, LameMaterial, DEFAULT_ALPHA_MIN};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn default_delta() -> f64 {
    1e-4
}

/// `delta` plus exactly one of `epsilon` or `tau`; neither means `epsilon = delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastSpec {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl Default for ContrastSpec {
    fn default() -> Self {
        Self { delta: default_delta(), epsilon: None, tau: None }
    }
}

impl ContrastSpec {
    pub fn regime(&self) -> crate::error::Result<ContrastRegime> {
        match (self.epsilon, self.tau) {
            (Some(_), Some(_)) => Err(crate::error::Error::Input("give either contrast.epsilon or contrast.tau".into())),
            (_, Some(t)) => ContrastRegime::from_tau(self.delta, t),
            (e, None) => ContrastRegime::new(self.delta, e.unwrap_or(self.delta)),
        }
    }
}

/// Brillouin sampling: the standard path or explicit quasi-momenta.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_segment: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandgapSpec {
    /// Margin above `omega*`; default `0.05 omega*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Upper edge of the reported gap; must come from outside the leading-order theory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_sharp: Option<f64>,
}

fn default_deltas() -> Vec<f64> {
    vec![1e-3, 3e-4, 1e-4]
}
fn default_tau() -> f64 {
    1.0
}
fn default_window() -> f64 {
    16.0
}
fn default_grid_points() -> usize {
    160
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Default: the corner `(pi, ..., pi)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Upper end of the swept band in units of `sqrt(delta)`.
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            alpha: None,
            tau: default_tau(),
            deltas: default_deltas(),
            window: default_window(),
            grid_points: default_grid_points(),
        }
    }
}

fn tol_single() -> f64 {
    1e-6
}
fn tol_q() -> f64 {
    1e-5
}

/// Relative tolerances of the ball check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    #[serde(default = "tol_single")]
    pub single_layer_tol: f64,
    #[serde(default = "tol_q")]
    pub q_tol: f64,
    #[serde(default = "tol_q")]
    pub omega_tol: f64,
}

impl Default for BallSpec {
    fn default() -> Self {
        Self { single_layer_tol: tol_single(), q_tol: tol_q(), omega_tol: tol_q() }
    }
}

fn default_csv() -> String {
    "bands.csv".into()
}
fn default_report() -> String {
    "gap_report.txt".into()
}

/// File names inside the `--out` directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_report")]
    pub report: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { csv: default_csv(), report: default_report() }
    }
}

fn default_alpha_min() -> f64 {
    DEFAULT_ALPHA_MIN
}

/// One run; all quantities in cell units (cell side 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    /// Background (matrix) medium.
    pub material: LameMaterial,
    #[serde(default)]
    pub contrast: ContrastSpec,
    pub shape: Shape,
    /// Node count; default 128 for curves and 512 (16 rings) for the sphere.
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub path: PathSpec,
    #[serde(default)]
    pub lattice: LatticeSumConfig,
    #[serde(default = "default_alpha_min")]
    pub alpha_min: f64,
    #[serde(default)]
    pub bandgap: BandgapSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub ball: BallSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    /// Fills defaults that depend on other fields, so the echoed config is complete.
    pub fn fill_defaults(&mut self) {
        if self.resolution.is_none() {
            self.resolution = Some(if self.dimension == 3 { sphere_node_count(16) } else { 128 });
        }
        if self.contrast.epsilon.is_none() && self.contrast.tau.is_none() {
            self.contrast.epsilon = Some(self.contrast.delta);
        }
        if self.oracle.alpha.is_none() && (self.dimension == 2 || self.dimension == 3) {
            self.oracle.alpha = Some(vec![PI; self.dimension]);
        }
        if self.path.points.is_none() && self.path.per_segment.is_none() {
            self.path.per_segment = Some(crate::spectrum::default_per_segment(self.dimension));
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution.unwrap_or(if self.dimension == 3 { sphere_node_count(16) } else { 128 })
    }
}
