//! Inclusion shapes and their boundary quadrature.
//!
//! Curves use the periodic trapezoid rule in the parameter. The sphere uses a
//! midpoint grid in the polar angle (Fejér weights) times a uniform grid in the
//! azimuth, which supports exact double-Fourier interpolation of nodal data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest allowed distance between a node and the cell faces.
pub const CELL_MARGIN: f64 = 1e-3;

/// Inclusion geometry. Centres default to the middle of the unit cell `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Circle {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    Ellipse {
        semi_axes: [f64; 2],
        /// Counter-clockwise rotation of the first axis, in radians.
        #[serde(default)]
        rotation: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    /// Star-shaped curve `r(t) = a_0 + sum_k (a_k cos kt + b_k sin kt)`.
    FourierCurve {
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    Sphere {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
    },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Sphere { .. } => 3,
            _ => 2,
        }
    }

    pub fn circle(radius: f64) -> Self {
        Shape::Circle { radius, center: None }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Shape::Ellipse { semi_axes: [a, b], rotation: 0.0, center: None }
    }

    pub fn sphere(radius: f64) -> Self {
        Shape::Sphere { radius, center: None }
    }

    pub fn center(&self) -> [f64; 3] {
        match self {
            Shape::Circle { center, .. } | Shape::Ellipse { center, .. } | Shape::FourierCurve { center, .. } => {
                let c = center.unwrap_or([0.5, 0.5]);
                [c[0], c[1], 0.0]
            }
            Shape::Sphere { center, .. } => center.unwrap_or([0.5, 0.5, 0.5]),
        }
    }

    /// The same shape shrunk about its centre by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self.clone() {
            Shape::Circle { radius, center } => Shape::Circle { radius: radius * s, center },
            Shape::Ellipse { semi_axes, rotation, center } => {
                Shape::Ellipse { semi_axes: [semi_axes[0] * s, semi_axes[1] * s], rotation, center }
            }
            Shape::FourierCurve { cos, sin, center } => Shape::FourierCurve {
                cos: cos.iter().map(|c| c * s).collect(),
                sin: sin.iter().map(|c| c * s).collect(),
                center,
            },
            Shape::Sphere { radius, center } => Shape::Sphere { radius: radius * s, center },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Geometry(m.to_string()));
        match self {
            Shape::Circle { radius, .. } | Shape::Sphere { radius, .. } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad("radius must be positive");
                }
            }
            Shape::Ellipse { semi_axes, rotation, .. } => {
                if !(semi_axes[0] > 0.0 && semi_axes[1] > 0.0 && rotation.is_finite()) {
                    return bad("ellipse semi-axes must be positive");
                }
            }
            Shape::FourierCurve { cos, sin, .. } => {
                if cos.is_empty() {
                    return bad("a Fourier curve needs at least the mean radius");
                }
                // a star-shaped curve with positive radius is simple
                let m = 4096;
                let min_r = (0..m)
                    .map(|i| self.radial(2.0 * PI * i as f64 / m as f64, cos, sin).0)
                    .fold(f64::INFINITY, f64::min);
                if !(min_r > 0.0) {
                    return bad("Fourier curve radius must stay positive (curve would self-intersect)");
                }
            }
        }
        Ok(())
    }

    fn radial(&self, t: f64, cos: &[f64], sin: &[f64]) -> (f64, f64) {
        let mut r = cos[0];
        let mut dr = 0.0;
        for (k, a) in cos.iter().enumerate().skip(1) {
            let kf = k as f64;
            r += a * (kf * t).cos();
            dr -= a * kf * (kf * t).sin();
        }
        for (k, b) in sin.iter().enumerate() {
            let kf = (k + 1) as f64;
            r += b * (kf * t).sin();
            dr += b * kf * (kf * t).cos();
        }
        (r, dr)
    }

    /// Point and derivative of a planar curve at parameter `t`, relative to the centre.
    pub(crate) fn curve_point(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        match self {
            Shape::Circle { radius, .. } => {
                let (s, c) = t.sin_cos();
                ([radius * c, radius * s], [-radius * s, radius * c])
            }
            Shape::Ellipse { semi_axes, rotation, .. } => {
                let (s, c) = t.sin_cos();
                let p = [semi_axes[0] * c, semi_axes[1] * s];
                let dp = [-semi_axes[0] * s, semi_axes[1] * c];
                let (rs, rc) = rotation.sin_cos();
                let rot = |v: [f64; 2]| [rc * v[0] - rs * v[1], rs * v[0] + rc * v[1]];
                (rot(p), rot(dp))
            }
            Shape::FourierCurve { cos, sin, .. } => {
                let (r, dr) = self.radial(t, cos, sin);
                let (s, c) = t.sin_cos();
                ([r * c, r * s], [dr * c - r * s, dr * s + r * c])
            }
            Shape::Sphere { .. } => unreachable!("sphere is not a curve"),
        }
    }
}

/// Tensor grid data of a sphere discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub radius: f64,
    pub center: [f64; 3],
    /// Number of polar rings; the azimuth has `2 * rings` points.
    pub rings: usize,
}

impl SphereGrid {
    pub fn azimuths(&self) -> usize {
        2 * self.rings
    }

    pub fn polar(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * PI / self.rings as f64
    }

    pub fn azimuth(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.azimuths() as f64
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.azimuths() + k
    }
}

/// Quadrature nodes, outward normals and weights on the inclusion boundary.
#[derive(Debug, Clone)]
pub struct BoundaryDiscretization {
    pub dim: usize,
    pub nodes: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub shape: Shape,
    /// Parameter speed `|x'(t)|` at each node (curves only).
    pub speeds: Vec<f64>,
    pub sphere: Option<SphereGrid>,
}

impl BoundaryDiscretization {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of scalar unknowns, `d * N`.
    pub fn unknowns(&self) -> usize {
        self.dim * self.len()
    }

    /// Perimeter or surface area.
    pub fn boundary_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Local spacing around node `i`.
    pub fn spacing(&self, i: usize) -> f64 {
        if self.dim == 2 {
            self.weights[i]
        } else {
            self.weights[i].sqrt()
        }
    }

    /// Smallest distance from a node to a face of the unit cell `[0, 1]^d`.
    pub fn cell_clearance(&self) -> f64 {
        self.nodes
            .iter()
            .flat_map(|p| p[..self.dim].iter().map(|v| v.min(1.0 - v)).collect::<Vec<_>>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Requires every node strictly inside the unit cell with [`CELL_MARGIN`] to spare.
    pub fn check_in_cell(&self) -> Result<()> {
        let c = self.cell_clearance();
        if c < CELL_MARGIN {
            return Err(Error::Geometry(format!(
                "inclusion leaves the unit cell (clearance {c:.3e} < {CELL_MARGIN:.0e})"
            )));
        }
        Ok(())
    }

    /// Curve samples at `factor * N` equispaced parameters: nodes, normals, weights.
    pub(crate) fn upsampled_curve(&self, factor: usize) -> (Vec<[f64; 3]>, Vec<[f64; 3]>, Vec<f64>) {
        let m = factor * self.len();
        let c = self.shape.center();
        let h = 2.0 * PI / m as f64;
        let mut nodes = Vec::with_capacity(m);
        let mut normals = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for q in 0..m {
            let (p, dp) = self.shape.curve_point(h * q as f64);
            let s = dp[0].hypot(dp[1]);
            nodes.push([c[0] + p[0], c[1] + p[1], 0.0]);
            normals.push([dp[1] / s, -dp[0] / s, 0.0]);
            weights.push(h * s);
        }
        (nodes, normals, weights)
    }
}

/// Discretizes a shape that must fit in the unit cell with margin.
///
/// For curves `n` is the node count (even, at least 16). For the sphere `n` is the node
/// count `2 m^2` of an `m`-ring grid, `m >= 4`.
pub fn discretize_boundary(shape: &Shape, n: usize) -> Result<BoundaryDiscretization> {
    let disc = discretize_unconfined(shape, n)?;
    disc.check_in_cell()?;
    Ok(disc)
}

/// As [`discretize_boundary`] but without the cell check, for whole-space problems.
pub fn discretize_unconfined(shape: &Shape, n: usize) -> Result<BoundaryDiscretization> {
    shape.validate()?;
    if shape.dim() == 2 {
        discretize_curve(shape, n)
    } else {
        discretize_sphere(shape, n)
    }
}

fn discretize_curve(shape: &Shape, n: usize) -> Result<BoundaryDiscretization> {
    if n < 16 || n % 2 != 0 {
        return Err(Error::Geometry(format!("curve node count must be even and at least 16, got {n}")));
    }
    let c = shape.center();
    let h = 2.0 * PI / n as f64;
    let mut disc = BoundaryDiscretization {
        dim: 2,
        nodes: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        shape: shape.clone(),
        speeds: Vec::with_capacity(n),
        sphere: None,
    };
    for i in 0..n {
        let (p, dp) = shape.curve_point(h * i as f64);
        let s = dp[0].hypot(dp[1]);
        disc.nodes.push([c[0] + p[0], c[1] + p[1], 0.0]);
        disc.normals.push([dp[1] / s, -dp[0] / s, 0.0]);
        disc.weights.push(h * s);
        disc.speeds.push(s);
    }
    if signed_area(&disc) <= 0.0 {
        return Err(Error::Geometry("curve must be positively oriented".into()));
    }
    Ok(disc)
}

/// Node count of the `m`-ring sphere grid.
pub fn sphere_node_count(rings: usize) -> usize {
    2 * rings * rings
}

fn discretize_sphere(shape: &Shape, n: usize) -> Result<BoundaryDiscretization> {
    let Shape::Sphere { radius, .. } = shape else { unreachable!() };
    let m = ((n / 2) as f64).sqrt().round() as usize;
    if m < 4 || sphere_node_count(m) != n {
        return Err(Error::Geometry(format!("sphere node count must be 2 m^2 with m >= 4, got {n}")));
    }
    let grid = SphereGrid { radius: *radius, center: shape.center(), rings: m };
    let fejer = fejer_weights(m);
    let np = grid.azimuths();
    let dphi = 2.0 * PI / np as f64;
    let mut disc = BoundaryDiscretization {
        dim: 3,
        nodes: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        shape: shape.clone(),
        speeds: Vec::new(),
        sphere: None,
    };
    for (j, wj) in fejer.iter().enumerate() {
        let (st, ct) = grid.polar(j).sin_cos();
        for k in 0..np {
            let (sp, cp) = grid.azimuth(k).sin_cos();
            let u = [st * cp, st * sp, ct];
            let c = grid.center;
            disc.nodes.push([c[0] + radius * u[0], c[1] + radius * u[1], c[2] + radius * u[2]]);
            disc.normals.push(u);
            disc.weights.push(radius * radius * wj * dphi);
        }
    }
    disc.sphere = Some(grid);
    Ok(disc)
}

/// Fejér's first rule for `int_0^pi f(theta) sin(theta) d theta` at the midpoints
/// `theta_j = (j + 1/2) pi / m`.
pub fn fejer_weights(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            let th = (j as f64 + 0.5) * PI / m as f64;
            let s: f64 = (1..=m / 2).map(|k| (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0)).sum();
            2.0 / m as f64 * (1.0 - 2.0 * s)
        })
        .collect()
}

fn signed_area(disc: &BoundaryDiscretization) -> f64 {
    let c = disc.shape.center();
    disc.nodes
        .iter()
        .zip(&disc.normals)
        .zip(&disc.weights)
        .map(|((p, n), w)| ((p[0] - c[0]) * n[0] + (p[1] - c[1]) * n[1]) * w)
        .sum::<f64>()
        / 2.0
}

/// Area or volume enclosed by the boundary, `(1/d) int x.nu dsigma`.
pub fn inclusion_measure(disc: &BoundaryDiscretization) -> f64 {
    let c = disc.shape.center();
    let d = disc.dim;
    disc.nodes
        .iter()
        .zip(&disc.normals)
        .zip(&disc.weights)
        .map(|((p, n), w)| (0..d).map(|a| (p[a] - c[a]) * n[a]).sum::<f64>() * w)
        .sum::<f64>()
        / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_perimeter_and_area() {
        let d = discretize_boundary(&Shape::circle(0.25), 128).unwrap();
        assert!((d.boundary_measure() - 2.0 * PI * 0.25).abs() < 1e-12);
        assert!((inclusion_measure(&d) - PI / 16.0).abs() < 1e-12);
        for (p, n) in d.nodes.iter().zip(&d.normals) {
            assert!(((p[0] - 0.5) * n[0] + (p[1] - 0.5) * n[1] - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn ellipse_area_by_divergence_theorem() {
        let d = discretize_boundary(&Shape::ellipse(0.3, 0.2), 128).unwrap();
        assert!((inclusion_measure(&d) - PI * 0.06).abs() < 1e-10);
    }

    #[test]
    fn sphere_area_and_volume() {
        let d = discretize_boundary(&Shape::sphere(0.25), 512).unwrap();
        assert!((d.boundary_measure() - 4.0 * PI * 0.0625).abs() < 1e-10);
        assert!((inclusion_measure(&d) - 4.0 / 3.0 * PI * 0.25f64.powi(3)).abs() < 1e-12);
        assert!(discretize_boundary(&Shape::sphere(0.25), 500).is_err());
    }

    #[test]
    fn cell_and_shape_violations() {
        assert!(matches!(discretize_boundary(&Shape::circle(0.6), 64), Err(Error::Geometry(_))));
        assert!(discretize_unconfined(&Shape::sphere(1.0), 512).is_ok());
        let bad = Shape::FourierCurve { cos: vec![0.1, 0.2], sin: vec![], center: None };
        assert!(matches!(discretize_boundary(&bad, 64), Err(Error::Geometry(_))));
        assert!(discretize_boundary(&Shape::circle(0.2), 15).is_err());
    }
}
