//! Boundary integral operators on the inclusion boundary.
//!
//! Densities and traces are stored node-major: unknown `d * n + a` is component `a`
//! at node `n`. The single layer `S` and the traction operator `K*` are assembled
//! from the free-space kernel with singularity-aware quadrature plus the smooth
//! quasi-periodic remainder. At `k != 0` (2D quasi-periodic only) both are built from
//! their `k^2`-series coefficients.

mod curve;
pub mod geometry;
pub mod linalg;
pub mod potential;
mod sphere;

pub use geometry::{
    discretize_boundary, discretize_unconfined, fejer_weights, inclusion_measure, sphere_node_count,
    BoundaryDiscretization, Shape, SphereGrid, CELL_MARGIN,
};
pub use linalg::Factorized;
pub use potential::{exterior_field, single_layer_potential, single_layer_traction};

use crate::error::{Error, Result};
use crate::greens::{check_window, series_order, LatticeSumConfig, QuasiKernel};
use crate::materials::{LameMaterial, QuasiMomentum};
use faer::Mat;
use num_complex::Complex64 as C64;

/// Default absolute tolerance on `||Q - Q^H||_max`.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Residual bound for the constant-trace solves.
pub const SOLVER_TOL: f64 = 1e-10;

/// Periodic setting of a layer potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Background {
    /// `alpha`-quasi-periodic kernel on the unit lattice.
    Quasi(QuasiMomentum),
    /// Whole-space kernel.
    Free,
}

impl Background {
    pub fn alpha(&self) -> Option<&QuasiMomentum> {
        match self {
            Background::Quasi(a) => Some(a),
            Background::Free => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    SingleLayer,
    /// `(K^{-alpha,k})^*`, the principal-value traction of the single layer.
    NeumannPoincare,
}

/// How an operator matrix was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureInfo {
    pub rule: &'static str,
    pub nodes: usize,
    /// Highest `k^2`-series order included (0 at `k = 0`).
    pub series_order: usize,
}

/// Dense discretization of `S^{alpha,k}` or `(K^{-alpha,k})^*`.
#[derive(Debug, Clone)]
pub struct LayerOperatorMatrix {
    pub kind: LayerKind,
    pub background: Background,
    pub k: C64,
    pub dim: usize,
    pub entries: Mat<C64>,
    pub quadrature: QuadratureInfo,
}

impl LayerOperatorMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Applies the operator to a nodal density.
    pub fn apply(&self, density: &[C64]) -> Result<Vec<C64>> {
        if density.len() != self.size() {
            return Err(Error::Dimension(format!("density of length {} for a {}-row operator", density.len(), self.size())));
        }
        let x = Mat::from_fn(density.len(), 1, |i, _| density[i]);
        let y = &self.entries * &x;
        Ok(y.col(0).iter().copied().collect())
    }
}

fn rule_name(dim: usize) -> &'static str {
    if dim == 2 {
        "kress-log + alternating trapezoid"
    } else {
        "pole-rotated gauss-legendre x trapezoid"
    }
}

/// Coefficient matrices `S_l`, `K_l` of the `k^2`-series of the layer operators.
#[derive(Debug, Clone)]
pub struct OperatorSeries {
    pub background: Background,
    pub dim: usize,
    pub nodes: usize,
    pub single: Vec<Mat<C64>>,
    pub traction: Vec<Mat<C64>>,
}

impl OperatorSeries {
    /// Assembles `S_0..S_lmax` and/or `K_0..K_lmax`.
    pub fn new(
        disc: &BoundaryDiscretization,
        background: &Background,
        mat: &LameMaterial,
        cfg: &LatticeSumConfig,
        lmax: usize,
        want_single: bool,
        want_traction: bool,
    ) -> Result<Self> {
        let d = disc.dim;
        let mat = mat.validated(d)?;
        cfg.validate()?;
        let kernel = match background {
            Background::Quasi(a) => {
                if a.dim() != d {
                    return Err(Error::Dimension(format!("alpha in {} dimensions, boundary in {d}", a.dim())));
                }
                disc.check_in_cell()?;
                Some(QuasiKernel::new(a, &mat, cfg, lmax)?)
            }
            Background::Free => {
                if lmax > 0 {
                    return Err(Error::Unsupported("whole-space operators are static only".into()));
                }
                None
            }
        };
        if d == 3 && lmax > 0 {
            return Err(Error::Unsupported("three-dimensional operators are static only".into()));
        }
        let (single, traction) = if d == 2 {
            let ops = curve::assemble(disc, kernel.as_ref(), &mat, want_single, want_traction)?;
            (ops.single, ops.traction)
        } else {
            if disc.sphere.is_none() {
                return Err(Error::Unsupported("three-dimensional boundaries must be spheres".into()));
            }
            let (s, t) = sphere::assemble(disc, kernel.as_ref(), &mat, want_single, want_traction)?;
            (s.into_iter().collect(), t.into_iter().collect())
        };
        Ok(Self { background: background.clone(), dim: d, nodes: disc.len(), single, traction })
    }

    pub fn lmax(&self) -> usize {
        self.single.len().max(self.traction.len()).saturating_sub(1)
    }

    fn sum(terms: &[Mat<C64>], k: C64, what: &str) -> Result<Mat<C64>> {
        let first = terms.first().ok_or_else(|| Error::Input(format!("{what} coefficients were not assembled")))?;
        let mut out = first.clone();
        let k2 = k * k;
        let mut kp = k2;
        for t in &terms[1..] {
            out += t * faer::Scale(kp);
            kp *= k2;
        }
        Ok(out)
    }

    /// `S^{alpha,k} = sum_l k^{2l} S_l`.
    pub fn single_layer(&self, k: C64) -> Result<Mat<C64>> {
        Self::sum(&self.single, k, "single-layer")
    }

    /// `(K^{-alpha,k})^* = sum_l k^{2l} K_l`.
    pub fn neumann_poincare(&self, k: C64) -> Result<Mat<C64>> {
        Self::sum(&self.traction, k, "traction")
    }
}

fn series_terms_for(background: &Background, k: C64, mat: &LameMaterial, cfg: &LatticeSumConfig) -> Result<usize> {
    if k == C64::new(0.0, 0.0) {
        return Ok(0);
    }
    match background {
        Background::Quasi(a) => {
            check_window(k, a, mat)?;
            Ok(series_order(k, a, mat, cfg.target_tol))
        }
        Background::Free => Err(Error::Unsupported("whole-space operators are static only".into())),
    }
}

fn assemble_layer(
    kind: LayerKind,
    disc: &BoundaryDiscretization,
    background: &Background,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<LayerOperatorMatrix> {
    let lmax = series_terms_for(background, k, mat, cfg)?;
    let single = kind == LayerKind::SingleLayer;
    let series = OperatorSeries::new(disc, background, mat, cfg, lmax, single, !single)?;
    let entries = if single { series.single_layer(k)? } else { series.neumann_poincare(k)? };
    Ok(LayerOperatorMatrix {
        kind,
        background: background.clone(),
        k,
        dim: disc.dim,
        entries,
        quadrature: QuadratureInfo { rule: rule_name(disc.dim), nodes: disc.len(), series_order: lmax },
    })
}

/// Discretized single layer `S^{alpha,k}` (or the whole-space `S^0`).
pub fn assemble_single_layer(
    disc: &BoundaryDiscretization,
    background: &Background,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<LayerOperatorMatrix> {
    assemble_layer(LayerKind::SingleLayer, disc, background, k, mat, cfg)
}

/// Discretized `(K^{-alpha,k})^*`.
pub fn assemble_neumann_poincare(
    disc: &BoundaryDiscretization,
    background: &Background,
    k: C64,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<LayerOperatorMatrix> {
    assemble_layer(LayerKind::NeumannPoincare, disc, background, k, mat, cfg)
}

/// Nodal vector of the constant trace `e_i`.
pub fn constant_trace(disc: &BoundaryDiscretization, i: usize) -> Vec<C64> {
    let d = disc.dim;
    (0..disc.unknowns()).map(|r| C64::new(if r % d == i { 1.0 } else { 0.0 }, 0.0)).collect()
}

/// `phi_i = S^{-1}[e_i]` for `i = 1..d`, as the columns of `phi`.
#[derive(Debug, Clone)]
pub struct ConstantDensities {
    pub phi: Mat<C64>,
    /// `max_i ||S phi_i - e_i||_inf`.
    pub residual: f64,
    pub condition: f64,
}

impl ConstantDensities {
    pub fn column(&self, i: usize) -> Vec<C64> {
        self.phi.col(i).iter().copied().collect()
    }
}

/// Solves `S phi_i = e_i` for the static single layer.
pub fn solve_density_for_constants(s: &LayerOperatorMatrix) -> Result<ConstantDensities> {
    if s.kind != LayerKind::SingleLayer || s.k != C64::new(0.0, 0.0) {
        return Err(Error::Input("constant-trace densities need the static single layer".into()));
    }
    let f = Factorized::new(s.entries.clone())?;
    let d = s.dim;
    let rhs = Mat::from_fn(s.size(), d, |r, i| C64::new(if r % d == i { 1.0 } else { 0.0 }, 0.0));
    let phi = f.solve(rhs.as_ref());
    let residual = linalg::max_abs((&s.entries * &phi - &rhs).as_ref());
    if residual > SOLVER_TOL {
        return Err(Error::Accuracy(format!("constant-trace residual {residual:.3e} exceeds {SOLVER_TOL:.0e}")));
    }
    Ok(ConstantDensities { phi, residual, condition: f.condition() })
}

/// The `d x d` Hermitian matrix `Q^alpha` with its ascending eigenpairs.
#[derive(Debug, Clone)]
pub struct QAlphaMatrix {
    pub background: Background,
    /// Hermitized entries `(Q + Q^H) / 2`.
    pub entries: Mat<C64>,
    /// Ascending eigenvalues `beta_1 <= ... <= beta_d`.
    pub beta: Vec<f64>,
    /// Orthonormal eigenvectors as columns, first significant component real positive.
    pub h: Mat<C64>,
    /// `||Q - Q^H||_max` before hermitization.
    pub asymmetry: f64,
}

impl QAlphaMatrix {
    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// Frobenius norm of the entries.
    pub fn norm(&self) -> f64 {
        self.entries.norm_l2()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.h.col(i).iter().copied().collect()
    }
}

/// `Q_ij = -int S^{-1}[e_i] . e_j dsigma` from the constant-trace densities.
pub fn q_from_densities(disc: &BoundaryDiscretization, dens: &ConstantDensities) -> Mat<C64> {
    let d = disc.dim;
    Mat::from_fn(d, d, |i, j| {
        -disc.weights.iter().enumerate().map(|(n, w)| dens.phi[(d * n + j, i)] * *w).sum::<C64>()
    })
}

/// Checks Hermitian symmetry and positivity, then eigen-decomposes.
pub fn finish_q(background: Background, q: Mat<C64>, hermitian_tol: f64) -> Result<QAlphaMatrix> {
    let asymmetry = linalg::max_abs((&q - q.adjoint()).as_ref());
    if asymmetry > hermitian_tol {
        return Err(Error::Accuracy(format!("||Q - Q^H||_max = {asymmetry:.3e} exceeds {hermitian_tol:.0e}")));
    }
    let entries = (&q + q.adjoint()) * faer::Scale(C64::new(0.5, 0.0));
    let (beta, h) = linalg::hermitian_eigen(entries.as_ref())?;
    if beta[0] <= 0.0 {
        return Err(Error::Positivity(beta[0]));
    }
    Ok(QAlphaMatrix { background, entries, beta, h, asymmetry })
}

/// `Q^alpha` (or the whole-space `Q` of the inclusion) with the default Hermitian tolerance.
#[allow(non_snake_case)]
pub fn compute_Q_alpha(
    disc: &BoundaryDiscretization,
    background: &Background,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
) -> Result<QAlphaMatrix> {
    compute_q_with_tol(disc, background, mat, cfg, HERMITIAN_TOL)
}

/// As [`compute_Q_alpha`] with an explicit Hermitian tolerance.
pub fn compute_q_with_tol(
    disc: &BoundaryDiscretization,
    background: &Background,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    hermitian_tol: f64,
) -> Result<QAlphaMatrix> {
    if let Background::Quasi(a) = background {
        a.require_nonzero(crate::materials::DEFAULT_ALPHA_MIN)?;
    }
    let s = assemble_single_layer(disc, background, C64::new(0.0, 0.0), mat, cfg)?;
    let dens = solve_density_for_constants(&s)?;
    finish_q(background.clone(), q_from_densities(disc, &dens), hermitian_tol)
}

/// The static quasi-periodic Dirichlet-to-Neumann map `(1/2 I + K*) S^{-1}`.
pub struct DtnMap {
    pub background: Background,
    single: Factorized,
    traction: Mat<C64>,
}

impl DtnMap {
    pub fn new(
        disc: &BoundaryDiscretization,
        alpha: &QuasiMomentum,
        mat: &LameMaterial,
        cfg: &LatticeSumConfig,
    ) -> Result<Self> {
        alpha.require_nonzero(crate::materials::DEFAULT_ALPHA_MIN)?;
        let bg = Background::Quasi(alpha.clone());
        let ops = OperatorSeries::new(disc, &bg, mat, cfg, 0, true, true)?;
        let single = Factorized::new(ops.single[0].clone())?;
        let mut traction = ops.traction[0].clone();
        for i in 0..traction.nrows() {
            traction[(i, i)] += C64::new(0.5, 0.0);
        }
        Ok(Self { background: bg, single, traction })
    }

    /// Traction `M^{alpha,0}[f]` at the nodes for a nodal trace `f`.
    pub fn apply(&self, f: &[C64]) -> Result<Vec<C64>> {
        let n = self.traction.nrows();
        if f.len() != n {
            return Err(Error::Dimension(format!("trace of length {} for {n} unknowns", f.len())));
        }
        let rhs = Mat::from_fn(n, 1, |i, _| f[i]);
        let phi = self.single.solve(rhs.as_ref());
        Ok((&self.traction * &phi).col(0).iter().copied().collect())
    }

    /// `S^{-1}[f]`.
    pub fn density(&self, f: &[C64]) -> Vec<C64> {
        let rhs = Mat::from_fn(f.len(), 1, |i, _| f[i]);
        self.single.solve(rhs.as_ref()).col(0).iter().copied().collect()
    }
}

/// One-shot `M^{alpha,0}[f]`.
pub fn dtn_apply(
    disc: &BoundaryDiscretization,
    alpha: &QuasiMomentum,
    mat: &LameMaterial,
    cfg: &LatticeSumConfig,
    f: &[C64],
) -> Result<Vec<C64>> {
    DtnMap::new(disc, alpha, mat, cfg)?.apply(f)
}

/// Weighted nodal inner product `sum_n w_n conj(f_n) . g_n`.
pub fn weighted_inner(disc: &BoundaryDiscretization, f: &[C64], g: &[C64]) -> C64 {
    let d = disc.dim;
    disc.weights
        .iter()
        .enumerate()
        .map(|(n, w)| (0..d).map(|a| f[d * n + a].conj() * g[d * n + a]).sum::<C64>() * *w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::time::Instant;

    fn unit() -> LameMaterial {
        LameMaterial::new(1.0, 1.0, 1.0)
    }

    #[test]
    fn ball_single_layer_and_q() {
        let t = Instant::now();
        let disc = discretize_unconfined(&Shape::sphere(1.0), sphere_node_count(16)).unwrap();
        let ops = OperatorSeries::new(&disc, &Background::Free, &unit(), &LatticeSumConfig::default(), 0, true, true).unwrap();
        eprintln!("assembly {:?}", t.elapsed());
        let s = &ops.single[0];
        for i in 0..3 {
            let e = Mat::from_fn(disc.unknowns(), 1, |r, _| C64::new(if r % 3 == i { 1.0 } else { 0.0 }, 0.0));
            let v = s * &e;
            let err = (0..disc.unknowns())
                .map(|r| (v[(r, 0)] - e[(r, 0)] * (-7.0 / 9.0)).norm())
                .fold(0.0, f64::max);
            eprintln!("S e_{i} err {err:.3e}");
            assert!(err < 7.0 / 9.0 * 1e-6);
        }
        let q = compute_Q_alpha(&disc, &Background::Free, &unit(), &LatticeSumConfig::default()).unwrap();
        let qb = 36.0 * PI / 7.0;
        for b in &q.beta {
            eprintln!("beta {b} rel {:.3e}", (b - qb).abs() / qb);
            assert!((b - qb).abs() < 1e-5 * qb);
        }
        // K*[S^-1 e_i] = 1/2 S^-1 e_i on the ball
        let dens = solve_density_for_constants(&LayerOperatorMatrix {
            kind: LayerKind::SingleLayer,
            background: Background::Free,
            k: C64::new(0.0, 0.0),
            dim: 3,
            entries: s.clone(),
            quadrature: QuadratureInfo { rule: "", nodes: disc.len(), series_order: 0 },
        })
        .unwrap();
        let kphi = &ops.traction[0] * &dens.phi;
        let err = linalg::max_abs((&kphi - &dens.phi * faer::Scale(C64::new(0.5, 0.0))).as_ref());
        eprintln!("K* err {err:.3e}");
        assert!(err < 1e-6);
    }

    #[test]
    fn circle_q_is_hermitian_positive() {
        let disc = discretize_boundary(&Shape::circle(0.25), 128).unwrap();
        for a in [[PI, PI], [PI / 2.0, PI], [2.0, 1.0]] {
            let t = Instant::now();
            let bg = Background::Quasi(QuasiMomentum::with_default_cutoff(&a).unwrap());
            let q = compute_Q_alpha(&disc, &bg, &unit(), &LatticeSumConfig::default()).unwrap();
            eprintln!("{a:?} beta {:?} asym {:.2e} in {:?}", q.beta, q.asymmetry, t.elapsed());
        }
    }
}

