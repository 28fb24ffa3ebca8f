//! Dense factorizations with a condition guard, iterative refinement, and the
//! Hermitian eigen-decomposition used for `Q`.

use crate::error::{Error, Result};
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;

/// Refuse to solve when the estimated 1-norm condition number exceeds this.
pub const CONDITION_GUARD: f64 = 1e12;

/// LU factors of a square system together with the matrix they came from.
pub struct Factorized {
    a: Mat<C64>,
    lu: PartialPivLu<C64>,
    condition: f64,
}

impl Factorized {
    /// Factorizes `a` and refuses ill-conditioned systems.
    pub fn new(a: Mat<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::Dimension(format!("{}x{} system", a.nrows(), a.ncols())));
        }
        if !a.col_iter().all(|c| c.iter().all(|v| v.is_finite())) {
            return Err(Error::Solver("non-finite matrix entries".into()));
        }
        let lu = a.partial_piv_lu();
        let mut f = Self { a, lu, condition: f64::INFINITY };
        let inv = f.inverse_norm_estimate();
        f.condition = norm_1(f.a.as_ref()) * inv;
        if !f.condition.is_finite() || f.condition > CONDITION_GUARD {
            return Err(Error::IllConditioned(f.condition));
        }
        Ok(f)
    }

    /// Estimated 1-norm condition number.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.a.as_ref()
    }

    /// Solves `A X = B` with one step of iterative refinement.
    pub fn solve(&self, b: MatRef<'_, C64>) -> Mat<C64> {
        let mut x = self.lu.solve(b);
        let r = b - &self.a * &x;
        let dx = self.lu.solve(&r);
        x += dx;
        x
    }

    /// Hager's estimate of `||A^{-1}||_1`.
    fn inverse_norm_estimate(&self) -> f64 {
        let n = self.a.nrows();
        let mut x = Mat::<C64>::from_fn(n, 1, |_, _| C64::new(1.0 / n as f64, 0.0));
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.lu.solve(&x);
            est = y.col(0).iter().map(|v| v.norm()).sum::<f64>();
            let xi = Mat::<C64>::from_fn(n, 1, |i, _| {
                let v = y[(i, 0)];
                if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) }
            });
            let z = self.lu.solve_adjoint(&xi);
            let (jmax, zmax) = (0..n)
                .map(|i| (i, z[(i, 0)].norm()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = (0..n).map(|i| (z[(i, 0)].conj() * x[(i, 0)]).re).sum();
            if zmax <= ztx {
                break;
            }
            x = Mat::zeros(n, 1);
            x[(jmax, 0)] = C64::new(1.0, 0.0);
        }
        est
    }
}

/// Operator 1-norm (maximum absolute column sum).
pub fn norm_1(a: MatRef<'_, C64>) -> f64 {
    a.col_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest entrywise modulus.
pub fn max_abs(a: MatRef<'_, C64>) -> f64 {
    a.col_iter().flat_map(|c| c.iter().map(|v| v.norm()).collect::<Vec<_>>()).fold(0.0, f64::max)
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.
///
/// Each eigenvector is rotated so that its first component of modulus above `1e-8`
/// is real and positive, which makes the output deterministic.
pub fn hermitian_eigen(a: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Solver(format!("{e:?}")))?;
    let vals: Vec<f64> = evd.S().column_vector().iter().map(|v| v.re).collect();
    let mut u = evd.U().to_owned();
    for j in 0..u.ncols() {
        if let Some(p) = (0..u.nrows()).map(|i| u[(i, j)]).find(|v| v.norm() > 1e-8) {
            let phase = p.conj() / p.norm();
            for i in 0..u.nrows() {
                u[(i, j)] *= phase;
            }
        }
    }
    Ok((vals, u))
}

/// Singular values in descending order.
pub fn singular_values(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::Solver(format!("{e:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_and_condition_estimate() {
        let n = 12;
        let a = Mat::<C64>::from_fn(n, n, |i, j| {
            C64::new(1.0 / (1.0 + i as f64 + j as f64), if i == j { 1.0 } else { 0.1 })
        });
        let f = Factorized::new(a.clone()).unwrap();
        let b = Mat::<C64>::from_fn(n, 2, |i, j| C64::new(i as f64, j as f64));
        let x = f.solve(b.as_ref());
        assert!(max_abs((&a * &x - &b).as_ref()) < 1e-13);
        assert!(f.condition() >= 1.0 && f.condition() < 1e3);
    }

    #[test]
    fn singular_matrix_is_refused() {
        let a = Mat::<C64>::from_fn(4, 4, |i, j| C64::new((i * j) as f64, 0.0));
        assert!(matches!(Factorized::new(a), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn eigenvectors_follow_the_sign_convention() {
        let a = Mat::<C64>::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(2.0, 0.0),
            (1, 1) => C64::new(3.0, 0.0),
            (0, 1) => C64::new(0.0, 0.5),
            _ => C64::new(0.0, -0.5),
        });
        let (vals, u) = hermitian_eigen(a.as_ref()).unwrap();
        assert!(vals[0] < vals[1]);
        for j in 0..2 {
            assert!(u[(0, j)].im.abs() < 1e-15 && u[(0, j)].re > 0.0);
        }
    }
}
