//! Ewald-split sums over the shifted reciprocal lattice `xi = 2 pi n + alpha`.
//!
//! Every spectral factor is written as `F(|xi|^2) = int_0^inf w(t) e^{-t |xi|^2} dt`.
//! The part `t > eta` is summed in reciprocal space, the part `t < eta` is mapped by
//! Poisson summation onto the lattice images `sum_m e^{i alpha.m} phi(x - m)`, whose
//! radial profile reduces to generalized exponential integrals.

use super::LatticeSumConfig;
use crate::error::{Error, Result};
use crate::special::{ein, expint, expint_lower, expm1_c, EULER_GAMMA};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
/// Reciprocal terms with `eta |xi|^2` beyond this are dropped.
const RECIPROCAL_CUTOFF: f64 = 60.0;
/// Images with `|x - m|^2 / (4 eta)` beyond this are dropped.
const SPATIAL_CUTOFF: f64 = 55.0;

/// Value and Cartesian derivatives up to third order of a scalar lattice sum.
#[derive(Clone, Copy, Debug)]
pub struct Derivs {
    pub v: C64,
    pub g: [C64; 3],
    pub h: [[C64; 3]; 3],
    pub t: [[[C64; 3]; 3]; 3],
}

impl Default for Derivs {
    fn default() -> Self {
        Self { v: ZERO, g: [ZERO; 3], h: [[ZERO; 3]; 3], t: [[[ZERO; 3]; 3]; 3] }
    }
}

impl Derivs {
    fn max_abs_diff(&self, o: &Derivs, order: usize) -> f64 {
        let mut m = (self.v - o.v).norm();
        for i in 0..3 {
            if order >= 1 {
                m = m.max((self.g[i] - o.g[i]).norm());
            }
            for j in 0..3 {
                if order >= 2 {
                    m = m.max((self.h[i][j] - o.h[i][j]).norm());
                }
                for k in 0..3 {
                    if order >= 3 {
                        m = m.max((self.t[i][j][k] - o.t[i][j][k]).norm());
                    }
                }
            }
        }
        m
    }
}

/// How the image at the origin enters a power sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelfImage {
    /// Plain Ewald image.
    Include,
    /// Image minus the whole-space kernel it approximates, leaving a smooth function.
    ///
    /// Only `m = 1` (all orders) and `m = 2` (derivative orders >= 1) are meaningful;
    /// the divergent `m = 2` value is reported as NaN.
    Complement,
}

/// Spectral factor of a lattice sum.
#[derive(Clone, Copy, Debug)]
pub enum Spectral {
    /// `sigma_m(x) = sum e^{i xi.x} |xi|^{-2m}`.
    Power { m: usize, self_image: SelfImage },
    /// `sum e^{i xi.x} / (|xi|^2 - kappa2)`.
    Shifted { kappa2: C64 },
    /// `(Shifted(a) - Shifted(b)) / scale`, computed without cancellation.
    ShiftedDiff { a: C64, b: C64, scale: C64 },
}

/// Evaluator bound to a dimension, quasi-momentum and configuration.
#[derive(Clone, Debug)]
pub struct LatticeSummer {
    d: usize,
    alpha: [f64; 3],
    cfg: LatticeSumConfig,
}

impl LatticeSummer {
    pub fn new(d: usize, alpha: [f64; 3], cfg: LatticeSumConfig) -> Self {
        Self { d, alpha, cfg }
    }

    pub fn config(&self) -> &LatticeSumConfig {
        &self.cfg
    }

    /// Sums for each spectral kind, derivatives up to `order` (<= 3).
    ///
    /// In verification mode the evaluation is repeated with doubled truncations and
    /// any entry moving by more than `target_tol` is reported as an accuracy error.
    pub fn sums(&self, z: [f64; 3], kinds: &[Spectral], order: usize) -> Result<Vec<Derivs>> {
        let out = self.sums_with(z, kinds, order, self.cfg.fourier_truncation, self.cfg.spatial_truncation);
        if self.cfg.verify {
            let fine = self.sums_with(
                z,
                kinds,
                order,
                2 * self.cfg.fourier_truncation,
                2 * self.cfg.spatial_truncation,
            );
            for (a, b) in out.iter().zip(&fine) {
                let diff = a.max_abs_diff(b, order);
                if !(diff < self.cfg.target_tol) && diff.is_finite() {
                    return Err(Error::Accuracy(format!(
                        "doubling the lattice truncations moved an entry by {diff:.3e} (target {:.1e})",
                        self.cfg.target_tol
                    )));
                }
            }
        }
        Ok(out)
    }

    fn sums_with(&self, z: [f64; 3], kinds: &[Spectral], order: usize, nf: usize, ns: usize) -> Vec<Derivs> {
        let mut out = vec![Derivs::default(); kinds.len()];
        self.reciprocal(z, kinds, order, nf, &mut out);
        self.spatial(z, kinds, order, ns, &mut out);
        for o in &mut out {
            symmetrize(o, order);
        }
        out
    }

    fn reciprocal(&self, z: [f64; 3], kinds: &[Spectral], order: usize, nf: usize, out: &mut [Derivs]) {
        let d = self.d;
        let eta = self.cfg.split_parameter;
        let nf = nf as i64;
        let len = (2 * nf + 1) as usize;
        let mut xi = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let mut ph = [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]];
        for a in 0..3 {
            for (idx, n) in (-nf..=nf).enumerate() {
                let x = if a < d { 2.0 * PI * n as f64 + self.alpha[a] } else { 0.0 };
                xi[a][idx] = x;
                ph[a][idx] = C64::from_polar(1.0, x * z[a]);
            }
        }
        let n3 = if d == 3 { len } else { 1 };
        let mut f = vec![ZERO; kinds.len()];
        for i0 in 0..len {
            for i1 in 0..len {
                let p01 = ph[0][i0] * ph[1][i1];
                for i2 in 0..n3 {
                    let k = [xi[0][i0], xi[1][i1], if d == 3 { xi[2][i2] } else { 0.0 }];
                    let q = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    if eta * q > RECIPROCAL_CUTOFF || q == 0.0 {
                        continue;
                    }
                    let phase = if d == 3 { p01 * ph[2][i2] } else { p01 };
                    for (fk, kind) in f.iter_mut().zip(kinds) {
                        *fk = reciprocal_factor(kind, q, eta);
                    }
                    for (o, fk) in out.iter_mut().zip(&f) {
                        let c = phase * fk;
                        accumulate_plane_wave(o, c, &k, d, order);
                    }
                }
            }
        }
    }

    fn spatial(&self, z: [f64; 3], kinds: &[Spectral], order: usize, ns: usize, out: &mut [Derivs]) {
        let d = self.d;
        let eta = self.cfg.split_parameter;
        let ns = ns as i64;
        let centre: Vec<i64> = (0..3).map(|a| if a < d { z[a].round() as i64 } else { 0 }).collect();
        let span = |a: usize| if a < d { (centre[a] - ns)..=(centre[a] + ns) } else { 0..=0 };
        let mut origin_seen = false;
        let mut images: Vec<[i64; 3]> = Vec::new();
        for m0 in span(0) {
            for m1 in span(1) {
                for m2 in span(2) {
                    origin_seen |= m0 == 0 && m1 == 0 && m2 == 0;
                    images.push([m0, m1, m2]);
                }
            }
        }
        if !origin_seen {
            images.push([0, 0, 0]);
        }
        let mut cache = ExpintCache::new(d);
        let mut radial = [ZERO; 4];
        for m in images {
            let is_origin = m == [0, 0, 0];
            let x = [z[0] - m[0] as f64, z[1] - m[1] as f64, z[2] - m[2] as f64];
            let s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let zz = s / (4.0 * eta);
            if zz > SPATIAL_CUTOFF && !is_origin {
                continue;
            }
            let phase = C64::from_polar(
                1.0,
                self.alpha[0] * m[0] as f64 + self.alpha[1] * m[1] as f64 + self.alpha[2] * m[2] as f64,
            );
            cache.reset(zz, eta);
            let at_origin = s == 0.0;
            // At x = 0 only the value and the isotropic Hessian part survive.
            let pmax = if at_origin { order.min(1) } else { order };
            for (o, kind) in out.iter_mut().zip(kinds) {
                for (p, r) in radial.iter_mut().enumerate().take(pmax + 1) {
                    if at_origin && p == 1 && order < 2 {
                        continue;
                    }
                    *r = radial_derivative(kind, p, is_origin, &mut cache, d, eta, zz);
                }
                accumulate_radial(o, phase, &radial, &x, order, at_origin);
            }
        }
    }
}

fn reciprocal_factor(kind: &Spectral, q: f64, eta: f64) -> C64 {
    match *kind {
        Spectral::Power { m, .. } => {
            let eq = eta * q;
            let mut term = 1.0;
            let mut sum = 1.0;
            for j in 1..m {
                term *= eq / j as f64;
                sum += term;
            }
            C64::new((-eq).exp() * sum / q.powi(m as i32), 0.0)
        }
        Spectral::Shifted { kappa2 } => {
            let den = q - kappa2;
            (-(eta * den)).exp() / den
        }
        Spectral::ShiftedDiff { a, b, scale } => {
            let ea = (eta * b).exp();
            let diff_exp = ea * expm1_c(eta * (a - b));
            let num = diff_exp * (q - b) + (a - b) * ea;
            (-eta * q).exp() * num / ((q - a) * (q - b) * scale)
        }
    }
}

#[inline]
fn accumulate_plane_wave(o: &mut Derivs, c: C64, k: &[f64; 3], d: usize, order: usize) {
    o.v += c;
    if order == 0 {
        return;
    }
    let ic = C64::new(-c.im, c.re);
    for a in 0..d {
        o.g[a] += ic * k[a];
    }
    if order == 1 {
        return;
    }
    for a in 0..d {
        for b in a..d {
            o.h[a][b] -= c * (k[a] * k[b]);
        }
    }
    if order == 2 {
        return;
    }
    for a in 0..d {
        for b in a..d {
            let kab = k[a] * k[b];
            for e in b..d {
                o.t[a][b][e] -= ic * (kab * k[e]);
            }
        }
    }
}

#[inline]
fn accumulate_radial(o: &mut Derivs, phase: C64, r: &[C64; 4], x: &[f64; 3], order: usize, at_origin: bool) {
    o.v += phase * r[0];
    if order == 0 {
        return;
    }
    if at_origin {
        if order >= 2 {
            let h = phase * r[1] * 2.0;
            for a in 0..3 {
                o.h[a][a] += h;
            }
        }
        return;
    }
    let r1 = phase * r[1];
    for a in 0..3 {
        o.g[a] += r1 * (2.0 * x[a]);
    }
    if order == 1 {
        return;
    }
    let r2 = phase * r[2];
    for a in 0..3 {
        for b in a..3 {
            let mut v = r2 * (4.0 * x[a] * x[b]);
            if a == b {
                v += r1 * 2.0;
            }
            o.h[a][b] += v;
        }
    }
    if order == 2 {
        return;
    }
    let r3 = phase * r[3];
    for a in 0..3 {
        for b in a..3 {
            for e in b..3 {
                let mut v = r3 * (8.0 * x[a] * x[b] * x[e]);
                let mut dsum = 0.0;
                if a == b {
                    dsum += x[e];
                }
                if a == e {
                    dsum += x[b];
                }
                if b == e {
                    dsum += x[a];
                }
                if dsum != 0.0 {
                    v += r2 * (4.0 * dsum);
                }
                o.t[a][b][e] += v;
            }
        }
    }
}

/// Copies the computed upper-triangular entries to all index permutations.
fn symmetrize(o: &mut Derivs, order: usize) {
    if order >= 2 {
        for a in 0..3 {
            for b in 0..a {
                o.h[a][b] = o.h[b][a];
            }
        }
    }
    if order >= 3 {
        for a in 0..3 {
            for b in 0..3 {
                for e in 0..3 {
                    let mut s = [a, b, e];
                    s.sort_unstable();
                    o.t[a][b][e] = o.t[s[0]][s[1]][s[2]];
                }
            }
        }
    }
}

/// Memoized `eta^{a+1} E_{a+2}(zz)` for the half-integer and integer orders that occur.
struct ExpintCache {
    d: usize,
    zz: f64,
    eta: f64,
    vals: Vec<f64>,
}

const CACHE_OFFSET: i64 = 16;

impl ExpintCache {
    fn new(d: usize) -> Self {
        Self { d, zz: 0.0, eta: 1.0, vals: vec![f64::NAN; 160] }
    }

    fn reset(&mut self, zz: f64, eta: f64) {
        self.zz = zz;
        self.eta = eta;
        self.vals.iter_mut().for_each(|v| *v = f64::NAN);
    }

    /// `I_a = int_0^eta t^a e^{-s/(4t)} dt` with `a = j - d/2`, i.e. `eta^{a+1} E_{a+2}(zz)`.
    fn image_integral(&mut self, j: i64) -> f64 {
        let idx = (j + CACHE_OFFSET) as usize;
        if idx >= self.vals.len() {
            return self.compute(j);
        }
        if self.vals[idx].is_nan() {
            self.vals[idx] = self.compute(j);
        }
        self.vals[idx]
    }

    fn compute(&self, j: i64) -> f64 {
        let a = j as f64 - self.d as f64 / 2.0;
        self.eta.powf(a + 1.0) * expint(a + 2.0, self.zz)
    }
}

fn radial_derivative(
    kind: &Spectral,
    p: usize,
    is_origin: bool,
    cache: &mut ExpintCache,
    d: usize,
    eta: f64,
    zz: f64,
) -> C64 {
    let base = (4.0 * PI).powf(-(d as f64) / 2.0) * (-0.25f64).powi(p as i32);
    match *kind {
        Spectral::Power { m, self_image } => {
            let gamma_m: f64 = (1..m).map(|k| k as f64).product();
            let pref = base / gamma_m;
            // a = m - 1 - d/2 - p, stored as j - d/2 with j = m - 1 - p
            let j = m as i64 - 1 - p as i64;
            if is_origin && self_image == SelfImage::Complement {
                C64::new(complement(m, p, d, eta, zz, pref), 0.0)
            } else {
                C64::new(pref * cache.image_integral(j), 0.0)
            }
        }
        Spectral::Shifted { kappa2 } => shifted_series(|q| kappa2.powu(q as u32) / factorial(q), p, cache, base, 0),
        Spectral::ShiftedDiff { a, b, scale } => shifted_series(
            |q| (a.powu(q as u32) - b.powu(q as u32)) / (factorial(q) * scale),
            p,
            cache,
            base,
            1,
        ),
    }
}

fn factorial(q: usize) -> f64 {
    (1..=q).map(|k| k as f64).product()
}

fn shifted_series(coef: impl Fn(usize) -> C64, p: usize, cache: &mut ExpintCache, base: f64, q0: usize) -> C64 {
    let mut sum = ZERO;
    for q in q0..80 {
        let c = coef(q);
        let term = c * cache.image_integral(q as i64 - p as i64);
        sum += term;
        if q > q0 + 2 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum * base
}

/// Self image minus its whole-space counterpart, as a smooth function of `s = |x|^2`.
fn complement(m: usize, p: usize, d: usize, eta: f64, zz: f64, pref: f64) -> f64 {
    let a = m as f64 - 1.0 - d as f64 / 2.0 - p as f64;
    let nu = a + 2.0;
    if d == 2 && m == 1 && p == 0 {
        (ein(zz) - EULER_GAMMA + (4.0 * eta).ln()) / (4.0 * PI)
    } else if d == 2 && m == 2 && p == 1 {
        -(ein(zz) - EULER_GAMMA + (4.0 * eta).ln() + 1.0) / (16.0 * PI)
    } else if nu < 1.0 {
        -pref * eta.powf(a + 1.0) * expint_lower(nu, zz)
    } else {
        f64::NAN
    }
}

/// Smallest `|2 pi n + alpha|`; equals `|alpha|` inside the Brillouin zone.
pub fn min_shifted_norm(alpha: &[f64]) -> f64 {
    alpha
        .iter()
        .map(|a| {
            let r = a - 2.0 * PI * (a / (2.0 * PI)).round();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}
