//! Scalar special functions used by the lattice sums and the free-space kernels.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EPS: f64 = 1e-17;
const MAX_ITER: usize = 500;

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

/// Generalized exponential integral `E_nu(z) = int_1^inf u^{-nu} e^{-z u} du` for real `nu`, `z >= 0`.
///
/// At `z = 0` the integral exists only for `nu > 1`; other cases return `+inf`.
pub fn expint(nu: f64, z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z == 0.0 {
        return if nu > 1.0 { 1.0 / (nu - 1.0) } else { f64::INFINITY };
    }
    if nu <= 0.0 && is_integer(nu) {
        // E_{-n}(z) = n! e^{-z} / z^{n+1} sum_{j<=n} z^j / j!
        let n = (-nu) as usize;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..=n {
            term *= z / j as f64;
            sum += term;
        }
        let mut fact = 1.0;
        for j in 1..=n {
            fact *= j as f64;
        }
        return fact * (-z).exp() * sum / z.powi(n as i32 + 1);
    }
    if z > 700.0 {
        return 0.0;
    }
    if z >= 1.0 && nu <= 0.0 {
        // Downward recurrence E_nu = (e^{-z} - nu E_{nu+1}) / z from an order in (0, 1].
        let steps = (1.0 - nu).floor();
        let mut e = expint(nu + steps, z);
        let mut order = nu + steps;
        while order > nu + 0.5 {
            order -= 1.0;
            e = ((-z).exp() - order * e) / z;
        }
        return e;
    }
    if z >= 1.0 {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = z + nu;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (nu - 1.0 + i as f64);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        return h * (-z).exp();
    }
    if is_integer(nu) {
        let n = nu as i64;
        let nm1 = n - 1;
        let mut ans = if nm1 != 0 { 1.0 / nm1 as f64 } else { -z.ln() - EULER_GAMMA };
        let mut fact = 1.0;
        for i in 1..MAX_ITER as i64 {
            fact *= -z / i as f64;
            let del = if i != nm1 {
                -fact / (i - nm1) as f64
            } else {
                let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
                fact * (-z.ln() + psi)
            };
            ans += del;
            if del.abs() < ans.abs() * EPS {
                break;
            }
        }
        return ans;
    }
    // Non-integer order: Gamma(1-nu) z^{nu-1} - sum_k (-z)^k / (k! (1 - nu + k)).
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..MAX_ITER {
        if k > 0 {
            term *= -z / k as f64;
        }
        let del = term / (1.0 - nu + k as f64);
        sum += del;
        if del.abs() < EPS * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    libm::tgamma(1.0 - nu) * z.powf(nu - 1.0) - sum
}

/// Lower complement `int_0^1 u^{-nu} e^{-z u} du` for `nu < 1`, `z >= 0`.
pub fn expint_lower(nu: f64, z: f64) -> f64 {
    debug_assert!(nu < 1.0 && z >= 0.0);
    if z <= 2.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..MAX_ITER {
            if k > 0 {
                term *= -z / k as f64;
            }
            let del = term / (k as f64 + 1.0 - nu);
            sum += del;
            if del.abs() < EPS * sum.abs() && k > 2 {
                break;
            }
        }
        sum
    } else {
        libm::tgamma(1.0 - nu) * z.powf(nu - 1.0) - expint(nu, z)
    }
}

/// Entire exponential integral `Ein(z) = E_1(z) + gamma + ln z`.
pub fn ein(z: f64) -> f64 {
    if z <= 2.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..MAX_ITER {
            term *= -z / k as f64;
            let del = -term / k as f64;
            sum += del;
            if del.abs() <= EPS * sum.abs() {
                break;
            }
        }
        sum
    } else {
        expint(1.0, z) + EULER_GAMMA + z.ln()
    }
}

/// `exp(w) - 1` without cancellation for small `|w|`.
pub fn expm1_c(w: C64) -> C64 {
    if w.norm() < 0.2 {
        let mut term = w;
        let mut sum = w;
        for k in 2..40 {
            term *= w / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        w.exp() - 1.0
    }
}

/// Hankel functions `(H_0^{(1)}(z), H_1^{(1)}(z))` for `Re z > 0`.
///
/// Ascending series for `|z| <= 12`, Hankel's asymptotic expansion beyond.
/// Relative accuracy is about 1e-12 on the real axis and degrades slowly with `|Im z|`.
pub fn hankel01(z: C64) -> (C64, C64) {
    if z.norm() <= 12.0 {
        let (j0, j1, y0, y1) = bessel_series(z);
        let i = C64::i();
        (j0 + i * y0, j1 + i * y1)
    } else {
        (hankel_asymptotic(0.0, z), hankel_asymptotic(1.0, z))
    }
}

fn bessel_series(z: C64) -> (C64, C64, C64, C64) {
    let half = z * 0.5;
    let q = -half * half;
    let lg = half.ln() + EULER_GAMMA;
    let mut j0 = C64::new(0.0, 0.0);
    let mut j1 = C64::new(0.0, 0.0);
    let mut s0 = C64::new(0.0, 0.0);
    let mut s1 = C64::new(0.0, 0.0);
    // t0 = q^k / (k!)^2, t1 = (z/2) q^k / (k! (k+1)!)
    let mut t0 = C64::new(1.0, 0.0);
    let mut t1 = half;
    let mut hk = 0.0;
    for k in 0..200usize {
        if k > 0 {
            let kf = k as f64;
            t0 *= q / (kf * kf);
            t1 *= q / (kf * (kf + 1.0));
            hk += 1.0 / kf;
        }
        let hk1 = hk + 1.0 / (k as f64 + 1.0);
        j0 += t0;
        j1 += t1;
        // Y0 tail: sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2 = -sum H_k t0
        s0 -= t0 * hk;
        s1 += t1 * (hk + hk1);
        if k > 4 && t0.norm() < 1e-18 * j0.norm().max(1e-300) && t1.norm() < 1e-18 * j1.norm().max(1e-300) {
            break;
        }
    }
    let y0 = (2.0 / PI) * (lg * j0 + s0);
    let y1 = -2.0 / (PI * z) + (2.0 / PI) * lg * j1 - s1 / PI;
    (j0, j1, y0, y1)
}

fn hankel_asymptotic(nu: f64, z: C64) -> C64 {
    let mu = 4.0 * nu * nu;
    let i = C64::i();
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 1..60usize {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= i * (mu - odd * odd) / (kf * 8.0 * z);
        let size = term.norm();
        if size > prev {
            break;
        }
        sum += term;
        prev = size;
        if size < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * z)).sqrt() * (i * (z - nu * FRAC_PI_2 - FRAC_PI_4)).exp() * sum
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let rule = gauss_quad::GaussLegendre::new(n).expect("degree >= 2");
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Fills `out[l] = P_l(x)` for `l = 0..out.len()`.
pub fn legendre_values(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for l in 2..out.len() {
        let lf = l as f64;
        out[l] = ((2.0 * lf - 1.0) * x * out[l - 1] - (lf - 1.0) * out[l - 2]) / lf;
    }
}
