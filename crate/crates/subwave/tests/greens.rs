use num_complex::Complex64 as C64;
use rand::rngs::StdRng as Rng64;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use subwave::greens::*;
use subwave::materials::{LameMaterial, QuasiMomentum};

fn unit() -> LameMaterial {
    LameMaterial::new(1.0, 1.0, 1.0)
}

fn qm(a: &[f64]) -> QuasiMomentum {
    QuasiMomentum::with_default_cutoff(a).unwrap()
}

fn lattice_dist(x: &[f64]) -> f64 {
    x.iter().map(|v| (v - v.round()).powi(2)).sum::<f64>().sqrt()
}

fn max_diff(a: &[[C64; 3]; 3], b: &[[C64; 3]; 3], d: usize) -> f64 {
    let mut m = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

#[test]
fn ewald_and_regularized_fourier_agree_at_benchmark_point() {
    let a = qm(&[PI, PI]);
    let x = [0.3, 0.1];
    let g = green_quasi_static(&x, &a, &unit(), &LatticeSumConfig::default()).unwrap();
    let eps = (lattice_dist(&x) / 11.0).powi(2);
    let f = fourier::quasi_static_regularized(&x, &a, &unit(), eps);
    assert!(max_diff(&g.entries, &f, 2) < 1e-8);
}

#[test]
fn ewald_and_regularized_fourier_agree_at_random_points() {
    let mut rng = Rng64::seed_from_u64(7);
    for d in [2usize, 3] {
        for _ in 0..6 {
            let alpha: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
            if alpha.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.2 {
                continue;
            }
            let x: Vec<f64> = loop {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
                if lattice_dist(&x) > 0.15 {
                    break x;
                }
            };
            let a = qm(&alpha);
            let g = green_quasi_static(&x, &a, &unit(), &LatticeSumConfig::default()).unwrap();
            let eps = (lattice_dist(&x) / 11.0).powi(2);
            let f = fourier::quasi_static_regularized(&x, &a, &unit(), eps);
            assert!(max_diff(&g.entries, &f, d) < 1e-8, "d={d} x={x:?} alpha={alpha:?}");
        }
    }
}

#[test]
fn remainder_at_origin_agrees_with_regularized_scheme() {
    let a = qm(&[PI, PI, PI]);
    let r = smooth_remainder(&[0.0; 3], &a, &unit(), &LatticeSumConfig::default()).unwrap();
    let f = fourier::remainder_origin_regularized(&a, &unit(), 2e-4);
    assert!(max_diff(&r.entries, &f, 3) < 1e-7, "{:?}", r.entries);
}

#[test]
fn quasi_periodicity_and_conjugation() {
    let cfg = LatticeSumConfig::default();
    for alpha in [vec![PI, PI], vec![2.0, -1.0], vec![PI, 0.5, -2.0]] {
        let a = qm(&alpha);
        let d = a.dim();
        let x: Vec<f64> = [0.23, -0.31, 0.12][..d].to_vec();
        let g = green_quasi_static(&x, &a, &unit(), &cfg).unwrap();
        for e in 0..d {
            let mut y = x.clone();
            y[e] += 1.0;
            let gy = green_quasi_static(&y, &a, &unit(), &cfg).unwrap();
            let ph = C64::from_polar(1.0, alpha[e]);
            for i in 0..d {
                for j in 0..d {
                    assert!((gy.get(i, j) - ph * g.get(i, j)).norm() < 1e-10);
                }
            }
        }
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let gm = green_quasi_static(&neg, &a, &unit(), &cfg).unwrap();
        let ga = green_quasi_static(&x, &a.negated(), &unit(), &cfg).unwrap();
        for i in 0..d {
            for j in 0..d {
                assert!((gm.get(i, j) - g.get(i, j).conj()).norm() < 1e-10);
                assert!((ga.get(i, j) - g.get(i, j).conj()).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn truncation_doubling_is_self_consistent() {
    let cfg = LatticeSumConfig::default().verifying();
    for alpha in [vec![PI, PI], vec![0.3, -0.2, 0.1]] {
        let a = qm(&alpha);
        let x: Vec<f64> = [0.41, -0.37, 0.05][..a.dim()].to_vec();
        assert!(green_quasi_static(&x, &a, &unit(), &cfg).is_ok());
        assert!(green_quasi_series_coeff(&x, &a, 2, &unit(), &cfg).is_ok());
    }
    let coarse = LatticeSumConfig { fourier_truncation: 1, spatial_truncation: 1, split_parameter: 0.5, ..cfg };
    let a = qm(&[PI, PI]);
    assert!(matches!(
        green_quasi_static(&[0.3, 0.1], &a, &unit(), &coarse),
        Err(subwave::error::Error::Accuracy(_))
    ));
}

#[test]
fn direct_and_series_dynamic_agree() {
    let a = qm(&[PI, PI]);
    let cfg = LatticeSumConfig::default();
    let k = C64::new(0.05, 0.0);
    let x = [0.3, 0.1];
    let direct = green_quasi_dynamic_with(&x, &a, k, &unit(), &cfg, DynamicMethod::Direct).unwrap();
    let series = green_quasi_dynamic_with(&x, &a, k, &unit(), &cfg, DynamicMethod::Series).unwrap();
    assert!(direct.max_abs_diff(&series) < 1e-8);
    // 3D, near the top of the series range
    let a = qm(&[1.0, -2.0, 0.5]);
    let k = C64::new(0.6, 0.0);
    let x = [0.2, 0.3, -0.1];
    let direct = green_quasi_dynamic_with(&x, &a, k, &unit(), &cfg, DynamicMethod::Direct).unwrap();
    let series = green_quasi_dynamic_with(&x, &a, k, &unit(), &cfg, DynamicMethod::Series).unwrap();
    assert!(direct.max_abs_diff(&series) < 1e-8);
}

#[test]
fn zero_wavenumber_delegates_to_static() {
    let a = qm(&[PI, 1.0]);
    let cfg = LatticeSumConfig::default();
    let s = green_quasi_static(&[0.2, 0.3], &a, &unit(), &cfg).unwrap();
    let d = green_quasi_dynamic(&[0.2, 0.3], &a, C64::new(0.0, 0.0), &unit(), &cfg).unwrap();
    assert_eq!(s.entries, d.entries);
}

#[test]
fn resonant_wavenumber_is_rejected() {
    let a = qm(&[0.5, 0.0]);
    let r = green_quasi_dynamic(&[0.2, 0.3], &a, C64::new(0.3, 0.0), &unit(), &LatticeSumConfig::default());
    assert!(matches!(r, Err(subwave::error::Error::ResonantDenominator { .. })));
}

#[test]
fn series_coefficient_is_finite_difference_limit() {
    let a = qm(&[PI, PI]);
    let cfg = LatticeSumConfig::default();
    let x = [0.3, 0.1];
    let g0 = green_quasi_static(&x, &a, &unit(), &cfg).unwrap();
    let quotient = |k: f64| {
        let g = green_quasi_dynamic_with(&x, &a, C64::new(k, 0.0), &unit(), &cfg, DynamicMethod::Direct).unwrap();
        let mut q = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..2 {
            for j in 0..2 {
                q[i][j] = (g.get(i, j) - g0.get(i, j)) / (k * k);
            }
        }
        q
    };
    let (q1, q2) = (quotient(1e-2), quotient(5e-3));
    let g1 = green_quasi_series_coeff(&x, &a, 1, &unit(), &cfg).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let extrapolated = (q2[i][j] * 4.0 - q1[i][j]) / 3.0;
            assert!((extrapolated - g1.get(i, j)).norm() < 1e-5 * g1.max_abs());
        }
    }
}

#[test]
fn dynamic_approaches_static_quadratically() {
    let a = qm(&[2.0, 1.0, -1.0]);
    let cfg = LatticeSumConfig::default();
    let x = [0.2, -0.1, 0.3];
    let g0 = green_quasi_static(&x, &a, &unit(), &cfg).unwrap();
    let ks: Vec<f64> = (0..6).map(|i| 1e-3 * 10f64.powf(i as f64 * 0.4)).collect();
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let g = green_quasi_dynamic(&x, &a, C64::new(k, 0.0), &unit(), &cfg).unwrap();
            (k.ln(), g.max_abs_diff(&g0).ln())
        })
        .collect();
    let slope = fit_slope(&pts);
    assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
}

fn fit_slope(p: &[(f64, f64)]) -> f64 {
    let n = p.len() as f64;
    let mx = p.iter().map(|v| v.0).sum::<f64>() / n;
    let my = p.iter().map(|v| v.1).sum::<f64>() / n;
    let sxy: f64 = p.iter().map(|v| (v.0 - mx) * (v.1 - my)).sum();
    let sxx: f64 = p.iter().map(|v| (v.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn remainder_is_continuous_at_origin() {
    let cfg = LatticeSumConfig::default();
    // generic momenta: at alpha = (pi, ..., pi) the remainder is even and the step is O(h^2)
    for alpha in [vec![2.0, 1.0], vec![2.0, 1.0, -0.5]] {
        let a = qm(&alpha);
        let d = a.dim();
        let zero = vec![0.0; d];
        let r0 = smooth_remainder(&zero, &a, &unit(), &cfg).unwrap();
        let u: Vec<f64> = [0.6, 0.8, 0.0][..d].to_vec();
        let step = |h: f64| {
            let x: Vec<f64> = u.iter().map(|v| v * h).collect();
            smooth_remainder(&x, &a, &unit(), &cfg).unwrap().max_abs_diff(&r0)
        };
        let ratio = step(1e-2) / step(1e-3);
        assert!(ratio > 5.0 && ratio < 20.0, "ratio {ratio}");
    }
}

#[test]
fn free_dynamic_reference_values() {
    // lambda = mu = 1, k = 0.1, x = (1, 0, 0), from an arbitrary-precision evaluation
    let g = green_free_dynamic(&[1.0, 0.0, 0.0], C64::new(0.1, 0.0), &unit(), 3).unwrap();
    let g11 = C64::new(REF_G11.0, REF_G11.1);
    let g22 = C64::new(REF_G22.0, REF_G22.1);
    assert!((g.get(0, 0) - g11).norm() < 1e-13);
    assert!((g.get(1, 1) - g22).norm() < 1e-13);
    assert!((g.get(2, 2) - g22).norm() < 1e-13);
    assert!(g.get(0, 1).norm() < 1e-16);
}

const REF_G11: (f64, f64) = (-0.079356541696473868964, -0.0058098408288550346148);
const REF_G22: (f64, f64) = (-0.052742458012946769109, -0.0058048796978923030051);

#[test]
fn free_tensors_are_even_and_symmetric() {
    let mut rng = Rng64::seed_from_u64(3);
    let m = LameMaterial::new(0.4, 1.7, 1.0);
    for d in [2usize, 3] {
        for _ in 0..10 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let k = C64::new(rng.gen_range(0.05..2.0), rng.gen_range(0.0..0.3));
            let s = green_free_static(&x, &m, d).unwrap();
            let sn = green_free_static(&neg, &m, d).unwrap();
            let g = green_free_dynamic(&x, k, &m, d).unwrap();
            let gn = green_free_dynamic(&neg, k, &m, d).unwrap();
            for i in 0..d {
                for j in 0..d {
                    assert!((g.get(i, j) - g.get(j, i)).norm() < 1e-14);
                    assert!((g.get(i, j) - gn.get(i, j)).norm() < 1e-14);
                    assert!((s.get(i, j) - sn.get(i, j)).norm() < 1e-15);
                }
            }
        }
    }
    let a = green_free_static(&[0.2, 0.1, -0.3], &unit(), 3).unwrap();
    let b = green_free_static(&[0.6, 0.3, -0.9], &unit(), 3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((a.get(i, j) - b.get(i, j) * 3.0).norm() < 1e-14);
        }
    }
}
