//! Randomized invariants.

mod common;

use common::*;
use faer::Mat;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use subwave::bie::{assemble_single_layer, compute_Q_alpha, weighted_inner, BoundaryDiscretization, LayerOperatorMatrix};
use subwave::cli::parse_config;
use subwave::greens::green_quasi_static;
use subwave::materials::{validate_convexity, ContrastRegime, LameMaterial};
use subwave::spectrum::{bandgap_estimate, frequency_from_beta, leading_frequencies, BandDiagram, BandSample, SampleFlag};

const ZERO: C64 = C64::new(0.0, 0.0);

fn alpha_away_from_zero(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, d).prop_filter("outside the cutoff", |a| a.iter().map(|v| v * v).sum::<f64>() > 0.04)
}

fn single_layer() -> &'static (BoundaryDiscretization, LayerOperatorMatrix) {
    static S: OnceLock<(BoundaryDiscretization, LayerOperatorMatrix)> = OnceLock::new();
    S.get_or_init(|| {
        let disc = circle(48);
        let s = assemble_single_layer(&disc, &quasi(&[1.3, -2.2]), ZERO, &unit(), &cfg()).unwrap();
        (disc, s)
    })
}

fn density(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tau_squared_epsilon_is_delta(delta in 1e-8..1e-1f64, tau in 0.05..20.0f64) {
        let c = ContrastRegime::from_tau(delta, tau).unwrap();
        prop_assert!((c.tau * c.tau * c.epsilon - delta).abs() <= 1e-14 * delta);
        let back = ContrastRegime::new(c.delta, c.epsilon).unwrap();
        prop_assert!((back.tau - tau).abs() <= 1e-12 * tau);
    }

    #[test]
    fn convexity_is_monotone_in_mu(lambda in -5.0..5.0f64, mu in -2.0..5.0f64, bump in 0.0..3.0f64, d in 2usize..4) {
        let m = LameMaterial::new(lambda, mu, 1.0);
        if validate_convexity(&m, d) {
            prop_assert!(validate_convexity(&LameMaterial::new(lambda, mu + bump, 1.0), d));
        }
        prop_assert_eq!(validate_convexity(&m, d), m.validated(d).is_ok());
    }

    #[test]
    fn gap_interval_follows_its_edges(
        tops in prop::collection::vec(0.01..1.0f64, 1..12),
        eta in prop::option::of(1e-4..0.2f64),
        sharp in 0.0..1.5f64,
    ) {
        let samples = tops.iter().map(|t| BandSample {
            alpha: vec![1.0, 1.0], beta: vec![1.0, 2.0], omega: vec![0.5 * t, *t], flag: SampleFlag::Computed,
        }).collect();
        let diagram = BandDiagram { dim: 2, samples, epsilon: 1e-4, rho: 1.0, measure: 0.2 };
        let r = bandgap_estimate(&diagram, eta, sharp).unwrap();
        let star = tops.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert_eq!(r.omega_star, star);
        prop_assert_eq!(r.eta, eta.unwrap_or(0.05 * star));
        match r.gap {
            Some([lo, hi]) => prop_assert!(lo == r.lower_edge() && hi == sharp && lo < hi),
            None => prop_assert!(sharp <= r.lower_edge()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quasi_periodic_green_symmetries(
        d in 2usize..4,
        alpha3 in prop::collection::vec(-PI..PI, 3),
        x3 in prop::collection::vec(-0.5..0.5f64, 3),
        e in 0usize..3,
    ) {
        let (alpha, x) = (&alpha3[..d], &x3[..d]);
        prop_assume!(alpha.iter().map(|v| v * v).sum::<f64>() > 0.04);
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 0.01);
        let e = e % d;
        let a = qm(alpha);
        let g = green_quasi_static(x, &a, &unit(), &cfg()).unwrap();
        prop_assert!(g.is_finite());
        let gn = green_quasi_static(x, &a.negated(), &unit(), &cfg()).unwrap();
        let mut y = x.to_vec();
        y[e] += 1.0;
        let gy = green_quasi_static(&y, &a, &unit(), &cfg()).unwrap();
        let ph = C64::from_polar(1.0, alpha[e]);
        let scale = g.max_abs();
        for i in 0..d {
            for j in 0..d {
                prop_assert!((gn.get(i, j) - g.get(i, j).conj()).norm() < 1e-9 * scale);
                prop_assert!((gy.get(i, j) - ph * g.get(i, j)).norm() < 1e-9 * scale);
                prop_assert!((g.get(i, j) - g.get(j, i)).norm() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn single_layer_is_linear_and_negative(f in density(96), g in density(96), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let (disc, s) = single_layer();
        let c = C64::new(a, b);
        let combo: Vec<C64> = f.iter().zip(&g).map(|(u, v)| u + c * v).collect();
        let lhs = s.apply(&combo).unwrap();
        let (sf, sg) = (s.apply(&f).unwrap(), s.apply(&g).unwrap());
        let scale = lhs.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - sf[i] - c * sg[i]).norm() < 1e-12 * scale);
        }
        let form = -weighted_inner(disc, &f, &sf);
        prop_assert!(form.re > 0.0 && form.im.abs() < 1e-8 * form.re, "{}", form);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn frequencies_are_ascending_and_recomputable(alpha in alpha_away_from_zero(2), eps in 1e-6..1e-2f64, rho in 0.5..4.0f64) {
        let disc = circle(32);
        let q = compute_Q_alpha(&disc, &quasi(&alpha), &unit(), &cfg()).unwrap();
        let measure = PI * 0.25 * 0.25;
        let w = leading_frequencies(&q, rho, measure, eps).unwrap();
        prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        for (b, o) in q.beta.iter().zip(&w) {
            prop_assert_eq!(frequency_from_beta(*b, rho, measure, eps).to_bits(), o.to_bits());
        }
        let herm = Mat::from_fn(2, 2, |i, j| q.entries[(j, i)].conj());
        prop_assert!(max_diff(&herm, &q.entries) == 0.0);
    }

    #[test]
    fn effective_config_round_trips(
        lambda in -0.9..5.0f64, mu in 0.1..5.0f64, rho in 0.1..5.0f64,
        delta in 1e-6..1e-2f64, r in 0.05..0.4f64, per in 1usize..20,
    ) {
        let text = format!(
            r#"{{"dimension": 2, "material": {{"lambda": {lambda}, "mu": {mu}, "rho": {rho}}},
               "contrast": {{"delta": {delta}}}, "shape": {{"kind": "circle", "radius": {r}}},
               "path": {{"per_segment": {per}}}}}"#
        );
        let loaded = parse_config(&text).unwrap();
        let again = parse_config(&serde_json::to_string(&loaded.config).unwrap()).unwrap();
        prop_assert_eq!(&again.config, &loaded.config);
        prop_assert_eq!(again.contrast, loaded.contrast);
    }
}
