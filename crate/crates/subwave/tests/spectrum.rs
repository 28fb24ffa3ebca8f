mod common;

use common::*;
use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use subwave::bie::*;
use subwave::error::Error;
use subwave::materials::ContrastRegime;
use subwave::spectrum::*;

fn q_circle(alpha: &[f64], scale: f64) -> QAlphaMatrix {
    compute_Q_alpha(&circle(64), &quasi(alpha), &unit().scaled_moduli(scale), &cfg()).unwrap()
}

#[test]
fn leading_frequency_scalings() {
    let q = q_circle(&[2.0, 1.0], 1.0);
    let m = PI / 16.0;
    assert!(leading_frequencies(&q, 1.0, m, 0.0).unwrap().iter().all(|w| *w == 0.0));
    let w1 = leading_frequencies(&q, 1.0, m, 1e-4).unwrap();
    let w4 = leading_frequencies(&q, 4.0, m, 1e-4).unwrap();
    for (a, b) in w1.iter().zip(&w4) {
        assert!((a / b - 2.0).abs() < 1e-14);
    }
    assert!(w1.windows(2).all(|p| p[0] <= p[1]));
    let q3 = q_circle(&[2.0, 1.0], 3.0);
    let w3 = leading_frequencies(&q3, 1.0, m, 1e-4).unwrap();
    for i in 0..2 {
        assert!((q3.beta[i] / q.beta[i] - 3.0).abs() < 1e-8);
        assert!((w3[i] / w1[i] - 3f64.sqrt()).abs() < 1e-8);
    }
}

#[test]
fn conjugate_momentum_gives_the_same_bands() {
    let (a, b) = (q_circle(&[2.0, -1.0], 1.0), q_circle(&[-2.0, 1.0], 1.0));
    for i in 0..2 {
        assert!((a.beta[i] - b.beta[i]).abs() < 1e-8 * a.beta[i]);
    }
}

#[test]
fn default_sweep_peak_is_pinned_and_refines_monotonically() {
    let disc = circle(128);
    let contrast = ContrastRegime::new(1e-4, 1e-4).unwrap();
    let sweep = |per| sweep_brillouin(&BrillouinPath::standard(2, per).unwrap(), &disc, &unit(), &contrast, &cfg(), 1e-2).unwrap();
    let coarse = sweep(11);
    assert_eq!(coarse.computed().count(), 32);
    for s in coarse.samples.iter().filter(|s| s.flag == SampleFlag::Analytic) {
        assert_eq!(s.omega, vec![0.0, 0.0]);
        assert!(s.alpha.iter().all(|a| *a == 0.0));
    }
    for s in coarse.computed() {
        assert!(s.omega.windows(2).all(|p| p[0] <= p[1]) && s.omega[0] >= 0.0);
        for (w, b) in s.omega.iter().zip(&s.beta) {
            assert_eq!(*w, frequency_from_beta(*b, coarse.rho, coarse.measure, coarse.epsilon));
        }
    }
    let top = coarse.computed().max_by(|a, b| a.omega[1].total_cmp(&b.omega[1])).unwrap();
    // Observed argmax of the top branch on the default path: the X point.
    assert!((top.alpha[0] - PI).abs() < 1e-12 && top.alpha[1] == 0.0, "{:?}", top.alpha);
    let fine = sweep(22);
    let star = |d: &BandDiagram| bandgap_estimate(d, None, 1.0).unwrap().omega_star;
    assert!(star(&fine) >= star(&coarse));
}

fn one_sample(omega: Vec<f64>) -> BandDiagram {
    BandDiagram {
        dim: 2,
        samples: vec![BandSample { alpha: vec![1.0, 1.0], beta: vec![1.0, 4.0], omega, flag: SampleFlag::Computed }],
        epsilon: 1.0,
        rho: 1.0,
        measure: 1.0,
    }
}

#[test]
fn gap_report_definitions() {
    let r = bandgap_estimate(&one_sample(vec![1.0, 2.0]), Some(0.1), 3.0).unwrap();
    let g = r.gap.unwrap();
    assert!((g[0] - 2.1).abs() < 1e-15 && g[1] == 3.0);
    assert!(r.lower_edge() > r.omega_star);
    assert!(bandgap_estimate(&one_sample(vec![1.0, 2.0]), Some(0.1), 2.05).unwrap().gap.is_none());
    let default = bandgap_estimate(&one_sample(vec![1.0, 2.0]), None, 3.0).unwrap();
    assert!((default.eta - 0.1).abs() < 1e-15);
    assert!(default.epsilon_note.contains("epsilon_0"));
    let mut flagged = one_sample(vec![0.0, 0.0]);
    flagged.samples[0].flag = SampleFlag::Analytic;
    assert!(bandgap_estimate(&flagged, None, 3.0).is_err());
}

#[test]
fn ball_closed_form_radius_dependence() {
    let a = ball_closed_form(1.0, &unit()).unwrap();
    let b = ball_closed_form(2.0, &unit()).unwrap();
    assert!((a.q_diag - 36.0 * PI / 7.0).abs() < 1e-12);
    assert!((a.omega_min_coeff - (27.0f64 / 7.0).sqrt()).abs() < 1e-14);
    assert!((a.omega_max_coeff - 15f64.sqrt()).abs() < 1e-14);
    assert!((b.q_diag / a.q_diag - 2.0).abs() < 1e-14);
    assert!((a.omega_min_coeff / b.omega_min_coeff - 2.0).abs() < 1e-14);
    assert!((a.omega_max_coeff / b.omega_max_coeff - 2.0).abs() < 1e-14);
}

#[test]
fn dilute_expansion_structure() {
    let disc = discretize_unconfined(&Shape::sphere(0.5), sphere_node_count(8)).unwrap();
    let qd = compute_Q_alpha(&disc, &Background::Free, &unit(), &cfg()).unwrap().entries;
    let r0 = remainder_at_origin(&qm(&[PI, PI, PI]), &unit(), &cfg()).unwrap();
    let xi = density_integrals(&qd);
    let s = 1e-6;
    let q = dilute_q(&qd, &DiluteScaling::new(s, 1e-14).unwrap(), &r0, &xi).unwrap();
    let ratio: Mat<C64> = &q * faer::Scale(C64::new(1.0 / s, 0.0));
    assert!(max_diff(&ratio, &qd) < 1e-4 * max_abs(&qd));
    assert!(DiluteScaling::new(0.1, 1e-2).unwrap().note.is_some());
    assert!(DiluteScaling::new(0.1, 1e-4).unwrap().note.is_none());
    assert!(DiluteScaling::new(0.6, 1e-4).is_err());
    let small = discretize_unconfined(&Shape::sphere(0.05), sphere_node_count(8)).unwrap();
    let qs = compute_Q_alpha(&small, &Background::Free, &unit(), &cfg()).unwrap().entries;
    let scaled: Mat<C64> = &qd * faer::Scale(C64::new(0.1, 0.0));
    assert!(max_diff(&qs, &scaled) < 1e-6 * max_abs(&scaled));
    let q2 = Mat::<C64>::zeros(2, 2);
    assert!(matches!(dilute_q(&q2, &DiluteScaling::new(0.1, 0.0).unwrap(), &r0, &xi), Err(Error::Unsupported(_))));
}

#[test]
fn ball_modes_are_degenerate_and_normalized() {
    let disc = discretize_unconfined(&Shape::sphere(1.0), sphere_node_count(12)).unwrap();
    let q = compute_Q_alpha(&disc, &Background::Free, &unit(), &cfg()).unwrap();
    let m = inclusion_measure(&disc);
    let mode = resonant_mode_leading(&q, 0, m).unwrap();
    assert!(mode.degenerate);
    assert_eq!(mode.interior.len(), 3);
    for v in &mode.interior {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm * m - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ellipse_modes_align_with_the_axes() {
    let disc = discretize_boundary(&Shape::ellipse(0.3, 0.2), 128).unwrap();
    let q = compute_Q_alpha(&disc, &quasi(&[PI, PI]), &unit(), &cfg()).unwrap();
    assert!(q.beta[1] - q.beta[0] > 10.0 * HERMITIAN_TOL, "{:?}", q.beta);
    let m = inclusion_measure(&disc);
    for i in 0..2 {
        let mode = resonant_mode_leading(&q, i, m).unwrap();
        assert!(!mode.degenerate);
        let v = &mode.interior[0];
        let off = v[0].norm().min(v[1].norm()) / v[0].norm().max(v[1].norm());
        assert!(off < 1e-3, "branch {i}: {v:?}");
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm * m - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rotational_resonance_of_the_ball() {
    let disc = discretize_unconfined(&Shape::sphere(0.5), sphere_node_count(10)).unwrap();
    let rot = rotational_modes(&disc, &Background::Free, &unit(), &cfg()).unwrap();
    let expected = ball_closed_form(0.5, &unit()).unwrap().omega_max_coeff;
    for w in rot.frequencies(1.0, 1.0) {
        assert!((w - expected).abs() < 1e-6 * expected, "{w} vs {expected}");
    }
}
