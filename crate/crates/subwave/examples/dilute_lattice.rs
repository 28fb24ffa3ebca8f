//! Dilute expansion of `Q^alpha` for a small sphere compared with the direct computation.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use subwave::bie::{compute_Q_alpha, discretize_boundary, discretize_unconfined, Background, Shape};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{LameMaterial, QuasiMomentum};
use subwave::spectrum::{density_integrals, dilute_q, remainder_at_origin, DiluteScaling};

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(1.0, 1.0, 1.0);
    let cfg = LatticeSumConfig::default();
    let nodes = 288;
    let alpha = QuasiMomentum::with_default_cutoff(&[PI, PI, PI])?;
    let unit = discretize_unconfined(&Shape::sphere(0.5), nodes)?;
    let qd = compute_Q_alpha(&unit, &Background::Free, &mat, &cfg)?.entries;
    let r0 = remainder_at_origin(&alpha, &mat, &cfg)?;
    let xi = density_integrals(&qd);
    for s in [0.1, 0.05] {
        let disc = discretize_boundary(&Shape::sphere(0.5 * s), nodes)?;
        let direct = compute_Q_alpha(&disc, &Background::Quasi(alpha), &mat, &cfg)?.entries;
        let dilute = dilute_q(&qd, &DiluteScaling::new(s, 1e-6)?, &r0, &xi)?;
        let first: faer::Mat<C64> = &qd * faer::Scale(C64::new(s, 0.0));
        println!(
            "s = {s}: |Q_direct| = {:.6e}, |Q_direct - s Q^D| = {:.3e}, |Q_direct - Q_dilute| = {:.3e}",
            direct.norm_l2(),
            (&direct - &first).norm_l2(),
            (&direct - &dilute).norm_l2()
        );
    }
    Ok(())
}
