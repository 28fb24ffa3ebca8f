//! Whole-space single-layer operator and capacitance-type matrix of the unit ball
//! compared with their closed forms.

use num_complex::Complex64 as C64;
use subwave::bie::{
    assemble_single_layer, compute_Q_alpha, constant_trace, discretize_unconfined, Background, Shape,
};
use subwave::greens::LatticeSumConfig;
use subwave::materials::LameMaterial;
use subwave::spectrum::{ball_closed_form, rotational_modes};

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(1.0, 1.0, 1.0);
    let cfg = LatticeSumConfig::default();
    let disc = discretize_unconfined(&Shape::sphere(1.0), 512)?;
    let closed = ball_closed_form(1.0, &mat)?;
    let s = assemble_single_layer(&disc, &Background::Free, C64::new(0.0, 0.0), &mat, &cfg)?;
    let v = s.apply(&constant_trace(&disc, 0))?;
    let err = v.iter().step_by(3).map(|z| (z.re - closed.single_layer_constant).abs()).fold(0.0, f64::max);
    println!("S[e_1] = {:.15} e_1 (closed form -7/9), max error {err:.2e}", v[0].re);
    let q = compute_Q_alpha(&disc, &Background::Free, &mat, &cfg)?;
    println!("beta = {:?}, closed form 36 pi / 7 = {:.15}", q.beta, closed.beta);
    let volume = 4.0 * std::f64::consts::PI / 3.0;
    println!("omega_min / sqrt(eps) = {:.15} (sqrt(27/7) = {:.15})", (q.beta[0] / volume).sqrt(), closed.omega_min_coeff);
    let rot = rotational_modes(&disc, &Background::Free, &mat, &cfg)?;
    println!("rotational omega / sqrt(eps) = {:?} (sqrt(15) = {:.15})", rot.frequencies(1.0, 1.0), closed.omega_max_coeff);
    Ok(())
}
