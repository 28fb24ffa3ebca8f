//! Smallest-singular-value sweep of the full transmission problem at one contrast,
//! compared with the leading-order resonances.

use std::f64::consts::PI;
use subwave::bie::{compute_Q_alpha, discretize_boundary, inclusion_measure, Background, Shape};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{LameMaterial, QuasiMomentum};
use subwave::oracle::{scaled_grid, sweep_operators, SweepOptions, TransmissionOperators};
use subwave::spectrum::rotational_modes;

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(1.0, 1.0, 1.0);
    let cfg = LatticeSumConfig::default();
    let disc = discretize_boundary(&Shape::circle(0.25), 64)?;
    let alpha = QuasiMomentum::with_default_cutoff(&[PI, PI])?;
    let (delta, tau, window): (f64, f64, f64) = (1e-3, 1.0, 14.0);
    let ops = TransmissionOperators::new(&disc, &alpha, &mat, &cfg, window * delta.sqrt(), tau)?;
    let grid = scaled_grid(delta, window, 80);
    let dips = sweep_operators(&ops, delta, tau, &grid, &SweepOptions::default())?;
    for d in &dips {
        println!(
            "dip at omega = {:.6e} ({:.4} sqrt(delta)), sigma_min = {:.2e}, multiplicity {}, converged {}",
            d.omega_hat,
            d.omega_hat / delta.sqrt(),
            d.dip_value,
            d.multiplicity,
            d.converged
        );
    }
    let bg = Background::Quasi(alpha);
    let q = compute_Q_alpha(&disc, &bg, &mat, &cfg)?;
    let measure = inclusion_measure(&disc);
    for b in &q.beta {
        println!("translational prediction: {:.4} sqrt(delta)", (b / (mat.rho * tau * tau * measure)).sqrt());
    }
    for k in rotational_modes(&disc, &bg, &mat, &cfg)?.kappa {
        println!("rotational prediction: {:.4} sqrt(delta)", (k / (mat.rho * tau * tau)).sqrt());
    }
    Ok(())
}
