//! `Q^alpha` of a periodic circle lattice, its eigenpairs and leading frequencies.

use std::f64::consts::PI;
use subwave::bie::{compute_Q_alpha, discretize_boundary, inclusion_measure, Background, Shape};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{LameMaterial, QuasiMomentum};
use subwave::spectrum::leading_frequencies;

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(1.0, 1.0, 1.0);
    let disc = discretize_boundary(&Shape::circle(0.25), 128)?;
    let eps = 1e-4;
    for alpha in [[PI, PI], [PI / 2.0, PI], [2.0, 1.0]] {
        let a = QuasiMomentum::with_default_cutoff(&alpha)?;
        let q = compute_Q_alpha(&disc, &Background::Quasi(a), &mat, &LatticeSumConfig::default())?;
        let omega = leading_frequencies(&q, mat.rho, inclusion_measure(&disc), eps)?;
        println!("alpha = ({:.4}, {:.4})", alpha[0], alpha[1]);
        println!("  beta = {:?}, asymmetry = {:.1e}", q.beta, q.asymmetry);
        println!("  omega (eps = {eps:.0e}) = {omega:?}");
        println!("  first eigenvector = {:?}", q.eigenvector(0));
    }
    Ok(())
}
