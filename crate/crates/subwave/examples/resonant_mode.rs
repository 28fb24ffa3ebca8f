//! Leading-order resonant mode: interior constant from the eigenvector of `Q^alpha`
//! and the exterior field it generates.

use subwave::bie::{compute_Q_alpha, discretize_boundary, inclusion_measure, Background, Shape};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{LameMaterial, QuasiMomentum};
use subwave::spectrum::resonant_mode_leading;

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(1.0, 1.0, 1.0);
    let cfg = LatticeSumConfig::default();
    let disc = discretize_boundary(&Shape::circle(0.2), 128)?;
    let alpha = QuasiMomentum::with_default_cutoff(&[2.0, 1.0])?;
    let q = compute_Q_alpha(&disc, &Background::Quasi(alpha), &mat, &cfg)?;
    for branch in 0..2 {
        let mode = resonant_mode_leading(&q, branch, inclusion_measure(&disc))?;
        println!("branch {branch}: interior constant {:?}, degenerate = {}", mode.interior[0], mode.degenerate);
        let points = [[0.9, 0.5, 0.0], [0.85, 0.85, 0.0], [0.05, 0.6, 0.0]];
        for (x, u) in points.iter().zip(mode.exterior(&disc, &alpha, &mat, &cfg, &points)?) {
            println!("  u({:.2}, {:.2}) = ({:.6e}, {:.6e})", x[0], x[1], u[0], u[1]);
        }
    }
    Ok(())
}
