//! Static quasi-periodic Dirichlet-to-Neumann map on a circle: traction of the
//! exterior extension and the sign of its quadratic form.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use subwave::bie::{discretize_boundary, weighted_inner, DtnMap, Shape};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{LameMaterial, QuasiMomentum};

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(1.0, 1.0, 1.0);
    let disc = discretize_boundary(&Shape::circle(0.25), 96)?;
    let alpha = QuasiMomentum::with_default_cutoff(&[PI, PI / 2.0])?;
    let dtn = DtnMap::new(&disc, &alpha, &mat, &LatticeSumConfig::default())?;
    for mode in 0..4 {
        let f: Vec<C64> = (0..disc.unknowns())
            .map(|r| {
                let (x, c) = (disc.nodes[r / 2], disc.shape.center());
                let t = (x[1] - c[1]).atan2(x[0] - c[0]);
                C64::new(if r % 2 == 0 { (mode as f64 * t).cos() } else { 0.0 }, 0.0)
            })
            .collect();
        let g = dtn.apply(&f)?;
        let form = weighted_inner(&disc, &f, &g);
        println!("cos({mode} t) e_1: <M f, f> = {:.6e} {:+.1e}i", form.re, form.im);
    }
    Ok(())
}
