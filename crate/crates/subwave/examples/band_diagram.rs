//! Leading-order band diagram along Gamma -> X -> M -> Gamma and the gap estimate.

use subwave::bie::{discretize_boundary, Shape};
use subwave::greens::LatticeSumConfig;
use subwave::materials::{ContrastRegime, LameMaterial};
use subwave::spectrum::{bandgap_estimate, sweep_brillouin, BrillouinPath};

fn main() -> subwave::error::Result<()> {
    let mat = LameMaterial::new(2.0, 1.0, 1.0);
    let contrast = ContrastRegime::new(1e-4, 1e-4)?;
    let disc = discretize_boundary(&Shape::ellipse(0.3, 0.18), 128)?;
    let path = BrillouinPath::standard(2, 8)?;
    let diagram = sweep_brillouin(&path, &disc, &mat, &contrast, &LatticeSumConfig::default(), 1e-2)?;
    println!("alpha_1,alpha_2,omega_1,omega_2,flag");
    for s in &diagram.samples {
        let w: Vec<String> = s.omega.iter().map(|w| format!("{w:.6e}")).collect();
        println!("{:.4},{:.4},{},{}", s.alpha[0], s.alpha[1], w.join(","), s.flag.label());
    }
    let report = bandgap_estimate(&diagram, None, 0.2)?;
    println!("omega* = {:.6e}, eta = {:.3e}, gap = {:?}", report.omega_star, report.eta, report.gap);
    println!("{}", report.epsilon_note);
    Ok(())
}
