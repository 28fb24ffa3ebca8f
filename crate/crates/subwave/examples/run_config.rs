//! Driving the configuration layer from code: parse a JSON run, inspect the echoed
//! defaults and compute `Q^alpha` at one quasi-momentum.

use subwave::cli::{parse_config, run_qmatrix};

fn main() {
    let text = r#"{
        "dimension": 2,
        "material": { "lambda": 1.0, "mu": 1.0, "rho": 1.0 },
        "contrast": { "delta": 1e-4, "tau": 1.0 },
        "shape": { "kind": "fourier_curve", "cos": [0.2, 0.0, 0.0, 0.03], "sin": [0.0, 0.0, 0.0, 0.0] }
    }"#;
    let loaded = match parse_config(text) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("exit {}: {}", e.code, e.message);
            std::process::exit(e.code);
        }
    };
    println!("resolution used: {:?}", loaded.config.resolution);
    match run_qmatrix(&loaded, &[1.0, 2.0]) {
        Ok(q) => print!("{}", q.render(&loaded)),
        Err(e) => eprintln!("exit {}: {}", e.code, e.message),
    }
    let typo = text.replace("\"lambda\"", "\"lamda\"");
    if let Err(e) = parse_config(&typo) {
        println!("typo rejected with exit {}: {}", e.code, e.message);
    }
}
