//! Configuration ingestion, orchestration and serialization of band data and reports.

mod config;

pub use config::{BallSpec, BandgapSpec, ContrastSpec, OracleSpec, OutputSpec, PathSpec, RunConfig};

use crate::bie::{
    assemble_single_layer, compute_Q_alpha, constant_trace, discretize_boundary, discretize_unconfined,
    inclusion_measure, solve_density_for_constants, Background, BoundaryDiscretization, QAlphaMatrix, Shape,
};
use crate::error::Error;
use crate::materials::{ContrastRegime, QuasiMomentum};
use crate::oracle::{verify_asymptotics, AsymptoticsReport, OracleOptions, SweepOptions};
use crate::spectrum::{
    ball_closed_form, bandgap_estimate, leading_frequencies, rotational_modes, sweep_brillouin, BandDiagram,
    BandgapReport, BrillouinPath, SampleFlag,
};
use num_complex::Complex64 as C64;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;
pub const EXIT_SWEEP: i32 = 4;
pub const EXIT_BALL: i32 = 5;
pub const EXIT_FIT: i32 = 6;
/// Failures outside the documented classes (I/O, solver breakdown outside a sweep).
pub const EXIT_OTHER: i32 = 1;

/// Tolerated deviation of the fitted exponent from 1/2.
pub const EXPONENT_TOL: f64 = 0.02;
/// Tolerated relative deviation of the fitted coefficient from its prediction.
pub const COEFFICIENT_TOL: f64 = 0.01;

/// A failure together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

fn physics_or(code: i32) -> impl Fn(Error) -> CliError {
    move |e| {
        let c = match e {
            Error::InvalidMaterial(_)
            | Error::NonProportional
            | Error::Geometry(_)
            | Error::AlphaOutOfZone(_)
            | Error::NearZeroAlpha { .. }
            | Error::Dimension(_) => EXIT_PHYSICS,
            Error::SweepFailed { .. } => EXIT_SWEEP,
            Error::Input(_) => EXIT_SCHEMA,
            _ => code,
        };
        CliError::new(c, e.to_string())
    }
}

/// A validated configuration, its source hash and the fully defaulted echo.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub sha256: String,
    pub contrast: ContrastRegime,
    pub warnings: Vec<String>,
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<LoadedConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            CliError::new(EXIT_SCHEMA, format!("schema error: {inner}"))
        } else {
            CliError::new(EXIT_SCHEMA, format!("schema error at `{path}`: {inner}"))
        }
    })?;
    config.fill_defaults();
    let d = config.dimension;
    if d != 2 && d != 3 {
        return Err(CliError::new(EXIT_SCHEMA, format!("schema error at `dimension`: expected 2 or 3, got {d}")));
    }
    config.material.validated(d).map_err(|e| CliError::new(EXIT_PHYSICS, e.to_string()))?;
    if config.shape.dim() != d {
        return Err(CliError::new(
            EXIT_PHYSICS,
            format!("shape is {}-dimensional but dimension = {d}", config.shape.dim()),
        ));
    }
    discretize_unconfined(&config.shape, config.resolution()).map_err(physics_or(EXIT_PHYSICS))?;
    config.lattice.validate().map_err(|e| CliError::new(EXIT_SCHEMA, format!("schema error at `lattice`: {e}")))?;
    let contrast = config.contrast.regime().map_err(physics_or(EXIT_PHYSICS))?;
    if !(config.alpha_min > 0.0) {
        return Err(CliError::new(EXIT_SCHEMA, "schema error at `alpha_min`: must be positive"));
    }
    if let Some(points) = &config.path.points {
        if points.iter().any(|p| p.len() != d) {
            return Err(CliError::new(EXIT_SCHEMA, format!("schema error at `path.points`: every point needs {d} components")));
        }
    }
    if config.path.per_segment == Some(0) {
        return Err(CliError::new(EXIT_SCHEMA, "schema error at `path.per_segment`: must be at least 1"));
    }
    let mut warnings = Vec::new();
    warnings.extend(contrast.tau_warning());
    Ok(LoadedConfig { config, sha256: sha256_hex(text.as_bytes()), contrast, warnings })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_SCHEMA, format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl LoadedConfig {
    /// Comment block opening every output: version, config hash and the defaulted config.
    pub fn header(&self) -> String {
        let echo = serde_json::to_string(&self.config).unwrap_or_default();
        let mut h = String::new();
        let _ = writeln!(h, "# subwave {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(h, "# config_sha256 = {}", self.sha256);
        let _ = writeln!(h, "# effective_config = {echo}");
        for w in &self.warnings {
            let _ = writeln!(h, "# warning = {w}");
        }
        h
    }

    fn discretization(&self) -> Result<BoundaryDiscretization, CliError> {
        discretize_boundary(&self.config.shape, self.config.resolution()).map_err(physics_or(EXIT_PHYSICS))
    }

    fn path(&self) -> Result<BrillouinPath, CliError> {
        match &self.config.path.points {
            Some(p) => Ok(BrillouinPath::from_points(p.clone())),
            None => BrillouinPath::standard(
                self.config.dimension,
                self.config.path.per_segment.unwrap_or_else(|| crate::spectrum::default_per_segment(self.config.dimension)),
            )
            .map_err(physics_or(EXIT_SCHEMA)),
        }
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Band CSV: header block, column line, one row per (sample, branch).
pub fn bands_csv(loaded: &LoadedConfig, diagram: &BandDiagram) -> String {
    let d = diagram.dim;
    let mut out = loaded.header();
    let cols: Vec<String> = (1..=d).map(|i| format!("alpha_{i}")).collect();
    let _ = writeln!(out, "{},branch,beta,omega_leading,flag", cols.join(","));
    for s in &diagram.samples {
        let alpha: Vec<String> = s.alpha.iter().map(|a| sci(*a)).collect();
        for b in 0..d {
            let (beta, omega) = match s.flag {
                SampleFlag::Failed(_) => ("nan".to_string(), "nan".to_string()),
                _ => (sci(s.beta[b]), sci(s.omega[b])),
            };
            let _ = writeln!(out, "{},{},{beta},{omega},{}", alpha.join(","), b + 1, s.flag.label());
        }
    }
    out
}

/// Structured `key = value` gap report.
pub fn gap_report_text(loaded: &LoadedConfig, diagram: &BandDiagram, report: &BandgapReport) -> String {
    let mut out = loaded.header();
    let computed = diagram.computed().count();
    let analytic = diagram.samples.iter().filter(|s| s.flag == SampleFlag::Analytic).count();
    let _ = writeln!(out, "omega_star = {}", sci(report.omega_star));
    let _ = writeln!(out, "eta = {}", sci(report.eta));
    let _ = writeln!(out, "lower_edge = {}", sci(report.lower_edge()));
    if report.omega_sharp.is_finite() {
        let _ = writeln!(out, "omega_sharp = {}", sci(report.omega_sharp));
        match report.gap {
            Some([a, b]) => {
                let _ = writeln!(out, "gap = [{}, {}]", sci(a), sci(b));
            }
            None => {
                let _ = writeln!(out, "gap = empty");
            }
        }
    } else {
        let _ = writeln!(out, "omega_sharp = not supplied");
        let _ = writeln!(out, "gap = [{}, omega_sharp]", sci(report.lower_edge()));
    }
    let _ = writeln!(out, "epsilon = {}", sci(diagram.epsilon));
    let _ = writeln!(out, "validity_note = {}", report.epsilon_note);
    let _ = writeln!(out, "samples_computed = {computed}");
    let _ = writeln!(out, "samples_analytic = {analytic}");
    let _ = writeln!(out, "samples_failed = {}", diagram.failures());
    for s in &diagram.samples {
        if let SampleFlag::Failed(why) = &s.flag {
            let _ = writeln!(out, "failed_sample = {:?}: {why}", s.alpha);
        }
    }
    out
}

/// Everything `run_bands` produced.
#[derive(Debug, Clone)]
pub struct BandsOutput {
    pub diagram: BandDiagram,
    pub report: BandgapReport,
    pub csv_path: PathBuf,
    pub report_path: PathBuf,
}

/// Sweeps the Brillouin path, writes the band CSV and the gap report into `out_dir`.
pub fn run_bands(loaded: &LoadedConfig, out_dir: &Path) -> Result<BandsOutput, CliError> {
    let cfg = &loaded.config;
    let disc = loaded.discretization()?;
    let path = loaded.path()?;
    let diagram = sweep_brillouin(&path, &disc, &cfg.material, &loaded.contrast, &cfg.lattice, cfg.alpha_min)
        .map_err(physics_or(EXIT_SWEEP))?;
    let sharp = cfg.bandgap.omega_sharp.unwrap_or(f64::NAN);
    let mut report = bandgap_estimate(&diagram, cfg.bandgap.eta, sharp).map_err(physics_or(EXIT_SWEEP))?;
    if cfg.bandgap.omega_sharp.is_none() {
        report.omega_sharp = f64::INFINITY;
        report.gap = None;
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::new(EXIT_OTHER, format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join(&cfg.output.csv);
    let report_path = out_dir.join(&cfg.output.report);
    let write = |p: &Path, s: String| {
        std::fs::write(p, s).map_err(|e| CliError::new(EXIT_OTHER, format!("cannot write {}: {e}", p.display())))
    };
    write(&csv_path, bands_csv(loaded, &diagram))?;
    write(&report_path, gap_report_text(loaded, &diagram, &report))?;
    Ok(BandsOutput { diagram, report, csv_path, report_path })
}

/// One compared quantity of the ball check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub tol: f64,
}

impl CheckLine {
    fn new(name: &str, computed: f64, expected: f64, rel_error: f64, tol: f64) -> Self {
        Self { name: name.into(), computed, expected, rel_error, tol }
    }

    pub fn pass(&self) -> bool {
        self.rel_error <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.lines.iter().all(CheckLine::pass)
    }

    pub fn render(&self, loaded: &LoadedConfig) -> String {
        let mut out = loaded.header();
        for l in &self.lines {
            let _ = writeln!(
                out,
                "{} {}: computed = {}, expected = {}, rel_error = {:.3e}, tol = {:.1e}",
                if l.pass() { "PASS" } else { "FAIL" },
                l.name,
                sci(l.computed),
                sci(l.expected),
                l.rel_error,
                l.tol
            );
        }
        out
    }
}

/// Compares the discrete whole-space ball operators with their closed forms.
pub fn run_ball_check(loaded: &LoadedConfig) -> Result<CheckReport, CliError> {
    let cfg = &loaded.config;
    let r = match cfg.shape {
        Shape::Sphere { radius, .. } if cfg.dimension == 3 => radius,
        _ => return Err(CliError::new(EXIT_SCHEMA, "ball-check needs a 3D sphere config")),
    };
    let fail = physics_or(EXIT_BALL);
    let closed = ball_closed_form(r, &cfg.material).map_err(&fail)?;
    let disc = discretize_unconfined(&cfg.shape, cfg.resolution()).map_err(&fail)?;
    let bg = Background::Free;
    let s = assemble_single_layer(&disc, &bg, C64::new(0.0, 0.0), &cfg.material, &cfg.lattice).map_err(&fail)?;
    let c = closed.single_layer_constant;
    let mut s_err = 0.0f64;
    let mut s_worst = c;
    for i in 0..3 {
        let v = s.apply(&constant_trace(&disc, i)).map_err(&fail)?;
        for (row, val) in v.iter().enumerate() {
            let expected = if row % 3 == i { c } else { 0.0 };
            let e = (val - expected).norm() / c.abs();
            if e > s_err {
                s_err = e;
                s_worst = val.re;
            }
        }
    }
    let dens = solve_density_for_constants(&s).map_err(&fail)?;
    let q = crate::bie::finish_q(bg.clone(), crate::bie::q_from_densities(&disc, &dens), crate::bie::HERMITIAN_TOL).map_err(&fail)?;
    let qd = closed.q_diag;
    let mut q_err = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { qd } else { 0.0 };
            q_err = q_err.max((q.entries[(i, j)] - expected).norm() / qd);
        }
    }
    let beta_err = q.beta.iter().map(|b| (b - closed.beta).abs() / closed.beta).fold(0.0, f64::max);
    let measure = inclusion_measure(&disc);
    let wmin = leading_frequencies(&q, cfg.material.rho, measure, 1.0).map_err(&fail)?;
    let wmin_err = wmin.iter().map(|w| (w - closed.omega_min_coeff).abs() / closed.omega_min_coeff).fold(0.0, f64::max);
    let rot = rotational_modes(&disc, &bg, &cfg.material, &cfg.lattice).map_err(&fail)?;
    let wmax = rot.frequencies(cfg.material.rho, 1.0);
    let wmax_err = wmax.iter().map(|w| (w - closed.omega_max_coeff).abs() / closed.omega_max_coeff).fold(0.0, f64::max);
    let b = &cfg.ball;
    Ok(CheckReport {
        lines: vec![
            CheckLine::new("single_layer_constant", s_worst, c, s_err, b.single_layer_tol),
            CheckLine::new("q_matrix", q.entries[(0, 0)].re, qd, q_err, b.q_tol),
            CheckLine::new("beta", q.beta[0], closed.beta, beta_err, b.q_tol),
            CheckLine::new("omega_min_coefficient", wmin[0], closed.omega_min_coeff, wmin_err, b.omega_tol),
            CheckLine::new("omega_max_coefficient", wmax[wmax.len() - 1], closed.omega_max_coeff, wmax_err, b.omega_tol),
        ],
    })
}

/// Oracle fit plus its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub report: AsymptoticsReport,
    pub pass: bool,
}

impl OracleOutcome {
    pub fn render(&self, loaded: &LoadedConfig) -> String {
        let r = &self.report;
        let mut out = loaded.header();
        let _ = writeln!(out, "beta = {}", join_sci(&r.beta));
        let _ = writeln!(out, "kappa = {}", join_sci(&r.kappa));
        let _ = writeln!(out, "delta,branch,omega_hat");
        for (delta, w) in r.deltas.iter().zip(&r.omegas) {
            for (b, om) in w.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", sci(*delta), b + 1, sci(*om));
            }
        }
        for f in &r.fits {
            let ok = branch_pass(f);
            let _ = writeln!(
                out,
                "{} branch {}: exponent = {:.6}, coefficient = {}, predicted = {}, rel_error = {}, residual = {:.3e}",
                if ok { "PASS" } else { "FAIL" },
                f.branch + 1,
                f.exponent,
                sci(f.coefficient),
                f.predicted.map_or("none".into(), sci),
                f.relative_error.map_or("none".into(), |e| format!("{e:.3e}")),
                f.residual
            );
        }
        let _ = writeln!(out, "{}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

fn join_sci(v: &[f64]) -> String {
    v.iter().map(|x| sci(*x)).collect::<Vec<_>>().join(",")
}

fn branch_pass(f: &crate::oracle::BranchFit) -> bool {
    (f.exponent - 0.5).abs() <= EXPONENT_TOL && f.relative_error.is_some_and(|e| e <= COEFFICIENT_TOL)
}

/// Runs the singular-value oracle over the configured deltas and fits the power laws.
pub fn run_oracle(loaded: &LoadedConfig) -> Result<OracleOutcome, CliError> {
    let cfg = &loaded.config;
    let o = &cfg.oracle;
    if o.deltas.len() < 3 {
        return Err(CliError::new(EXIT_SCHEMA, "oracle needs at least 3 delta values spanning a decade"));
    }
    let a = o.alpha.clone().unwrap_or_else(|| vec![std::f64::consts::PI; cfg.dimension]);
    if a.len() != cfg.dimension {
        return Err(CliError::new(EXIT_SCHEMA, format!("schema error at `oracle.alpha`: needs {} components", cfg.dimension)));
    }
    let alpha = QuasiMomentum::new(&a, cfg.alpha_min).map_err(physics_or(EXIT_PHYSICS))?;
    alpha.require_nonzero(cfg.alpha_min).map_err(physics_or(EXIT_PHYSICS))?;
    let disc = loaded.discretization()?;
    let opts = OracleOptions { window: o.window, grid_points: o.grid_points, sweep: SweepOptions::default() };
    let report = verify_asymptotics(&disc, &alpha, &cfg.material, &cfg.lattice, o.tau, &o.deltas, &opts)
        .map_err(physics_or(EXIT_FIT))?;
    let pass = report.fits.iter().all(branch_pass);
    Ok(OracleOutcome { report, pass })
}

/// Parses `a1,a2[,a3]`.
pub fn parse_alpha(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::new(EXIT_SCHEMA, format!("bad alpha component `{t}`"))))
        .collect()
}

/// `Q^alpha` with its eigen-decomposition and leading frequencies.
#[derive(Debug, Clone)]
pub struct QOutcome {
    pub q: QAlphaMatrix,
    pub omega: Vec<f64>,
}

impl QOutcome {
    pub fn render(&self, loaded: &LoadedConfig) -> String {
        let mut out = loaded.header();
        let d = self.q.dim();
        if let Background::Quasi(a) = &self.q.background {
            let _ = writeln!(out, "alpha = {}", join_sci(a.as_slice()));
        }
        for i in 0..d {
            let row: Vec<String> = (0..d)
                .map(|j| {
                    let z = self.q.entries[(i, j)];
                    format!("{}{:+.16e}i", sci(z.re), z.im)
                })
                .collect();
            let _ = writeln!(out, "q[{}] = {}", i + 1, row.join(", "));
        }
        let _ = writeln!(out, "beta = {}", join_sci(&self.q.beta));
        let _ = writeln!(out, "omega_leading = {}", join_sci(&self.omega));
        let _ = writeln!(out, "asymmetry = {:.3e}", self.q.asymmetry);
        out
    }
}

pub fn run_qmatrix(loaded: &LoadedConfig, alpha: &[f64]) -> Result<QOutcome, CliError> {
    let cfg = &loaded.config;
    if alpha.len() != cfg.dimension {
        return Err(CliError::new(EXIT_SCHEMA, format!("--alpha needs {} components", cfg.dimension)));
    }
    let a = QuasiMomentum::new(alpha, cfg.alpha_min).map_err(physics_or(EXIT_PHYSICS))?;
    a.require_nonzero(cfg.alpha_min).map_err(physics_or(EXIT_PHYSICS))?;
    let disc = loaded.discretization()?;
    let q = compute_Q_alpha(&disc, &Background::Quasi(a), &cfg.material, &cfg.lattice).map_err(physics_or(EXIT_OTHER))?;
    let omega = leading_frequencies(&q, cfg.material.rho, inclusion_measure(&disc), loaded.contrast.epsilon)
        .map_err(physics_or(EXIT_OTHER))?;
    Ok(QOutcome { q, omega })
}
