//! Thin command-line front end over `subwave::cli`.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use subwave::cli::{self, CliError, EXIT_BALL, EXIT_FIT};

#[derive(Parser)]
#[command(version, about = "Subwavelength band gaps of high-contrast elastic crystals")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band CSV and gap report along the Brillouin path.
    Bands {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discrete ball operators against their closed forms.
    BallCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Power-law fit of the resonances found by the singular-value oracle.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
    /// `Q^alpha`, its eigenvalues and the leading frequencies at one quasi-momentum.
    Qmatrix {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Bands { config, out } => {
            let loaded = cli::load_config(&config)?;
            let res = cli::run_bands(&loaded, &out)?;
            println!("wrote {}", res.csv_path.display());
            println!("wrote {}", res.report_path.display());
            Ok(())
        }
        Command::BallCheck { config } => {
            let loaded = cli::load_config(&config)?;
            let report = cli::run_ball_check(&loaded)?;
            print!("{}", report.render(&loaded));
            if report.pass() { Ok(()) } else { Err(CliError::new(EXIT_BALL, "ball check failed")) }
        }
        Command::Oracle { config } => {
            let loaded = cli::load_config(&config)?;
            let outcome = cli::run_oracle(&loaded)?;
            print!("{}", outcome.render(&loaded));
            if outcome.pass { Ok(()) } else { Err(CliError::new(EXIT_FIT, "oracle fit failed")) }
        }
        Command::Qmatrix { config, alpha } => {
            let loaded = cli::load_config(&config)?;
            let alpha = cli::parse_alpha(&alpha)?;
            print!("{}", cli::run_qmatrix(&loaded, &alpha)?.render(&loaded));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
