//! Reproducible command-line runs over the energy-use panel.
//!
//! Every command is a pure function of its input file, configuration and seed;
//! artifacts are written with stable formatting so reruns are byte-identical.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{CommonArgs, EvalSubset, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "energy-models",
    version,
    about = "Stepwise regression and MLP models of national energy use"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-country descriptive statistics.
    Describe(CommonArgs),
    /// Stepwise log-log regression of energy use.
    FitReg(CommonArgs),
    /// Train the perceptron with scaled conjugate gradient.
    FitMlp(CommonArgs),
    /// Score two or more saved models on the same records.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Model artifact (regression.json or mlp_model.json); repeat for each model.
        #[arg(long = "model", required = true)]
        models: Vec<PathBuf>,
    },
    /// Predict energy use for every record of the input with a saved model.
    Predict {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        model: PathBuf,
    },
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match commands::execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
