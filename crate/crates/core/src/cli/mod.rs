//! Batch command-line front end.
//!
//! Every run writes one result document (JSON, or CSV for tables) holding
//! the tool version, the subcommand, an echo of the inputs, the seed and
//! the results. Failures write a `{"error": {code, message, context}}`
//! object to stderr. Exit status: 0 success, 1 module or input error,
//! 2 usage error.

mod commands;
mod document;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

pub use document::{
    parse_scenario, AbsorberDoc, CouplingDoc, EmitterDoc, ParsedScenario, ResponseModelDoc,
    ScenarioDocument, NORM_HARD_TOL, NORM_WARN_TOL,
};
pub use output::{format_f64, to_json, to_json_compact, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MODULE_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "txsim", version, about = "Transactional emission/absorption simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file; `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Worker threads for Monte Carlo trials (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario's trials and report outcome counts.
    RunTransactions(ScenarioArgs),
    /// Compare outcome frequencies against the Born weights.
    CheckBorn(ScenarioArgs),
    /// Tabulate the momentum-space propagators.
    PropagatorTable(PropagatorArgs),
    /// Integrate the squared time kernel against 2πt.
    GoldenRule(GoldenRuleArgs),
    /// Photon-number statistics of a truncated coherent state.
    CoherentState(CoherentArgs),
    /// Vacuum two-point function: operator product against mode sum.
    FactorizationCheck(FactorizationArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON document; `-` for stdin.
    #[arg(long)]
    pub scenario: PathBuf,

    /// Trial to trace through purity and entropy (run-transactions only).
    #[arg(long, default_value_t = 0)]
    pub trace_trial: u64,
}

#[derive(Debug, Args)]
pub struct PropagatorArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "2")]
    pub k0: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub kabs: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.1")]
    pub eps: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GoldenRuleArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,10,50")]
    pub t: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CoherentArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
    pub alpha_re: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub alpha_im: f64,
    #[arg(long, default_value_t = 32)]
    pub nmax: usize,
}

#[derive(Debug, Args)]
pub struct FactorizationArgs {
    /// Mode counts to test.
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    pub modes: Vec<usize>,
    /// Random (x, y) pairs per mode count.
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Quantization volume.
    #[arg(long, default_value_t = 1.0)]
    pub volume: f64,
}

/// Structured failure reported on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub context: BTreeMap<String, Value>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CliError {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
            context: BTreeMap::new(),
            exit_code: EXIT_MODULE_ERROR,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_USAGE,
            ..Self::new("usage", message)
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    /// `{"error": {...}}` document.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: &'a CliError,
        }
        output::to_json(&Wrapper { error: self })
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        let base = CliError::new(e.code(), e.to_string());
        match e {
            E::DimensionMismatch { expected, found } => base.with("expected", expected).with("found", found),
            E::NotNormalized { norm_sqr } => base.with("norm_sqr", norm_sqr),
            E::Truncation {
                mean_photons,
                limit,
                tail_mass,
            } => base
                .with("mean_photons", mean_photons)
                .with("limit", limit)
                .with("tail_mass", tail_mass),
            E::Quadrature {
                estimate,
                error_estimate,
            } => base.with("estimate", estimate).with("error_estimate", error_estimate),
            _ => base,
        }
    }
}

/// Output of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub body: String,
    pub format: Format,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_args<I, T>(args: I) -> Result<(Cli, Emitted), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::usage(e.to_string().trim_end()))?;
    let emitted = commands::run(&cli)?;
    Ok((cli, emitted))
}

/// Entry point for the binary; returns the process exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprint!("{}", CliError::usage(e.to_string().trim_end()).to_json());
            return EXIT_USAGE;
        }
    };
    let result = commands::run(&cli).and_then(|emitted| write_output(&cli.out, &emitted.body));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprint!("{}", e.to_json());
            e.exit_code
        }
    }
}

fn write_output(path: &std::path::Path, body: &str) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        out.write_all(body.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::new("io", format!("cannot write stdout: {e}")))
    } else {
        std::fs::write(path, body).map_err(|e| {
            CliError::new("io", format!("cannot write {}: {e}", path.display()))
                .with("path", path.display().to_string())
        })
    }
}
