//! The `tfp` command line.

mod ensemble;
mod simulate;
mod structure;
mod verify;
mod witness;
mod ygraph;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tfp_core::process::{default_record_every, Instrumentation, RunConfig, Stop};
use tfp_core::trajectory::{Params, DEFAULT_BIG_C, DEFAULT_EPS};

pub use ensemble::{run_ensemble, EnsembleOutcome};
pub use simulate::{simulate_run, SimulateOutput};

#[derive(Parser, Debug)]
#[command(name = "tfp", version, about = "Simulate and analyse the triangle-free random graph process")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one process and write its time series.
    Simulate(simulate::SimulateArgs),
    /// Run consecutive seeds in parallel and aggregate across runs.
    Ensemble(ensemble::EnsembleArgs),
    /// Report on an anchored graph structure read from a file.
    Structure(structure::StructureArgs),
    /// Walk counts and mixing statistics on the Y-graph of a state.
    Ygraph(ygraph::YgraphArgs),
    /// Certify a final graph as a Ramsey lower-bound witness.
    Witness(witness::WitnessArgs),
    /// Run the oracle and identity suites.
    Verify(verify::VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Light,
    Full,
}

impl From<Level> for Instrumentation {
    fn from(l: Level) -> Self {
        match l {
            Level::Light => Instrumentation::Light,
            Level::Full => Instrumentation::Full,
        }
    }
}

/// Parameters shared by `simulate` and `ensemble`.
#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long = "big-c", default_value_t = DEFAULT_BIG_C)]
    pub big_c: f64,
    /// Override for ω (default max(1, ⌊ln ln ln n⌋)).
    #[arg(long)]
    pub omega: Option<u64>,
    /// Record every this many steps (default ⌊n^1.5/50⌋).
    #[arg(long = "record-every")]
    pub record_every: Option<u64>,
    #[arg(long, value_enum, default_value_t = Level::Light)]
    pub instrumentation: Level,
    /// Stop at the first m with t ≥ T.
    #[arg(long = "until-t", conflicts_with = "until_m")]
    pub until_t: Option<f64>,
    /// Stop once m reaches M.
    #[arg(long = "until-m")]
    pub until_m: Option<u64>,
    /// Open edges sampled for Ȳ, X̄ when q exceeds --exact-threshold.
    #[arg(long = "sample-size", default_value_t = 4096)]
    pub sample_size: usize,
    #[arg(long = "exact-threshold", default_value_t = 200_000)]
    pub exact_threshold: usize,
}

impl RunArgs {
    pub fn params(&self) -> Result<Params, CliError> {
        let p = Params::new(self.n, self.eps, self.big_c).map_err(CliError::usage)?;
        match self.omega {
            Some(w) => p.with_omega(w).map_err(CliError::usage),
            None => Ok(p),
        }
    }

    pub fn config(&self, seed: u64) -> Result<RunConfig, CliError> {
        let stop = match (self.until_t, self.until_m) {
            (Some(t), _) => Stop::Time(t),
            (None, Some(m)) => Stop::Steps(m),
            (None, None) => Stop::Completion,
        };
        let config = RunConfig {
            n: self.n,
            seed,
            stop,
            instrumentation: self.instrumentation.into(),
            record_every: self.record_every.unwrap_or_else(|| default_record_every(self.n)),
            sample_size: self.sample_size,
            exact_threshold: self.exact_threshold,
        };
        config.validate().map_err(CliError::usage)?;
        Ok(config)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub usage: bool,
}

impl CliError {
    pub fn usage(e: impl fmt::Display) -> Self {
        CliError {
            message: e.to_string(),
            usage: true,
        }
    }

    pub fn failed(e: impl fmt::Display) -> Self {
        CliError {
            message: e.to_string(),
            usage: false,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::failed(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| CliError::io(path, e))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// `run.csv` → `run.<suffix>`.
pub(crate) fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => simulate::cmd(a),
        Command::Ensemble(a) => ensemble::cmd(a),
        Command::Structure(a) => structure::cmd(a),
        Command::Ygraph(a) => ygraph::cmd(a),
        Command::Witness(a) => witness::cmd(a),
        Command::Verify(a) => verify::cmd(a),
    }
}

/// Parses arguments and runs; usage errors exit with 2, failures with 1.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.usage { 2 } else { 1 })
        }
    }
}
