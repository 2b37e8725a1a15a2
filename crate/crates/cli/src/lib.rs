//! Experiment harness for `packlab-core`.
//!
//! Every run is described by an [`ExperimentConfig`] (a subcommand plus a
//! parameter map) and is fully determined by it. Reports carry the seed, a
//! SHA-256 of the config and the library version. JSON reports embed that
//! block inline; CSV and point files get a `<out>.meta.json` sidecar.
//!
//! Exit codes: 0 on success, 2 on validation or I/O failure, 3 when a bound
//! check in the report did not pass.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

mod commands;
mod config;
mod fig1;

pub use commands::execute;
pub use config::{ExperimentConfig, Params, Provenance, CONFIG_VERSION, SUBCOMMANDS};
pub use fig1::{emit_fig1_curves, FIG1_CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown subcommand `{0}` (expected one of: {list})", list = SUBCOMMANDS.join(", "))]
    UnknownSubcommand(String),

    #[error("{0}")]
    Config(String),

    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] packlab_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BOUND_VIOLATED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Json,
    Csv,
    Points,
    Edges,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub kind: ArtifactKind,
    pub text: String,
}

/// In-memory result of a run, before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub main: Artifact,
    pub dump: Option<Artifact>,
    pub provenance: Provenance,
    /// every bound check in the report passed
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_BOUND_VIOLATED
        }
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_artifact(path: &Path, artifact: &Artifact, provenance: &Provenance) -> Result<(), CliError> {
    std::fs::write(path, &artifact.text).map_err(|e| CliError::io(path, e))?;
    if artifact.kind != ArtifactKind::Json {
        let meta = meta_json(provenance);
        let side = sidecar_path(path);
        std::fs::write(&side, meta).map_err(|e| CliError::io(&side, e))?;
    }
    Ok(())
}

fn meta_json(provenance: &Provenance) -> String {
    let mut s = serde_json::to_string_pretty(provenance).expect("provenance serializes");
    s.push('\n');
    s
}

/// Executes `config` and writes its artifacts. Without an `out` path the main
/// report goes to stdout.
pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let report = execute(config)?;
    match &config.params.out {
        Some(path) => write_artifact(path, &report.main, &report.provenance)?,
        None => print!("{}", report.main.text),
    }
    if let (Some(path), Some(dump)) = (&config.params.dump, &report.dump) {
        write_artifact(path, dump, &report.provenance)?;
    }
    Ok(report)
}

#[derive(Debug, Parser)]
#[command(
    name = "packlab",
    version,
    about = "Packing-density experiments on Poisson fields and random lattices"
)]
pub struct Cli {
    /// One of: sample-poisson, graph-census, cover, decimate, moments-check,
    /// concentration, d-curve, lattice2d, schmidt-table, fig1
    pub subcommand: Option<String>,
    /// JSON experiment config; flags given on the command line override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub half_side: Option<f64>,
    /// comma-separated box half sides
    #[arg(long, value_delimiter = ',')]
    pub half_sides: Option<Vec<f64>>,
    #[arg(long)]
    pub distance: Option<f64>,
    /// comma-separated distance grid
    #[arg(long, value_delimiter = ',')]
    pub distances: Option<Vec<f64>>,
    #[arg(long)]
    pub intensity: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon_band: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// cover mode: exact, constructive or auto
    #[arg(long)]
    pub mode: Option<String>,
    /// torus or clipped
    #[arg(long)]
    pub convention: Option<String>,
    /// comma-separated dimensions
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// comma-separated density arguments
    #[arg(long, value_delimiter = ',')]
    pub xs: Option<Vec<f64>>,
    /// input point file or edge list
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// secondary artifact: samples, edge list or thinned points
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

impl Cli {
    fn flag_params(&self) -> Params {
        Params {
            dim: self.dim,
            half_side: self.half_side,
            half_sides: self.half_sides.clone(),
            distance: self.distance,
            distances: self.distances.clone(),
            intensity: self.intensity,
            trials: self.trials,
            seed: self.seed,
            epsilon_band: self.epsilon_band,
            delta: self.delta,
            epsilon: self.epsilon,
            mode: self.mode.clone(),
            convention: self.convention.clone(),
            dims: self.dims.clone(),
            xs: self.xs.clone(),
            input: self.input.clone(),
            out: self.out.clone(),
            dump: self.dump.clone(),
        }
    }

    /// Merges the optional config file with the command-line flags.
    pub fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let flags = self.flag_params();
        let config = match &self.config {
            Some(path) => {
                let mut base = ExperimentConfig::load(path)?;
                if let Some(sub) = &self.subcommand {
                    base.subcommand = sub.clone();
                }
                base.params = base.params.overlay(flags);
                base
            }
            None => {
                let sub = self
                    .subcommand
                    .clone()
                    .ok_or_else(|| CliError::Config("no subcommand given".into()))?;
                ExperimentConfig::new(&sub, flags)
            }
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.into_config().and_then(|cfg| run(&cfg)) {
        Ok(report) => {
            if !report.passed {
                eprintln!("packlab: a bound check did not pass");
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("packlab: {e}");
            EXIT_INVALID
        }
    }
}
