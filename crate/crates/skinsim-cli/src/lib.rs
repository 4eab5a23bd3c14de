//! Command-line front end: characterize substrates, generate datasets, train
//! and evaluate classifiers, run the probe suite, and move frames between
//! CSV and the wire format.
//!
//! Every stochastic command takes a mandatory `--seed`; there is no
//! wall-clock seeding anywhere, so a command rerun with the same arguments
//! produces byte-identical output files. Exit codes: 0 success, 2
//! configuration error, 3 data/contract error; failures also emit a
//! machine-readable JSON object on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use skinsim::layout::SkinLayout;
use skinsim::substrate::{default_substrate, Material, SubstrateFile, SubstrateModel};

mod commands;

pub use commands::run_command;

#[derive(Debug, Parser)]
#[command(
    name = "skinsim",
    version,
    about = "Deterministic simulator and analysis toolkit for piezoresistive tactile skins"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Benchtop characterization: step response, sensitivity sweep, hysteresis.
    Characterize(CharacterizeArgs),
    /// Generate a labeled dataset (synthetic contact pushes or object placements).
    Dataset(DatasetArgs),
    /// Train a random-forest classifier on a dataset's training split.
    Train(TrainArgs),
    /// Evaluate a trained model on a dataset's held-out split.
    Eval(EvalArgs),
    /// Run the 6-object, 3-orientation motion-arrest suite.
    ProbeSuite(ProbeSuiteArgs),
    /// Encode frames CSV to wire bytes or decode wire bytes back to CSV.
    Stream(StreamArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Substrate parameter JSON overriding the built-in presets.
    #[arg(long)]
    pub substrates: Option<PathBuf>,
    /// Taxel layout: `palm34`, `grid5x4`, or a path to a layout JSON file.
    #[arg(long)]
    pub layout: Option<String>,
    /// JSON config file; values present in it override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    /// Material to characterize (eeontex | wearic | foam_high_density |
    /// foam_low_density, `ld`/`hd` accepted); omit with --all.
    pub material: Option<String>,
    /// Characterize all four materials.
    #[arg(long)]
    pub all: bool,
    /// Master seed for trial noise streams.
    #[arg(long)]
    pub seed: u64,
    /// Run only the sensitivity sweep.
    #[arg(long)]
    pub sweep: bool,
    /// Run only the step response (and rise/fall measurement).
    #[arg(long)]
    pub step: bool,
    /// Run only the hysteresis measurement.
    #[arg(long)]
    pub hysteresis: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// `contact` or `recognition`.
    #[arg(long)]
    pub kind: String,
    /// Master seed for generation.
    #[arg(long)]
    pub seed: u64,
    /// Total frames for contact datasets.
    #[arg(long, default_value_t = 57_334)]
    pub frames: usize,
    /// Total samples for recognition datasets.
    #[arg(long, default_value_t = 1_172)]
    pub samples: usize,
    /// Substrate the frames are simulated on.
    #[arg(long, default_value = "foam_low_density")]
    pub material: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset CSV (its `.meta.json` sidecar must sit next to it).
    #[arg(long)]
    pub data: PathBuf,
    /// Training seed (bootstrap and feature subsets).
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 12)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub min_leaf: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Trained model JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset CSV; evaluation runs on its held-out split.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ProbeSuiteArgs {
    /// `ld`, `hd`, or `both`.
    #[arg(long, default_value = "both")]
    pub substrate: String,
    /// Master seed for the suite and its detector training.
    #[arg(long)]
    pub seed: u64,
    /// Controller latency between detection and halt, frames.
    #[arg(long, default_value_t = 3)]
    pub latency: u32,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    #[command(subcommand)]
    pub op: StreamOp,
}

#[derive(Debug, Subcommand)]
pub enum StreamOp {
    /// Frames CSV in, wire bytes out.
    Encode {
        /// Input CSV; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Wire bytes in, frames CSV out; anomaly summary on stderr.
    Decode {
        /// Input bytes; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Scan rate used to reconstruct timestamps.
        #[arg(long, default_value_t = 100.0)]
        rate: f64,
    },
}

/// Optional JSON config; any present field overrides the matching flag.
#[derive(Debug, Default, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub substrates: Option<PathBuf>,
    pub layout: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, missing files, malformed configuration. Exit code 2.
    Config(String),
    /// Invalid data content or broken operation contract. Exit code 3.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) => m,
        }
    }

    pub fn to_stderr_json(&self) -> String {
        serde_json::json!({
            "error": {
                "code": self.exit_code(),
                "kind": self.kind(),
                "message": self.message(),
            }
        })
        .to_string()
    }
}

impl From<skinsim::Error> for CliError {
    fn from(err: skinsim::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

/// Entry point used by `main`; prints the error JSON and maps exit codes.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_stderr_json());
            ExitCode::from(err.exit_code())
        }
    }
}

/// Test-friendly runner: parse from an explicit argv and execute.
pub fn run_from_args<I, S>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| CliError::Config(format!("argument error: {e}")))?;
    run_command(cli.command)
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Apply the config file (if any) on top of the shared flags, then resolve
/// the seed the same way.
pub(crate) fn apply_config(
    common: &mut CommonArgs,
    seed: &mut u64,
) -> Result<(), CliError> {
    let Some(path) = common.config.clone() else {
        return Ok(());
    };
    let text = read_file(&path)?;
    let cfg: FileConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
    if let Some(s) = cfg.seed {
        *seed = s;
    }
    if let Some(out) = cfg.out {
        common.out = out;
    }
    if let Some(substrates) = cfg.substrates {
        common.substrates = Some(substrates);
    }
    if let Some(layout) = cfg.layout {
        common.layout = Some(layout);
    }
    Ok(())
}

pub(crate) fn parse_material(name: &str) -> Result<Material, CliError> {
    match name {
        "eeontex" => Ok(Material::EeonTex),
        "wearic" => Ok(Material::Wearic),
        "hd" | "foam_high_density" => Ok(Material::FoamHighDensity),
        "ld" | "foam_low_density" => Ok(Material::FoamLowDensity),
        other => Err(CliError::Config(format!(
            "unknown material `{other}` (expected eeontex, wearic, foam_high_density/hd, foam_low_density/ld)"
        ))),
    }
}

/// Material model from the presets or from a user substrate file.
pub(crate) fn resolve_substrate(
    material: Material,
    file: Option<&PathBuf>,
) -> Result<SubstrateModel, CliError> {
    match file {
        None => Ok(default_substrate(material)),
        Some(path) => {
            let parsed = SubstrateFile::parse(&read_file(path)?)
                .map_err(|e| CliError::Data(e.to_string()))?;
            parsed.get(material).cloned().ok_or_else(|| {
                CliError::Data(format!(
                    "substrate file {} has no entry for {material}",
                    path.display()
                ))
            })
        }
    }
}

pub(crate) fn resolve_layout(choice: Option<&str>, default: &str) -> Result<SkinLayout, CliError> {
    let choice = choice.unwrap_or(default);
    match choice {
        "palm34" => Ok(SkinLayout::palm34()),
        "grid5x4" => Ok(SkinLayout::grid5x4()),
        path => {
            let text = read_file(Path::new(path))?;
            SkinLayout::parse(&text).map_err(|e| CliError::Data(e.to_string()))
        }
    }
}
