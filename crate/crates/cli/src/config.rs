//! Experiment configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use baskakov_core::engine::{EngineConfig, PrecisionPolicy};
use baskakov_core::SamplingConfig;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::grid::parse_grid;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Auto,
    Double,
    Extended,
}

impl From<PrecisionArg> for PrecisionPolicy {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Auto => PrecisionPolicy::Auto,
            PrecisionArg::Double => PrecisionPolicy::Double,
            PrecisionArg::Extended => PrecisionPolicy::Extended,
        }
    }
}

/// Flags shared by `converge`, `voronovskaja` and `derivative`.
#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// TOML file of `key = value` settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Function, e.g. `exp:a=1/2`, `poly:1,0,3/2`, `deriv:p=2:exp:a=1/2`.
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Circle radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer radius for derivative bounds.
    #[arg(long)]
    pub r1: Option<f64>,
    /// Derivative order.
    #[arg(long)]
    pub p: Option<usize>,
    /// Grid of n: list, `a:b`, `a..b`, `a:b:+s` or `a:b:xq`.
    #[arg(long)]
    pub n: Option<String>,
    /// Absolute truncation tolerance; default is relative-tol·C1/n.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub relative_tol: Option<f64>,
    /// Envelope rate A given to polynomial functions.
    #[arg(long)]
    pub poly_rate: Option<String>,
    /// Initial number of circle sample points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Relative change at which circle refinement stops.
    #[arg(long)]
    pub sample_rel_tol: Option<f64>,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Drop rows with n < 8(r+2) from the order fit.
    #[arg(long)]
    pub exclude_preasymptotic: bool,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "fn")]
    function: Option<String>,
    r: Option<f64>,
    r1: Option<f64>,
    p: Option<usize>,
    n: Option<String>,
    tol: Option<f64>,
    relative_tol: Option<f64>,
    poly_rate: Option<String>,
    points: Option<usize>,
    sample_rel_tol: Option<f64>,
    max_points: Option<usize>,
    precision: Option<PrecisionArg>,
    exclude_preasymptotic: Option<bool>,
    format: Option<TableFormat>,
    out: Option<PathBuf>,
}

/// The effective configuration of one run, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(rename = "fn")]
    pub function: String,
    pub r: f64,
    pub r1: f64,
    pub p: usize,
    pub n_grid: String,
    pub n: Vec<u64>,
    pub poly_rate: String,
    pub engine: EngineConfig,
    pub exclude_preasymptotic: bool,
    pub format: TableFormat,
    pub out: Option<PathBuf>,
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

impl ExperimentArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let function = self
            .function
            .clone()
            .or(file.function)
            .ok_or_else(|| CliError::Usage("missing --fn (e.g. --fn exp:a=1/2)".into()))?;
        let n_grid = self.n.clone().or(file.n).unwrap_or_else(|| "8:2048:x2".into());
        let n = parse_grid(&n_grid).map_err(CliError::Usage)?;
        let defaults = EngineConfig::default();
        let sampling = SamplingConfig {
            initial_points: self.points.or(file.points).unwrap_or(defaults.sampling.initial_points),
            rel_tol: self
                .sample_rel_tol
                .or(file.sample_rel_tol)
                .unwrap_or(defaults.sampling.rel_tol),
            max_points: self
                .max_points
                .or(file.max_points)
                .unwrap_or(defaults.sampling.max_points),
        };
        let engine = EngineConfig {
            sampling,
            truncation_tol: self.tol.or(file.tol),
            relative_tol: self.relative_tol.or(file.relative_tol).unwrap_or(defaults.relative_tol),
            precision: self
                .precision
                .or(file.precision)
                .map(Into::into)
                .unwrap_or(defaults.precision),
            ..defaults
        };
        Ok(ExperimentConfig {
            function,
            r: self.r.or(file.r).unwrap_or(1.0),
            r1: self.r1.or(file.r1).unwrap_or(1.5),
            p: self.p.or(file.p).unwrap_or(1),
            n_grid,
            n,
            poly_rate: self
                .poly_rate
                .clone()
                .or(file.poly_rate)
                .unwrap_or_else(|| "1/4".into()),
            engine,
            exclude_preasymptotic: self.exclude_preasymptotic || file.exclude_preasymptotic.unwrap_or(false),
            format: self.format.or(file.format).unwrap_or(TableFormat::Csv),
            out: self.out.clone().or(file.out),
        })
    }
}
