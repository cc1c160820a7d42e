//! Seeded batch experiments and their CSV output.

mod pairs;
mod run;

pub use pairs::{default_pair_set, PairSet, VectorPair};
pub use run::{
    gate_report, preprocess_image, run_block_match, run_qft_sweep, run_swap_experiment, write_csv,
    BlockMatchRow, CsvRecord, GateReportRow, QftSweepRow, SwapRow, DEFAULT_FIDELITIES,
};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::noise::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    SwapNoiseless,
    SwapNoisy,
    QftSweep,
    BlockMatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMethod {
    #[default]
    Full,
    Hierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceKind {
    #[default]
    Classical,
    Swap,
    Qft,
}

fn unknown(what: &str, s: &str) -> Error {
    Error::argument(format!("unknown {what} '{s}'"))
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap_noiseless" => Ok(Mode::SwapNoiseless),
            "swap_noisy" => Ok(Mode::SwapNoisy),
            "qft_sweep" => Ok(Mode::QftSweep),
            "block_match" => Ok(Mode::BlockMatch),
            _ => Err(unknown("mode", s)),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::SwapNoiseless => "swap_noiseless",
            Mode::SwapNoisy => "swap_noisy",
            Mode::QftSweep => "qft_sweep",
            Mode::BlockMatch => "block_match",
        })
    }
}

impl FromStr for SearchMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SearchMethod::Full),
            "hier" | "hierarchical" => Ok(SearchMethod::Hierarchical),
            _ => Err(unknown("search method", s)),
        }
    }
}

impl FromStr for DistanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(DistanceKind::Classical),
            "swap" => Ok(DistanceKind::Swap),
            "qft" => Ok(DistanceKind::Qft),
            _ => Err(unknown("distance", s)),
        }
    }
}

/// Every tunable of the experiments. Keys of the flat config file are the
/// field names, with `-` and `_` interchangeable.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub shots: u64,
    pub runs: u64,
    pub fidelity_2q: f64,
    /// `None` means the command's default: 0.9999 for swap experiments,
    /// ideal single-qubit gates for the QFT sweep.
    pub fidelity_1q: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Standard deviation of the Gaussian contamination, 0 to disable.
    pub sigma: f64,
    pub search_k: usize,
    pub block_n: usize,
    pub method: SearchMethod,
    pub distance: DistanceKind,
    /// Reference block corner after downsampling; centred when unset.
    pub ref_x: Option<usize>,
    pub ref_y: Option<usize>,
    pub downsample: usize,
    pub smooth: bool,
    /// Attach the noise model to quantum distance backends in block matching.
    pub noisy: bool,
    /// Fill the `wall_time` column (makes output time-dependent).
    pub timing: bool,
    /// Register width of the QFT block-match backend; pixel depth + 1 when unset.
    pub bits: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FIDELITY_1Q: f64 = 0.9999;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::SwapNoiseless,
            shots: 4000,
            runs: 20,
            fidelity_2q: 0.99,
            fidelity_1q: None,
            seed: DEFAULT_SEED,
            out: None,
            sigma: 20.0,
            search_k: 10,
            block_n: 8,
            method: SearchMethod::Full,
            distance: DistanceKind::Classical,
            ref_x: None,
            ref_y: None,
            downsample: 8,
            smooth: false,
            noisy: false,
            timing: false,
            bits: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::argument(format!("invalid value '{value}' for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::argument(format!(
            "invalid boolean '{value}' for {key}"
        ))),
    }
}

impl ExperimentConfig {
    /// Single-qubit fidelity for swap experiments.
    pub fn swap_fidelity_1q(&self) -> f64 {
        self.fidelity_1q.unwrap_or(DEFAULT_FIDELITY_1Q)
    }

    /// Noise model for the configured fidelities, `None` when ideal.
    pub fn noise_model(&self) -> Result<Option<NoiseModel>> {
        let model = NoiseModel::new(self.swap_fidelity_1q(), self.fidelity_2q)?;
        Ok((!model.is_ideal()).then_some(model))
    }

    /// Set one field from its textual key and value.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let k = key.as_str();
        match k {
            "mode" => self.mode = value.parse()?,
            "shots" => self.shots = parse(k, value)?,
            "runs" => self.runs = parse(k, value)?,
            "fidelity_2q" => self.fidelity_2q = parse(k, value)?,
            "fidelity_1q" => self.fidelity_1q = Some(parse(k, value)?),
            "seed" => self.seed = parse(k, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "sigma" => self.sigma = parse(k, value)?,
            "search_k" => self.search_k = parse(k, value)?,
            "block_n" => self.block_n = parse(k, value)?,
            "method" => self.method = value.parse()?,
            "distance" => self.distance = value.parse()?,
            "ref_x" => self.ref_x = Some(parse(k, value)?),
            "ref_y" => self.ref_y = Some(parse(k, value)?),
            "downsample" => self.downsample = parse(k, value)?,
            "smooth" => self.smooth = parse_bool(k, value)?,
            "noisy" => self.noisy = parse_bool(k, value)?,
            "timing" => self.timing = parse_bool(k, value)?,
            "bits" => self.bits = Some(parse(k, value)?),
            _ => return Err(Error::argument(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key = value", no + 1)))?;
            self.apply_kv(key, value)
                .map_err(|e| Error::Format(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text).map_err(|e| match e {
            Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Range checks shared by every command.
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 || self.runs == 0 {
            return Err(Error::argument("shots and runs must be at least 1"));
        }
        NoiseModel::new(self.swap_fidelity_1q(), self.fidelity_2q)?;
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::argument(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if self.block_n == 0 || self.downsample == 0 {
            return Err(Error::argument(
                "block size and downsample factor must be at least 1",
            ));
        }
        Ok(())
    }
}
