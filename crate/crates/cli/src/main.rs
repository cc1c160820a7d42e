use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbm::harness::{
    gate_report, preprocess_image, run_block_match, run_qft_sweep, run_swap_experiment, write_csv,
    ExperimentConfig, Mode, DEFAULT_FIDELITIES,
};
use qbm::image::{load_pgm, save_pgm};
use qbm::Error;

#[derive(Parser)]
#[command(name = "qbm", version, about = "Quantum block-matching experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Swap-test distance over the default 17 vector pairs.
    SwapExp {
        #[command(flatten)]
        common: Common,
        /// Attach the depolarizing noise model.
        #[arg(long)]
        noisy: bool,
        /// swap_noiseless or swap_noisy.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Success probability of the QFT subtractor across CNOT fidelities.
    QftSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated CNOT fidelities.
        #[arg(long, value_delimiter = ',')]
        fidelities: Option<Vec<f64>>,
    },
    /// Locate a reference block of one image in another.
    BlockMatch {
        reference: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pipeline: Pipeline,
        #[arg(long)]
        search_k: Option<usize>,
        #[arg(long)]
        block_n: Option<usize>,
        /// full or hier.
        #[arg(long)]
        method: Option<String>,
        /// classical, swap or qft.
        #[arg(long)]
        distance: Option<String>,
        #[arg(long)]
        ref_x: Option<usize>,
        #[arg(long)]
        ref_y: Option<usize>,
        /// Use the noise model in quantum distances.
        #[arg(long)]
        noisy: bool,
        /// Record search wall time (output is no longer reproducible).
        #[arg(long)]
        timing: bool,
        /// Register width of the QFT distance.
        #[arg(long)]
        bits: Option<usize>,
    },
    /// Qubit, CNOT, single-qubit gate and depth counts after decomposition.
    GateReport {
        #[arg(value_enum)]
        circuit: CircuitName,
        /// Vector dimension (swap) or register width (qft_subtract).
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the image pipeline on one PGM and write the result.
    Preprocess {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pipeline: Pipeline,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CircuitName {
    Swap,
    QftSubtract,
}

#[derive(Args)]
struct Common {
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long)]
    fidelity_1q: Option<f64>,
    #[arg(long)]
    fidelity_2q: Option<f64>,
}

#[derive(Args)]
struct Pipeline {
    /// Standard deviation of the added Gaussian noise (0 disables it).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    downsample: Option<usize>,
    #[arg(long)]
    smooth: bool,
}

struct Overrides(Vec<(&'static str, String)>);

impl Overrides {
    fn opt<T: ToString>(&mut self, key: &'static str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.push((key, v.to_string()));
        }
        self
    }

    fn flag(&mut self, key: &'static str, set: bool) -> &mut Self {
        if set {
            self.0.push((key, "true".into()));
        }
        self
    }
}

fn build_config(
    common: &Common,
    extra: impl FnOnce(&mut Overrides),
) -> qbm::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = &common.config {
        config.apply_file(path)?;
    }
    let mut o = Overrides(Vec::new());
    o.opt("seed", common.seed)
        .opt("out", common.out.as_ref().map(|p| p.display().to_string()))
        .opt("shots", common.shots)
        .opt("runs", common.runs)
        .opt("fidelity_1q", common.fidelity_1q)
        .opt("fidelity_2q", common.fidelity_2q);
    extra(&mut o);
    for (k, v) in o.0 {
        config.apply_kv(k, &v)?;
    }
    Ok(config)
}

fn pipeline_overrides(o: &mut Overrides, p: &Pipeline) {
    o.opt("sigma", p.sigma)
        .opt("downsample", p.downsample)
        .flag("smooth", p.smooth);
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> qbm::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn run(command: Command) -> qbm::Result<()> {
    match command {
        Command::SwapExp {
            common,
            noisy,
            mode,
        } => {
            let mut config = build_config(&common, |o| {
                o.opt("mode", mode);
            })?;
            if noisy {
                config.mode = Mode::SwapNoisy;
            }
            if !matches!(config.mode, Mode::SwapNoiseless | Mode::SwapNoisy) {
                return Err(Error::Argument(format!(
                    "swap-exp cannot run mode {}",
                    config.mode
                )));
            }
            let rows = run_swap_experiment(&config)?;
            emit(config.out.as_ref(), &write_csv(&rows)?)
        }
        Command::QftSweep { common, fidelities } => {
            let mut config = build_config(&common, |_| {})?;
            config.mode = Mode::QftSweep;
            let fidelities = fidelities.unwrap_or_else(|| DEFAULT_FIDELITIES.to_vec());
            let rows = run_qft_sweep(&config, &fidelities)?;
            emit(config.out.as_ref(), &write_csv(&rows)?)
        }
        Command::BlockMatch {
            reference,
            target,
            common,
            pipeline,
            search_k,
            block_n,
            method,
            distance,
            ref_x,
            ref_y,
            noisy,
            timing,
            bits,
        } => {
            let mut config = build_config(&common, |o| {
                pipeline_overrides(o, &pipeline);
                o.opt("search_k", search_k)
                    .opt("block_n", block_n)
                    .opt("method", method)
                    .opt("distance", distance)
                    .opt("ref_x", ref_x)
                    .opt("ref_y", ref_y)
                    .opt("bits", bits)
                    .flag("noisy", noisy)
                    .flag("timing", timing);
            })?;
            config.mode = Mode::BlockMatch;
            let row = run_block_match(&config, &load_pgm(&reference)?, &load_pgm(&target)?)?;
            emit(config.out.as_ref(), &write_csv(&[row])?)
        }
        Command::GateReport {
            circuit,
            size,
            common,
        } => {
            let config = build_config(&common, |_| {})?;
            let name = match circuit {
                CircuitName::Swap => "swap",
                CircuitName::QftSubtract => "qft_subtract",
            };
            let r = gate_report(name, size)?;
            eprintln!(
                "{name} (size {size}): {} qubits, {} CNOTs, {} single-qubit gates, depth {}",
                r.total_qubits, r.cnot_count, r.single_qubit_count, r.depth
            );
            emit(config.out.as_ref(), &write_csv(&[r])?)
        }
        Command::Preprocess {
            input,
            common,
            pipeline,
        } => {
            let config = build_config(&common, |o| pipeline_overrides(o, &pipeline))?;
            config.validate()?;
            let out = config
                .out
                .clone()
                .ok_or_else(|| Error::Argument("preprocess needs --out".into()))?;
            let image = preprocess_image(&load_pgm(&input)?, &config, config.seed)?;
            save_pgm(&image, out)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Argument(_) => 1,
        Error::Capacity(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
