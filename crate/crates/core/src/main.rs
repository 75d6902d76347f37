use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tvbounds::cli::commands::{
    run_bounds, run_cgqlb, run_envelope_dump, run_exact, run_experiment, run_mc, OutputMode,
};
use tvbounds::cli::experiment::{
    Dataset, ExperimentConfig, GammaParam, PrecisionPrior, DEFAULT_CGQ_SAMPLES,
    DEFAULT_MC_SAMPLES,
};
use tvbounds::cli::input::parse_mixture_file;
use tvbounds::cli::CliError;
use tvbounds::envelope_bounds::DEFAULT_REFINE_FACTOR;

/// Deterministic bounds and estimates of the total variation distance
/// between two univariate mixtures.
#[derive(Parser)]
#[command(name = "tvbounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Mixture-pair file (TOML).
    file: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionParam {
    Scale,
    Rate,
}

#[derive(Subcommand)]
enum Command {
    /// CELB/CEUB from the envelope decomposition.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Pieces per finite elementary interval.
        #[arg(long, default_value_t = DEFAULT_REFINE_FACTOR)]
        refine: usize,
    },
    /// Coarse-grained lower bound.
    Cgqlb {
        #[command(flatten)]
        common: Common,
        /// Sample count for the sampled partition.
        #[arg(long, default_value_t = DEFAULT_CGQ_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use an equal-width partition with this many cells instead.
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Monte Carlo TV and KL estimates with the Pinsker value.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed-form TV between two single Gaussians.
    Exact {
        #[command(flatten)]
        common: Common,
    },
    /// Dump the elementary intervals and a density grid as CSV.
    Envelope {
        /// Mixture-pair file (TOML).
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REFINE_FACTOR)]
        refine: usize,
        /// Number of grid points.
        #[arg(long, default_value_t = 501)]
        bins: usize,
        /// Interval table path; the grid goes to `<stem>.grid.csv` beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Random Gaussian-mixture benchmark, CSV output.
    Experiment {
        /// 1: means ~ N(0, 1); 2: means ~ N(0, 25).
        #[arg(long, default_value = "1")]
        dataset: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo sample count per trial.
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
        /// Samples used to build each CGQLB partition.
        #[arg(long, default_value_t = DEFAULT_CGQ_SAMPLES)]
        cgq_samples: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE_FACTOR)]
        refine: usize,
        /// Shape of the Gamma prior on component precisions.
        #[arg(long, default_value_t = 5.0)]
        precision_shape: f64,
        /// Second parameter of that prior.
        #[arg(long, default_value_t = 0.2)]
        precision_param: f64,
        /// Whether the second parameter is a scale or a rate.
        #[arg(long, value_enum, default_value_t = PrecisionParam::Scale)]
        precision_kind: PrecisionParam,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn mode(json: bool) -> OutputMode {
    if json {
        OutputMode::Json
    } else {
        OutputMode::Text
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds { common, refine } => {
            let spec = parse_mixture_file(&common.file)?;
            emit(&run_bounds(&spec, refine, mode(common.json))?, common.out.as_ref())
        }
        Command::Cgqlb { common, samples, seed, bins } => {
            let spec = parse_mixture_file(&common.file)?;
            emit(&run_cgqlb(&spec, samples, seed, bins, mode(common.json))?, common.out.as_ref())
        }
        Command::Mc { common, samples, seed } => {
            let spec = parse_mixture_file(&common.file)?;
            emit(&run_mc(&spec, samples, seed, mode(common.json))?, common.out.as_ref())
        }
        Command::Exact { common } => {
            let spec = parse_mixture_file(&common.file)?;
            emit(&run_exact(&spec, mode(common.json))?, common.out.as_ref())
        }
        Command::Envelope { file, refine, bins, out } => {
            let spec = parse_mixture_file(&file)?;
            eprint!("{}", run_envelope_dump(&spec, refine, bins, &out)?);
            Ok(())
        }
        Command::Experiment {
            dataset,
            k,
            trials,
            seed,
            samples,
            cgq_samples,
            refine,
            precision_shape,
            precision_param,
            precision_kind,
            out,
        } => {
            let cfg = ExperimentConfig {
                dataset: Dataset::parse(&dataset)?,
                k,
                trials,
                seed,
                mc_n: samples,
                cgq_n: cgq_samples,
                refine,
                prior: PrecisionPrior {
                    shape: precision_shape,
                    second: precision_param,
                    param: match precision_kind {
                        PrecisionParam::Scale => GammaParam::Scale,
                        PrecisionParam::Rate => GammaParam::Rate,
                    },
                },
            };
            emit(&run_experiment(&cfg)?, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
