use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use isoflow::ensembles::{sample_real, EnsembleKind, EnsembleSpec};
use isoflow::harness::{error_json, run, write_atomic, Experiment, ExperimentConfig};
use isoflow::traces::{qr_trace, sample_ensemble_csv, strobe_table, toda_trace};
use isoflow::{Error, Matrix, Result, SymmetricMatrix};

#[derive(Parser)]
#[command(name = "isoflow", version, about = "Isospectral flows and random-matrix experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Named preset (fig3a-qr, fig3b-toda, gap-law, tw-table, lis-mc, xy, sine-gap).
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Master seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Number of trials (or samples, for strobe-check).
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ensemble {
    Goe,
    Gue,
    Be,
}

impl From<Ensemble> for EnsembleKind {
    fn from(e: Ensemble) -> Self {
        match e {
            Ensemble::Goe => EnsembleKind::GOE,
            Ensemble::Gue => EnsembleKind::GUE,
            Ensemble::Be => EnsembleKind::BernoulliWigner,
        }
    }
}

#[derive(Args)]
struct Start {
    /// Initial matrix as CSV (row count, then rows); a GOE draw otherwise.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// Dimension of the GOE draw.
    #[arg(short, long, default_value_t = 6)]
    n: usize,
    /// Trial index of the GOE draw.
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print one ensemble draw as CSV.
    SampleEnsemble {
        #[arg(long, value_enum, default_value = "goe")]
        ensemble: Ensemble,
        #[arg(short, long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Per-time CSV of the Toda flow.
    TodaTrace {
        #[command(flatten)]
        start: Start,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
    },
    /// Per-iterate CSV of unshifted QR.
    QrTrace {
        #[command(flatten)]
        start: Start,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Compare k QR steps with the log-flow at time k on random Jacobi matrices.
    StrobeCheck {
        #[arg(short, long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
    },
    /// Deflation-time universality (QR or Toda).
    DeflateUniversality,
    /// First-deflation time against the top gap.
    GapLaw,
    /// Tracy–Widom via Painlevé II and via the Airy determinant.
    TwTable,
    /// Sine-kernel gap probabilities.
    SineGap,
    /// XY-model autocorrelation.
    Xy,
    /// Longest increasing subsequence Monte Carlo.
    LisMc {
        /// `t,F` CSV used as the reference CDF.
        #[arg(long, value_name = "PATH")]
        tw_table: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let c = cli.common;
    let (experiment, default_preset, tw_table) = match cli.command {
        Command::DeflateUniversality => (Experiment::DeflateUniversality, "fig3a-qr", None),
        Command::GapLaw => (Experiment::GapLaw, "gap-law", None),
        Command::TwTable => (Experiment::TwTable, "tw-table", None),
        Command::SineGap => (Experiment::SineGap, "sine-gap", None),
        Command::Xy => (Experiment::Xy, "xy", None),
        Command::LisMc { tw_table } => (Experiment::LisMc, "lis-mc", tw_table),
        tool => return run_tool(tool, &c),
    };
    let mut cfg = match (&c.config, &c.preset) {
        (Some(_), Some(_)) => return Err(usage("preset", "give --config or --preset, not both")),
        (Some(path), None) => ExperimentConfig::from_file(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => ExperimentConfig::preset(default_preset)?,
    };
    if cfg.experiment != experiment {
        return Err(usage(
            "experiment",
            format!("config is for `{}`, not `{}`", cfg.experiment.name(), experiment.name()),
        ));
    }
    if let Some(s) = c.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = c.trials {
        cfg.trials = Some(t);
    }
    if let Some(w) = c.workers {
        cfg.worker_count = Some(w);
    }
    if let Some(o) = c.out {
        cfg.output_dir = Some(o);
    }
    if tw_table.is_some() {
        cfg.tw_table = tw_table;
    }
    let result = run(&cfg)?;
    match &cfg.output_dir {
        Some(dir) => {
            result.write_outputs(dir)?;
            print!("{}", result.summary_text());
        }
        None => print!("{}", result.records_csv()),
    }
    Ok(())
}

fn usage(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn run_tool(cmd: Command, c: &Common) -> Result<()> {
    if c.config.is_some() || c.preset.is_some() {
        return Err(usage("config", "trace subcommands take no config or preset"));
    }
    let seed = c.seed.unwrap_or(0);
    let (name, csv) = match cmd {
        Command::SampleEnsemble { ensemble, n, trial } => {
            ("sample.csv", sample_ensemble_csv(ensemble.into(), n, seed, trial)?)
        }
        Command::TodaTrace { start, t_max, dt } => ("toda_trace.csv", toda_trace(&initial(&start, seed)?, t_max, dt)?),
        Command::QrTrace { start, steps } => ("qr_trace.csv", qr_trace(&initial(&start, seed)?, steps)?),
        Command::StrobeCheck { n, k_max } => {
            let (csv, worst) = strobe_table(c.trials.unwrap_or(100), n, k_max, seed)?;
            eprintln!("worst deviation / bound = {worst:.3e}");
            ("strobe.csv", csv)
        }
        _ => unreachable!("experiments are dispatched before"),
    };
    match &c.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_atomic(dir, name, &csv)?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn initial(start: &Start, seed: u64) -> Result<SymmetricMatrix> {
    match &start.matrix {
        Some(path) => read_matrix(path),
        None => sample_real(&EnsembleSpec::new(EnsembleKind::GOE, start.n, seed)?, start.trial),
    }
}

fn read_matrix(path: &Path) -> Result<SymmetricMatrix> {
    SymmetricMatrix::new(Matrix::from_csv(&std::fs::read_to_string(path)?)?)
}
