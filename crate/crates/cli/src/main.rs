use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affscreen::pipeline::{self, PipelineError};
use affscreen::PipelineConfig;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "affscreen", version, about = "Receptor-ligand featurization and binding-affinity regression")]
struct Cli {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curate a raw receptor/SMILES/Ki table into a split dataset directory.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build feature matrices for one subset of a dataset.
    Featurize {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "all", value_parser = ["train", "valid", "test", "all"])]
        subset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a boosted tree model on a featurized subset.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        valid: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a feature table with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare predictions with true labels.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write ligand and receptor graphs as JSON lines.
    ExportGraphs {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match path {
        Some(p) => PipelineConfig::from_path(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = load_config(cli.config.as_deref(), cli.seed)?;
    match cli.command {
        Command::Ingest { input, out } => {
            let s = pipeline::ingest(&input, &out, &cfg)?;
            let [tr, va, te] = s.split_counts;
            log::info!("{} records ({tr} train, {va} valid, {te} test), {} rows dropped", s.records, s.dropped);
        }
        Command::Featurize { dataset, subset, out } => {
            let n = pipeline::featurize(&dataset, &subset, &out, &cfg)?;
            log::info!("featurized {n} rows into {}", out.display());
        }
        Command::Train { train, valid, out } => {
            let r = pipeline::train(&train, valid.as_deref(), &out, &cfg)?;
            let last = r.iterations.last();
            log::info!(
                "kept {} trees; final train MSE {:.4}{}",
                r.trees_kept,
                last.map_or(r.initial_train_mse, |m| m.train_mse),
                last.and_then(|m| m.valid_mae).map(|v| format!(", valid MAE {v:.4}")).unwrap_or_default()
            );
        }
        Command::Predict { model, features, out } => {
            let n = pipeline::predict(&model, &features, &out, &cfg)?;
            log::info!("wrote {n} predictions to {}", out.display());
        }
        Command::Evaluate { pred, truth, out } => {
            let r = pipeline::evaluate(&pred, &truth, &out, &cfg)?;
            log::info!("n {} MAE {:.4} accuracy {:.4} (mean predictor MAE {:.4})", r.n, r.mae, r.accuracy, r.mean_predictor_mae);
        }
        Command::ExportGraphs { dataset, out } => {
            let n = pipeline::export_graphs(&dataset, &out, &cfg)?;
            log::info!("exported {n} ligand graphs to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
