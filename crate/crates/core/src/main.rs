use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nctfeat::controllability::{ControllabilityConfig, GramianMethod, Horizon};
use nctfeat::encoding::{RankEncodingSpec, Scheme};
use nctfeat::error::Result;
use nctfeat::io::{ingest_dataset, load_dataset, save_dataset};
use nctfeat::metric::MetricKind;
use nctfeat::pipeline::{manifest_path, run_featurize, FeaturizeConfig};
use nctfeat::stats::dataset_stats;

#[derive(Parser)]
#[command(name = "nctfeat", version, about = "Controllability and centrality node features for graph datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    DegOnehot,
    NctEfa,
    AcRank,
    ConcatRank,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::DegOnehot => Scheme::DegOnehot,
            SchemeArg::NctEfa => Scheme::NctEfa,
            SchemeArg::AcRank => Scheme::AcRank,
            SchemeArg::ConcatRank => Scheme::ConcatRank,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spectral,
    Trapezoid,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a feature file for every graph of a dataset.
    Featurize {
        /// Canonical dataset file, or a directory with *_edges.json and *_target.csv.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        #[arg(long, value_enum, default_value = "spectral")]
        method: MethodArg,
        /// Comma-separated metric list (ac,deg,clo,bet,eig).
        #[arg(long)]
        metrics: Option<String>,
        /// Divide the adjacency by 1 + λ_max before computing the Gramian.
        #[arg(long)]
        rescale_spectral: bool,
        /// Z-score raw feature columns over the whole dataset.
        #[arg(long)]
        standardize: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Omit failing graphs (recorded in the manifest) instead of aborting.
        #[arg(long)]
        skip_errors: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dataset statistics.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Convert the raw edge JSON / label CSV pair into the canonical format.
    Ingest {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_metrics(list: &str) -> Result<Vec<MetricKind>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Featurize {
            dataset,
            scheme,
            k,
            horizon,
            step,
            method,
            metrics,
            rescale_spectral,
            standardize,
            threads,
            skip_errors,
            out,
        } => {
            let mut cfg = FeaturizeConfig::new(dataset, out, scheme.into());
            cfg.rank = RankEncodingSpec::new(k)?;
            cfg.controllability = ControllabilityConfig {
                horizon: Horizon::new(horizon, step)?,
                method: match method {
                    MethodArg::Spectral => GramianMethod::Spectral,
                    MethodArg::Trapezoid => GramianMethod::Trapezoid,
                },
                rescale: rescale_spectral,
            };
            cfg.metrics = metrics.as_deref().map(parse_metrics).transpose()?;
            cfg.standardize = standardize;
            cfg.threads = threads;
            cfg.skip_errors = skip_errors;
            let manifest = run_featurize(&cfg)?;
            eprintln!(
                "wrote {} graphs (dim {}) to {} in {:.2}s; manifest {}",
                manifest.summary.graphs_written,
                manifest.summary.dim,
                cfg.out.display(),
                manifest.wall_time_secs,
                manifest_path(&cfg.out).display()
            );
            if !manifest.summary.skipped.is_empty() {
                eprintln!("skipped {} graphs", manifest.summary.skipped.len());
            }
        }
        Command::Stats { dataset, json } => {
            let ingested = load_dataset(&dataset)?;
            let stats = dataset_stats(&ingested.dataset)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
            } else {
                print!("{stats}");
            }
        }
        Command::Ingest { edges, labels, name, out } => {
            let ingested = ingest_dataset(&edges, &labels, &name)?;
            save_dataset(&ingested.dataset, &out)?;
            let d = &ingested.diagnostics;
            eprintln!(
                "ingested {} graphs; stripped {} self-loops and {} duplicate edges; remapped {} graphs; {} labels without graphs",
                ingested.dataset.len(),
                d.self_loops_stripped,
                d.duplicate_edges_stripped,
                d.graphs_remapped,
                d.orphan_labels
            );
            for (id, original) in &ingested.remapped {
                log::info!("graph {id}: node ids {original:?} compacted to 0..{}", original.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
