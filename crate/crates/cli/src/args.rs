use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harp_core::embed::{Method, TrainConfig};
use harp_core::eval::{EvalConfig, LogRegConfig};
use harp_core::pipeline::{HarpConfig, Mode};
use harp_core::CoarsenConfig;

#[derive(Debug, Parser)]
#[command(name = "harp", version, about = "Multilevel graph embedding toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graph as an edge list.
    Generate(GenerateArgs),
    /// Coarsen the largest connected component and report per-level sizes.
    Coarsen(CoarsenArgs),
    /// Embed a graph with a flat or multilevel embedder.
    Embed(EmbedArgs),
    /// Node classification on an existing embedding.
    Eval(EvalArgs),
    /// Flat vs multilevel classification comparison with matched budgets.
    Compare(CompareArgs),
    /// Runtime scaling benchmark on Erdős–Rényi graphs.
    Bench(BenchArgs),
    /// 2-D multilevel embedding with per-level coordinates and SVG plots.
    DumpLevels(DumpLevelsArgs),
    /// Load, embed and evaluate in one go, writing a replayable manifest.
    Run(RunArgs),
    /// Re-run a manifest and check the embedding is bit-identical.
    Replay(ReplayArgs),
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: harp_core::HarpError| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: harp_core::HarpError| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphKind {
    Er,
    Ba,
    Ring,
    Grid,
    Planted,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed.
    #[arg(long, env = "HARP_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    /// Node count (er, ba, ring, planted).
    #[arg(long, default_value_t = 1000)]
    pub nodes: usize,
    /// Expected average degree (er, planted).
    #[arg(long, default_value_t = 10.0)]
    pub avg_degree: f64,
    /// Edges added per new node (ba).
    #[arg(long, default_value_t = 5)]
    pub attach: usize,
    /// Neighbors on each side (ring).
    #[arg(long, default_value_t = 2)]
    pub neighbors: usize,
    #[arg(long, default_value_t = 20)]
    pub rows: usize,
    #[arg(long, default_value_t = 20)]
    pub cols: usize,
    /// Community count (planted).
    #[arg(long, default_value_t = 6)]
    pub communities: usize,
    /// Fraction of each node's edges leaving its community (planted).
    #[arg(long, default_value_t = 0.2)]
    pub mixing: f64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub output: PathBuf,
    /// Community labels output (planted).
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoarsenArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub coarsening: CoarsenArgsCommon,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Write the full hierarchy (edge lists and parent maps) here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Per-level CSV; stdout when absent.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CoarsenArgsCommon {
    /// Stop coarsening below this many nodes.
    #[arg(long, default_value_t = 100)]
    pub threshold: usize,
    #[arg(long, default_value_t = 32)]
    pub max_levels: usize,
}

impl CoarsenArgsCommon {
    pub fn config(&self) -> CoarsenConfig {
        CoarsenConfig {
            threshold: self.threshold,
            max_levels: self.max_levels,
        }
    }
}

/// Embedder hyperparameters; defaults follow the reference settings.
#[derive(Debug, Args, Clone)]
pub struct TrainArgs {
    /// Embedding dimension [default: 128, or 64 for line].
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 40)]
    pub walks_per_node: usize,
    #[arg(long, default_value_t = 10)]
    pub walk_length: usize,
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    /// LINE passes over the edge set.
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    /// Node2vec return parameter.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Node2vec in-out parameter.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.025)]
    pub lr_start: f64,
    #[arg(long, default_value_t = 0.001)]
    pub lr_end: f64,
    /// Training threads; results are reproducible only with 1.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub coarsening: CoarsenArgsCommon,
}

impl TrainArgs {
    pub fn harp_config(&self, method: Method, seed: u64) -> HarpConfig {
        let defaults = TrainConfig::for_method(method);
        HarpConfig {
            method,
            train: TrainConfig {
                dim: self.dim.unwrap_or(defaults.dim),
                window: self.window,
                walks_per_node: self.walks_per_node,
                walk_length: self.walk_length,
                line_iterations: self.iterations,
                negatives: self.negatives,
                lr_start: self.lr_start,
                lr_end: self.lr_end,
                p: self.p,
                q: self.q,
                seed,
                threads: self.threads,
                ..defaults
            },
            coarsening: self.coarsening.config(),
            refine_lr: None,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct EvalArgsCommon {
    /// Labeled fractions used for training.
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.08")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// L2 strength on the mean logistic loss [default: 1 / training rows].
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Skip label lines whose node is not in the graph.
    #[arg(long)]
    pub skip_unknown: bool,
}

impl EvalArgsCommon {
    pub fn config(&self, seed: u64) -> EvalConfig {
        EvalConfig {
            repetitions: self.reps,
            seed,
            logreg: LogRegConfig {
                l2: self.l2,
                max_iter: self.max_iter,
                ..LogRegConfig::default()
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    /// `harp` (multilevel) or `baseline` (flat, matched budget).
    #[arg(long, value_parser = parse_mode, default_value = "harp")]
    pub mode: Mode,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub output: PathBuf,
    /// Write each level's embedding here (multilevel mode only).
    #[arg(long)]
    pub dump_levels: Option<PathBuf>,
    /// Write a JSON run manifest here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub embedding: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub eval: EvalArgsCommon,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Method name written to the report.
    #[arg(long, default_value = "embedding")]
    pub name: String,
    /// CSV report (`method,ratio,rep,macro_f1`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "deepwalk,line,node2vec")]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub eval: EvalArgsCommon,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Per-repetition curves CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary CSV with gains and p-values; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    pub nodes: Vec<usize>,
    #[arg(long, default_value_t = 10.0)]
    pub avg_degree: f64,
    #[arg(long, value_parser = parse_method, default_value = "line")]
    pub method: Method,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// CSV of bench records; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpLevelsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "line")]
    pub method: Method,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long, value_parser = parse_mode, default_value = "harp")]
    pub mode: Mode,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub eval: EvalArgsCommon,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Receives `embedding.txt`, `report.csv` and `manifest.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Also write the replayed embedding here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
