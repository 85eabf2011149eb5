//! Sampling-based node embedders: DeepWalk (uniform walks + hierarchical
//! softmax), Node2vec (biased walks + negative sampling) and first-order LINE.
//!
//! Every embedder accepts an optional warm-start matrix for the input
//! embedding rows. Output-side parameters always start from zero.

mod hogwild;
pub mod huffman;
pub mod line;
pub mod noise;
pub mod skipgram;
pub mod walks;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarpError, Result};
use crate::graph::Graph;
use crate::rng::{child_rng, derive_seed};

pub use huffman::{build_huffman_tree, HuffmanTree};
pub use line::train_line_first_order;
pub use noise::noise_distribution;
pub use skipgram::{skipgram_pair_step, train_skipgram, SkipGramModel, StepContext};
pub use walks::{node2vec_walks, random_walks, walk_round_tokens, WalkCorpus, WalkSampler};

/// Dense row-major `rows x dim` matrix, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_vec(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(HarpError::ShapeMismatch {
                expected: format!("{rows}x{dim} = {} values", rows * dim),
                actual: format!("{} values", data.len()),
            });
        }
        Ok(EmbeddingMatrix { rows, dim, data })
    }

    /// Uniform entries in `[-0.5/dim, 0.5/dim]`, the usual skip-gram init.
    pub fn random_init<R: Rng + ?Sized>(rows: usize, dim: usize, rng: &mut R) -> Self {
        let scale = 1.0 / dim as f64;
        let data = (0..rows * dim).map(|_| (rng.random::<f64>() - 0.5) * scale).collect();
        EmbeddingMatrix { rows, dim, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_shape(&self, rows: usize, dim: usize) -> Result<()> {
        if self.rows != rows || self.dim != dim {
            return Err(HarpError::ShapeMismatch {
                expected: format!("{rows}x{dim}"),
                actual: format!("{}x{}", self.rows, self.dim),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    HierarchicalSoftmax,
    NegativeSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DeepWalk,
    Line,
    Node2vec,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::DeepWalk, Method::Line, Method::Node2vec];

    pub fn name(self) -> &'static str {
        match self {
            Method::DeepWalk => "deepwalk",
            Method::Line => "line",
            Method::Node2vec => "node2vec",
        }
    }

    pub fn default_objective(self) -> Objective {
        match self {
            Method::DeepWalk => Objective::HierarchicalSoftmax,
            Method::Line | Method::Node2vec => Objective::NegativeSampling,
        }
    }

    pub fn uses_walks(self) -> bool {
        !matches!(self, Method::Line)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deepwalk" | "dw" => Ok(Method::DeepWalk),
            "line" => Ok(Method::Line),
            "node2vec" | "n2v" => Ok(Method::Node2vec),
            other => Err(HarpError::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Hyperparameters shared by all embedders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub line_iterations: usize,
    pub negatives: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    /// `None` picks the method's own objective.
    pub objective: Option<Objective>,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            window: 10,
            walks_per_node: 40,
            walk_length: 10,
            line_iterations: 50,
            negatives: 5,
            lr_start: 0.025,
            lr_end: 0.001,
            objective: None,
            p: 1.0,
            q: 1.0,
            seed: 0,
            threads: 1,
        }
    }
}

impl TrainConfig {
    /// Defaults for `method`: d = 128 for walk methods, d = 64 for LINE.
    pub fn for_method(method: Method) -> Self {
        let mut cfg = TrainConfig::default();
        if method == Method::Line {
            cfg.dim = 64;
        }
        cfg
    }

    pub fn validate(&self, method: Method) -> Result<()> {
        let bad = |m: &str| Err(HarpError::invalid(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.lr_start >= self.lr_end && self.lr_end >= 0.0 && self.lr_start.is_finite()) {
            return bad("learning rates must satisfy lr_start >= lr_end >= 0");
        }
        if self.threads == 0 {
            return bad("threads must be positive");
        }
        if method.uses_walks() && (self.window == 0 || self.walks_per_node == 0 || self.walk_length == 0) {
            return bad("window, walks_per_node and walk_length must be positive");
        }
        if method == Method::Line && self.line_iterations == 0 {
            return bad("line_iterations must be positive");
        }
        if method == Method::Node2vec && !(self.p > 0.0 && self.q > 0.0) {
            return bad("node2vec p and q must be positive");
        }
        Ok(())
    }

    pub fn objective(&self, method: Method) -> Objective {
        match method {
            // LINE is always trained with negative sampling
            Method::Line => Objective::NegativeSampling,
            _ => self.objective.unwrap_or(method.default_objective()),
        }
    }
}

/// Linear learning-rate decay from `start` to `end` over `total` samples.
#[derive(Debug, Clone, Copy)]
pub struct LrSchedule {
    start: f64,
    end: f64,
    total: u64,
}

impl LrSchedule {
    pub fn new(start: f64, end: f64, total: u64) -> Self {
        LrSchedule { start, end, total }
    }

    /// Rate for sample `i` (0-based): `start + (end - start) * i / total`.
    #[inline]
    pub fn at(&self, i: u64) -> f64 {
        if self.total == 0 {
            return self.start;
        }
        let frac = (i.min(self.total) as f64) / self.total as f64;
        self.start + (self.end - self.start) * frac
    }

    /// Rate for a worker that has completed fraction `frac` of its share.
    #[inline]
    pub fn at_fraction(&self, frac: f64) -> f64 {
        self.start + (self.end - self.start) * frac.clamp(0.0, 1.0)
    }
}

/// Samples executed by one embedder call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbedStats {
    /// Walk positions used as skip-gram centers.
    pub walk_tokens: u64,
    /// (center, context) pairs trained.
    pub pairs: u64,
    /// LINE edge samples.
    pub edge_samples: u64,
    pub sampling_secs: f64,
    pub training_secs: f64,
}

impl EmbedStats {
    /// The budget unit: walk tokens for walk methods, edge samples for LINE.
    pub fn samples(&self, method: Method) -> u64 {
        if method.uses_walks() {
            self.walk_tokens
        } else {
            self.edge_samples
        }
    }

    pub fn accumulate(&mut self, other: &EmbedStats) {
        self.walk_tokens += other.walk_tokens;
        self.pairs += other.pairs;
        self.edge_samples += other.edge_samples;
        self.sampling_secs += other.sampling_secs;
        self.training_secs += other.training_secs;
    }
}

#[derive(Debug, Clone)]
pub struct EmbedOutput {
    pub embedding: EmbeddingMatrix,
    pub stats: EmbedStats,
}

/// Per-call sample count: the method's own default or an exact target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleTarget {
    /// `walks_per_node` full rounds of walks, or `line_iterations * |E|` edges.
    Default,
    /// Exactly this many walk tokens or edge samples.
    Exact(u64),
}

/// Samples the configured method would draw on `g` under `SampleTarget::Default`.
pub fn default_samples(g: &Graph, method: Method, cfg: &TrainConfig) -> u64 {
    if method.uses_walks() {
        cfg.walks_per_node as u64 * walk_round_tokens(g, cfg.walk_length)
    } else {
        (cfg.line_iterations * g.edge_count()) as u64
    }
}

/// Embeds `g` with `method`, warm-starting the input rows from `init`.
pub fn embed(
    g: &Graph,
    init: Option<&EmbeddingMatrix>,
    method: Method,
    cfg: &TrainConfig,
    target: SampleTarget,
) -> Result<EmbedOutput> {
    cfg.validate(method)?;
    if let Some(m) = init {
        m.check_shape(g.node_count(), cfg.dim)?;
    }
    let samples = match target {
        SampleTarget::Default => default_samples(g, method, cfg),
        SampleTarget::Exact(s) => s,
    };
    match method {
        Method::Line => {
            let t0 = Instant::now();
            let (embedding, edge_samples) = line::train_line_with_samples(g, init, cfg, samples)?;
            Ok(EmbedOutput {
                embedding,
                stats: EmbedStats {
                    edge_samples,
                    training_secs: t0.elapsed().as_secs_f64(),
                    ..EmbedStats::default()
                },
            })
        }
        Method::DeepWalk | Method::Node2vec => {
            let t0 = Instant::now();
            let sampler = if method == Method::Node2vec {
                WalkSampler::node2vec(g, cfg.p, cfg.q)?
            } else {
                WalkSampler::uniform(g)
            };
            let corpus = sampler.generate_tokens(samples, cfg.walk_length, derive_seed(cfg.seed, 1), cfg.threads);
            let sampling_secs = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let (embedding, mut stats) = train_skipgram(&corpus, g, init, cfg, cfg.objective(method))?;
            stats.sampling_secs = sampling_secs;
            stats.training_secs = t1.elapsed().as_secs_f64();
            Ok(EmbedOutput { embedding, stats })
        }
    }
}

/// Fresh input rows for an embedder, either copied from `init` or random.
pub(crate) fn initial_rows(n: usize, cfg: &TrainConfig, init: Option<&EmbeddingMatrix>) -> Result<EmbeddingMatrix> {
    match init {
        Some(m) => {
            m.check_shape(n, cfg.dim)?;
            Ok(m.clone())
        }
        None => Ok(EmbeddingMatrix::random_init(n, cfg.dim, &mut child_rng(cfg.seed, 3))),
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Logistic function and `-ln sigmoid(x)` from a single exponential.
#[inline]
pub(crate) fn sigmoid_and_nll(x: f64) -> (f64, f64) {
    let e = (-x.abs()).exp();
    if x >= 0.0 {
        (1.0 / (1.0 + e), e.ln_1p())
    } else {
        (e / (1.0 + e), -x + e.ln_1p())
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
