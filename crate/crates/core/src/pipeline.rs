//! Multilevel embedding: coarsen, embed the coarsest graph, then prolong and
//! refine level by level back to the input graph.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coarsen::{coarsen_hierarchy, CoarsenConfig, Hierarchy, LevelStats, ParentMap};
use crate::embed::{self, default_samples, EmbedStats, EmbeddingMatrix, Method, SampleTarget, TrainConfig};
use crate::error::{HarpError, Result};
use crate::graph::{largest_connected_component, Graph};
use crate::rng::{derive_seed, rng_from_seed};

/// Copies each coarse row to the fine nodes that merged into it.
pub fn prolongate(coarse: &EmbeddingMatrix, parents: &ParentMap) -> Result<EmbeddingMatrix> {
    if coarse.rows() != parents.coarse_count() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("{} coarse rows", parents.coarse_count()),
            actual: format!("{} rows", coarse.rows()),
        });
    }
    let mut fine = EmbeddingMatrix::zeros(parents.fine_count(), coarse.dim());
    for u in 0..parents.fine_count() {
        fine.row_mut(u).copy_from_slice(coarse.row(parents.parent(u)));
    }
    Ok(fine)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarpConfig {
    pub method: Method,
    pub train: TrainConfig,
    pub coarsening: CoarsenConfig,
    /// Overrides `(lr_start, lr_end)` on every level except the coarsest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_lr: Option<(f64, f64)>,
}

impl HarpConfig {
    /// Paper-default hyperparameters for `method`.
    pub fn new(method: Method) -> Self {
        HarpConfig {
            method,
            train: TrainConfig::for_method(method),
            coarsening: CoarsenConfig::default(),
            refine_lr: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.train.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.train.seed
    }

    /// Training config for hierarchy level `level` of `depth`.
    fn level_config(&self, level: usize, depth: usize) -> TrainConfig {
        let mut cfg = self.train.clone();
        cfg.seed = derive_seed(self.seed(), 1000 + level as u64);
        if level < depth {
            if let Some((start, end)) = self.refine_lr {
                cfg.lr_start = start;
                cfg.lr_end = end;
            }
        }
        cfg
    }

    fn coarsening_seed(&self) -> u64 {
        derive_seed(self.seed(), 7)
    }
}

/// Sample accounting for a hierarchy. Walk methods count walk tokens
/// (`walks_per_node * |V_i| * walk_length` per level when no node is
/// isolated); LINE counts edge samples (`line_iterations * |E_i|` per level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub per_level: Vec<u64>,
    pub total: u64,
    /// Level-0 multiplier (walks per node, or LINE iterations) a flat run
    /// needs to see `total` samples, rounded up.
    pub baseline_equivalent: u64,
    /// Samples per unit of that multiplier on level 0.
    pub unit_cost: u64,
}

pub fn compute_sample_budget(h: &Hierarchy, method: Method, cfg: &TrainConfig) -> SampleBudget {
    let per_level: Vec<u64> = h.graphs().iter().map(|g| default_samples(g, method, cfg)).collect();
    let total = per_level.iter().sum();
    let g0 = h.graph(0);
    let unit_cost = if method.uses_walks() {
        embed::walk_round_tokens(g0, cfg.walk_length)
    } else {
        g0.edge_count() as u64
    };
    SampleBudget {
        per_level,
        total,
        baseline_equivalent: if unit_cost == 0 { 0 } else { total.div_ceil(unit_cost) },
        unit_cost,
    }
}

/// Wall-clock time by phase, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub coarsening: f64,
    pub sampling: f64,
    pub training: f64,
    pub prolongation: f64,
}

impl PhaseTimings {
    pub fn total(&self) -> f64 {
        self.coarsening + self.sampling + self.training + self.prolongation
    }
}

#[derive(Debug, Clone)]
pub struct HarpOutput {
    pub embedding: EmbeddingMatrix,
    pub hierarchy: Hierarchy,
    pub budget: SampleBudget,
    /// Per-level embedder stats, index = level.
    pub level_stats: Vec<EmbedStats>,
    pub timings: PhaseTimings,
}

impl HarpOutput {
    /// Samples executed over all levels, as counted by the embedders.
    pub fn executed_samples(&self, method: Method) -> u64 {
        self.level_stats.iter().map(|s| s.samples(method)).sum()
    }
}

/// Multilevel embedding of `g` with the configured embedder.
pub fn harp_embed(g: &Graph, config: &HarpConfig) -> Result<HarpOutput> {
    harp_embed_with(g, config, |_, _, _| Ok(()))
}

/// [`harp_embed`] with a callback invoked after each level is embedded,
/// coarsest first.
pub fn harp_embed_with<F>(g: &Graph, config: &HarpConfig, mut on_level: F) -> Result<HarpOutput>
where
    F: FnMut(usize, &Graph, &EmbeddingMatrix) -> Result<()>,
{
    if g.is_empty() {
        return Err(HarpError::invalid("cannot embed an empty graph"));
    }
    config.train.validate(config.method)?;
    let mut timings = PhaseTimings::default();

    let t0 = Instant::now();
    let hierarchy = coarsen_hierarchy(g, &config.coarsening, config.coarsening_seed())?;
    timings.coarsening = t0.elapsed().as_secs_f64();
    let budget = compute_sample_budget(&hierarchy, config.method, &config.train);

    let depth = hierarchy.depth();
    let mut level_stats = vec![EmbedStats::default(); depth + 1];
    let mut current: Option<EmbeddingMatrix> = None;
    for level in (0..=depth).rev() {
        let graph = hierarchy.graph(level);
        let init = match current.take() {
            Some(coarse) => {
                let t = Instant::now();
                let fine = prolongate(&coarse, &hierarchy.parent_maps()[level])?;
                timings.prolongation += t.elapsed().as_secs_f64();
                Some(fine)
            }
            // the coarsest level starts from the embedder's own initialization
            None => None,
        };
        let cfg = config.level_config(level, depth);
        let (emb, stats) = embed_level(graph, init.as_ref(), config.method, &cfg)?;
        timings.sampling += stats.sampling_secs;
        timings.training += stats.training_secs;
        level_stats[level] = stats;
        on_level(level, graph, &emb)?;
        current = Some(emb);
    }

    Ok(HarpOutput {
        embedding: current.expect("at least one level"),
        hierarchy,
        budget,
        level_stats,
        timings,
    })
}

/// One level; LINE on an edgeless level passes the initialization through.
fn embed_level(
    g: &Graph,
    init: Option<&EmbeddingMatrix>,
    method: Method,
    cfg: &TrainConfig,
) -> Result<(EmbeddingMatrix, EmbedStats)> {
    if method == Method::Line && g.edge_count() == 0 {
        let emb = match init {
            Some(m) => m.clone(),
            None => EmbeddingMatrix::random_init(g.node_count(), cfg.dim, &mut rng_from_seed(cfg.seed)),
        };
        return Ok((emb, EmbedStats::default()));
    }
    let out = embed::embed(g, init, method, cfg, SampleTarget::Default)?;
    Ok((out.embedding, out.stats))
}

#[derive(Debug, Clone)]
pub struct BaselineOutput {
    pub embedding: EmbeddingMatrix,
    pub stats: EmbedStats,
    pub timings: PhaseTimings,
}

/// Flat run of the embedder on `g` with exactly `samples` samples.
pub fn baseline_embed(g: &Graph, config: &HarpConfig, samples: u64) -> Result<BaselineOutput> {
    let mut cfg = config.train.clone();
    cfg.seed = derive_seed(config.seed(), 2000);
    let (embedding, stats) = if config.method == Method::Line && g.edge_count() == 0 {
        embed_level(g, None, config.method, &cfg)?
    } else {
        let out = embed::embed(g, None, config.method, &cfg, SampleTarget::Exact(samples))?;
        (out.embedding, out.stats)
    };
    Ok(BaselineOutput {
        embedding,
        timings: PhaseTimings {
            sampling: stats.sampling_secs,
            training: stats.training_secs,
            ..PhaseTimings::default()
        },
        stats,
    })
}

/// Sample budget a flat baseline must match: builds the same hierarchy that
/// [`harp_embed`] would build for `config`.
pub fn matched_budget(g: &Graph, config: &HarpConfig) -> Result<SampleBudget> {
    let h = coarsen_hierarchy(g, &config.coarsening, config.coarsening_seed())?;
    Ok(compute_sample_budget(&h, config.method, &config.train))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Baseline,
    Harp,
}

impl std::str::FromStr for Mode {
    type Err = HarpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "harp" => Ok(Mode::Harp),
            other => Err(HarpError::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// Result of [`run_mode`], shared by baseline and multilevel runs.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub embedding: EmbeddingMatrix,
    pub budget: SampleBudget,
    pub executed_samples: u64,
    pub timings: PhaseTimings,
}

/// Runs either the flat baseline (with a matched budget) or the multilevel
/// embedder.
pub fn run_mode(g: &Graph, config: &HarpConfig, mode: Mode) -> Result<RunOutput> {
    match mode {
        Mode::Harp => {
            let out = harp_embed(g, config)?;
            Ok(RunOutput {
                executed_samples: out.executed_samples(config.method),
                embedding: out.embedding,
                budget: out.budget,
                timings: out.timings,
            })
        }
        Mode::Baseline => {
            let budget = matched_budget(g, config)?;
            let out = baseline_embed(g, config, budget.total)?;
            Ok(RunOutput {
                executed_samples: out.stats.samples(config.method),
                embedding: out.embedding,
                budget,
                timings: out.timings,
            })
        }
    }
}

/// Coarsening statistics on the largest connected component of `g`.
pub fn coarsening_report(g: &Graph, coarsening: &CoarsenConfig, seed: u64) -> Result<Vec<LevelStats>> {
    let (lcc, _) = largest_connected_component(g);
    Ok(coarsen_hierarchy(&lcc, coarsening, seed)?.level_stats())
}

/// Runs a 2-D multilevel embedding and writes, for every level `i`,
/// `level_<i>.tsv` (`id<TAB>x<TAB>y`) and `level_<i>.svg`. Level 0 uses
/// external ids; coarser levels use internal ids. Returns the row count
/// written per level, index = level.
pub fn embed_levels_dump(g: &Graph, config: &HarpConfig, dir: impl AsRef<Path>) -> Result<Vec<usize>> {
    if config.train.dim != 2 {
        return Err(HarpError::invalid("level dumps need dim = 2"));
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut rows = Vec::new();
    harp_embed_with(g, config, |level, graph, emb| {
        let mut tsv = String::new();
        for u in 0..emb.rows() {
            let id = if level == 0 {
                graph.external_id(u)
            } else {
                u.to_string()
            };
            let r = emb.row(u);
            writeln!(tsv, "{id}\t{}\t{}", r[0], r[1]).unwrap();
        }
        fs::write(dir.join(format!("level_{level}.tsv")), tsv)?;
        fs::write(dir.join(format!("level_{level}.svg")), render_svg(graph, emb))?;
        if rows.len() <= level {
            rows.resize(level + 1, 0);
        }
        rows[level] = emb.rows();
        Ok(())
    })?;
    Ok(rows)
}

/// Scatter plot of 2-D node positions with edges drawn as lines.
pub fn render_svg(g: &Graph, emb: &EmbeddingMatrix) -> String {
    const SIZE: f64 = 600.0;
    const PAD: f64 = 20.0;
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for u in 0..emb.rows() {
        let r = emb.row(u);
        lo_x = lo_x.min(r[0]);
        hi_x = hi_x.max(r[0]);
        lo_y = lo_y.min(r[1]);
        hi_y = hi_y.max(r[1]);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-12);
    let pos = |u: usize| {
        let r = emb.row(u);
        (
            PAD + (r[0] - lo_x) / span * (SIZE - 2.0 * PAD),
            PAD + (r[1] - lo_y) / span * (SIZE - 2.0 * PAD),
        )
    };
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g stroke=\"#999\" stroke-width=\"0.5\">\n");
    for (u, v, _) in g.edges() {
        let ((x1, y1), (x2, y2)) = (pos(u), pos(v));
        writeln!(out, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#).unwrap();
    }
    out.push_str("</g>\n<g fill=\"#1f77b4\">\n");
    for u in 0..emb.rows() {
        let (x, y) = pos(u);
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5"/>"#).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
