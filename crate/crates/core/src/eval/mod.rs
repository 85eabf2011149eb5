//! Multi-label node classification on learned embeddings.

mod logreg;
mod metrics;
mod split;
mod stats;

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use logreg::{fit_binary, train_ovr_logreg, BinaryFit, LogRegConfig, OvrClassifier};
pub use metrics::{distance_correlation, macro_f1, predict_multilabel, spearman, top_k};
pub use split::split_labeled;
pub use stats::{mean, paired_t_test, sample_std, TTest};

use crate::embed::{EmbeddingMatrix, Method};
use crate::error::{HarpError, Result};
use crate::graph::{Graph, NodeId};
use crate::labels::LabelSet;
use crate::pipeline::{baseline_embed, harp_embed, HarpConfig};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub repetitions: usize,
    pub seed: u64,
    pub logreg: LogRegConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            repetitions: 10,
            seed: 0,
            logreg: LogRegConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub ratio: f64,
    pub repetitions: usize,
    pub scores: Vec<f64>,
    pub mean: f64,
    pub seed: u64,
    pub runtime_secs: f64,
}

fn gather(emb: &EmbeddingMatrix, nodes: &[NodeId]) -> EmbeddingMatrix {
    let mut data = Vec::with_capacity(nodes.len() * emb.dim());
    for &u in nodes {
        data.extend_from_slice(emb.row(u));
    }
    EmbeddingMatrix::from_vec(nodes.len(), emb.dim(), data).expect("gathered shape")
}

/// Macro-F1 of one split: train on `train`, predict top-k on `test`.
pub fn evaluate_split(
    emb: &EmbeddingMatrix,
    labels: &LabelSet,
    train: &[NodeId],
    test: &[NodeId],
    logreg: &LogRegConfig,
) -> Result<f64> {
    let targets: Vec<Vec<usize>> = train.iter().map(|&u| labels.labels_of(u).to_vec()).collect();
    let clf = train_ovr_logreg(&gather(emb, train), &targets, labels.label_count(), logreg)?;
    let scores: Vec<Vec<f64>> = test.iter().map(|&u| clf.scores(emb.row(u))).collect();
    let k: Vec<usize> = test.iter().map(|&u| labels.labels_of(u).len()).collect();
    let predicted = predict_multilabel(&scores, &k)?;
    let truth: Vec<Vec<usize>> = test.iter().map(|&u| labels.labels_of(u).to_vec()).collect();
    Ok(macro_f1(&predicted, &truth, labels.label_count()))
}

/// Repeated split / train / predict at one labeled ratio. Repetition `r`
/// splits with a seed derived from `(cfg.seed, r)`, so two embeddings
/// evaluated with the same config see the same splits.
pub fn evaluate(
    method: &str,
    emb: &EmbeddingMatrix,
    labels: &LabelSet,
    ratio: f64,
    cfg: &EvalConfig,
) -> Result<EvaluationReport> {
    if emb.rows() < labels.node_count() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("at least {} embedding rows", labels.node_count()),
            actual: format!("{}", emb.rows()),
        });
    }
    if cfg.repetitions == 0 {
        return Err(HarpError::invalid("repetitions must be positive"));
    }
    let start = Instant::now();
    let mut scores = Vec::with_capacity(cfg.repetitions);
    for r in 0..cfg.repetitions {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, r as u64));
        let (train, test) = split_labeled(labels, ratio, &mut rng)?;
        scores.push(evaluate_split(emb, labels, &train, &test, &cfg.logreg)?);
    }
    Ok(EvaluationReport {
        method: method.to_string(),
        ratio,
        repetitions: cfg.repetitions,
        mean: mean(&scores),
        scores,
        seed: cfg.seed,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method: String,
    pub ratio: f64,
    pub baseline_mean: f64,
    pub harp_mean: f64,
    /// `(harp - baseline) / baseline * 100`.
    pub gain_pct: f64,
    pub t_statistic: f64,
    pub p_value: f64,
}

pub fn gain_pct(baseline: f64, improved: f64) -> f64 {
    if baseline == 0.0 {
        if improved == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(improved)
        }
    } else {
        (improved - baseline) / baseline * 100.0
    }
}

/// Paired comparison of two reports at the same ratio and seeds.
pub fn compare_reports(baseline: &EvaluationReport, harp: &EvaluationReport) -> Result<Comparison> {
    if baseline.ratio != harp.ratio || baseline.seed != harp.seed {
        return Err(HarpError::invalid(
            "reports were produced with different ratios or seeds",
        ));
    }
    let t = paired_t_test(&baseline.scores, &harp.scores)?;
    Ok(Comparison {
        method: baseline.method.clone(),
        ratio: baseline.ratio,
        baseline_mean: baseline.mean,
        harp_mean: harp.mean,
        gain_pct: gain_pct(baseline.mean, harp.mean),
        t_statistic: t.t,
        p_value: t.p_value,
    })
}

/// Name under which multilevel results for `method` are reported.
pub fn harp_name(method: Method) -> String {
    format!("harp({})", method.name())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub comparisons: Vec<Comparison>,
    pub reports: Vec<EvaluationReport>,
}

impl ComparisonTable {
    /// CSV with columns `method,ratio,rep,macro_f1`.
    pub fn curves_csv(&self) -> String {
        curves_csv(&self.reports)
    }

    /// CSV with one row per method and ratio.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("method,ratio,baseline_macro_f1,harp_macro_f1,gain_pct,t,p_value\n");
        for c in &self.comparisons {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.method, c.ratio, c.baseline_mean, c.harp_mean, c.gain_pct, c.t_statistic, c.p_value
            )
            .unwrap();
        }
        out
    }
}

pub fn curves_csv(reports: &[EvaluationReport]) -> String {
    let mut out = String::from("method,ratio,rep,macro_f1\n");
    for r in reports {
        for (i, s) in r.scores.iter().enumerate() {
            writeln!(out, "{},{},{},{}", r.method, r.ratio, i, s).unwrap();
        }
    }
    out
}

/// For each config: a flat baseline and a multilevel run with matched sample
/// budgets, both evaluated at every ratio on identical splits.
pub fn compare_methods(
    g: &Graph,
    labels: &LabelSet,
    configs: &[HarpConfig],
    ratios: &[f64],
    eval: &EvalConfig,
) -> Result<ComparisonTable> {
    let mut table = ComparisonTable {
        comparisons: Vec::new(),
        reports: Vec::new(),
    };
    for config in configs {
        let harp = harp_embed(g, config)?;
        let base = baseline_embed(g, config, harp.budget.total)?;
        for &ratio in ratios {
            let b = evaluate(config.method.name(), &base.embedding, labels, ratio, eval)?;
            let h = evaluate(&harp_name(config.method), &harp.embedding, labels, ratio, eval)?;
            table.comparisons.push(compare_reports(&b, &h)?);
            table.reports.push(b);
            table.reports.push(h);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::planted_partition;

    fn community_embedding(labels: &LabelSet, noise_seed: u64) -> EmbeddingMatrix {
        let mut rng = rng_from_seed(noise_seed);
        let k = labels.label_count();
        let mut m = EmbeddingMatrix::random_init(labels.node_count(), k, &mut rng);
        for u in 0..labels.node_count() {
            for &l in labels.labels_of(u) {
                m.row_mut(u)[l] += 1.0;
            }
        }
        m
    }

    #[test]
    fn structured_beats_constant() {
        let (_, labels) = planted_partition(300, 3, 8.0, 0.1, 2).unwrap();
        let cfg = EvalConfig {
            repetitions: 3,
            ..Default::default()
        };
        let good = evaluate("x", &community_embedding(&labels, 1), &labels, 0.3, &cfg).unwrap();
        let flat = EmbeddingMatrix::from_vec(300, 3, vec![0.2; 900]).unwrap();
        let bad = evaluate("x", &flat, &labels, 0.3, &cfg).unwrap();
        assert!(good.mean > 0.9, "{}", good.mean);
        assert!(bad.mean < good.mean);
        assert!(good.scores.iter().chain(&bad.scores).all(|s| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn reproducible_and_self_comparison() {
        let (_, labels) = planted_partition(120, 3, 6.0, 0.2, 4).unwrap();
        let emb = community_embedding(&labels, 3);
        let cfg = EvalConfig {
            repetitions: 4,
            seed: 11,
            ..Default::default()
        };
        let a = evaluate("m", &emb, &labels, 0.2, &cfg).unwrap();
        let b = evaluate("m", &emb, &labels, 0.2, &cfg).unwrap();
        assert_eq!(a.scores, b.scores);
        let c = compare_reports(&a, &b).unwrap();
        assert_eq!((c.gain_pct, c.p_value), (0.0, 1.0));
    }

    #[test]
    fn gain_formula() {
        assert!((gain_pct(57.29, 61.76) - 7.8).abs() < 0.05);
    }

    #[test]
    fn curves_header() {
        let r = EvaluationReport {
            method: "line".into(),
            ratio: 0.05,
            repetitions: 2,
            scores: vec![0.25, 0.5],
            mean: 0.375,
            seed: 0,
            runtime_secs: 0.0,
        };
        assert_eq!(
            curves_csv(&[r]),
            "method,ratio,rep,macro_f1\nline,0.05,0,0.25\nline,0.05,1,0.5\n"
        );
    }
}
