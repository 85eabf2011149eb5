use crate::embed::EmbeddingMatrix;
use crate::error::{HarpError, Result};
use crate::graph::Graph;

/// The `k` highest-scoring labels, ties going to the lower label id.
pub fn top_k(scores: &[f64], k: usize) -> Result<Vec<usize>> {
    if k > scores.len() {
        return Err(HarpError::invalid(format!(
            "cannot predict {k} labels out of {}",
            scores.len()
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    Ok(order)
}

/// Per-node top-k prediction where `k[i]` is the size of node `i`'s true label set.
pub fn predict_multilabel(scores: &[Vec<f64>], k: &[usize]) -> Result<Vec<Vec<usize>>> {
    if scores.len() != k.len() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("{} label counts", scores.len()),
            actual: format!("{}", k.len()),
        });
    }
    scores.iter().zip(k).map(|(s, &k)| top_k(s, k)).collect()
}

/// Unweighted mean of per-label F1. A label with no true positives, false
/// positives or false negatives scores 0.
pub fn macro_f1(predicted: &[Vec<usize>], truth: &[Vec<usize>], label_count: usize) -> f64 {
    assert_eq!(predicted.len(), truth.len(), "prediction and truth lengths differ");
    if label_count == 0 {
        return 0.0;
    }
    let mut tp = vec![0u64; label_count];
    let mut fp = vec![0u64; label_count];
    let mut fn_ = vec![0u64; label_count];
    for (p, t) in predicted.iter().zip(truth) {
        for &l in p {
            if t.contains(&l) {
                tp[l] += 1;
            } else {
                fp[l] += 1;
            }
        }
        for &l in t {
            if !p.contains(&l) {
                fn_[l] += 1;
            }
        }
    }
    let sum: f64 = (0..label_count)
        .map(|l| {
            let denom = 2 * tp[l] + fp[l] + fn_[l];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[l] as f64 / denom as f64
            }
        })
        .sum();
    sum / label_count as f64
}

/// Ranks starting at 1, ties sharing their average rank.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Spearman rank correlation; 0 when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spearman inputs differ in length");
    if a.len() < 2 {
        return 0.0;
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Spearman correlation between hop distance and embedding Euclidean
/// distance over all connected node pairs.
pub fn distance_correlation(g: &Graph, emb: &EmbeddingMatrix) -> Result<f64> {
    if emb.rows() != g.node_count() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("{} rows", g.node_count()),
            actual: format!("{}", emb.rows()),
        });
    }
    let mut hops = Vec::new();
    let mut dists = Vec::new();
    for u in 0..g.node_count() {
        let bfs = g.bfs_distances(u);
        for (v, &hop) in bfs.iter().enumerate().skip(u + 1) {
            if hop == usize::MAX {
                continue;
            }
            hops.push(hop as f64);
            let d2: f64 = emb.row(u).iter().zip(emb.row(v)).map(|(a, b)| (a - b) * (a - b)).sum();
            dists.push(d2.sqrt());
        }
    }
    Ok(spearman(&hops, &dists))
}
