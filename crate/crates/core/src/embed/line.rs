//! First-order LINE: edges sampled proportionally to weight, logistic loss on
//! `sigmoid(phi_u . phi_v)` with negative sampling, one shared embedding matrix.

use super::hogwild::SharedRows;
use super::noise::noise_distribution;
use super::{axpy, dot, initial_rows, sigmoid, EmbeddingMatrix, LrSchedule, TrainConfig};
use crate::alias::AliasTable;
use crate::error::{HarpError, Result};
use crate::graph::Graph;
use crate::rng::child_rng;

/// `line_iterations` passes of `|E|` edge samples each.
pub fn train_line_first_order(g: &Graph, init: Option<&EmbeddingMatrix>, cfg: &TrainConfig) -> Result<EmbeddingMatrix> {
    let samples = (cfg.line_iterations * g.edge_count()) as u64;
    Ok(train_line_with_samples(g, init, cfg, samples)?.0)
}

/// Runs exactly `samples` edge samples; returns the embedding and the number
/// of samples taken.
///
/// For a sampled arc `(u, v)` the target `v` gets a positive update and
/// `negatives` noise nodes get negative updates (draws equal to `u` or `v`
/// are skipped); `u` accumulates the gradient and is updated last.
pub(crate) fn train_line_with_samples(
    g: &Graph,
    init: Option<&EmbeddingMatrix>,
    cfg: &TrainConfig,
    samples: u64,
) -> Result<(EmbeddingMatrix, u64)> {
    if g.edge_count() == 0 {
        return Err(HarpError::EdgelessGraph);
    }
    let n = g.node_count();
    let dim = cfg.dim;
    let mut emb = initial_rows(n, cfg, init)?;

    // each undirected edge appears as two arcs, so orientation is random
    let mut arc_src: Vec<u32> = Vec::with_capacity(2 * g.edge_count());
    let mut arc_dst: Vec<u32> = Vec::with_capacity(2 * g.edge_count());
    let mut arc_w: Vec<f64> = Vec::with_capacity(2 * g.edge_count());
    for u in 0..n {
        for (v, w) in g.adjacency(u) {
            arc_src.push(u as u32);
            arc_dst.push(v as u32);
            arc_w.push(w);
        }
    }
    let arcs = AliasTable::new(&arc_w)?;
    let noise = noise_distribution(g).expect("graph has edges");
    let schedule = LrSchedule::new(cfg.lr_start, cfg.lr_end, samples);

    let threads = (cfg.threads.max(1) as u64).min(samples.max(1)) as usize;
    let rows = SharedRows::new(emb.as_mut_slice(), dim);
    let worker = |w: usize, count: u64| -> Result<()> {
        let mut rng = child_rng(cfg.seed, 200 + w as u64);
        let mut err = vec![0.0; dim];
        for s in 0..count {
            let lr = if threads == 1 {
                schedule.at(s)
            } else {
                schedule.at_fraction(s as f64 / count as f64)
            };
            let a = arcs.sample(&mut rng);
            let (u, v) = (arc_src[a] as usize, arc_dst[a] as usize);
            err.fill(0.0);
            for d in 0..=cfg.negatives {
                let (target, label) = if d == 0 {
                    (v, 1.0)
                } else {
                    let t = noise.sample(&mut rng);
                    if t == u || t == v {
                        continue;
                    }
                    (t, 0.0)
                };
                // SAFETY: target != u, and each view is dropped before the next
                let (src, tgt) = unsafe { (rows.row(u), rows.row(target)) };
                let gcoef = (label - sigmoid(dot(src, tgt))) * lr;
                if !gcoef.is_finite() {
                    return Err(HarpError::Divergence { lr });
                }
                axpy(gcoef, tgt, &mut err);
                axpy(gcoef, src, tgt);
            }
            // SAFETY: single view of row u
            axpy(1.0, &err, unsafe { rows.row(u) });
        }
        Ok(())
    };

    if threads == 1 {
        worker(0, samples)?;
    } else {
        let per = samples / threads as u64;
        let extra = samples % threads as u64;
        std::thread::scope(|s| -> Result<()> {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let count = per + u64::from((w as u64) < extra);
                    let worker = &worker;
                    s.spawn(move || worker(w, count))
                })
                .collect();
            for h in handles {
                h.join().expect("LINE worker panicked")?;
            }
            Ok(())
        })?;
    }
    if !emb.is_finite() {
        return Err(HarpError::Divergence { lr: cfg.lr_start });
    }
    Ok((emb, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::erdos_renyi;

    fn cfg(dim: usize) -> TrainConfig {
        TrainConfig {
            dim,
            ..TrainConfig::for_method(super::super::Method::Line)
        }
    }

    #[test]
    fn edgeless_is_an_error() {
        assert!(matches!(
            train_line_first_order(&Graph::empty(4), None, &cfg(8)),
            Err(HarpError::EdgelessGraph)
        ));
    }

    #[test]
    fn single_edge_score_approaches_one() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)]);
        let mut c = cfg(8);
        c.line_iterations = 2000;
        let emb = train_line_first_order(&g, None, &c).unwrap();
        let s = sigmoid(dot(emb.row(0), emb.row(1)));
        assert!(s > 0.9, "score {s}");
    }

    #[test]
    fn sample_count_and_determinism() {
        let g = erdos_renyi(100, 6.0, 1).unwrap();
        let c = cfg(16);
        let (a, n) = train_line_with_samples(&g, None, &c, 12_345).unwrap();
        let (b, _) = train_line_with_samples(&g, None, &c, 12_345).unwrap();
        assert_eq!(n, 12_345);
        assert_eq!(a, b);
        let mut c4 = c.clone();
        c4.threads = 4;
        let (m, _) = train_line_with_samples(&g, None, &c4, 12_345).unwrap();
        assert!(m.is_finite());
    }

    #[test]
    fn zero_rate_keeps_warm_start() {
        let g = erdos_renyi(50, 4.0, 1).unwrap();
        let mut c = cfg(4);
        c.lr_start = 0.0;
        c.lr_end = 0.0;
        let init = EmbeddingMatrix::random_init(50, 4, &mut crate::rng::rng_from_seed(1));
        assert_eq!(train_line_first_order(&g, Some(&init), &c).unwrap(), init);
    }
}
