//! Skip-gram over walk corpora, trained with hierarchical softmax or negative
//! sampling.

use rand::Rng;

use super::hogwild::SharedRows;
use super::huffman::{build_huffman_tree, HuffmanTree};
use super::noise::noise_distribution;
use super::walks::WalkCorpus;
use super::{
    axpy, dot, initial_rows, sigmoid, sigmoid_and_nll, EmbedStats, EmbeddingMatrix, LrSchedule, Objective, TrainConfig,
};
use crate::alias::AliasTable;
use crate::error::{HarpError, Result};
use crate::graph::Graph;
use crate::rng::child_rng;

/// Input embeddings plus the objective's output-side parameters: one row per
/// Huffman internal node, or one row per node for negative sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipGramModel {
    pub input: EmbeddingMatrix,
    pub output: EmbeddingMatrix,
}

impl SkipGramModel {
    /// Wraps `input` with zeroed output parameters for `objective`.
    pub fn new(input: EmbeddingMatrix, objective: Objective) -> Self {
        let n = input.rows();
        let out_rows = match objective {
            Objective::HierarchicalSoftmax => n.saturating_sub(1),
            Objective::NegativeSampling => n,
        };
        let output = EmbeddingMatrix::zeros(out_rows, input.dim());
        SkipGramModel { input, output }
    }

    /// `P(leaf | center)` under hierarchical softmax.
    pub fn leaf_probability(&self, tree: &HuffmanTree, center: usize, leaf: usize) -> f64 {
        let c = self.input.row(center);
        tree.code(leaf)
            .iter()
            .zip(tree.path(leaf))
            .map(|(&bit, &node)| {
                let x = dot(c, self.output.row(node as usize));
                if bit == 0 {
                    sigmoid(x)
                } else {
                    sigmoid(-x)
                }
            })
            .product()
    }
}

/// What a single pair update needs besides the parameters.
#[derive(Debug, Clone, Copy)]
pub enum StepContext<'a> {
    Hierarchical(&'a HuffmanTree),
    Negative { noise: &'a AliasTable, negatives: usize },
}

/// One SGD step on the pair `(center, context)`; returns the pair loss at
/// the pre-update parameters.
///
/// Hierarchical softmax sums the logistic loss along `context`'s Huffman
/// path. Negative sampling uses one positive and `negatives` noise draws
/// (draws equal to `context` are skipped).
pub fn skipgram_pair_step<R: Rng + ?Sized>(
    model: &mut SkipGramModel,
    center: usize,
    context: usize,
    lr: f64,
    ctx: StepContext<'_>,
    rng: &mut R,
) -> Result<f64> {
    let dim = model.input.dim();
    let mut neu1e = vec![0.0; dim];
    let output = SharedRows::new(model.output.as_mut_slice(), dim);
    let center_row = model.input.row_mut(center);
    match ctx {
        StepContext::Hierarchical(tree) => hs_update::<true>(
            center_row,
            &output,
            tree.code(context),
            tree.path(context),
            lr,
            &mut neu1e,
        ),
        StepContext::Negative { noise, negatives } => {
            ns_update::<true, R>(center_row, &output, context, noise, negatives, lr, rng, &mut neu1e)
        }
    }
}

#[inline]
fn hs_update<const LOSS: bool>(
    center: &mut [f64],
    output: &SharedRows<'_>,
    code: &[u8],
    path: &[u32],
    lr: f64,
    neu1e: &mut [f64],
) -> Result<f64> {
    neu1e.fill(0.0);
    let mut loss = 0.0;
    for (&bit, &node) in code.iter().zip(path) {
        // SAFETY: output rows are disjoint from `center`, one view at a time
        let out = unsafe { output.row(node as usize) };
        let x = dot(center, out);
        let label = 1.0 - bit as f64;
        let s = if LOSS {
            let (s, nll) = sigmoid_and_nll(if bit == 0 { x } else { -x });
            loss += nll;
            if bit == 0 {
                s
            } else {
                1.0 - s
            }
        } else {
            sigmoid(x)
        };
        let g = (label - s) * lr;
        if !g.is_finite() {
            return Err(HarpError::Divergence { lr });
        }
        axpy(g, out, neu1e);
        axpy(g, center, out);
    }
    axpy(1.0, neu1e, center);
    Ok(loss)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn ns_update<const LOSS: bool, R: Rng + ?Sized>(
    center: &mut [f64],
    output: &SharedRows<'_>,
    context: usize,
    noise: &AliasTable,
    negatives: usize,
    lr: f64,
    rng: &mut R,
    neu1e: &mut [f64],
) -> Result<f64> {
    neu1e.fill(0.0);
    let mut loss = 0.0;
    for d in 0..=negatives {
        let (target, label) = if d == 0 {
            (context, 1.0)
        } else {
            let t = noise.sample(rng);
            if t == context {
                continue;
            }
            (t, 0.0)
        };
        // SAFETY: output rows are disjoint from `center`, one view at a time
        let out = unsafe { output.row(target) };
        let x = dot(center, out);
        let s = if LOSS {
            let (s, nll) = sigmoid_and_nll(if label > 0.5 { x } else { -x });
            loss += nll;
            if label > 0.5 {
                s
            } else {
                1.0 - s
            }
        } else {
            sigmoid(x)
        };
        let g = (label - s) * lr;
        if !g.is_finite() {
            return Err(HarpError::Divergence { lr });
        }
        axpy(g, out, neu1e);
        axpy(g, center, out);
    }
    axpy(1.0, neu1e, center);
    Ok(loss)
}

/// Number of (center, context) pairs a fixed window of `window` produces.
pub fn count_pairs(corpus: &WalkCorpus, window: usize) -> u64 {
    corpus
        .iter()
        .map(|w| {
            let len = w.len();
            (0..len)
                .map(|i| (len - 1).min(i + window) - i.saturating_sub(window))
                .sum::<usize>() as u64
        })
        .sum()
}

#[derive(Clone, Copy)]
enum Kernel<'a> {
    Hierarchical(&'a HuffmanTree),
    Negative(&'a AliasTable, usize),
}

/// Trains skip-gram on `corpus` (drawn from `g`) and returns the input
/// embeddings.
///
/// Every position of every walk is a center; contexts are all positions
/// within `cfg.window` on either side. The learning rate decays linearly from
/// `lr_start` to `lr_end` over all pairs. With `threads > 1` the walks are
/// split into contiguous shares trained concurrently without locks.
pub fn train_skipgram(
    corpus: &WalkCorpus,
    g: &Graph,
    init: Option<&EmbeddingMatrix>,
    cfg: &TrainConfig,
    objective: Objective,
) -> Result<(EmbeddingMatrix, EmbedStats)> {
    let n = g.node_count();
    let dim = cfg.dim;
    let mut model = SkipGramModel::new(initial_rows(n, cfg, init)?, objective);
    let stats = EmbedStats {
        walk_tokens: corpus.token_count() as u64,
        pairs: count_pairs(corpus, cfg.window),
        ..EmbedStats::default()
    };

    let tree;
    let noise;
    let kernel = match objective {
        Objective::HierarchicalSoftmax => {
            if n < 2 {
                return Ok((model.input, stats));
            }
            tree = build_huffman_tree(&corpus.frequencies(n));
            Kernel::Hierarchical(&tree)
        }
        Objective::NegativeSampling => match noise_distribution(g) {
            Some(t) => {
                noise = t;
                Kernel::Negative(&noise, cfg.negatives)
            }
            // edgeless: every walk is a singleton and there is nothing to train
            None => return Ok((model.input, stats)),
        },
    };

    let schedule = LrSchedule::new(cfg.lr_start, cfg.lr_end, stats.pairs);
    let threads = cfg.threads.max(1).min(corpus.len().max(1));
    let input = SharedRows::new(model.input.as_mut_slice(), dim);
    let output = SharedRows::new(model.output.as_mut_slice(), dim);

    let worker = |w: usize, walks: std::ops::Range<usize>| -> Result<()> {
        let mut rng = child_rng(cfg.seed, 100 + w as u64);
        let mut neu1e = vec![0.0; dim];
        let share = if threads == 1 {
            stats.pairs
        } else {
            corpus_pairs_in(corpus, walks.clone(), cfg.window)
        };
        let mut done = 0u64;
        for wi in walks {
            let walk = corpus.walk(wi);
            let len = walk.len();
            for i in 0..len {
                // SAFETY: input and output are distinct buffers
                let center = unsafe { input.row(walk[i] as usize) };
                let lo = i.saturating_sub(cfg.window);
                let hi = (len - 1).min(i + cfg.window);
                for (j, &tok) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let lr = if threads == 1 {
                        schedule.at(done)
                    } else {
                        schedule.at_fraction(done as f64 / share.max(1) as f64)
                    };
                    let context = tok as usize;
                    match kernel {
                        Kernel::Hierarchical(t) => {
                            hs_update::<false>(center, &output, t.code(context), t.path(context), lr, &mut neu1e)?;
                        }
                        Kernel::Negative(noise, k) => {
                            ns_update::<false, _>(center, &output, context, noise, k, lr, &mut rng, &mut neu1e)?;
                        }
                    }
                    done += 1;
                }
            }
        }
        Ok(())
    };

    if threads == 1 {
        worker(0, 0..corpus.len())?;
    } else {
        let chunk = corpus.len().div_ceil(threads);
        std::thread::scope(|s| -> Result<()> {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let range = (w * chunk).min(corpus.len())..((w + 1) * chunk).min(corpus.len());
                    let worker = &worker;
                    s.spawn(move || worker(w, range))
                })
                .collect();
            for h in handles {
                h.join().expect("training worker panicked")?;
            }
            Ok(())
        })?;
    }
    if !model.input.is_finite() {
        return Err(HarpError::Divergence { lr: cfg.lr_start });
    }
    Ok((model.input, stats))
}

fn corpus_pairs_in(corpus: &WalkCorpus, walks: std::ops::Range<usize>, window: usize) -> u64 {
    walks
        .map(|i| {
            let len = corpus.walk(i).len();
            (0..len)
                .map(|p| (len - 1).min(p + window) - p.saturating_sub(window))
                .sum::<usize>() as u64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::walks::random_walks;
    use crate::generate::erdos_renyi;
    use crate::rng::rng_from_seed;

    #[test]
    fn window_one_pairs() {
        let corpus = WalkCorpus::from_walks(3, 1, &[vec![0, 1, 2]]);
        assert_eq!(count_pairs(&corpus, 1), 4);
        assert_eq!(count_pairs(&corpus, 5), 6);
    }

    #[test]
    fn zero_learning_rate_keeps_init() {
        let g = erdos_renyi(60, 4.0, 1).unwrap();
        let corpus = random_walks(&g, 2, 8, 3);
        let mut cfg = TrainConfig {
            dim: 8,
            window: 3,
            lr_start: 0.0,
            lr_end: 0.0,
            ..TrainConfig::default()
        };
        let init = EmbeddingMatrix::random_init(60, 8, &mut rng_from_seed(4));
        for obj in [Objective::HierarchicalSoftmax, Objective::NegativeSampling] {
            let (out, _) = train_skipgram(&corpus, &g, Some(&init), &cfg, obj).unwrap();
            assert_eq!(out, init);
        }
        cfg.dim = 4;
        assert!(matches!(
            train_skipgram(&corpus, &g, Some(&init), &cfg, Objective::NegativeSampling),
            Err(HarpError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn single_threaded_is_reproducible() {
        let g = erdos_renyi(80, 5.0, 2).unwrap();
        let corpus = random_walks(&g, 3, 10, 1);
        let cfg = TrainConfig {
            dim: 16,
            window: 4,
            ..TrainConfig::default()
        };
        for obj in [Objective::HierarchicalSoftmax, Objective::NegativeSampling] {
            let a = train_skipgram(&corpus, &g, None, &cfg, obj).unwrap().0;
            let b = train_skipgram(&corpus, &g, None, &cfg, obj).unwrap().0;
            assert_eq!(a, b);
            assert!(a.is_finite());
        }
    }

    #[test]
    fn multi_threaded_stays_finite() {
        let g = erdos_renyi(200, 6.0, 2).unwrap();
        let corpus = random_walks(&g, 4, 10, 1);
        let cfg = TrainConfig {
            dim: 16,
            window: 4,
            threads: 4,
            ..TrainConfig::default()
        };
        let (emb, stats) = train_skipgram(&corpus, &g, None, &cfg, Objective::NegativeSampling).unwrap();
        assert!(emb.is_finite());
        assert_eq!(stats.pairs, count_pairs(&corpus, 4));
    }

    #[test]
    fn huge_learning_rate_is_caught_or_finite() {
        // sigmoid saturates, so even absurd rates keep values finite until overflow
        let g = Graph::from_edges(2, [(0, 1, 1.0)]);
        let corpus = random_walks(&g, 50, 10, 0);
        let cfg = TrainConfig {
            dim: 4,
            window: 2,
            lr_start: 1e300,
            lr_end: 1e300,
            ..TrainConfig::default()
        };
        match train_skipgram(&corpus, &g, None, &cfg, Objective::NegativeSampling) {
            Err(HarpError::Divergence { .. }) => {}
            Ok((emb, _)) => panic!("expected divergence, got finite={}", emb.is_finite()),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
