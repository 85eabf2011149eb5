//! Truncated random walks, uniform-by-weight or Node2vec-biased.
//!
//! Both walk kinds go through [`WalkSampler`], so with `p = q = 1` a Node2vec
//! sampler consumes exactly the same random numbers as the uniform one and
//! produces identical walks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alias::AliasTable;
use crate::error::{HarpError, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::child_rng;

/// Flat storage for a set of walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    walk_length: usize,
    walks_per_node: usize,
    tokens: Vec<u32>,
    offsets: Vec<usize>,
}

impl WalkCorpus {
    pub fn from_walks(walk_length: usize, walks_per_node: usize, walks: &[Vec<u32>]) -> Self {
        let mut corpus = WalkCorpus {
            walk_length,
            walks_per_node,
            tokens: Vec::new(),
            offsets: vec![0],
        };
        for w in walks {
            corpus.tokens.extend_from_slice(w);
            corpus.offsets.push(corpus.tokens.len());
        }
        corpus
    }

    pub fn walk_length(&self) -> usize {
        self.walk_length
    }

    /// Complete rounds of walks (one walk per start node each).
    pub fn walks_per_node(&self) -> usize {
        self.walks_per_node
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn walk(&self, i: usize) -> &[u32] {
        &self.tokens[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |i| self.walk(i))
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Occurrences of each node id `< n` in the corpus.
    pub fn frequencies(&self, n: usize) -> Vec<u64> {
        let mut f = vec![0u64; n];
        for &t in &self.tokens {
            f[t as usize] += 1;
        }
        f
    }

    /// Checks that consecutive tokens are adjacent in `g`.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        self.iter().all(|w| {
            w.iter().all(|&u| (u as usize) < g.node_count())
                && w.windows(2).all(|p| g.has_edge(p[0] as usize, p[1] as usize))
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Bias {
    inv_p: f64,
    inv_q: f64,
    max: f64,
}

/// Per-node alias tables plus optional second-order bias.
#[derive(Debug, Clone)]
pub struct WalkSampler<'g> {
    graph: &'g Graph,
    tables: Vec<Option<AliasTable>>,
    bias: Option<Bias>,
}

impl<'g> WalkSampler<'g> {
    /// First-order walks; the next step is drawn proportionally to edge weight.
    pub fn uniform(graph: &'g Graph) -> Self {
        let tables = (0..graph.node_count())
            .map(|u| {
                let w = graph.neighbor_weights(u);
                (!w.is_empty()).then(|| AliasTable::new(w).expect("edge weights are positive"))
            })
            .collect();
        WalkSampler {
            graph,
            tables,
            bias: None,
        }
    }

    /// Second-order walks with return parameter `p` and in-out parameter `q`.
    ///
    /// The unnormalized weight of `prev -> cur -> next` is `w(cur, next)`
    /// times `1/p` if `next == prev`, `1` if `next` neighbors `prev`, and `1/q`
    /// otherwise. Steps are drawn by rejection against the first-order table.
    pub fn node2vec(graph: &'g Graph, p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
            return Err(HarpError::invalid(format!(
                "p and q must be positive, got p={p}, q={q}"
            )));
        }
        let mut s = Self::uniform(graph);
        let (inv_p, inv_q) = (1.0 / p, 1.0 / q);
        if inv_p != 1.0 || inv_q != 1.0 {
            s.bias = Some(Bias {
                inv_p,
                inv_q,
                max: inv_p.max(inv_q).max(1.0),
            });
        }
        Ok(s)
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    /// Draws the node after `cur`, given the previous node. `None` when `cur`
    /// has no neighbors.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, prev: Option<NodeId>, cur: NodeId, rng: &mut R) -> Option<NodeId> {
        let table = self.tables[cur].as_ref()?;
        let nbrs = self.graph.neighbors(cur);
        let (Some(bias), Some(prev)) = (self.bias, prev) else {
            return Some(nbrs[table.sample(rng)]);
        };
        loop {
            let next = nbrs[table.sample(rng)];
            let factor = if next == prev {
                bias.inv_p
            } else if self.graph.has_edge(next, prev) {
                1.0
            } else {
                bias.inv_q
            };
            if rng.random::<f64>() * bias.max < factor {
                return Some(next);
            }
        }
    }

    /// One walk of at most `len` nodes starting at `start`.
    pub fn walk_into<R: Rng + ?Sized>(&self, start: NodeId, len: usize, rng: &mut R, out: &mut Vec<u32>) {
        if len == 0 {
            return;
        }
        out.push(start as u32);
        let (mut prev, mut cur) = (None, start);
        for _ in 1..len {
            match self.step(prev, cur, rng) {
                Some(next) => {
                    out.push(next as u32);
                    prev = Some(cur);
                    cur = next;
                }
                None => break,
            }
        }
    }

    /// `total_walks` walks of length `len`, generated in rounds: each round
    /// visits every node once in a freshly shuffled order, and the final round
    /// may be partial. Round `r` draws from sub-stream `r` of `seed`, so the
    /// result does not depend on `threads`.
    pub fn generate(&self, total_walks: u64, len: usize, seed: u64, threads: usize) -> WalkCorpus {
        let n = self.graph.node_count();
        if n == 0 || total_walks == 0 {
            return WalkCorpus::from_walks(len, 0, &[]);
        }
        let full = (total_walks / n as u64) as usize;
        let rem = (total_walks % n as u64) as usize;
        let rounds: Vec<Round> = (0..full)
            .map(|r| Round {
                index: r,
                walks: n,
                cap: None,
            })
            .chain((rem > 0).then_some(Round {
                index: full,
                walks: rem,
                cap: None,
            }))
            .collect();
        self.generate_rounds(&rounds, full, len, seed, threads)
    }

    /// Walks holding exactly `tokens` positions. Full rounds are drawn as in
    /// [`generate`](Self::generate); the last round stops, mid-walk if needed,
    /// once the count is reached.
    pub fn generate_tokens(&self, tokens: u64, len: usize, seed: u64, threads: usize) -> WalkCorpus {
        let per_round = walk_round_tokens(self.graph, len);
        if per_round == 0 || tokens == 0 {
            return WalkCorpus::from_walks(len, 0, &[]);
        }
        let n = self.graph.node_count();
        let full = (tokens / per_round) as usize;
        let rem = (tokens % per_round) as usize;
        let rounds: Vec<Round> = (0..full)
            .map(|r| Round {
                index: r,
                walks: n,
                cap: None,
            })
            .chain((rem > 0).then_some(Round {
                index: full,
                walks: n,
                cap: Some(rem),
            }))
            .collect();
        self.generate_rounds(&rounds, full, len, seed, threads)
    }

    fn generate_rounds(&self, rounds: &[Round], full: usize, len: usize, seed: u64, threads: usize) -> WalkCorpus {
        let n = self.graph.node_count();
        let run_round = |round: Round| -> (Vec<u32>, Vec<usize>) {
            let mut rng = child_rng(seed, round.index as u64);
            let mut order: Vec<NodeId> = (0..n).collect();
            order.shuffle(&mut rng);
            let cap = round.cap.unwrap_or(usize::MAX);
            let mut tokens = Vec::with_capacity(round.walks * len);
            let mut lens = Vec::with_capacity(round.walks);
            for &start in &order[..round.walks] {
                if tokens.len() >= cap {
                    break;
                }
                let before = tokens.len();
                self.walk_into(start, len, &mut rng, &mut tokens);
                tokens.truncate(cap);
                lens.push(tokens.len() - before);
            }
            (tokens, lens)
        };

        let parts: Vec<(Vec<u32>, Vec<usize>)> = if threads <= 1 || rounds.len() == 1 {
            rounds.iter().copied().map(run_round).collect()
        } else {
            let chunk = rounds.len().div_ceil(threads);
            std::thread::scope(|s| {
                let handles: Vec<_> = rounds
                    .chunks(chunk)
                    .map(|rs| s.spawn(|| rs.iter().copied().map(run_round).collect::<Vec<_>>()))
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("walk worker panicked"))
                    .collect()
            })
        };

        let walks: usize = parts.iter().map(|p| p.1.len()).sum();
        let mut corpus = WalkCorpus {
            walk_length: len,
            walks_per_node: full,
            tokens: Vec::with_capacity(parts.iter().map(|p| p.0.len()).sum()),
            offsets: Vec::with_capacity(walks + 1),
        };
        corpus.offsets.push(0);
        for (tokens, lens) in parts {
            let mut base = corpus.tokens.len();
            corpus.tokens.extend_from_slice(&tokens);
            for l in lens {
                base += l;
                corpus.offsets.push(base);
            }
        }
        corpus
    }
}

#[derive(Debug, Clone, Copy)]
struct Round {
    index: usize,
    walks: usize,
    cap: Option<usize>,
}

/// Tokens in one round of walks of length `len` from every node. Walks stop
/// early only at isolated nodes, which contribute a single token.
pub fn walk_round_tokens(g: &Graph, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    (0..g.node_count())
        .map(|u| if g.degree(u) > 0 { len as u64 } else { 1 })
        .sum()
}

/// `walks_per_node` weighted random walks of length `walk_length` from every node.
pub fn random_walks(g: &Graph, walks_per_node: usize, walk_length: usize, seed: u64) -> WalkCorpus {
    WalkSampler::uniform(g).generate((walks_per_node * g.node_count()) as u64, walk_length, seed, 1)
}

/// Node2vec-biased counterpart of [`random_walks`].
pub fn node2vec_walks(
    g: &Graph,
    walks_per_node: usize,
    walk_length: usize,
    p: f64,
    q: f64,
    seed: u64,
) -> Result<WalkCorpus> {
    Ok(WalkSampler::node2vec(g, p, q)?.generate((walks_per_node * g.node_count()) as u64, walk_length, seed, 1))
}
