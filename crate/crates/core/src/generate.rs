//! Synthetic graph generators. All generators are deterministic given a seed.

use rand::Rng;

use crate::error::{HarpError, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::labels::LabelSet;
use crate::rng::rng_from_seed;

/// Number of Bernoulli(p) failures before the next success.
fn geometric_skip<R: Rng>(rng: &mut R, log_q: f64) -> u64 {
    let r: f64 = rng.random();
    // 1 - r is in (0, 1]
    ((1.0 - r).ln() / log_q).floor() as u64
}

/// Erdős–Rényi `G(n, p)` with `p = avg_degree / (n - 1)` and unit weights.
///
/// Uses geometric skipping over the pair sequence, so it runs in
/// `O(n + m)` time.
pub fn erdos_renyi(n: usize, avg_degree: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(HarpError::invalid("n must be at least 1"));
    }
    if !(avg_degree >= 0.0 && avg_degree.is_finite()) {
        return Err(HarpError::invalid(format!("avg_degree must be >= 0, got {avg_degree}")));
    }
    if n == 1 {
        return Ok(Graph::empty(1));
    }
    if avg_degree > (n - 1) as f64 {
        return Err(HarpError::invalid(format!(
            "avg_degree {avg_degree} is not achievable with {n} nodes"
        )));
    }
    let p = avg_degree / (n - 1) as f64;
    let mut rng = rng_from_seed(seed);
    let mut b = GraphBuilder::with_capacity(n, (p * (n * (n - 1)) as f64 / 2.0) as usize);
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                b.add_edge(v, w, 1.0);
            }
        }
        return Ok(b.build());
    }
    if p <= 0.0 {
        return Ok(b.build());
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, 0u64);
    let mut first = true;
    while v < n {
        let skip = geometric_skip(&mut rng, log_q);
        w = if first { skip } else { w + 1 + skip };
        first = false;
        while w >= v as u64 && v < n {
            w -= v as u64;
            v += 1;
        }
        if v < n {
            b.add_edge(v, w as usize, 1.0);
        }
    }
    Ok(b.build())
}

/// Barabási–Albert preferential attachment. Starts from a clique on
/// `m + 1` nodes; every later node attaches to `m` distinct existing nodes
/// chosen proportionally to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n <= m {
        return Err(HarpError::invalid(format!("need n > m >= 1, got n={n}, m={m}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut b = GraphBuilder::with_capacity(n, n * m);
    // every edge endpoint, so uniform picks are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * m);
    for u in 0..=m {
        for v in 0..u {
            b.add_edge(u, v, 1.0);
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for u in (m + 1)..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            b.add_edge(u, t, 1.0);
            endpoints.push(u);
            endpoints.push(t);
        }
    }
    Ok(b.build())
}

/// Ring lattice: node `i` is joined to the `k` nearest nodes on each side.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph> {
    if n < 3 || k == 0 || 2 * k >= n {
        return Err(HarpError::invalid(format!(
            "need n >= 3 and 1 <= k < n/2, got n={n}, k={k}"
        )));
    }
    let mut b = GraphBuilder::with_capacity(n, n * k);
    for i in 0..n {
        for j in 1..=k {
            b.add_edge(i, (i + j) % n, 1.0);
        }
    }
    Ok(b.build())
}

/// `rows x cols` 4-neighbor grid; node `(r, c)` has id `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(HarpError::invalid("grid dimensions must be positive"));
    }
    let mut b = GraphBuilder::with_capacity(rows * cols, 2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                b.add_edge(u, u + 1, 1.0);
            }
            if r + 1 < rows {
                b.add_edge(u, u + cols, 1.0);
            }
        }
    }
    Ok(b.build())
}

/// Planted-partition graph with `communities` nearly equal blocks.
///
/// A node has `avg_degree` expected neighbors, a `mixing` fraction of which
/// lie outside its own block. Returns the graph and the block labels.
pub fn planted_partition(
    n: usize,
    communities: usize,
    avg_degree: f64,
    mixing: f64,
    seed: u64,
) -> Result<(Graph, LabelSet)> {
    if communities < 2 || n < 2 * communities {
        return Err(HarpError::invalid("need at least 2 communities of 2 nodes"));
    }
    if !(0.0..=1.0).contains(&mixing) || avg_degree.is_nan() || avg_degree <= 0.0 {
        return Err(HarpError::invalid("mixing must be in [0, 1] and avg_degree > 0"));
    }
    let mut starts = Vec::with_capacity(communities + 1);
    for c in 0..=communities {
        starts.push(c * n / communities);
    }
    let block_of = |u: usize| starts.partition_point(|&s| s <= u) - 1;
    let mut rng = rng_from_seed(seed);
    let mut b = GraphBuilder::new(n);

    for c in 0..communities {
        let (lo, hi) = (starts[c], starts[c + 1]);
        let size = hi - lo;
        let p_in = ((1.0 - mixing) * avg_degree / (size - 1) as f64).min(1.0);
        let pairs = (size * (size - 1) / 2) as u64;
        for_each_bernoulli(&mut rng, pairs, p_in, |idx| {
            let (i, j) = unrank_pair(idx);
            b.add_edge(lo + i, lo + j, 1.0);
        });
        for d in (c + 1)..communities {
            let (lo2, hi2) = (starts[d], starts[d + 1]);
            let other = n - size;
            let p_out = (mixing * avg_degree / other as f64).min(1.0);
            let width = (hi2 - lo2) as u64;
            for_each_bernoulli(&mut rng, size as u64 * width, p_out, |idx| {
                b.add_edge(lo + (idx / width) as usize, lo2 + (idx % width) as usize, 1.0);
            });
        }
    }
    let labels = LabelSet::from_pairs(n, communities, (0..n).map(|u| (u, block_of(u))));
    Ok((b.build(), labels))
}

/// Calls `f(i)` for each success index of `count` Bernoulli(p) trials.
fn for_each_bernoulli<R: Rng>(rng: &mut R, count: u64, p: f64, mut f: impl FnMut(u64)) {
    if p <= 0.0 || count == 0 {
        return;
    }
    if p >= 1.0 {
        (0..count).for_each(f);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx = geometric_skip(rng, log_q);
    while idx < count {
        f(idx);
        idx = idx.saturating_add(1 + geometric_skip(rng, log_q));
    }
}

/// Maps a linear index to the pair `(i, j)`, `i < j`, in the order
/// (0,1), (0,2), (1,2), (0,3), ...
fn unrank_pair(idx: u64) -> (usize, usize) {
    let mut j = ((((8 * idx + 1) as f64).sqrt() + 1.0) / 2.0).floor() as u64;
    while j * (j - 1) / 2 > idx {
        j -= 1;
    }
    while (j + 1) * j / 2 <= idx {
        j += 1;
    }
    let i = idx - j * (j - 1) / 2;
    (i as usize, j as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_single_node_is_empty() {
        let g = erdos_renyi(1, 10.0, 3).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn er_rejects_unreachable_degree() {
        assert!(erdos_renyi(10, 10.0, 0).is_err());
        assert!(erdos_renyi(10, -1.0, 0).is_err());
        assert!(erdos_renyi(0, 1.0, 0).is_err());
        assert_eq!(erdos_renyi(5, 4.0, 0).unwrap().edge_count(), 10);
    }

    #[test]
    fn er_small_mean_degree() {
        let g = erdos_renyi(100, 10.0, 42).unwrap();
        let mean = 2.0 * g.edge_count() as f64 / 100.0;
        assert!((8.0..=12.0).contains(&mean), "mean degree {mean}");
    }

    #[test]
    fn er_edge_count_concentrates() {
        let g = erdos_renyi(10_000, 10.0, 1).unwrap();
        let m = g.edge_count() as f64;
        assert!((m - 50_000.0).abs() <= 2_500.0, "edges {m}");
    }

    #[test]
    fn er_is_seed_deterministic() {
        assert_eq!(erdos_renyi(500, 6.0, 9).unwrap(), erdos_renyi(500, 6.0, 9).unwrap());
        assert_ne!(erdos_renyi(500, 6.0, 9).unwrap(), erdos_renyi(500, 6.0, 10).unwrap());
    }

    #[test]
    fn unrank_matches_enumeration() {
        let mut idx = 0;
        for j in 1..40 {
            for i in 0..j {
                assert_eq!(unrank_pair(idx), (i, j));
                idx += 1;
            }
        }
    }

    #[test]
    fn ba_degree_sum() {
        let g = barabasi_albert(1000, 3, 5).unwrap();
        assert_eq!(g.edge_count(), 6 + 996 * 3);
        assert!(g.is_connected());
    }

    #[test]
    fn lattices() {
        let r = ring_lattice(10, 2).unwrap();
        assert_eq!(r.edge_count(), 20);
        assert!((0..10).all(|u| r.degree(u) == 4));
        let g = grid(3, 4).unwrap();
        assert_eq!(g.edge_count(), 3 * 3 + 2 * 4);
    }

    #[test]
    fn planted_partition_mixing() {
        let (g, labels) = planted_partition(3000, 6, 10.0, 0.2, 11).unwrap();
        let mut inside = 0usize;
        for (u, v, _) in g.edges() {
            if labels.labels_of(u) == labels.labels_of(v) {
                inside += 1;
            }
        }
        let frac_out = 1.0 - inside as f64 / g.edge_count() as f64;
        assert!((frac_out - 0.2).abs() < 0.02, "mixing {frac_out}");
        let mean = 2.0 * g.edge_count() as f64 / 3000.0;
        assert!((mean - 10.0).abs() < 0.5, "degree {mean}");
        assert_eq!(labels.label_count(), 6);
    }
}
