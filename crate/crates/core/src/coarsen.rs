//! Hybrid graph coarsening: star collapsing followed by edge collapsing,
//! repeated until the graph is small enough.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{HarpError, Result};
use crate::graph::{Graph, GraphBuilder, NodeId};
use crate::rng::rng_from_seed;

/// Total map from fine node ids to coarse node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentMap {
    parents: Vec<NodeId>,
    coarse_count: usize,
}

impl ParentMap {
    /// Validates surjectivity onto `0..coarse_count`.
    pub fn new(parents: Vec<NodeId>, coarse_count: usize) -> Result<Self> {
        let mut seen = vec![false; coarse_count];
        for &p in &parents {
            if p >= coarse_count {
                return Err(HarpError::invalid(format!(
                    "parent id {p} out of range for {coarse_count} coarse nodes"
                )));
            }
            seen[p] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(HarpError::invalid("parent map is not surjective"));
        }
        Ok(ParentMap { parents, coarse_count })
    }

    pub fn identity(n: usize) -> Self {
        ParentMap {
            parents: (0..n).collect(),
            coarse_count: n,
        }
    }

    /// Coarse ids assigned in order of first appearance over fine ids;
    /// `partner[u]` is the node `u` merges with, if any.
    fn from_partners(partner: &[Option<NodeId>]) -> Self {
        let mut parents = vec![usize::MAX; partner.len()];
        let mut next = 0;
        for u in 0..partner.len() {
            if parents[u] != usize::MAX {
                continue;
            }
            parents[u] = next;
            if let Some(v) = partner[u] {
                parents[v] = next;
            }
            next += 1;
        }
        ParentMap {
            parents,
            coarse_count: next,
        }
    }

    pub fn fine_count(&self) -> usize {
        self.parents.len()
    }

    pub fn coarse_count(&self) -> usize {
        self.coarse_count
    }

    #[inline]
    pub fn parent(&self, fine: NodeId) -> NodeId {
        self.parents[fine]
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.parents
    }

    /// Fine nodes grouped by coarse parent.
    pub fn preimages(&self) -> Vec<Vec<NodeId>> {
        let mut groups = vec![Vec::new(); self.coarse_count];
        for (u, &p) in self.parents.iter().enumerate() {
            groups[p].push(u);
        }
        groups
    }

    /// `self` followed by `next` (fine -> mid -> coarse).
    pub fn then(&self, next: &ParentMap) -> ParentMap {
        assert_eq!(self.coarse_count, next.fine_count(), "parent maps do not chain");
        ParentMap {
            parents: self.parents.iter().map(|&p| next.parent(p)).collect(),
            coarse_count: next.coarse_count,
        }
    }
}

/// Quotient graph of `g` under `pm`: parallel edges sum, intra-supernode
/// edges vanish.
pub fn contract(g: &Graph, pm: &ParentMap) -> Graph {
    let mut b = GraphBuilder::with_capacity(pm.coarse_count(), g.edge_count());
    for (u, v, w) in g.edges() {
        b.add_edge(pm.parent(u), pm.parent(v), w);
    }
    b.build()
}

/// Merges the endpoints of a random maximal matching.
///
/// Edges are scanned in shuffled order and an edge is taken whenever both
/// endpoints are still free.
pub fn edge_collapse<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> (Graph, ParentMap) {
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    edges.shuffle(rng);
    let mut partner: Vec<Option<NodeId>> = vec![None; g.node_count()];
    for (u, v) in edges {
        if partner[u].is_none() && partner[v].is_none() {
            partner[u] = Some(v);
            partner[v] = Some(u);
        }
    }
    let pm = ParentMap::from_partners(&partner);
    (contract(g, &pm), pm)
}

/// Pairs up nodes that share a hub neighbor.
///
/// Hubs are visited by decreasing degree (ties by id). Each hub's still-free
/// neighbors are shuffled and merged in consecutive pairs; an odd one out stays
/// free for later hubs. A node merges at most once per call, and a node that
/// acted as a hub is never merged afterwards.
pub fn star_collapse<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> (Graph, ParentMap) {
    let n = g.node_count();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));

    let mut partner: Vec<Option<NodeId>> = vec![None; n];
    let mut is_hub = vec![false; n];
    let mut free: Vec<NodeId> = Vec::new();
    for &hub in &order {
        if partner[hub].is_some() || g.degree(hub) < 2 {
            continue;
        }
        free.clear();
        free.extend(
            g.neighbors(hub)
                .iter()
                .copied()
                .filter(|&v| partner[v].is_none() && !is_hub[v]),
        );
        if free.len() < 2 {
            continue;
        }
        free.shuffle(rng);
        for pair in free.chunks_exact(2) {
            partner[pair[0]] = Some(pair[1]);
            partner[pair[1]] = Some(pair[0]);
        }
        is_hub[hub] = true;
    }
    let pm = ParentMap::from_partners(&partner);
    (contract(g, &pm), pm)
}

/// One hybrid coarsening step; the two parent maps are composed.
pub fn hybrid_collapse<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> (Graph, ParentMap) {
    let (starred, star_map) = star_collapse(g, rng);
    let (coarse, edge_map) = edge_collapse(&starred, rng);
    (coarse, star_map.then(&edge_map))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CoarsenConfig {
    /// Stop once the coarsest graph has fewer nodes than this.
    pub threshold: usize,
    /// Hard cap on the number of coarsening steps.
    pub max_levels: usize,
}

impl Default for CoarsenConfig {
    fn default() -> Self {
        CoarsenConfig {
            threshold: 100,
            max_levels: 32,
        }
    }
}

/// Graphs `G_0..G_L` with `parent_maps[i]: V(G_i) -> V(G_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    graphs: Vec<Graph>,
    parent_maps: Vec<ParentMap>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    pub node_ratio: f64,
    pub edge_ratio: f64,
}

impl Hierarchy {
    /// A one-level hierarchy containing only `g`.
    pub fn trivial(g: Graph) -> Self {
        Hierarchy {
            graphs: vec![g],
            parent_maps: Vec::new(),
        }
    }

    /// Index of the coarsest level, `L`.
    pub fn depth(&self) -> usize {
        self.parent_maps.len()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph(&self, level: usize) -> &Graph {
        &self.graphs[level]
    }

    pub fn coarsest(&self) -> &Graph {
        self.graphs.last().unwrap()
    }

    pub fn parent_maps(&self) -> &[ParentMap] {
        &self.parent_maps
    }

    /// Composite map from level-0 nodes to nodes of `level`.
    pub fn map_to_level(&self, level: usize) -> ParentMap {
        let mut m = ParentMap::identity(self.graphs[0].node_count());
        for pm in &self.parent_maps[..level] {
            m = m.then(pm);
        }
        m
    }

    pub fn total_nodes(&self) -> usize {
        self.graphs.iter().map(Graph::node_count).sum()
    }

    pub fn total_edges(&self) -> usize {
        self.graphs.iter().map(Graph::edge_count).sum()
    }

    pub fn level_stats(&self) -> Vec<LevelStats> {
        let ratio = |x: usize, base: usize| if base == 0 { 1.0 } else { x as f64 / base as f64 };
        let (n0, m0) = (self.graphs[0].node_count(), self.graphs[0].edge_count());
        self.graphs
            .iter()
            .enumerate()
            .map(|(level, g)| LevelStats {
                level,
                nodes: g.node_count(),
                edges: g.edge_count(),
                node_ratio: ratio(g.node_count(), n0),
                edge_ratio: ratio(g.edge_count(), m0),
            })
            .collect()
    }
}

/// Builds the coarsening hierarchy of `g`.
///
/// Applies hybrid steps while the coarsest graph has at least `threshold`
/// nodes, fewer than `max_levels` steps were taken, and the last step shrank
/// the graph.
pub fn coarsen_hierarchy(g: &Graph, config: &CoarsenConfig, seed: u64) -> Result<Hierarchy> {
    if config.threshold == 0 {
        return Err(HarpError::invalid("coarsening threshold must be >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut h = Hierarchy::trivial(g.clone());
    while h.coarsest().node_count() >= config.threshold && h.depth() < config.max_levels {
        let (coarse, pm) = hybrid_collapse(h.coarsest(), &mut rng);
        if coarse.node_count() >= h.coarsest().node_count() {
            log::debug!("coarsening stalled at level {}", h.depth());
            break;
        }
        h.graphs.push(coarse);
        h.parent_maps.push(pm);
    }
    Ok(h)
}
