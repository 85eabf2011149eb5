//! Undirected weighted graph in compressed adjacency form.
//!
//! Every level of a coarsening hierarchy uses the same [`Graph`] type: input
//! edges carry weight 1.0 and merged parallel edges sum their weights.

use std::collections::VecDeque;

/// Dense internal node id.
pub type NodeId = usize;

/// Immutable undirected graph with symmetric, sorted adjacency lists.
///
/// Invariants: no self-loops, no duplicate neighbor entries, `weight(u, v) ==
/// weight(v, u)` for every stored pair, all weights positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    external_ids: Option<Vec<String>>,
}

impl Graph {
    /// A graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
            external_ids: None,
        }
    }

    /// Builds a graph from undirected edges. Self-loops are dropped and
    /// parallel edges are merged by summing their weights.
    ///
    /// Panics if an endpoint is `>= n` or a weight is not positive.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut b = GraphBuilder::new(n);
        for (u, v, w) in edges {
            b.add_edge(u, v, w);
        }
        b.build()
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn neighbor_weights(&self, u: NodeId) -> &[f64] {
        &self.weights[self.offsets[u]..self.offsets[u + 1]]
    }

    /// `(neighbor, weight)` pairs of `u`, in ascending neighbor order.
    pub fn adjacency(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.neighbors(u)
            .iter()
            .copied()
            .zip(self.neighbor_weights(u).iter().copied())
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn weighted_degree(&self, u: NodeId) -> f64 {
        self.neighbor_weights(u).iter().sum()
    }

    /// Weight of edge `(u, v)`, or 0.0 when absent.
    pub fn weight(&self, u: NodeId, v: NodeId) -> f64 {
        match self.neighbors(u).binary_search(&v) {
            Ok(i) => self.neighbor_weights(u)[i],
            Err(_) => 0.0,
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Sum of undirected edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.adjacency(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn external_ids(&self) -> Option<&[String]> {
        self.external_ids.as_deref()
    }

    /// External id of `u`, falling back to the decimal internal id.
    pub fn external_id(&self, u: NodeId) -> String {
        match &self.external_ids {
            Some(ids) => ids[u].clone(),
            None => u.to_string(),
        }
    }

    pub fn with_external_ids(mut self, ids: Vec<String>) -> Self {
        assert_eq!(ids.len(), self.node_count(), "external id count mismatch");
        self.external_ids = Some(ids);
        self
    }

    /// Connected components as a per-node component index. Components are
    /// numbered in order of their smallest node id.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().1 == 1
    }

    /// Hop distances from `source`; unreachable nodes get `usize::MAX`.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Subgraph induced by `nodes` (given in the order that defines the new
    /// dense ids). External ids are carried over.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Graph {
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            remap[old] = new;
        }
        let mut b = GraphBuilder::new(nodes.len());
        for (new_u, &old_u) in nodes.iter().enumerate() {
            for (old_v, w) in self.adjacency(old_u) {
                let new_v = remap[old_v];
                if new_v != usize::MAX && new_u < new_v {
                    b.add_edge(new_u, new_v, w);
                }
            }
        }
        let mut g = b.build();
        g.external_ids = Some(nodes.iter().map(|&u| self.external_id(u)).collect());
        g
    }
}

/// Accumulates undirected edges and produces a [`Graph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    arcs: Vec<(NodeId, NodeId, f64)>,
    dropped_self_loops: usize,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            n,
            arcs: Vec::new(),
            dropped_self_loops: 0,
        }
    }

    pub fn with_capacity(n: usize, edges: usize) -> Self {
        GraphBuilder {
            n,
            arcs: Vec::with_capacity(2 * edges),
            dropped_self_loops: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Grows the node set so that `u` is a valid id.
    pub fn ensure_node(&mut self, u: NodeId) {
        if u >= self.n {
            self.n = u + 1;
        }
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: f64) {
        assert!(u < self.n && v < self.n, "edge ({u}, {v}) out of range");
        assert!(w > 0.0 && w.is_finite(), "edge weight must be positive");
        if u == v {
            self.dropped_self_loops += 1;
            return;
        }
        self.arcs.push((u, v, w));
        self.arcs.push((v, u, w));
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn build(mut self) -> Graph {
        self.arcs.sort_unstable_by_key(|a| (a.0, a.1));
        let mut offsets = vec![0usize; self.n + 1];
        let mut targets = Vec::with_capacity(self.arcs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(self.arcs.len());
        let mut last: Option<(NodeId, NodeId)> = None;
        for (u, v, w) in self.arcs {
            if last == Some((u, v)) {
                *weights.last_mut().unwrap() += w;
                continue;
            }
            last = Some((u, v));
            offsets[u + 1] += 1;
            targets.push(v);
            weights.push(w);
        }
        for i in 0..self.n {
            offsets[i + 1] += offsets[i];
        }
        Graph {
            offsets,
            targets,
            weights,
            external_ids: None,
        }
    }
}

/// Induced subgraph on the largest connected component, ties broken by the
/// component containing the smallest node id. Nodes keep their relative order.
/// The returned vector maps new ids to ids in `g`.
pub fn largest_connected_component(g: &Graph) -> (Graph, Vec<NodeId>) {
    if g.is_empty() {
        return (Graph::empty(0), Vec::new());
    }
    let (comp, count) = g.components();
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // components are numbered by smallest member, so the first maximum wins ties
    let best = (0..count).fold(0, |best, c| if sizes[c] > sizes[best] { c } else { best });
    let nodes: Vec<NodeId> = (0..g.node_count()).filter(|&u| comp[u] == best).collect();
    (g.induced_subgraph(&nodes), nodes)
}
