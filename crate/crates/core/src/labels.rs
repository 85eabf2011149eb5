//! Multi-label node annotations.

use std::collections::{BTreeSet, HashMap};

use crate::error::{HarpError, Result};
use crate::graph::{Graph, NodeId};

/// Per-node label sets over dense label ids `0..label_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    labels: Vec<Vec<usize>>,
    names: Vec<String>,
}

impl LabelSet {
    /// Builds a label set for `node_count` nodes from `(node, label)` pairs.
    /// Label names default to the decimal label ids.
    pub fn from_pairs(node_count: usize, label_count: usize, pairs: impl IntoIterator<Item = (NodeId, usize)>) -> Self {
        let mut sets = vec![BTreeSet::new(); node_count];
        for (u, l) in pairs {
            assert!(u < node_count && l < label_count, "label pair out of range");
            sets[u].insert(l);
        }
        LabelSet {
            labels: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            names: (0..label_count).map(|l| l.to_string()).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label_count(&self) -> usize {
        self.names.len()
    }

    pub fn label_names(&self) -> &[String] {
        &self.names
    }

    /// Sorted label ids of `u` (empty when unlabeled).
    pub fn labels_of(&self, u: NodeId) -> &[usize] {
        &self.labels[u]
    }

    /// Nodes with at least one label, ascending.
    pub fn labeled_nodes(&self) -> Vec<NodeId> {
        (0..self.labels.len()).filter(|&u| !self.labels[u].is_empty()).collect()
    }

    /// Re-indexes onto a subgraph given `new id -> old id`.
    pub fn restrict(&self, mapping: &[NodeId]) -> LabelSet {
        LabelSet {
            labels: mapping.iter().map(|&old| self.labels[old].clone()).collect(),
            names: self.names.clone(),
        }
    }
}

/// Parses a label file against the graph's external ids (or decimal internal
/// ids when the graph has none).
///
/// Each line holds a node id followed by one or more labels separated by
/// whitespace or commas. Repeated lines for one node accumulate. Label tokens
/// become dense ids in sorted order (numeric order when every token is an
/// integer).
pub fn load_labels(text: &str, graph: &Graph) -> Result<LabelSet> {
    let index: HashMap<String, NodeId> = (0..graph.node_count()).map(|u| (graph.external_id(u), u)).collect();
    load_labels_indexed(text, &index, graph.node_count())
}

/// Like [`load_labels`], but lines naming nodes absent from the graph are
/// skipped instead of rejected. Returns the label set and the skipped count.
pub fn load_labels_skip_unknown(text: &str, graph: &Graph) -> Result<(LabelSet, usize)> {
    let index: HashMap<String, NodeId> = (0..graph.node_count()).map(|u| (graph.external_id(u), u)).collect();
    load_labels_indexed_skip_unknown(text, &index, graph.node_count())
}

/// [`load_labels_skip_unknown`] against an explicit index.
pub fn load_labels_indexed_skip_unknown(
    text: &str,
    index: &HashMap<String, NodeId>,
    node_count: usize,
) -> Result<(LabelSet, usize)> {
    let mut skipped = 0;
    let kept: String = text
        .lines()
        .map(|line| {
            let node = line
                .trim()
                .split(|c: char| c.is_whitespace() || c == ',')
                .find(|t| !t.is_empty());
            match node {
                Some(n) if !n.starts_with('#') && !index.contains_key(n) => {
                    skipped += 1;
                    ""
                }
                _ => line,
            }
        })
        .flat_map(|l| [l, "\n"])
        .collect();
    Ok((load_labels_indexed(&kept, index, node_count)?, skipped))
}

/// Like [`load_labels`] but resolves node tokens through an explicit index.
pub fn load_labels_indexed(text: &str, index: &HashMap<String, NodeId>, node_count: usize) -> Result<LabelSet> {
    let mut raw: Vec<(NodeId, &str)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let node = tokens.next().expect("non-empty line has a token");
        let u = *index
            .get(node)
            .ok_or_else(|| HarpError::UnknownNode(node.to_string()))?;
        let before = raw.len();
        raw.extend(tokens.map(|t| (u, t)));
        if raw.len() == before {
            return Err(HarpError::parse(lineno + 1, format!("node `{node}` has no labels")));
        }
    }

    let mut names: Vec<&str> = raw.iter().map(|&(_, l)| l).collect();
    names.sort_unstable();
    names.dedup();
    if names.iter().all(|n| n.parse::<i64>().is_ok()) {
        names.sort_by_key(|n| n.parse::<i64>().unwrap());
    }
    let ids: HashMap<&str, usize> = names.iter().enumerate().map(|(i, &n)| (n, i)).collect();

    let mut set = LabelSet::from_pairs(node_count, names.len(), raw.iter().map(|&(u, l)| (u, ids[l])));
    set.names = names.into_iter().map(str::to_owned).collect();
    Ok(set)
}
