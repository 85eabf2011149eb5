//! Negative-sampling noise distribution.

use crate::alias::AliasTable;
use crate::graph::Graph;

/// Exponent applied to weighted degree.
pub const NOISE_EXPONENT: f64 = 0.75;

/// Unigram noise over nodes, proportional to `weighted_degree^0.75`.
///
/// Returns `None` for an edgeless graph.
pub fn noise_distribution(g: &Graph) -> Option<AliasTable> {
    let weights: Vec<f64> = (0..g.node_count())
        .map(|u| g.weighted_degree(u).powf(NOISE_EXPONENT))
        .collect();
    AliasTable::new(&weights).ok()
}
