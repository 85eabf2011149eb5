use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{HarpError, Result};
use crate::graph::NodeId;
use crate::labels::LabelSet;

/// Uniformly splits the labeled nodes into `(train, test)`, both sorted.
/// The train side gets `round(ratio * labeled)` nodes, clamped so that each
/// side keeps at least one node.
pub fn split_labeled<R: Rng + ?Sized>(
    labels: &LabelSet,
    ratio: f64,
    rng: &mut R,
) -> Result<(Vec<NodeId>, Vec<NodeId>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(HarpError::invalid(format!(
            "labeled ratio must be in (0, 1), got {ratio}"
        )));
    }
    let mut nodes = labels.labeled_nodes();
    let n = nodes.len();
    if n < 2 {
        return Err(HarpError::TooFewLabeled(n));
    }
    let train_size = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
    nodes.shuffle(rng);
    let mut test = nodes.split_off(train_size);
    nodes.sort_unstable();
    test.sort_unstable();
    Ok((nodes, test))
}
