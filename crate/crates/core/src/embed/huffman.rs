//! Huffman tree over node frequencies, used by hierarchical softmax.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Binary tree with one leaf per node. Internal nodes are numbered
/// `0..leaf_count - 1`; the root is the last one. Each leaf stores its
/// root-to-leaf path of internal nodes and the branch bits taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTree {
    leaf_count: usize,
    codes: Vec<u8>,
    points: Vec<u32>,
    offsets: Vec<usize>,
}

impl HuffmanTree {
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn internal_count(&self) -> usize {
        self.leaf_count.saturating_sub(1)
    }

    /// Branch bits from the root down to `leaf`.
    pub fn code(&self, leaf: usize) -> &[u8] {
        &self.codes[self.offsets[leaf]..self.offsets[leaf + 1]]
    }

    /// Internal nodes on the path from the root to `leaf`, aligned with `code`.
    pub fn path(&self, leaf: usize) -> &[u32] {
        &self.points[self.offsets[leaf]..self.offsets[leaf + 1]]
    }

    pub fn max_code_len(&self) -> usize {
        (0..self.leaf_count).map(|l| self.code(l).len()).max().unwrap_or(0)
    }
}

/// Standard Huffman construction. Zero frequencies count as 1 so that every
/// node keeps a leaf. Ties are broken by creation order, which makes the tree
/// deterministic.
pub fn build_huffman_tree(frequencies: &[u64]) -> HuffmanTree {
    let n = frequencies.len();
    assert!(n >= 1, "huffman tree needs at least one leaf");
    if n == 1 {
        return HuffmanTree {
            leaf_count: 1,
            codes: Vec::new(),
            points: Vec::new(),
            offsets: vec![0, 0],
        };
    }
    // tree slots: leaves 0..n, internal n..2n-1
    let mut parent = vec![0usize; 2 * n - 1];
    let mut bit = vec![0u8; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = frequencies
        .iter()
        .enumerate()
        .map(|(i, &f)| Reverse((f.max(1), i)))
        .collect();
    for slot in n..2 * n - 1 {
        let Reverse((fa, a)) = heap.pop().unwrap();
        let Reverse((fb, b)) = heap.pop().unwrap();
        parent[a] = slot;
        parent[b] = slot;
        bit[a] = 0;
        bit[b] = 1;
        heap.push(Reverse((fa + fb, slot)));
    }
    let root = 2 * n - 2;

    let mut codes = Vec::new();
    let mut points = Vec::new();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut code_buf = Vec::new();
    let mut point_buf = Vec::new();
    for leaf in 0..n {
        code_buf.clear();
        point_buf.clear();
        let mut cur = leaf;
        while cur != root {
            code_buf.push(bit[cur]);
            cur = parent[cur];
            point_buf.push((cur - n) as u32);
        }
        codes.extend(code_buf.iter().rev());
        points.extend(point_buf.iter().rev());
        offsets.push(codes.len());
    }
    HuffmanTree {
        leaf_count: n,
        codes,
        points,
        offsets,
    }
}
