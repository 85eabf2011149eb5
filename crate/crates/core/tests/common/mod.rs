//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use harp_core::coarsen::{edge_collapse, Hierarchy};
use harp_core::embed::HuffmanTree;
use harp_core::rng::rng_from_seed;
use harp_core::Graph;

fn component_partition_preserved(fine: &Graph, coarse: &Graph, parents: &[usize]) -> bool {
    let (fc, fcount) = fine.components();
    let (cc, ccount) = coarse.components();
    if fcount != ccount {
        return false;
    }
    // each fine component lands in exactly one coarse component and vice versa
    let mut image = vec![usize::MAX; fcount];
    for (u, &p) in parents.iter().enumerate() {
        let c = cc[p];
        if image[fc[u]] == usize::MAX {
            image[fc[u]] = c;
        } else if image[fc[u]] != c {
            return false;
        }
    }
    let mut seen = vec![false; ccount];
    image.iter().all(|&c| !std::mem::replace(&mut seen[c], true))
}

/// Checks the partition, size, connectivity and weight-conservation
/// invariants of every level.
pub fn check_hierarchy(h: &Hierarchy) -> Result<(), String> {
    for (i, pm) in h.parent_maps().iter().enumerate() {
        let (fine, coarse) = (h.graph(i), h.graph(i + 1));
        if pm.fine_count() != fine.node_count() || pm.coarse_count() != coarse.node_count() {
            return Err(format!("level {i}: parent map shape"));
        }
        if coarse.node_count() >= fine.node_count() {
            return Err(format!("level {i}: no strict shrinkage"));
        }
        let groups = pm.preimages();
        if groups.iter().any(|g| g.is_empty() || g.len() > 4) {
            return Err(format!("level {i}: preimage sizes outside 1..=4"));
        }
        if !component_partition_preserved(fine, coarse, pm.as_slice()) {
            return Err(format!("level {i}: connectivity changed"));
        }
        // weight conservation: coarse edge weight = sum of fine weights between preimages
        let mut internal = 0.0;
        let mut expected = std::collections::HashMap::new();
        for (u, v, w) in fine.edges() {
            let (a, b) = (pm.parent(u), pm.parent(v));
            if a == b {
                internal += w;
            } else {
                *expected.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
            }
        }
        if expected.len() != coarse.edge_count() {
            return Err(format!(
                "level {i}: coarse edge count {} vs {}",
                coarse.edge_count(),
                expected.len()
            ));
        }
        for ((a, b), w) in expected {
            if (coarse.weight(a, b) - w).abs() > 1e-9 * w.max(1.0) {
                return Err(format!("level {i}: weight of ({a},{b}) {} vs {w}", coarse.weight(a, b)));
            }
        }
        if (fine.total_weight() - internal - coarse.total_weight()).abs() > 1e-9 * fine.total_weight().max(1.0) {
            return Err(format!("level {i}: total weight not conserved"));
        }
    }
    Ok(())
}

/// Edge collapse merges adjacent pairs only, at most two nodes per group, and
/// leaves no edge between two unmatched nodes.
pub fn check_matching(g: &Graph, seed: u64) -> Result<(), String> {
    let (_, pm) = edge_collapse(g, &mut rng_from_seed(seed));
    let groups = pm.preimages();
    let mut matched = vec![false; g.node_count()];
    for grp in &groups {
        match grp[..] {
            [_] => {}
            [a, b] => {
                if !g.has_edge(a, b) {
                    return Err(format!("merged non-adjacent {a},{b}"));
                }
                matched[a] = true;
                matched[b] = true;
            }
            _ => return Err(format!("group of size {}", grp.len())),
        }
    }
    if g.edges().any(|(u, v, _)| !matched[u] && !matched[v]) {
        return Err("matching is not maximal".into());
    }
    Ok(())
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hierarchical-softmax loss of one pair, from its definition.
pub fn hs_loss(center: &[f64], output: &[Vec<f64>], tree: &HuffmanTree, context: usize) -> f64 {
    tree.code(context)
        .iter()
        .zip(tree.path(context))
        .map(|(&bit, &node)| {
            let x = dot(center, &output[node as usize]);
            let signed = if bit == 0 { x } else { -x };
            -sigmoid(signed).ln()
        })
        .sum()
}

/// Negative-sampling loss of one pair with explicit negatives.
pub fn ns_loss(center: &[f64], output: &[Vec<f64>], context: usize, negatives: &[usize]) -> f64 {
    let pos = -sigmoid(dot(center, &output[context])).ln();
    pos + negatives
        .iter()
        .map(|&n| -sigmoid(-dot(center, &output[n])).ln())
        .sum::<f64>()
}

/// Mean logistic loss + l2/2 |w|^2 minimized by damped Newton iterations.
pub fn newton_logreg(x: &[Vec<f64>], y: &[bool], l2: f64) -> f64 {
    let d = x[0].len();
    let n = x.len() as f64;
    // parameters: w (d) then intercept
    let mut theta = vec![0.0; d + 1];
    let objective = |t: &[f64]| {
        let mut f = 0.0;
        for (xi, &yi) in x.iter().zip(y) {
            let z = dot(xi, &t[..d]) + t[d];
            let s = if yi { -z } else { z };
            f += if s > 0.0 {
                s + (-s).exp().ln_1p()
            } else {
                s.exp().ln_1p()
            };
        }
        f / n + 0.5 * l2 * dot(&t[..d], &t[..d])
    };
    for _ in 0..100 {
        let mut grad = vec![0.0; d + 1];
        let mut hess = vec![vec![0.0; d + 1]; d + 1];
        for (xi, &yi) in x.iter().zip(y) {
            let mut xe = xi.clone();
            xe.push(1.0);
            let p = sigmoid(dot(&xe, &theta));
            let r = p - if yi { 1.0 } else { 0.0 };
            for a in 0..=d {
                grad[a] += r * xe[a] / n;
                for b in 0..=d {
                    hess[a][b] += p * (1.0 - p) * xe[a] * xe[b] / n;
                }
            }
        }
        for a in 0..d {
            grad[a] += l2 * theta[a];
            hess[a][a] += l2;
        }
        let step = solve(hess, grad);
        let f0 = objective(&theta);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            if objective(&cand) <= f0 || t < 1e-12 {
                theta = cand;
                break;
            }
            t *= 0.5;
        }
    }
    objective(&theta)
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

use harp_core::alias::AliasTable;
use harp_core::embed::{build_huffman_tree, skipgram_pair_step, SkipGramModel, StepContext};
use harp_core::{EmbeddingMatrix, Objective};
use rand::Rng;

fn uniform_matrix<R: Rng>(rows: usize, dim: usize, rng: &mut R) -> EmbeddingMatrix {
    let data = (0..rows * dim).map(|_| rng.random_range(-0.5..0.5)).collect();
    EmbeddingMatrix::from_vec(rows, dim, data).unwrap()
}

fn rows_of(m: &EmbeddingMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale = dot(a, a).sqrt().max(dot(b, b).sqrt()).max(1e-12);
    diff / scale
}

/// Relative error between the parameter change of one SGD pair step
/// (divided by the learning rate) and a central finite-difference gradient
/// of the pair loss, over the center row and every output row.
pub fn skipgram_gradient_error(objective: Objective, seed: u64) -> f64 {
    let (n, d, k) = (24, 8, 4);
    let (center, context) = (3, 11);
    let mut rng = rng_from_seed(seed);
    let mut model = SkipGramModel::new(uniform_matrix(n, d, &mut rng), objective);
    let out_rows = model.output.rows();
    model.output = uniform_matrix(out_rows, d, &mut rng);
    let freqs: Vec<u64> = (0..n).map(|i| (i * i % 7 + 1) as u64).collect();
    let tree = build_huffman_tree(&freqs);
    let noise = AliasTable::new(&vec![1.0; n]).unwrap();

    // find a step stream whose negatives are distinct and differ from the context
    let mut step_seed = seed;
    let negatives = loop {
        let mut r = rng_from_seed(step_seed);
        let draws: Vec<usize> = (0..k).map(|_| noise.sample(&mut r)).collect();
        let mut sorted = draws.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == k && !draws.contains(&context) {
            break draws;
        }
        step_seed += 1;
    };

    let loss = |c: &[f64], out: &[Vec<f64>]| match objective {
        Objective::HierarchicalSoftmax => hs_loss(c, out, &tree, context),
        Objective::NegativeSampling => ns_loss(c, out, context, &negatives),
    };
    let c0 = model.input.row(center).to_vec();
    let out0 = rows_of(&model.output);

    let h = 1e-6;
    let mut fd = Vec::new();
    for j in 0..d {
        let (mut p, mut m) = (c0.clone(), c0.clone());
        p[j] += h;
        m[j] -= h;
        fd.push((loss(&p, &out0) - loss(&m, &out0)) / (2.0 * h));
    }
    for r in 0..out_rows {
        for j in 0..d {
            let (mut p, mut m) = (out0.clone(), out0.clone());
            p[r][j] += h;
            m[r][j] -= h;
            fd.push((loss(&c0, &p) - loss(&c0, &m)) / (2.0 * h));
        }
    }

    let lr = 0.05;
    let ctx = match objective {
        Objective::HierarchicalSoftmax => StepContext::Hierarchical(&tree),
        Objective::NegativeSampling => StepContext::Negative {
            noise: &noise,
            negatives: k,
        },
    };
    let reported = skipgram_pair_step(&mut model, center, context, lr, ctx, &mut rng_from_seed(step_seed)).unwrap();
    let mut analytic: Vec<f64> = c0
        .iter()
        .zip(model.input.row(center))
        .map(|(a, b)| (a - b) / lr)
        .collect();
    for (r, row) in out0.iter().enumerate() {
        analytic.extend(row.iter().zip(model.output.row(r)).map(|(a, b)| (a - b) / lr));
    }
    let loss_err = (reported - loss(&c0, &out0)).abs() / loss(&c0, &out0);
    rel_err(&analytic, &fd).max(loss_err)
}

/// `|sum_leaf P(leaf | center) - 1|` for random parameters over `n` leaves.
pub fn hs_normalization_error(n: usize, seed: u64) -> f64 {
    let mut rng = rng_from_seed(seed);
    let freqs: Vec<u64> = (0..n).map(|_| rng.random_range(1..100)).collect();
    let tree = build_huffman_tree(&freqs);
    let mut model = SkipGramModel::new(uniform_matrix(n, 16, &mut rng), Objective::HierarchicalSoftmax);
    let rows = model.output.rows();
    model.output = uniform_matrix(rows, 16, &mut rng);
    let mut worst: f64 = 0.0;
    for center in 0..n {
        let total: f64 = (0..n).map(|leaf| model.leaf_probability(&tree, center, leaf)).sum();
        worst = worst.max((total - 1.0).abs());
    }
    worst
}
