//! One-vs-rest L2-regularized logistic regression.

use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMatrix;
use crate::error::{HarpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    /// L2 strength on the mean loss. `None` uses `1 / n_train`, which equals a
    /// unit penalty against the summed loss.
    #[serde(default)]
    pub l2: Option<f64>,
    pub max_iter: usize,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
}

impl LogRegConfig {
    pub fn with_l2(l2: f64) -> Self {
        LogRegConfig {
            l2: Some(l2),
            ..Default::default()
        }
    }

    /// Effective strength for `n` training rows.
    pub fn strength(&self, n: usize) -> f64 {
        self.l2.unwrap_or(1.0 / n.max(1) as f64)
    }
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: None,
            max_iter: 1000,
            tolerance: 1e-6,
        }
    }
}

/// A fitted binary classifier `sigma(w . x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Objective after every accepted step, starting from the initial point.
    pub trace: Vec<f64>,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct Problem<'a> {
    x: &'a EmbeddingMatrix,
    y: &'a [bool],
    l2: f64,
}

impl Problem<'_> {
    /// Mean logistic loss plus `l2 / 2 * |w|^2`; the intercept is not penalized.
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let n = self.x.rows();
        let mut loss = 0.0;
        for i in 0..n {
            let z = dot(self.x.row(i), w) + b;
            loss += if self.y[i] { softplus(-z) } else { softplus(z) };
        }
        loss / n as f64 + 0.5 * self.l2 * dot(w, w)
    }

    /// Writes the gradient into `gw`, returns `(objective, d/db)`.
    fn gradient(&self, w: &[f64], b: f64, gw: &mut [f64]) -> (f64, f64) {
        let n = self.x.rows();
        let inv_n = 1.0 / n as f64;
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        let mut loss = 0.0;
        for i in 0..n {
            let row = self.x.row(i);
            let z = dot(row, w) + b;
            let (target, l) = if self.y[i] {
                (1.0, softplus(-z))
            } else {
                (0.0, softplus(z))
            };
            loss += l;
            let r = (sigmoid(z) - target) * inv_n;
            gb += r;
            for (g, &xi) in gw.iter_mut().zip(row) {
                *g += r * xi;
            }
        }
        for (g, &wi) in gw.iter_mut().zip(w) {
            *g += self.l2 * wi;
        }
        (loss * inv_n + 0.5 * self.l2 * dot(w, w), gb)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full-batch gradient descent with a diagonal preconditioner and Armijo
/// backtracking.
pub fn fit_binary(x: &EmbeddingMatrix, y: &[bool], cfg: &LogRegConfig) -> Result<BinaryFit> {
    if x.rows() != y.len() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("{} targets", x.rows()),
            actual: format!("{}", y.len()),
        });
    }
    if x.rows() == 0 {
        return Err(HarpError::invalid("no training rows"));
    }
    let l2 = cfg.strength(x.rows());
    if !(l2 >= 0.0 && l2.is_finite()) {
        return Err(HarpError::invalid(format!("l2 must be finite and >= 0, got {l2}")));
    }
    check_finite(x)?;
    // centering decouples the unpenalized intercept from the weights; the
    // optimum is mapped back to the raw features at the end
    let d = x.dim();
    let mut mean = vec![0.0; d];
    for i in 0..x.rows() {
        for (m, &v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= x.rows() as f64);
    let mut centered = x.clone();
    for i in 0..x.rows() {
        for (c, &m) in centered.row_mut(i).iter_mut().zip(&mean) {
            *c -= m;
        }
    }
    let x = &centered;
    let p = Problem { x, y, l2 };
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut gw = vec![0.0; d];
    let mut cand = vec![0.0; d];
    // diagonal curvature bounds: the logistic term contributes at most x_j^2 / 4
    let n = x.rows() as f64;
    let mut precond = vec![0.0; d];
    for i in 0..x.rows() {
        for (s, &xi) in precond.iter_mut().zip(x.row(i)) {
            *s += xi * xi;
        }
    }
    for s in precond.iter_mut() {
        *s = 1.0 / (0.25 * *s / n + l2).max(1e-12);
    }
    let precond_b = 4.0;
    let mut step = 1.0;
    let (mut f, mut gb) = p.gradient(&w, b, &mut gw);
    let mut trace = vec![f];
    let mut iterations = 0;
    let mut gnorm2 = dot(&gw, &gw) + gb * gb;
    while iterations < cfg.max_iter && gnorm2.sqrt() >= cfg.tolerance {
        let decrease = gw.iter().zip(&precond).map(|(g, s)| g * g * s).sum::<f64>() + gb * gb * precond_b;
        let mut accepted = false;
        for _ in 0..60 {
            for (((c, &wi), &gi), &pi) in cand.iter_mut().zip(&w).zip(&gw).zip(&precond) {
                *c = wi - step * pi * gi;
            }
            let cb = b - step * precond_b * gb;
            let fc = p.objective(&cand, cb);
            if fc <= f - 0.5 * step * decrease {
                std::mem::swap(&mut w, &mut cand);
                b = cb;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        (f, gb) = p.gradient(&w, b, &mut gw);
        gnorm2 = dot(&gw, &gw) + gb * gb;
        trace.push(f);
        step = (step * 2.0).min(1.0);
    }
    Ok(BinaryFit {
        intercept: b - dot(&w, &mean),
        weights: w,
        objective: f,
        gradient_norm: gnorm2.sqrt(),
        iterations,
        trace,
    })
}

fn check_finite(x: &EmbeddingMatrix) -> Result<()> {
    for i in 0..x.rows() {
        if !x.row(i).iter().all(|v| v.is_finite()) {
            return Err(HarpError::NonFiniteFeature(i));
        }
    }
    Ok(())
}

/// One binary classifier per label.
#[derive(Debug, Clone, PartialEq)]
pub struct OvrClassifier {
    dim: usize,
    weights: Vec<f64>,
    intercepts: Vec<f64>,
    degenerate: Vec<bool>,
}

impl OvrClassifier {
    pub fn label_count(&self) -> usize {
        self.intercepts.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self, label: usize) -> &[f64] {
        &self.weights[label * self.dim..(label + 1) * self.dim]
    }

    pub fn intercept(&self, label: usize) -> f64 {
        self.intercepts[label]
    }

    /// Labels whose training column had no positives or no negatives; those
    /// get a constant classifier at the smoothed log-odds of the column.
    pub fn degenerate_labels(&self) -> Vec<usize> {
        (0..self.label_count()).filter(|&l| self.degenerate[l]).collect()
    }

    /// Decision values `w_l . x + b_l` for every label.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        (0..self.label_count())
            .map(|l| dot(self.weights(l), x) + self.intercepts[l])
            .collect()
    }
}

/// Fits one classifier per label. `targets[i]` holds the label ids of row `i`.
pub fn train_ovr_logreg(
    x: &EmbeddingMatrix,
    targets: &[Vec<usize>],
    label_count: usize,
    cfg: &LogRegConfig,
) -> Result<OvrClassifier> {
    if x.rows() != targets.len() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("{} target rows", x.rows()),
            actual: format!("{}", targets.len()),
        });
    }
    check_finite(x)?;
    let d = x.dim();
    let mut weights = vec![0.0; label_count * d];
    let mut intercepts = vec![0.0; label_count];
    let mut degenerate = vec![false; label_count];
    let mut y = vec![false; x.rows()];
    for l in 0..label_count {
        for (yi, t) in y.iter_mut().zip(targets) {
            *yi = t.contains(&l);
        }
        let pos = y.iter().filter(|&&v| v).count();
        if pos == 0 || pos == y.len() {
            degenerate[l] = true;
            intercepts[l] = ((pos as f64 + 0.5) / ((y.len() - pos) as f64 + 0.5)).ln();
            continue;
        }
        let fit = fit_binary(x, &y, cfg)?;
        weights[l * d..(l + 1) * d].copy_from_slice(&fit.weights);
        intercepts[l] = fit.intercept;
    }
    Ok(OvrClassifier {
        dim: d,
        weights,
        intercepts,
        degenerate,
    })
}
