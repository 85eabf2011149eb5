//! Runtime scaling benchmark on Erdős–Rényi graphs.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::embed::Method;
use crate::error::{HarpError, Result};
use crate::generate::erdos_renyi;
use crate::pipeline::{run_mode, HarpConfig, Mode};
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub nodes: usize,
    pub edges: usize,
    pub avg_degree: f64,
    pub method: Method,
    pub mode: Mode,
    pub coarsening_secs: f64,
    pub sampling_secs: f64,
    pub training_secs: f64,
    pub prolongation_secs: f64,
    pub total_secs: f64,
    pub budget_samples: u64,
    pub executed_samples: u64,
}

impl BenchRecord {
    pub fn overhead_secs(&self) -> f64 {
        self.coarsening_secs + self.prolongation_secs
    }

    pub const CSV_HEADER: &'static str = "nodes,edges,avg_degree,method,mode,coarsening_secs,sampling_secs,\
training_secs,prolongation_secs,total_secs,budget_samples,executed_samples";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            self.nodes,
            self.edges,
            self.avg_degree,
            self.method,
            match self.mode {
                Mode::Baseline => "baseline",
                Mode::Harp => "harp",
            },
            self.coarsening_secs,
            self.sampling_secs,
            self.training_secs,
            self.prolongation_secs,
            self.total_secs,
            self.budget_samples,
            self.executed_samples
        )
    }
}

pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BenchRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(out, "{}", r.csv_row()).unwrap();
    }
    out
}

fn run_one(n: usize, avg_degree: f64, config: &HarpConfig, mode: Mode) -> Result<BenchRecord> {
    let g = erdos_renyi(n, avg_degree, derive_seed(config.seed(), n as u64))?;
    let start = Instant::now();
    let out = run_mode(&g, config, mode)?;
    let total_secs = start.elapsed().as_secs_f64();
    Ok(BenchRecord {
        nodes: g.node_count(),
        edges: g.edge_count(),
        avg_degree,
        method: config.method,
        mode,
        coarsening_secs: out.timings.coarsening,
        sampling_secs: out.timings.sampling,
        training_secs: out.timings.training,
        prolongation_secs: out.timings.prolongation,
        total_secs,
        budget_samples: out.budget.total,
        executed_samples: out.executed_samples,
    })
}

/// For each `n` (ascending): an ER graph with the given average degree, then
/// a baseline and a multilevel run with matched budgets. One untimed warm-up
/// run on the smallest size precedes the measurements.
pub fn bench_scaling(node_counts: &[usize], avg_degree: f64, config: &HarpConfig) -> Result<Vec<BenchRecord>> {
    if node_counts.is_empty() {
        return Err(HarpError::invalid("no node counts given"));
    }
    if node_counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(HarpError::invalid("node counts must be ascending"));
    }
    run_one(node_counts[0], avg_degree, config, Mode::Harp)?;
    let mut records = Vec::with_capacity(2 * node_counts.len());
    for &n in node_counts {
        for mode in [Mode::Baseline, Mode::Harp] {
            let r = run_one(n, avg_degree, config, mode)?;
            log::info!("bench n={n} mode={mode:?} total={:.3}s", r.total_secs);
            records.push(r);
        }
    }
    Ok(records)
}

/// Least-squares fit `y = a + b x`; returns `(a, b, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (a, b, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_line() {
        let (a, b, r2) = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_bench_records() {
        let mut cfg = HarpConfig::new(Method::Line).with_seed(3);
        cfg.train.dim = 8;
        cfg.train.line_iterations = 2;
        cfg.coarsening.threshold = 20;
        let recs = bench_scaling(&[100, 200], 10.0, &cfg).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            assert_eq!(r.budget_samples, r.executed_samples);
            let phases = r.overhead_secs() + r.sampling_secs + r.training_secs;
            assert!(r.total_secs + 1e-3 >= phases);
        }
        assert!(bench_csv(&recs).lines().count() == 5);
        assert!(bench_scaling(&[200, 100], 10.0, &cfg).is_err());
    }
}
