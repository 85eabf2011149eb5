//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion. Tests run one at a time so the timing criteria are not
//! disturbed by concurrent work.

mod common;

use std::fs;
use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use harp_core::alias::AliasTable;
use harp_core::bench::{bench_scaling, linear_fit};
use harp_core::embed::{node2vec_walks, random_walks, Method, Objective};
use harp_core::eval::{
    compare_reports, distance_correlation, evaluate, fit_binary, harp_name, macro_f1, EvalConfig, LogRegConfig,
};
use harp_core::generate::{barabasi_albert, erdos_renyi, grid, planted_partition, ring_lattice};
use harp_core::io::read_edge_list;
use harp_core::labels::load_labels_skip_unknown;
use harp_core::pipeline::{baseline_embed, harp_embed, run_mode, HarpConfig, Mode};
use harp_core::rng::rng_from_seed;
use harp_core::{coarsen_hierarchy, CoarsenConfig, EmbeddingMatrix, Graph, LabelSet};
use rand::Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, title: &str, check: impl FnOnce() -> Result<String, String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = check();
    let secs = start.elapsed().as_secs_f64();
    // written to the raw handle so the line shows up even when output is captured
    let mut out = std::io::stdout().lock();
    match outcome {
        Ok(detail) => {
            let _ = writeln!(out, "PASS criterion {id} ({title}): {detail} [{secs:.1}s]");
        }
        Err(detail) => {
            let _ = writeln!(out, "FAIL criterion {id} ({title}): {detail} [{secs:.1}s]");
            drop(out);
            panic!("criterion {id} failed: {detail}");
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// First level at which both node and edge ratios drop below 10%.
fn first_level_below_tenth(g: &Graph, seed: u64) -> Result<(usize, Vec<(f64, f64)>), String> {
    let h = coarsen_hierarchy(g, &CoarsenConfig::default(), seed).map_err(|e| e.to_string())?;
    let ratios: Vec<(f64, f64)> = h.level_stats().iter().map(|s| (s.node_ratio, s.edge_ratio)).collect();
    let level = ratios
        .iter()
        .position(|&(n, e)| n < 0.1 && e < 0.1)
        .ok_or_else(|| format!("never below 10%: {ratios:?}"))?;
    Ok((level, ratios))
}

#[test]
fn criterion_1_coarsening_shrinkage() {
    criterion(1, "coarsening shrinkage", || {
        let start = Instant::now();
        let er = erdos_renyi(10_000, 10.0, 1).unwrap();
        let sf = barabasi_albert(10_000, 5, 1).unwrap();
        let (er_level, _) = first_level_below_tenth(&er, 7)?;
        let (sf_level, sf_ratios) = first_level_below_tenth(&sf, 7)?;
        ensure(er_level <= 9, || format!("ER needs {er_level} levels"))?;
        ensure(sf_level <= 9, || format!("scale-free needs {sf_level} levels"))?;
        let (n1, e1) = sf_ratios[1];
        ensure(n1 <= 0.6, || {
            format!("scale-free level 1 keeps {:.1}% of nodes", n1 * 100.0)
        })?;
        ensure(e1 > 0.7, || {
            format!("scale-free level 1 keeps only {:.1}% of edges", e1 * 100.0)
        })?;
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
        Ok(format!(
            "ER below 10% at level {er_level}, scale-free at level {sf_level}; scale-free level 1 keeps {:.1}% nodes, {:.1}% edges",
            n1 * 100.0,
            e1 * 100.0
        ))
    });
}

fn structure_wins(g: &Graph, seeds: u64) -> Result<(usize, Vec<(f64, f64)>), String> {
    let mut wins = 0;
    let mut pairs = Vec::new();
    for seed in 0..seeds {
        let mut cfg = HarpConfig::new(Method::Line).with_seed(seed);
        cfg.train.dim = 2;
        let harp = harp_embed(g, &cfg).map_err(|e| e.to_string())?;
        let base = baseline_embed(g, &cfg, harp.budget.total).map_err(|e| e.to_string())?;
        let h = distance_correlation(g, &harp.embedding).unwrap();
        let b = distance_correlation(g, &base.embedding).unwrap();
        if h > b {
            wins += 1;
        }
        pairs.push((h, b));
    }
    Ok((wins, pairs))
}

#[test]
fn criterion_2_structure_preservation() {
    criterion(2, "structure preservation", || {
        let start = Instant::now();
        let mut detail = Vec::new();
        for (name, g) in [("ring", ring_lattice(400, 2).unwrap()), ("grid", grid(20, 20).unwrap())] {
            let (wins, pairs) = structure_wins(&g, 5)?;
            let shown: Vec<String> = pairs.iter().map(|(h, b)| format!("{h:.2}/{b:.2}")).collect();
            ensure(wins >= 4, || {
                format!("{name}: multilevel wins {wins}/5 (harp/flat: {shown:?})")
            })?;
            detail.push(format!("{name} {wins}/5 (harp/flat {})", shown.join(" ")));
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
        Ok(detail.join("; "))
    });
}

/// Published macro-F1 (%) at 5% labeled nodes: (method, flat, multilevel).
const REFERENCE_CITESEER: [(Method, f64, f64); 3] = [
    (Method::DeepWalk, 42.72, 44.78),
    (Method::Line, 37.11, 42.95),
    (Method::Node2vec, 44.84, 46.08),
];

fn classification_real(edges: &str, labels: &str) -> Result<String, String> {
    let g = read_edge_list(edges).map_err(|e| e.to_string())?.graph;
    let text = fs::read_to_string(labels).map_err(|e| e.to_string())?;
    let (labels, _) = load_labels_skip_unknown(&text, &g).map_err(|e| e.to_string())?;
    let eval = EvalConfig {
        seed: 1,
        ..Default::default()
    };
    let mut detail = Vec::new();
    for (method, flat_ref, harp_ref) in REFERENCE_CITESEER {
        let cfg = HarpConfig::new(method).with_seed(1);
        let harp = harp_embed(&g, &cfg).map_err(|e| e.to_string())?;
        let base = baseline_embed(&g, &cfg, harp.budget.total).map_err(|e| e.to_string())?;
        let b = evaluate(method.name(), &base.embedding, &labels, 0.05, &eval).map_err(|e| e.to_string())?;
        let h = evaluate(&harp_name(method), &harp.embedding, &labels, 0.05, &eval).map_err(|e| e.to_string())?;
        let c = compare_reports(&b, &h).map_err(|e| e.to_string())?;
        let (bm, hm) = (b.mean * 100.0, h.mean * 100.0);
        ensure((bm - flat_ref).abs() <= 3.0, || {
            format!("{method}: {bm:.2} vs reference {flat_ref}")
        })?;
        ensure((hm - harp_ref).abs() <= 3.0, || {
            format!("{}: {hm:.2} vs reference {harp_ref}", harp_name(method))
        })?;
        if method == Method::Line {
            ensure(c.gain_pct > 0.0 && c.p_value < 0.05, || {
                format!("line gain {:.1}% with p = {:.3}", c.gain_pct, c.p_value)
            })?;
        }
        detail.push(format!(
            "{method} {bm:.2} -> {hm:.2} (gain {:.1}%, p={:.3})",
            c.gain_pct, c.p_value
        ));
    }
    Ok(detail.join("; "))
}

/// Labeled fraction used on the synthetic fallback graph.
const FALLBACK_RATIO: f64 = 0.01;

fn classification_fallback() -> Result<String, String> {
    let (g, labels): (Graph, LabelSet) = planted_partition(3000, 6, 5.0, 0.2, 1).unwrap();
    let eval = EvalConfig {
        seed: 1,
        ..Default::default()
    };
    let mut gains = Vec::new();
    let mut detail = Vec::new();
    for method in Method::ALL {
        let cfg = HarpConfig::new(method).with_seed(1);
        let harp = harp_embed(&g, &cfg).map_err(|e| e.to_string())?;
        let base = baseline_embed(&g, &cfg, harp.budget.total).map_err(|e| e.to_string())?;
        let b = evaluate(method.name(), &base.embedding, &labels, FALLBACK_RATIO, &eval).map_err(|e| e.to_string())?;
        let h =
            evaluate(&harp_name(method), &harp.embedding, &labels, FALLBACK_RATIO, &eval).map_err(|e| e.to_string())?;
        let c = compare_reports(&b, &h).map_err(|e| e.to_string())?;
        detail.push(format!(
            "{method} {:.4} -> {:.4} (gain {:+.2}%, p={:.3})",
            b.mean, h.mean, c.gain_pct, c.p_value
        ));
        gains.push(h.mean - b.mean);
    }
    let summary = detail.join("; ");
    ensure(gains.iter().all(|&d| d >= 0.0), || format!("negative gain: {summary}"))?;
    let positive = gains.iter().filter(|&&d| d > 0.0).count();
    ensure(positive >= 2, || {
        format!("only {positive} strictly positive gains: {summary}")
    })?;
    Ok(summary)
}

#[test]
fn criterion_3_classification_gain() {
    criterion(3, "classification gain", || {
        let start = Instant::now();
        let detail = match (
            std::env::var("HARP_CITESEER_EDGES"),
            std::env::var("HARP_CITESEER_LABELS"),
        ) {
            (Ok(edges), Ok(labels)) => format!("CiteSeer: {}", classification_real(&edges, &labels)?),
            _ => format!("planted-partition fallback: {}", classification_fallback()?),
        };
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 1200.0, || format!("took {secs:.1}s"))?;
        Ok(detail)
    });
}

#[test]
fn criterion_4_sample_budget_fairness() {
    criterion(4, "sample-budget fairness", || {
        let g = erdos_renyi(1500, 10.0, 4).unwrap();
        let mut detail = Vec::new();
        for method in Method::ALL {
            let mut cfg = HarpConfig::new(method).with_seed(4);
            cfg.train.dim = 16;
            cfg.train.walks_per_node = 10;
            cfg.train.line_iterations = 10;
            let harp = run_mode(&g, &cfg, Mode::Harp).map_err(|e| e.to_string())?;
            let base = run_mode(&g, &cfg, Mode::Baseline).map_err(|e| e.to_string())?;
            let (h, b) = (harp.executed_samples as f64, base.executed_samples as f64);
            let gap = (h - b).abs() / h;
            ensure(gap <= 0.01, || format!("{method}: harp {h} vs flat {b} samples"))?;
            ensure(harp.executed_samples == harp.budget.total, || {
                format!("{method}: budget not met")
            })?;
            detail.push(format!("{method} {h}/{b}"));
        }
        let mut within = true;
        for (n, seed) in [(1000, 1), (5000, 2), (20_000, 3)] {
            let g = erdos_renyi(n, 10.0, seed).unwrap();
            let h = coarsen_hierarchy(&g, &CoarsenConfig::default(), seed).unwrap();
            let (nr, er) = (
                h.total_nodes() as f64 / g.node_count() as f64,
                h.total_edges() as f64 / g.edge_count() as f64,
            );
            within &= nr <= 2.5 && er <= 2.5;
            detail.push(format!("n={n} totals {nr:.2}x nodes/{er:.2}x edges"));
        }
        let summary = detail.join("; ");
        ensure(within, || format!("hierarchy totals above 2.5x: {summary}"))?;
        Ok(summary)
    });
}

#[test]
fn criterion_5_scalability() {
    criterion(5, "scalability", || {
        let start = Instant::now();
        let cfg = HarpConfig::new(Method::Line).with_seed(5);
        let sizes = [100, 1000, 10_000, 100_000];
        let records = bench_scaling(&sizes, 10.0, &cfg).map_err(|e| e.to_string())?;
        let harp: Vec<_> = records.iter().filter(|r| r.mode == Mode::Harp).collect();
        let xs: Vec<f64> = harp.iter().map(|r| r.nodes as f64).collect();
        let ys: Vec<f64> = harp.iter().map(|r| r.total_secs).collect();
        let (_, slope, r2) = linear_fit(&xs, &ys);
        let last = harp.last().unwrap();
        let overhead = last.overhead_secs() / last.total_secs;
        ensure(r2 >= 0.95, || format!("R^2 = {r2:.4} (times {ys:?})"))?;
        ensure(overhead <= 0.25, || {
            format!("overhead {:.1}% at n=1e5", overhead * 100.0)
        })?;
        ensure(harp[0].total_secs < 5.0, || {
            format!("n=100 took {:.2}s", harp[0].total_secs)
        })?;
        for r in &records {
            ensure(r.executed_samples == r.budget_samples, || {
                format!("n={} samples off budget", r.nodes)
            })?;
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 1800.0, || format!("took {secs:.1}s"))?;
        Ok(format!(
            "R^2 = {r2:.4}, {:.2} us/node, overhead {:.2}% at n=1e5, totals {:?}",
            slope * 1e6,
            overhead * 100.0,
            ys.iter().map(|y| format!("{y:.2}s")).collect::<Vec<_>>()
        ))
    });
}

fn alias_frequency_error() -> f64 {
    let weights = [1.0, 3.0, 0.0, 6.0];
    let table = AliasTable::new(&weights).unwrap();
    let mut counts = [0usize; 4];
    let mut rng = rng_from_seed(6);
    let draws = 400_000;
    for _ in 0..draws {
        counts[table.sample(&mut rng)] += 1;
    }
    weights
        .iter()
        .zip(counts)
        .map(|(w, c)| (c as f64 / draws as f64 - w / 10.0).abs())
        .fold(0.0, f64::max)
}

fn logreg_oracle_gap() -> f64 {
    let mut rng = rng_from_seed(66);
    let (n, d) = (80, 4);
    let xs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y: Vec<bool> = xs
        .iter()
        .map(|x| x[0] - 0.5 * x[1] + 0.3 * rng.random_range(-1.0..1.0) > 0.0)
        .collect();
    let l2 = 0.05;
    let oracle = common::newton_logreg(&xs, &y, l2);
    let x = EmbeddingMatrix::from_vec(n, d, xs.concat()).unwrap();
    let fit = fit_binary(
        &x,
        &y,
        &LogRegConfig {
            l2: Some(l2),
            max_iter: 100_000,
            tolerance: 1e-9,
        },
    )
    .unwrap();
    (fit.objective - oracle).abs() / oracle
}

#[test]
fn criterion_6_numerical_oracles() {
    criterion(6, "numerical oracles", || {
        let start = Instant::now();
        let mut grad = 0.0f64;
        for seed in 0..5 {
            grad = grad.max(common::skipgram_gradient_error(Objective::HierarchicalSoftmax, seed));
            grad = grad.max(common::skipgram_gradient_error(Objective::NegativeSampling, seed));
        }
        ensure(grad < 1e-4, || format!("gradient check relative error {grad:e}"))?;

        let norm = [2, 3, 17, 64]
            .iter()
            .map(|&n| common::hs_normalization_error(n, n as u64))
            .fold(0.0, f64::max);
        ensure(norm < 1e-10, || format!("hierarchical softmax sums off by {norm:e}"))?;

        let g = barabasi_albert(300, 3, 6).unwrap();
        let uniform = random_walks(&g, 5, 20, 42);
        let biased = node2vec_walks(&g, 5, 20, 1.0, 1.0, 42).unwrap();
        ensure(uniform == biased, || {
            "node2vec with p = q = 1 differs from uniform walks".into()
        })?;

        let alias = alias_frequency_error();
        ensure(alias < 0.005, || format!("alias frequencies off by {alias}"))?;

        let lr_gap = logreg_oracle_gap();
        ensure(lr_gap < 1e-6, || {
            format!("logistic regression objective gap {lr_gap:e}")
        })?;

        let pred = vec![vec![0], vec![0], vec![1]];
        let truth = vec![vec![0], vec![1], vec![1]];
        let f1 = macro_f1(&pred, &truth, 2);
        ensure(f1 == 2.0 / 3.0, || format!("hand-computed macro-F1 gave {f1}"))?;

        let mut rng = rng_from_seed(600);
        for i in 0..100 {
            let n = rng.random_range(5..120);
            let g = if i % 2 == 0 {
                erdos_renyi(n, rng.random_range(0.5..6.0f64).min((n - 1) as f64), i).unwrap()
            } else {
                barabasi_albert(n, rng.random_range(1..4), i).unwrap()
            };
            let cfg = CoarsenConfig {
                threshold: rng.random_range(1..10),
                max_levels: 32,
            };
            let h = coarsen_hierarchy(&g, &cfg, i).unwrap();
            common::check_hierarchy(&h).map_err(|e| format!("graph {i}: {e}"))?;
            common::check_matching(&g, i).map_err(|e| format!("graph {i}: {e}"))?;
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
        Ok(format!(
            "grad err {grad:.1e}, HS sum err {norm:.1e}, alias err {alias:.4}, logreg gap {lr_gap:.1e}, 100 hierarchies ok"
        ))
    });
}

#[test]
fn criterion_7_determinism() {
    criterion(7, "determinism", || {
        let (g, labels) = planted_partition(400, 4, 8.0, 0.2, 7).unwrap();
        let eval = EvalConfig {
            repetitions: 3,
            seed: 7,
            ..Default::default()
        };
        let mut checked = 0;
        for method in Method::ALL {
            for mode in [Mode::Baseline, Mode::Harp] {
                let mut cfg = HarpConfig::new(method).with_seed(7);
                cfg.train.dim = 32;
                cfg.train.walks_per_node = 10;
                cfg.coarsening.threshold = 50;
                let run = || {
                    let out = run_mode(&g, &cfg, mode).unwrap();
                    let report = evaluate("x", &out.embedding, &labels, 0.1, &eval).unwrap();
                    (
                        out.embedding.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        report.scores,
                    )
                };
                let (a, b) = (run(), run());
                ensure(a == b, || format!("{method} {mode:?}: runs differ"))?;
                checked += 1;
            }
        }
        Ok(format!("{checked} method/mode pairs bit-identical"))
    });
}
