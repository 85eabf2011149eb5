mod args;
mod error;
mod manifest;

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use harp_core::bench::{bench_csv, bench_scaling};
use harp_core::eval::{compare_methods, curves_csv, evaluate, EvaluationReport};
use harp_core::generate::{barabasi_albert, erdos_renyi, grid, planted_partition, ring_lattice};
use harp_core::graph::largest_connected_component;
use harp_core::io::{
    format_edge_list, format_embedding, format_labels, parse_embedding, read_edge_list, write_hierarchy,
};
use harp_core::labels::{load_labels, load_labels_indexed, load_labels_indexed_skip_unknown, load_labels_skip_unknown};
use harp_core::pipeline::{embed_levels_dump, harp_embed_with, render_svg, run_mode, Mode};
use harp_core::{coarsen_hierarchy, Graph, LabelSet};

use args::{Cli, Command, GraphKind};
use error::{CliError, CliResult, Context};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Coarsen(a) => cmd_coarsen(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Bench(a) => cmd_bench(a),
        Command::DumpLevels(a) => cmd_dump_levels(a),
        Command::Run(a) => manifest::cmd_run(a),
        Command::Replay(a) => manifest::cmd_replay(a),
    }
}

pub(crate) fn load_graph(path: &Path) -> CliResult<Graph> {
    let loaded = read_edge_list(path).ctx("graph")?;
    if loaded.dropped_self_loops > 0 {
        log::warn!("{}: dropped {} self-loops", path.display(), loaded.dropped_self_loops);
    }
    Ok(loaded.graph)
}

pub(crate) fn load_label_file(path: &Path, g: &Graph, skip_unknown: bool) -> CliResult<LabelSet> {
    let text = fs::read_to_string(path).ctx("labels")?;
    if skip_unknown {
        let (labels, skipped) = load_labels_skip_unknown(&text, g).ctx("labels")?;
        if skipped > 0 {
            log::warn!("{}: skipped {skipped} lines naming unknown nodes", path.display());
        }
        Ok(labels)
    } else {
        load_labels(&text, g).ctx("labels")
    }
}

/// Writes `text` to `path`, or stdout when `path` is absent.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).ctx("io"),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(a: args::GenerateArgs) -> CliResult<()> {
    let seed = a.seed.seed;
    let (g, labels) = match a.kind {
        GraphKind::Er => (erdos_renyi(a.nodes, a.avg_degree, seed).ctx("generate")?, None),
        GraphKind::Ba => (barabasi_albert(a.nodes, a.attach, seed).ctx("generate")?, None),
        GraphKind::Ring => (ring_lattice(a.nodes, a.neighbors).ctx("generate")?, None),
        GraphKind::Grid => (grid(a.rows, a.cols).ctx("generate")?, None),
        GraphKind::Planted => {
            let (g, l) = planted_partition(a.nodes, a.communities, a.avg_degree, a.mixing, seed).ctx("generate")?;
            (g, Some(l))
        }
    };
    fs::write(&a.output, format_edge_list(&g)).ctx("io")?;
    match (labels, &a.labels) {
        (Some(l), Some(path)) => fs::write(path, format_labels(&l, |u| g.external_id(u))).ctx("io")?,
        (None, Some(_)) => return Err(CliError::Usage("--labels is only produced by --kind planted".into())),
        _ => {}
    }
    eprintln!("wrote {} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(())
}

fn cmd_coarsen(a: args::CoarsenArgs) -> CliResult<()> {
    let g = load_graph(&a.input)?;
    let (lcc, _) = largest_connected_component(&g);
    let h = coarsen_hierarchy(&lcc, &a.coarsening.config(), a.seed.seed).ctx("coarsen")?;
    if let Some(dir) = &a.out_dir {
        write_hierarchy(dir, &h).ctx("io")?;
    }
    emit(a.stats.as_deref(), &harp_core::io::format_level_stats(&h))
}

fn cmd_embed(a: args::EmbedArgs) -> CliResult<()> {
    let g = load_graph(&a.input)?;
    let config = a.train.harp_config(a.method, a.seed.seed);
    if let Some(dir) = &a.dump_levels {
        if a.mode != Mode::Harp {
            return Err(CliError::Usage("--dump-levels needs --mode harp".into()));
        }
        fs::create_dir_all(dir).ctx("io")?;
        let out = harp_embed_with(&g, &config, |level, graph, emb| {
            let ids = |u: usize| {
                if level == 0 {
                    graph.external_id(u)
                } else {
                    u.to_string()
                }
            };
            fs::write(dir.join(format!("level_{level}.emb")), format_embedding(emb, ids))?;
            if emb.dim() == 2 {
                fs::write(dir.join(format!("level_{level}.svg")), render_svg(graph, emb))?;
            }
            Ok(())
        })
        .ctx("pipeline")?;
        fs::write(&a.output, format_embedding(&out.embedding, |u| g.external_id(u))).ctx("io")?;
        return Ok(());
    }
    let out = run_mode(&g, &config, a.mode).ctx("pipeline")?;
    let text = format_embedding(&out.embedding, |u| g.external_id(u));
    fs::write(&a.output, &text).ctx("io")?;
    if let Some(path) = &a.manifest {
        manifest::RunManifest::new(&a.input, a.mode, &config, &out, &a.output, &text).write(path)?;
    }
    eprintln!(
        "embedded {} nodes: {} samples (budget {})",
        out.embedding.rows(),
        out.executed_samples,
        out.budget.total
    );
    Ok(())
}

fn cmd_eval(a: args::EvalArgs) -> CliResult<()> {
    let (ids, emb) = parse_embedding(&fs::read_to_string(&a.embedding).ctx("io")?).ctx("embedding")?;
    let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    let text = fs::read_to_string(&a.labels).ctx("labels")?;
    let labels = if a.eval.skip_unknown {
        let (labels, skipped) = load_labels_indexed_skip_unknown(&text, &index, emb.rows()).ctx("labels")?;
        if skipped > 0 {
            log::warn!("{}: skipped {skipped} lines naming unknown nodes", a.labels.display());
        }
        labels
    } else {
        load_labels_indexed(&text, &index, emb.rows()).ctx("labels")?
    };
    let cfg = a.eval.config(a.seed.seed);
    let mut reports: Vec<EvaluationReport> = Vec::new();
    for &ratio in &a.eval.ratios {
        reports.push(evaluate(&a.name, &emb, &labels, ratio, &cfg).ctx("evaluation")?);
    }
    for r in &reports {
        eprintln!("{} ratio {}: macro-F1 {:.4}", r.method, r.ratio, r.mean);
    }
    emit(a.out.as_deref(), &curves_csv(&reports))
}

fn cmd_compare(a: args::CompareArgs) -> CliResult<()> {
    let g = load_graph(&a.input)?;
    let labels = load_label_file(&a.labels, &g, a.eval.skip_unknown)?;
    let configs: Vec<_> = a.methods.iter().map(|&m| a.train.harp_config(m, a.seed.seed)).collect();
    let table =
        compare_methods(&g, &labels, &configs, &a.eval.ratios, &a.eval.config(a.seed.seed)).ctx("evaluation")?;
    if let Some(path) = &a.out {
        fs::write(path, table.curves_csv()).ctx("io")?;
    }
    emit(a.summary.as_deref(), &table.summary_csv())
}

fn cmd_bench(a: args::BenchArgs) -> CliResult<()> {
    let config = a.train.harp_config(a.method, a.seed.seed);
    let records = bench_scaling(&a.nodes, a.avg_degree, &config).ctx("bench")?;
    emit(a.out.as_deref(), &bench_csv(&records))
}

fn cmd_dump_levels(a: args::DumpLevelsArgs) -> CliResult<()> {
    let g = load_graph(&a.input)?;
    let mut config = a.train.harp_config(a.method, a.seed.seed);
    config.train.dim = 2;
    let rows = embed_levels_dump(&g, &config, &a.out_dir).ctx("pipeline")?;
    eprintln!("wrote {} levels to {}", rows.len(), a.out_dir.display());
    Ok(())
}
