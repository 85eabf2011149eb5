//! Text formats: edge lists, embeddings, and serialized hierarchies.
//!
//! Edge list: UTF-8, one edge per line as `source target [weight]`,
//! whitespace-separated; blank lines and lines starting with `#` are ignored.
//!
//! Embedding: first line `<n> <d>`, then `<id> <v1> ... <vd>` per node. Values
//! are written with Rust's shortest round-trip float formatting.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::coarsen::Hierarchy;
use crate::embed::EmbeddingMatrix;
use crate::error::{HarpError, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::labels::LabelSet;

/// A parsed edge list.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub dropped_self_loops: usize,
}

/// Parses an edge list. String ids map to dense internal ids in order of first
/// appearance.
pub fn load_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(HarpError::parse(
                lineno + 1,
                format!("expected 2 or 3 tokens, found {}", tokens.len()),
            ));
        }
        let w = match tokens.get(2) {
            Some(t) => {
                let w: f64 = t
                    .parse()
                    .map_err(|_| HarpError::parse(lineno + 1, format!("bad weight `{t}`")))?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(HarpError::parse(
                        lineno + 1,
                        format!("weight must be positive, got {w}"),
                    ));
                }
                w
            }
            None => 1.0,
        };
        let u = intern_token(tokens[0], &mut index, &mut names);
        let v = intern_token(tokens[1], &mut index, &mut names);
        edges.push((u, v, w));
    }

    let mut b = GraphBuilder::with_capacity(names.len(), edges.len());
    for (u, v, w) in edges {
        b.add_edge(u, v, w);
    }
    let dropped_self_loops = b.dropped_self_loops();
    if dropped_self_loops > 0 {
        log::warn!("dropped {dropped_self_loops} self-loop line(s)");
    }
    Ok(LoadedGraph {
        graph: b.build().with_external_ids(names),
        dropped_self_loops,
    })
}

fn intern_token<'a>(tok: &'a str, index: &mut HashMap<&'a str, usize>, names: &mut Vec<String>) -> usize {
    *index.entry(tok).or_insert_with(|| {
        names.push(tok.to_string());
        names.len() - 1
    })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    load_edge_list(&fs::read_to_string(path)?)
}

/// Serializes a graph as an edge list (`u v w` per undirected edge), using
/// external ids when present.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.edges() {
        writeln!(out, "{} {} {}", g.external_id(u), g.external_id(v), w).unwrap();
    }
    out
}

/// Serializes labels as `<id> <label> ...` lines for labeled nodes.
pub fn format_labels(labels: &LabelSet, ids: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    for u in labels.labeled_nodes() {
        out.push_str(&ids(u));
        for &l in labels.labels_of(u) {
            write!(out, " {}", labels.label_names()[l]).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Serializes an embedding; row `i` is labeled `ids(i)`.
pub fn format_embedding(emb: &EmbeddingMatrix, ids: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", emb.rows(), emb.dim()).unwrap();
    for r in 0..emb.rows() {
        out.push_str(&ids(r));
        for v in emb.row(r) {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses an embedding file into `(row ids, matrix)`.
pub fn parse_embedding(text: &str) -> Result<(Vec<String>, EmbeddingMatrix)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| HarpError::parse(1, "missing header"))?;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| HarpError::parse(1, "header must be `<n> <d>`"))?;
    let [n, d] = head[..] else {
        return Err(HarpError::parse(1, "header must be `<n> <d>`"));
    };
    let mut ids = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * d);
    for (lineno, line) in lines {
        let mut tokens = line.split_whitespace();
        ids.push(tokens.next().unwrap().to_string());
        let before = data.len();
        for t in tokens {
            let v: f64 = t
                .parse()
                .map_err(|_| HarpError::parse(lineno + 1, format!("bad value `{t}`")))?;
            data.push(v);
        }
        if data.len() - before != d {
            return Err(HarpError::parse(
                lineno + 1,
                format!("expected {d} values, found {}", data.len() - before),
            ));
        }
    }
    if ids.len() != n {
        return Err(HarpError::parse(
            0,
            format!("header declares {n} rows, found {}", ids.len()),
        ));
    }
    Ok((ids, EmbeddingMatrix::from_vec(n, d, data)?))
}

/// Writes a hierarchy into `dir`:
///
/// * `level_<i>.edgelist`: `u v w` per undirected edge of `G_i`, internal ids.
/// * `parents_<i>.tsv`: `fine_id<TAB>coarse_id` for every node of `G_i`.
/// * `ids.tsv`: `internal_id<TAB>external_id` for level 0.
/// * `levels.csv`: `level,nodes,edges,node_ratio,edge_ratio`.
pub fn write_hierarchy(dir: impl AsRef<Path>, h: &Hierarchy) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for (i, g) in h.graphs().iter().enumerate() {
        let mut out = String::new();
        for (u, v, w) in g.edges() {
            writeln!(out, "{u} {v} {w}").unwrap();
        }
        fs::write(dir.join(format!("level_{i}.edgelist")), out)?;
    }
    for (i, pm) in h.parent_maps().iter().enumerate() {
        let mut out = String::new();
        for (fine, &coarse) in pm.as_slice().iter().enumerate() {
            writeln!(out, "{fine}\t{coarse}").unwrap();
        }
        fs::write(dir.join(format!("parents_{i}.tsv")), out)?;
    }
    let g0 = &h.graphs()[0];
    let ids: String = (0..g0.node_count())
        .map(|u| format!("{u}\t{}\n", g0.external_id(u)))
        .collect();
    fs::write(dir.join("ids.tsv"), ids)?;
    fs::write(dir.join("levels.csv"), format_level_stats(h))?;
    Ok(())
}

/// Per-level size table, ratios relative to level 0.
pub fn format_level_stats(h: &Hierarchy) -> String {
    let mut out = String::from("level,nodes,edges,node_ratio,edge_ratio\n");
    for s in h.level_stats() {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.level, s.nodes, s.edges, s.node_ratio, s.edge_ratio
        )
        .unwrap();
    }
    out
}
