//! Python bindings: graphs, coarsening, flat and multilevel embedding, and
//! node-classification evaluation.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use harp_core::coarsen::Hierarchy;
use harp_core::embed::EmbeddingMatrix;
use harp_core::eval::{compare_methods, evaluate as eval_core, EvalConfig, LogRegConfig};
use harp_core::pipeline::{run_mode, HarpConfig, Mode};
use harp_core::{generate, io, HarpError, LabelSet, Method, TrainConfig};

fn py_err(e: HarpError) -> PyErr {
    match e {
        HarpError::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(format!("{}: {other}", other.kind())),
    }
}

fn parse_method(name: &str) -> PyResult<Method> {
    name.parse().map_err(py_err)
}

/// Undirected weighted graph with dense node ids.
#[pyclass(name = "Graph", module = "harp", frozen)]
struct PyGraph {
    inner: harp_core::Graph,
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from `(u, v)` or `(u, v, weight)` tuples.
    #[new]
    #[pyo3(signature = (n, edges))]
    fn new(n: usize, edges: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let mut b = harp_core::GraphBuilder::new(n);
        for e in edges {
            let (u, v, w) = match e.extract::<(usize, usize, f64)>() {
                Ok(t) => t,
                Err(_) => {
                    let (u, v) = e.extract::<(usize, usize)>()?;
                    (u, v, 1.0)
                }
            };
            if u >= n || v >= n {
                return Err(PyValueError::new_err(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(PyValueError::new_err(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            b.add_edge(u, v, w);
        }
        Ok(PyGraph { inner: b.build() })
    }

    /// Reads a whitespace-separated edge list (`src dst [weight]`).
    #[staticmethod]
    fn read_edge_list(path: &str) -> PyResult<Self> {
        let loaded = io::read_edge_list(path).map_err(py_err)?;
        Ok(PyGraph { inner: loaded.graph })
    }

    #[staticmethod]
    fn parse_edge_list(text: &str) -> PyResult<Self> {
        let loaded = io::load_edge_list(text).map_err(py_err)?;
        Ok(PyGraph { inner: loaded.graph })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn neighbors(&self, u: usize) -> PyResult<Vec<(usize, f64)>> {
        self.check(u)?;
        Ok(self.inner.adjacency(u).collect())
    }

    fn degree(&self, u: usize) -> PyResult<usize> {
        self.check(u)?;
        Ok(self.inner.degree(u))
    }

    /// Each undirected edge once, as `(u, v, weight)` with `u < v`.
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().collect()
    }

    fn external_id(&self, u: usize) -> PyResult<String> {
        self.check(u)?;
        Ok(self.inner.external_id(u))
    }

    fn to_edge_list(&self) -> String {
        io::format_edge_list(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

impl PyGraph {
    fn check(&self, u: usize) -> PyResult<()> {
        if u < self.inner.node_count() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("node {u} out of range")))
        }
    }
}

#[pyfunction]
#[pyo3(signature = (n, avg_degree, seed=0))]
fn erdos_renyi(n: usize, avg_degree: f64, seed: u64) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: generate::erdos_renyi(n, avg_degree, seed).map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (n, m, seed=0))]
fn barabasi_albert(n: usize, m: usize, seed: u64) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: generate::barabasi_albert(n, m, seed).map_err(py_err)?,
    })
}

#[pyfunction]
fn ring_lattice(n: usize, k: usize) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: generate::ring_lattice(n, k).map_err(py_err)?,
    })
}

#[pyfunction]
fn grid(rows: usize, cols: usize) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: generate::grid(rows, cols).map_err(py_err)?,
    })
}

/// Planted-partition graph and each node's community.
#[pyfunction]
#[pyo3(signature = (n, communities, avg_degree, mixing, seed=0))]
fn planted_partition(
    n: usize,
    communities: usize,
    avg_degree: f64,
    mixing: f64,
    seed: u64,
) -> PyResult<(PyGraph, Vec<usize>)> {
    let (g, labels) = generate::planted_partition(n, communities, avg_degree, mixing, seed).map_err(py_err)?;
    let community = (0..n).map(|u| labels.labels_of(u)[0]).collect();
    Ok((PyGraph { inner: g }, community))
}

/// Coarsening hierarchy; level 0 is the input graph.
#[pyclass(name = "Hierarchy", module = "harp", frozen)]
struct PyHierarchy {
    inner: Hierarchy,
}

#[pymethods]
impl PyHierarchy {
    /// Index of the coarsest level.
    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn graph(&self, level: usize) -> PyResult<PyGraph> {
        self.check(level)?;
        Ok(PyGraph {
            inner: self.inner.graph(level).clone(),
        })
    }

    /// Parent of each node of `level` in level `level + 1`.
    fn parents(&self, level: usize) -> PyResult<Vec<usize>> {
        if level >= self.inner.depth() {
            return Err(PyValueError::new_err(format!("level {level} has no coarser parent")));
        }
        Ok(self.inner.parent_maps()[level].as_slice().to_vec())
    }

    /// `(nodes, edges)` per level.
    fn sizes(&self) -> Vec<(usize, usize)> {
        self.inner.level_stats().iter().map(|s| (s.nodes, s.edges)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.depth() + 1
    }

    fn __repr__(&self) -> String {
        format!("Hierarchy(levels={})", self.inner.depth() + 1)
    }
}

impl PyHierarchy {
    fn check(&self, level: usize) -> PyResult<()> {
        if level <= self.inner.depth() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("level {level} out of range")))
        }
    }
}

#[pyfunction]
#[pyo3(signature = (graph, threshold=100, max_levels=32, seed=0))]
fn coarsen(graph: &PyGraph, threshold: usize, max_levels: usize, seed: u64) -> PyResult<PyHierarchy> {
    let cfg = harp_core::CoarsenConfig { threshold, max_levels };
    Ok(PyHierarchy {
        inner: harp_core::coarsen_hierarchy(&graph.inner, &cfg, seed).map_err(py_err)?,
    })
}

/// Row-major embedding plus the sample accounting of the run that made it.
#[pyclass(name = "Embedding", module = "harp", frozen)]
struct PyEmbedding {
    inner: EmbeddingMatrix,
    #[pyo3(get)]
    executed_samples: u64,
    #[pyo3(get)]
    budget_samples: u64,
    #[pyo3(get)]
    seconds: f64,
}

#[pymethods]
impl PyEmbedding {
    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn row(&self, r: usize) -> PyResult<Vec<f64>> {
        if r >= self.inner.rows() {
            return Err(PyValueError::new_err(format!("row {r} out of range")));
        }
        Ok(self.inner.row(r).to_vec())
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows()).map(|r| self.inner.row(r).to_vec()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.rows()
    }

    fn __repr__(&self) -> String {
        format!("Embedding(rows={}, dim={})", self.inner.rows(), self.inner.dim())
    }
}

#[allow(clippy::too_many_arguments)]
fn harp_config(
    method: &str,
    seed: u64,
    dim: Option<usize>,
    walks_per_node: Option<usize>,
    walk_length: Option<usize>,
    window: Option<usize>,
    iterations: Option<usize>,
    p: f64,
    q: f64,
    threshold: usize,
) -> PyResult<HarpConfig> {
    let method = parse_method(method)?;
    let d = TrainConfig::for_method(method);
    let mut cfg = HarpConfig::new(method).with_seed(seed);
    cfg.train = TrainConfig {
        dim: dim.unwrap_or(d.dim),
        walks_per_node: walks_per_node.unwrap_or(d.walks_per_node),
        walk_length: walk_length.unwrap_or(d.walk_length),
        window: window.unwrap_or(d.window),
        line_iterations: iterations.unwrap_or(d.line_iterations),
        p,
        q,
        seed,
        ..d
    };
    cfg.coarsening.threshold = threshold;
    Ok(cfg)
}

/// Embeds `graph` with `method` (`deepwalk`, `line` or `node2vec`).
/// `mode="harp"` runs the multilevel pipeline; `mode="baseline"` runs the
/// flat embedder on the same sample budget.
#[pyfunction]
#[pyo3(signature = (graph, method, mode="harp", *, seed=0, dim=None, walks_per_node=None, walk_length=None,
    window=None, iterations=None, p=1.0, q=1.0, threshold=100))]
#[allow(clippy::too_many_arguments)]
fn embed(
    py: Python<'_>,
    graph: &PyGraph,
    method: &str,
    mode: &str,
    seed: u64,
    dim: Option<usize>,
    walks_per_node: Option<usize>,
    walk_length: Option<usize>,
    window: Option<usize>,
    iterations: Option<usize>,
    p: f64,
    q: f64,
    threshold: usize,
) -> PyResult<PyEmbedding> {
    let cfg = harp_config(
        method,
        seed,
        dim,
        walks_per_node,
        walk_length,
        window,
        iterations,
        p,
        q,
        threshold,
    )?;
    let mode: Mode = mode.parse().map_err(py_err)?;
    let out = py.detach(|| run_mode(&graph.inner, &cfg, mode)).map_err(py_err)?;
    Ok(PyEmbedding {
        seconds: out.timings.total(),
        executed_samples: out.executed_samples,
        budget_samples: out.budget.total,
        inner: out.embedding,
    })
}

fn label_set(labels: &[Vec<usize>]) -> LabelSet {
    let label_count = labels.iter().flatten().max().map_or(0, |&l| l + 1);
    let pairs = labels
        .iter()
        .enumerate()
        .flat_map(|(u, ls)| ls.iter().map(move |&l| (u, l)));
    LabelSet::from_pairs(labels.len(), label_count, pairs)
}

fn eval_config(repetitions: usize, seed: u64, l2: Option<f64>) -> EvalConfig {
    EvalConfig {
        repetitions,
        seed,
        logreg: LogRegConfig {
            l2,
            ..LogRegConfig::default()
        },
    }
}

/// Mean macro-F1 and per-repetition scores of one-vs-rest logistic
/// regression trained on a `ratio` fraction of the labeled nodes.
/// `labels[u]` lists node `u`'s label ids (empty = unlabeled).
#[pyfunction]
#[pyo3(signature = (embedding, labels, ratio, repetitions=10, seed=0, l2=None))]
fn evaluate(
    py: Python<'_>,
    embedding: &PyEmbedding,
    labels: Vec<Vec<usize>>,
    ratio: f64,
    repetitions: usize,
    seed: u64,
    l2: Option<f64>,
) -> PyResult<(f64, Vec<f64>)> {
    let labels = label_set(&labels);
    let cfg = eval_config(repetitions, seed, l2);
    let r = py
        .detach(|| eval_core("embedding", &embedding.inner, &labels, ratio, &cfg))
        .map_err(py_err)?;
    Ok((r.mean, r.scores))
}

/// Flat vs multilevel comparison at matched budgets. Returns one dict per
/// (method, ratio) with both means, the relative gain and the paired-t p-value.
#[pyfunction]
#[pyo3(signature = (graph, labels, methods, ratios, repetitions=10, seed=0))]
fn compare<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    labels: Vec<Vec<usize>>,
    methods: Vec<String>,
    ratios: Vec<f64>,
    repetitions: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, pyo3::types::PyDict>>> {
    let labels = label_set(&labels);
    let configs = methods
        .iter()
        .map(|m| Ok(HarpConfig::new(parse_method(m)?).with_seed(seed)))
        .collect::<PyResult<Vec<_>>>()?;
    let eval = eval_config(repetitions, seed, None);
    let table = py
        .detach(|| compare_methods(&graph.inner, &labels, &configs, &ratios, &eval))
        .map_err(py_err)?;
    table
        .comparisons
        .iter()
        .map(|c| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("method", &c.method)?;
            d.set_item("ratio", c.ratio)?;
            d.set_item("baseline", c.baseline_mean)?;
            d.set_item("harp", c.harp_mean)?;
            d.set_item("gain_pct", c.gain_pct)?;
            d.set_item("p_value", c.p_value)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn harp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyHierarchy>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_function(wrap_pyfunction!(erdos_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(barabasi_albert, m)?)?;
    m.add_function(wrap_pyfunction!(ring_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(planted_partition, m)?)?;
    m.add_function(wrap_pyfunction!(coarsen, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
