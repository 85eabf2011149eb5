//! Multilevel graph embedding.
//!
//! A graph is repeatedly coarsened by star and edge collapsing, the coarsest
//! graph is embedded, and the embedding is prolonged and refined level by
//! level back to the input graph. DeepWalk, Node2vec and first-order LINE
//! embedders are provided, along with a node-classification harness and a
//! runtime benchmark.

pub mod alias;
pub mod bench;
pub mod coarsen;
pub mod embed;
pub mod error;
pub mod eval;
pub mod generate;
pub mod graph;
pub mod io;
pub mod labels;
pub mod pipeline;
pub mod rng;

pub use coarsen::{coarsen_hierarchy, CoarsenConfig, Hierarchy, ParentMap};
pub use embed::{EmbeddingMatrix, Method, Objective, TrainConfig};
pub use error::{HarpError, Result};
pub use graph::{Graph, GraphBuilder, NodeId};
pub use labels::LabelSet;
pub use pipeline::{baseline_embed, harp_embed, HarpConfig};
