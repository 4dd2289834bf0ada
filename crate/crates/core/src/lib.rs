//! k-supernode summaries of undirected graphs.
//!
//! A summary partitions the nodes into `k` supernodes and stores the edge
//! density between every pair of them. Summaries are built by embedding the
//! nodes with a relaxed trace maximization ([`spectral::lm_eigs`] or
//! [`stiefel::ocsa`]), clustering the embedding ([`kmeans`]) and optionally
//! refining the partition node by node ([`summary::reassignment`]).

pub mod error;
pub mod graph;
pub mod kmeans;
pub mod queries;
pub mod rng;
pub mod spectral;
pub mod stiefel;
pub mod summary;

pub use error::{Error, Result};
pub use graph::{Graph, NodeRelabeling};
pub use summary::{specsumm, EvalReport, Membership, RelaxMethod, SpecSummConfig, Summary};
