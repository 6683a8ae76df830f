//! Origin–destination demand forecasting for urban rail networks with
//! multi-graph inductive representation learning.
//!
//! Every OD pair of the network is a vertex. Four graphs connect the
//! vertices: a temporal graph built from demand-series similarity (DTW or
//! FFT magnitude spectra), and three spatial graphs from OD centroid,
//! origin and destination distances. A two-layer mean-aggregator
//! GraphSAGE encoder runs over each graph, the four embeddings are
//! concatenated and a linear head predicts the complete demand of the next
//! 20-minute interval.
//!
//! The crate is organised bottom-up:
//!
//! - [`network`]: stations, lines, OD-pair vertex universe, node-ID encodings
//! - [`simulator`]: seeded synthetic tap-in/tap-out and train-operation logs
//! - [`features`]: partially observed demand, calendar and reliability features
//! - [`graphs`]: DTW, radix-2 FFT, distance matrices and graph builders
//! - [`model`]: the multi-graph GraphSAGE model, analytic gradients, training
//! - [`baselines`]: ridge regression and a two-layer GCN
//! - [`eval`]: splits, metrics, disruption strata, paired t-tests, reports
//! - [`pipeline`]: configuration and the staged end-to-end driver used by the
//!   `odsage` binary
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod features;
pub mod graphs;
pub mod model;
pub mod network;
pub mod pipeline;
pub mod simulator;
pub mod time;

pub use error::{Error, Result};
