//! Reference predictors: ridge regression and a single-graph GCN.

pub mod gcn;
pub mod ridge;

pub use gcn::{gcn_train, normalized_adjacency, GcnConfig, GcnModel};
pub use ridge::{Moments, RidgeModel, DEFAULT_LAMBDA, LAMBDA_GRID};
