//! The multi-graph GraphSAGE regressor.

pub mod layer;
pub mod mgraphsage;
pub mod optim;

pub use layer::{
    aggregate, aggregate_transpose, sample_neighbors, Activation, Neighborhood, SageLayer,
};
pub use mgraphsage::{
    init_model, predict_samples, train, Aggregation, MGraphSage, SageParams, TrainConfig,
    TrainReport, CHANNELS,
};
pub use optim::{Optimizer, OptimizerKind};
