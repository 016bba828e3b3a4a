//! Graph-convolution surrogate that scores decision vectors: three
//! mean-aggregation convolutions, global mean pooling and a dense head with
//! batch normalization and a sigmoid output.

mod io;
mod model;
mod train;

use std::sync::Arc;

pub use io::{load_model, model_from_bytes, model_to_bytes, save_model, Lineage, FORMAT_VERSION, MAGIC};
pub use model::{
    features_matrix, Adjacency, BatchStats, Gradients, GraphInput, Mode, Model, ModelConfig, Scaler, BN_EPS,
    BN_MOMENTUM,
};
pub use train::{evaluate, spearman, train, Adam, Dataset, EpochStats, LossCurve, TrainConfig};

use crate::error::Result;
use crate::features::GraphSample;

/// Network input for an exported sample.
pub fn graph_input(sample: &GraphSample) -> Result<GraphInput> {
    let adj = Adjacency::new(sample.num_nodes(), &sample.edges)?;
    GraphInput::new(Arc::new(adj), features_matrix(&sample.features))
}
