//! And-Inverter Graph optimization by per-node orchestration of rewrite,
//! resubstitution and refactor, guided by a graph-learning predictor.

pub mod aig;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod features;
pub mod flow;
pub mod predictor;
pub mod sampling;
pub mod transforms;
pub mod truth;

pub use aig::{Aig, Lit, NodeId};
pub use error::{Error, Result};
