//! Retweet-network analysis toolkit: ingestion and descriptives, exponential
//! random graph model (ERGM) terms, Metropolis–Hastings simulation, pseudo-
//! and Monte-Carlo maximum likelihood estimation, and simulation-based
//! goodness of fit.
//!
//! Model math is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod estimator;
pub mod gof;
pub mod graph;
pub mod ingest;
pub mod io;
pub mod linalg;
pub mod model_file;
pub mod sampler;
pub mod scalar;
pub mod scenario;
pub mod terms;

pub use estimator::{EstimationError, LikelihoodBasis, McmleConfig, Method};
pub use graph::{DirectedGraph, GraphError, NodeTable, Role};
pub use sampler::{Proposal, SamplerConfig, SamplerError, DEFAULT_SEED};
pub use scalar::Scalar;
pub use terms::{Direction, ModelSpec, TermKind, TermSpec};

pub type Model = terms::Model<f64>;
pub type StatVector = terms::StatVector<f64>;
pub type FitResult = estimator::FitResult<f64>;
pub type ChainState = sampler::ChainState<f64>;
