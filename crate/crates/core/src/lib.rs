//! Online network design with predictions.
//!
//! Every algorithm is generic over a [`Scalar`] cost type. [`Exact`]
//! (arbitrary-precision rationals) is the default used by the CLI and by the
//! invariant suites; `f64` is available for large batches.

pub mod adversaries;
pub mod engines;
pub mod error;
pub mod error_model;
pub mod framework;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod matching;
pub mod oracles;
pub mod perturb;
pub mod prize_collecting;
pub mod reductions;
pub mod request;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
pub use graph::{EdgeId, Metric, Priority, VertexId, WeightedGraph, ZeroCostOverlay};
pub use request::{Demand, DemandKind, PredictionSet, ProblemKind, Request};
pub use scalar::{Extended, Scalar};

/// Exact rational cost.
pub type Exact = num_rational::BigRational;
pub type ExactGraph = WeightedGraph<Exact>;
pub type FloatGraph = WeightedGraph<f64>;
