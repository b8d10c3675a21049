//! Strategyproof k-selection on directed approval graphs.
//!
//! Agents report outgoing approval edges; a mechanism selects `k` of them
//! while trying to maximise the selected agents' total indegree, without
//! letting any agent change its own chance of selection through its report.
//!
//! * [`graph`]: the graph model, edge-list format and instance generators.
//! * [`mechanisms`]: optimal (non-strategyproof) benchmark, random subset,
//!   Random m-Partition, Edge Scan and Sliding Partition.
//! * [`exact`]: exact outcome distributions, generic over the probability
//!   scalar.
//! * [`audit`]: strategyproofness checks, approximation ratios, the
//!   deterministic impossibility search and lower-bound witnesses.

pub mod audit;
pub mod error;
pub mod exact;
pub mod graph;
pub mod mechanisms;
pub mod num;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{AgentId, DirectedGraph, Selection};
pub use mechanisms::MechanismSpec;
pub use num::{Probability, Rational};

/// Distribution with exact rational probabilities (used by all audits).
pub type ExactDistribution = exact::SelectionDistribution<Rational>;
/// Distribution with `f64` probabilities.
pub type FloatDistribution = exact::SelectionDistribution<f64>;
/// Distribution with `f32` probabilities.
pub type Float32Distribution = exact::SelectionDistribution<f32>;
