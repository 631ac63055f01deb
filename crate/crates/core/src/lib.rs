//! Parameter estimation for software reliability growth models with swarm
//! metaheuristics.
//!
//! The crate is organised bottom-up:
//!
//! - [`models`]: the four NHPP mean value and intensity functions.
//! - [`data`]: cumulative failure datasets, splits, synthetic generation.
//! - [`fitness`]: RMSE / Euclidean distance and the [`fitness::Objective`].
//! - [`optimizers`]: cuckoo search, firefly, PSO and ACO behind [`optimizers::minimize`].
//! - [`harness`]: experiment grids, the brute-force grid oracle, and reports.

pub mod data;
pub mod fitness;
pub mod harness;
pub mod models;
pub mod optimizers;

/// The single PRNG every stochastic draw flows from.
pub type Rng = rand_chacha::ChaCha8Rng;

pub use data::{DataSplit, FailureDataset, FailurePoint, SyntheticMode};
pub use fitness::{Cost, Metric, Objective};
pub use models::{ModelKind, Params, SearchSpace};
pub use optimizers::{minimize, Algorithm, OptimizerConfig, RunResult};
