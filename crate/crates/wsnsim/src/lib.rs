//! Deterministic round-based simulator for cluster-head election protocols
//! in homogeneous wireless sensor networks.
//!
//! Three election schemes run over a shared first-order radio model:
//!
//! - **LEACH** — rotation threshold, blind to energy and position.
//! - **E-LEACH** — LEACH above half energy, residual-energy weighting below.
//! - **DE-LEACH** — region split at the average node-to-BS distance:
//!   near nodes elect by distance, far nodes by residual energy.
//!
//! Runs are seed-reproducible end to end: the same seed yields bit-identical
//! deployments, elections, energy traces and CSV output.

pub mod config;
pub mod election;
pub mod engine;
pub mod harness;
pub mod metrics;
pub mod radio;
pub mod topology;

pub use config::SimConfig;
pub use election::{ElectionParams, Protocol};
pub use engine::{run_simulation, SimState};
pub use metrics::{RoundRecord, RunSummary};
pub use radio::RadioParams;
pub use topology::{generate_topology, Topology};
