//! Threshold coagulation on dynamic random graphs: clusters that reach a size
//! threshold fall into an inert gel. Includes pure percolation, a rejection
//! construction from independent graphs, exact kinetic solutions, the
//! Erdős–Rényi exploration walk, rooted-tree tools and a statistics harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod alternative;
pub mod cli;
pub mod error;
pub mod exploration;
pub mod forest;
pub mod kinetics;
pub mod sim;
pub mod stats;
pub mod stream;
pub mod trees;

pub use error::{Error, Result};
pub use forest::{ClusterForest, ComponentGraph, LinkOutcome};
pub use sim::{run, run_replicas, run_sim, Mode, SimConfig, SimResult, Threshold};
