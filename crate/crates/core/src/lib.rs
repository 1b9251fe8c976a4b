//! Mesoscale structure analysis for binary undirected collaboration networks.
//!
//! The crate covers the full path from a patent corpus to partition-level
//! reports: graph construction and whole-network metrics ([`graph`]),
//! partition bookkeeping ([`partition`]), null models and their maximum
//! likelihood fits ([`models`]), quality-driven community detection
//! ([`detect`]), cluster-level reports ([`analysis`]), corpus ingestion and
//! network building ([`corpus`]), and planted-model samplers ([`synth`]).
//!
//! All randomized routines take explicit seeds and are deterministic for a
//! fixed seed, platform, and input.

pub mod analysis;
pub mod corpus;
pub mod detect;
mod error;
pub mod graph;
pub mod models;
pub mod partition;
pub mod synth;

pub use error::{Error, Result};
pub use graph::Graph;
pub use partition::Partition;
