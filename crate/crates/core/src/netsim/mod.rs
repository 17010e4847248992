//! Discrete-event simulation of the distributed protocols.
//!
//! Nodes of the complex's 1-skeleton are processors that talk only to their
//! neighbours. Every edge is emulated on its higher endpoint. Phases run to
//! quiescence one after another over a shared simulator, so the cost report
//! covers the whole run.

mod cost;
mod engine;
mod gossip;
mod harmonic;
mod integral;
mod pipeline;
mod reduce;
mod select;
mod tree;

use thiserror::Error;

pub use cost::{CostReport, NodeCost};
pub use engine::{
    Dest, Message, Outbox, Outcome, Payload, Phase, Protocol, ReportEntry, Scheduling, SimConfig, Simulator,
    TranscriptLevel,
};
pub use gossip::{run_max_gossip, GossipOutcome};
pub use harmonic::{run_distributed_harmonic, DistributedHarmonic, EdgeEmulation};
pub use integral::{run_integral_function, IntegralOutcome, IntegralTree};
pub use pipeline::{run_full_pipeline, DistributedOutput};
pub use reduce::run_reduce_convergecast;
pub use select::{run_announce, run_classification, run_prune_and_select, select_representatives, SelectOutcome};
pub use tree::run_spanning_tree;

use crate::complex::SimplicialComplex2;
use crate::cyclebasis::CycleBasisError;
use crate::harmonic::HarmonicError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetsimError {
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    CycleBasis(#[from] CycleBasisError),
    #[error("event queue still busy after {events} deliveries")]
    NonQuiescent { events: u64 },
    #[error("invalid simulator configuration: {0}")]
    InvalidConfig(String),
    #[error("protocol failure: {0}")]
    Protocol(String),
    #[error("cost bound violated: {0}")]
    CostBound(String),
}

impl NetsimError {
    /// The harmonic error behind this one, wherever it was raised.
    pub fn harmonic(&self) -> Option<&HarmonicError> {
        match self {
            NetsimError::Harmonic(h) | NetsimError::CycleBasis(CycleBasisError::Harmonic(h)) => Some(h),
            _ => None,
        }
    }
}

/// Neighbour lists of the complex's vertices.
pub fn network_of(k: &SimplicialComplex2) -> Vec<Vec<usize>> {
    (0..k.vertex_count()).map(|v| k.neighbors(v).to_vec()).collect()
}
