//! Discrete-time simulation of a networked ecosystem of organizations.
//!
//! Organizations sit on an undirected collaboration graph, employ workers of
//! several profiles, and periodically form temporary collaborative networks
//! (CNs). Each CN links its members; once it dissolves the pair synergy fades
//! along a logistic curve and the link is dropped when it becomes
//! insignificant. Workers are hired from an unemployed pool, fired back into
//! it, or quit towards neighboring and same-profile organizations.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the parallel
//! experiment runner and the command line live in the `orgsim` crate.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod ecosystem;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod params;
pub mod stats;

pub use dynamics::{step, StepReport};
pub use ecosystem::{
    init_ecosystem, CollaborativeNetwork, EcosystemConfig, EcosystemState, EmploymentMatrix, Generator, OrgId,
    ProfileIndex, Snapshot,
};
pub use error::{Error, Result};
pub use experiment::{
    run_experiment, run_replicate, AggregateRecord, ExperimentConfig, ExperimentResults, MetricsRecord, SweepAxis,
    SweepPoint,
};
pub use graph::Graph;
pub use params::{ModelParams, SynergyCountMode};

/// Random stream used by every replicate.
pub type SimRng = rand_chacha::ChaCha8Rng;
