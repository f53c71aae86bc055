//! Triangle-switch Markov chains on graphs with a fixed degree sequence.
//!
//! The crate provides the switch chain and the triangle-weighted Δ-switch
//! chain with stationary law proportional to `λ^t(G)`, a deterministic
//! construction turning any switch into a short sequence of Δ-switches,
//! exhaustive enumeration of small state spaces with exact transition
//! matrices, and statistical helpers for triangle counts.

pub mod analysis;
pub mod chains;
pub mod degree;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod paths;
pub mod rng;
pub mod switch;

pub use analysis::{
    compare_to_poisson, degree_sequence_checks, mu_of, nu_default, poisson_pmf, tv_distance,
    PoissonReport, SampleStats, ScalarReport,
};
pub use chains::{
    run_chain, run_parallel, switch_step, tri_switch_step, ChainConfig, ChainKind, OutcomeCounts,
    StepOutcome,
};
pub use degree::DegreeSequence;
pub use enumeration::{
    degree_sequences, CensusReport, PathEnsembleStats, SpaceSummary, SpectralReport, StateSpace,
    TransitionMatrix,
};
pub use error::{Error, Result};
pub use graph::{Adjacency, Graph, Vertex};
pub use paths::{simulate_switch, verify_path, CaseLabel, SimulationPath};
pub use switch::{Switch, SwitchType, TriSwitch};
