//! Error-rate bounds, exact and Monte Carlo evaluation, and voter-count
//! planning for the plurality majority-voting function (MVF) over `K`
//! classes.
//!
//! Voters are described by row-stochastic transition matrices
//! (`entries[k][l] = Pr(vote = l | truth = k)`), optionally grouped into a
//! [`VoterPopulation`] of independent but non-identical voter types. Class
//! indices are zero-based throughout the library; the CLI prints them
//! one-based.

pub mod bessel;
pub mod bounds;
pub mod cli;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod planner;
pub mod simulator;
pub mod skellam;
pub mod special;
pub mod stats;
pub mod truth_discovery;

pub use bounds::{BoundMethod, BoundReport};
pub use model::{ReliabilityReport, TransitionMatrix, VoterPopulation};
pub use simulator::{SimulationEstimate, TiePolicy};
pub use skellam::SkellamParams;
