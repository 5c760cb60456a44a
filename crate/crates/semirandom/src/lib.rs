//! Simulator and exact-combinatorics toolkit for the semi-random s-uniform
//! hypergraph process.
//!
//! The process is a one-player game: each round presents a uniform random
//! r-set `U_t` of vertices, the player answers with `s - r` further vertices
//! `V_t`, and the s-edge `U_t ∪ V_t` is added (parallel edges allowed). The
//! player's goal is to create a copy of a fixed target hypergraph as fast as
//! possible. This crate provides:
//!
//! - [`hypergraph`]: s-uniform multi-hypergraphs, target-family generators,
//!   and subgraph containment ([`hypergraph::contains_copy`]);
//! - [`analysis`]: exact-rational densities, balance notions, and threshold
//!   exponent bounds ([`analysis::threshold_report`]);
//! - [`process`]: the game engine with deterministic seeded randomness;
//! - [`strategies`]: the player strategies for paths, cycles, starpluses and
//!   cliques, plus baselines;
//! - [`montecarlo`]: reproducible success-probability sweeps and threshold
//!   exponent fitting;
//! - [`oracle`]: independent brute-force and dynamic-programming oracles for
//!   hitting probabilities, counting bounds, and the combinatorial claims the
//!   analysis relies on;
//! - [`cli`]: the command-line front end (`analyze`, `simulate`, `sweep`,
//!   `verify`, `oracle`).
//!
//! See the crate examples for runnable entry points into each capability.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod hypergraph;
pub mod montecarlo;
pub mod oracle;
pub mod process;
pub mod strategies;

pub use error::{Error, Result};
pub use hypergraph::{build_target, contains_copy, Edge, MultiHypergraph, TargetSpec};
