//! Player strategies: path and cycle builders in every regime, the starplus
//! two-phase strategy, the recursive clique strategy, and baselines.
//!
//! Every strategy keeps its own bookkeeping and claims success through
//! [`crate::process::Strategy::report_success`]; the engine independently
//! verifies every claim against the target before accepting it.

mod baseline;
mod clique;
mod cycles;
mod paths;
mod starplus;

pub use baseline::BaselineRandom;
pub use clique::CliqueBuilder;
pub use cycles::{CycleGeneralX, CycleThreePhase};
pub use paths::{LooseCycleBuilder, PathBuilder};
pub use starplus::StarplusBuilder;

use std::collections::HashSet;

use crate::hypergraph::Edge;

/// Configured phase lengths. The last phase absorbs any remaining budget; a
/// strategy that has not finished its structural phase when its clock runs
/// out keeps playing in its final phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseClock {
    pub t0: u64,
    pub t1: u64,
    pub t2: u64,
}

impl PhaseClock {
    pub fn new(t0: u64, t1: u64, t2: u64) -> PhaseClock {
        PhaseClock { t0, t1, t2 }
    }

    /// Default split for the starplus strategy: everything in phase 1 when
    /// there is no excess; half the budget when the ray-excess ratio
    /// condition is strict; `budget / ceil(ln n)` when it holds with
    /// equality. The asymptotic analysis allows any diverging split; these
    /// finite-n constants are sweep-tunable defaults.
    pub fn starplus_default(
        budget: u64,
        n: u32,
        strict: bool,
        lambda2: u64,
    ) -> PhaseClock {
        if lambda2 == 0 {
            return PhaseClock::new(0, budget, 0);
        }
        let t1 = if strict {
            budget / 2
        } else {
            let log_n = (n.max(3) as f64).ln().ceil() as u64;
            (budget / log_n.max(2)).max(1)
        };
        PhaseClock::new(0, t1, budget.saturating_sub(t1))
    }

    /// Default split for the clique strategy: a tenth of the budget for the
    /// seed clique, half the remainder for each of the two main phases.
    pub fn clique_default(budget: u64, needs_seed: bool) -> PhaseClock {
        let t0 = if needs_seed { budget / 10 } else { 0 };
        let rest = budget.saturating_sub(t0);
        PhaseClock::new(t0, rest / 2, rest - rest / 2)
    }
}

/// The `count` smallest vertices of `[1, n]` outside `u` and `excluded`.
/// Falls back to ignoring `excluded` if the pool runs dry, so a wasted move
/// always yields a contract-valid response.
pub(crate) fn fresh_vertices(
    n: u32,
    count: usize,
    u: &Edge,
    excluded: &HashSet<u32>,
) -> Vec<u32> {
    let mut out = Vec::with_capacity(count);
    for v in 1..=n {
        if out.len() == count {
            return out;
        }
        if !u.contains(v) && !excluded.contains(&v) {
            out.push(v);
        }
    }
    for v in 1..=n {
        if out.len() == count {
            break;
        }
        if !u.contains(v) && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// The `count` smallest vertices outside `u` and `excluded`, or `None` when
/// fewer exist (the caller then wastes the move instead).
pub(crate) fn try_fresh_vertices(
    n: u32,
    count: usize,
    u: &Edge,
    excluded: &HashSet<u32>,
) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(count);
    for v in 1..=n {
        if out.len() == count {
            return Some(out);
        }
        if !u.contains(v) && !excluded.contains(&v) {
            out.push(v);
        }
    }
    (out.len() == count).then_some(out)
}
