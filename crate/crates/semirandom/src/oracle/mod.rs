//! Independent exact and brute-force computations: the hitting-probability
//! dynamic program, the subgraph-count minimizer, counting-bound checks, and
//! the enumeration suite behind the combinatorial claims the analysis uses.

mod appendix;
mod counting;
mod hitdp;
mod phi;

pub use appendix::{verify_appendix, AppendixRanges, ClaimReport, ClaimStatus};
pub use counting::{expectation_bound_check, CountingBoundReport};
pub use hitdp::{exact_hit_probability, hit_probability_curve, DpMode, HitProbability};
pub use phi::{phi_f, PhiResult};
