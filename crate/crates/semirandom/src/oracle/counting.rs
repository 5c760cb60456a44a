//! Monte Carlo check of the counting bound behind the generic lower bound:
//! the expected number of k-sets spanning at least j edges after t steps is
//! at most t^j k^{r(j-1)} n^{k-s+r-rj}, and deterministically the number of
//! k-sets spanning any edge is at most t C(n-s, k-s).

use std::collections::HashSet;

use num::ToPrimitive;

use crate::analysis::big_binomial;
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, MultiHypergraph, Vertex};
use crate::process::{run, trial_rng, RunOptions, Strategy};

#[derive(Debug, Clone)]
pub struct JBoundReport {
    pub j: u64,
    pub empirical_mean: f64,
    pub bound: f64,
    pub within: bool,
    /// Largest single-trial count.
    pub max_count: u64,
}

#[derive(Debug, Clone)]
pub struct CountingBoundReport {
    pub n: u32,
    pub t: u64,
    pub trials: u64,
    pub per_j: Vec<JBoundReport>,
    /// Every trial satisfied X_1 <= t * C(n - s, k - s).
    pub x1_deterministic_ok: bool,
}

/// Counts, for the checked j values {1, m}, the k-sets spanning at least j
/// edges of `graph` (with multiplicity). Enumerates candidate k-sets as
/// (edge, extension) pairs, deduplicated.
fn count_xj(graph: &MultiHypergraph, k: u32, js: &[u64]) -> Vec<u64> {
    let n = graph.n();
    let s = graph.s() as u32;
    let ext = (k - s) as usize;
    let mut candidates: HashSet<Vec<Vertex>> = HashSet::new();
    for e in graph.distinct_edges() {
        let pool: Vec<Vertex> = (1..=n).filter(|v| !e.contains(*v)).collect();
        if ext == 0 {
            candidates.insert(e.vertices().to_vec());
            continue;
        }
        use itertools::Itertools;
        for extension in pool.iter().copied().combinations(ext) {
            let mut w: Vec<Vertex> = e.vertices().to_vec();
            w.extend(extension);
            w.sort_unstable();
            candidates.insert(w);
        }
    }
    let mut counts = vec![0u64; js.len()];
    for w in &candidates {
        let within = Edge::from_sorted(w.clone());
        let edges = graph.edges_within(&within);
        for (i, &j) in js.iter().enumerate() {
            if edges >= j {
                counts[i] += 1;
            }
        }
    }
    counts
}

/// Runs `trials` games of `t` steps each (not stopping at success) and
/// compares the empirical mean k-set counts against the bounds, for
/// j in {1, e_H}.
pub fn expectation_bound_check(
    target: &MultiHypergraph,
    r: u32,
    mut make_strategy: impl FnMut(u64) -> Result<Box<dyn Strategy>>,
    n: u32,
    t: u64,
    trials: u64,
    seed: u64,
) -> Result<CountingBoundReport> {
    let k = target.n();
    let s = target.s();
    let m = target.edge_count();
    if trials == 0 {
        return Err(Error::parameter("need at least one trial"));
    }
    let per_trial = (t as u128)
        * big_binomial((n - s as u32) as u64, (k - s as u32) as u64)
            .to_u128()
            .unwrap_or(u128::MAX);
    if per_trial > 20_000_000 {
        return Err(Error::resource(format!(
            "counting k-sets needs ~{per_trial} candidates per trial; infeasible for j in {{1, {m}}}"
        )));
    }
    let js = if m > 1 { vec![1u64, m] } else { vec![1u64] };
    let mut sums = vec![0f64; js.len()];
    let mut maxes = vec![0u64; js.len()];
    let mut x1_ok = true;
    let x1_cap = (t as f64)
        * big_binomial((n - s as u32) as u64, (k - s as u32) as u64)
            .to_f64()
            .unwrap_or(f64::INFINITY);
    for trial in 0..trials {
        let mut strategy = make_strategy(trial)?;
        let mut rng = trial_rng(seed, trial);
        let mut opts = RunOptions::new(t);
        opts.stop_on_success = false;
        let out = run(n, r, s, strategy.as_mut(), target, &mut rng, &opts)?;
        let counts = count_xj(&out.final_graph, k, &js);
        for (i, &c) in counts.iter().enumerate() {
            sums[i] += c as f64;
            maxes[i] = maxes[i].max(c);
        }
        if counts[0] as f64 > x1_cap {
            x1_ok = false;
        }
    }
    let ln_bound = |j: u64| -> f64 {
        let j = j as f64;
        j * (t as f64).ln()
            + (r as f64) * (j - 1.0) * (k as f64).ln()
            + ((k as i64 - s as i64 + r as i64) as f64 - (r as f64) * j) * (n as f64).ln()
    };
    let per_j = js
        .iter()
        .zip(sums.iter().zip(maxes.iter()))
        .map(|(&j, (&sum, &max_count))| {
            let mean = sum / trials as f64;
            let bound = ln_bound(j).exp();
            JBoundReport {
                j,
                empirical_mean: mean,
                bound,
                within: mean <= bound * (1.0 + 1e-12),
                max_count,
            }
        })
        .collect();
    Ok(CountingBoundReport {
        n,
        t,
        trials,
        per_j,
        x1_deterministic_ok: x1_ok,
    })
}
