//! The semi-random process engine: draws uniform r-sets, consults the
//! strategy, inserts edges, records traces, and verifies success claims.

mod rng;

pub use rng::{draw_uniform_r_subset, trial_rng, TrialRng, RNG_ALGORITHM};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hypergraph::{contains_copy, verify_embedding, Edge, Embedding, MultiHypergraph};

/// Read-only view of the game handed to strategies each step.
pub struct ProcessView<'a> {
    pub n: u32,
    pub r: u32,
    pub s: usize,
    /// Steps completed so far (the upcoming step is `step + 1`).
    pub step: u64,
    pub budget: u64,
    pub graph: &'a MultiHypergraph,
}

/// The player: a deterministic response function over (history, U_t) plus
/// its own phase bookkeeping. Implementations keep all state internally and
/// must be deterministic given their construction parameters and the
/// sequence of views and draws.
pub trait Strategy {
    /// Returns `V_t`: exactly `s - r` vertices disjoint from `u`.
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32>;

    /// A claimed embedding of the target once the strategy believes it has
    /// built a copy; checked by the engine before success is recorded.
    fn report_success(&self) -> Option<Embedding> {
        None
    }

    /// Named diagnostic counters (e.g. bookkeeping overflow flags).
    fn diagnostics(&self) -> Vec<(String, u64)> {
        Vec::new()
    }
}

/// One recorded step of the process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: u64,
    pub u: Edge,
    pub v: Edge,
    pub duplicate: bool,
}

/// Result of a single trial.
#[derive(Debug, Clone)]
pub struct ProcessOutcome {
    /// Step at which a verified copy of the target appeared, if any.
    pub success_step: Option<u64>,
    pub final_graph: MultiHypergraph,
    /// Steps whose random r-set had been drawn before.
    pub duplicate_draws: u64,
    pub trace: Option<Vec<TraceStep>>,
}

/// Engine options beyond the basic run parameters.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub budget: u64,
    pub record_trace: bool,
    /// Run a full containment search every this many steps (for strategies
    /// that never self-report). The final step is always checked when set.
    pub periodic_check: Option<u64>,
    /// Verify success claims with a full search instead of only checking the
    /// claimed embedding.
    pub verify_full: bool,
    /// Keep playing after success (for counting experiments).
    pub stop_on_success: bool,
}

impl RunOptions {
    pub fn new(budget: u64) -> RunOptions {
        RunOptions {
            budget,
            record_trace: false,
            periodic_check: None,
            verify_full: false,
            stop_on_success: true,
        }
    }

    pub fn with_trace(mut self) -> RunOptions {
        self.record_trace = true;
        self
    }

    pub fn with_periodic_check(mut self, every: u64) -> RunOptions {
        self.periodic_check = Some(every.max(1));
        self
    }
}

/// Runs one trial of the semi-random process.
///
/// Each step draws a uniform r-set, asks the strategy for `s - r` more
/// vertices, and inserts the union. A success claim is verified against the
/// target on the claimed vertex set before `success_step` is set; an invalid
/// response or a false claim aborts the trial with a contract error.
pub fn run(
    n: u32,
    r: u32,
    s: usize,
    strategy: &mut dyn Strategy,
    target: &MultiHypergraph,
    rng: &mut TrialRng,
    options: &RunOptions,
) -> Result<ProcessOutcome> {
    if (s as u32) > n {
        return Err(Error::parameter(format!("need n >= s, got n={n}, s={s}")));
    }
    if r as usize >= s {
        return Err(Error::parameter(format!("need r < s, got r={r}, s={s}")));
    }
    let mut graph = MultiHypergraph::new(s, n)?;
    let mut seen: HashSet<Edge> = HashSet::new();
    let mut duplicate_draws = 0u64;
    let mut trace = options.record_trace.then(Vec::new);
    let mut success_step = None;

    for step in 1..=options.budget {
        let u = draw_uniform_r_subset(rng, n, r)?;
        let duplicate = !seen.insert(u.clone());
        if duplicate {
            duplicate_draws += 1;
        }
        let view = ProcessView {
            n,
            r,
            s,
            step: step - 1,
            budget: options.budget,
            graph: &graph,
        };
        let v_raw = strategy.respond(&view, &u);
        let v = validate_response(&v_raw, &u, n, s, r, step)?;
        let edge = u.union(&v);
        debug_assert_eq!(edge.len(), s);
        graph.insert(edge)?;
        if let Some(t) = trace.as_mut() {
            t.push(TraceStep {
                step,
                u: u.clone(),
                v: v.clone(),
                duplicate,
            });
        }

        if success_step.is_none() {
            if let Some(claim) = strategy.report_success() {
                let ok = if options.verify_full {
                    contains_copy(&graph, target)?.is_some()
                } else {
                    verify_embedding(&graph, target, &claim)
                };
                if !ok {
                    return Err(Error::Contract {
                        step,
                        message: format!(
                            "claimed copy does not verify (map {:?})",
                            claim.map
                        ),
                    });
                }
                success_step = Some(step);
            } else if let Some(every) = options.periodic_check {
                if step % every == 0 || step == options.budget {
                    if contains_copy(&graph, target)?.is_some() {
                        success_step = Some(step);
                    }
                }
            }
        }
        if success_step.is_some() && options.stop_on_success {
            break;
        }
    }

    Ok(ProcessOutcome {
        success_step,
        final_graph: graph,
        duplicate_draws,
        trace,
    })
}

fn validate_response(v: &[u32], u: &Edge, n: u32, s: usize, r: u32, step: u64) -> Result<Edge> {
    if v.len() != s - r as usize {
        return Err(Error::Contract {
            step,
            message: format!("response has {} vertices, expected {}", v.len(), s - r as usize),
        });
    }
    let edge = Edge::new(v.to_vec()).map_err(|e| Error::Contract {
        step,
        message: format!("invalid response: {e}"),
    })?;
    if let Some(&max) = edge.vertices().last() {
        if max > n {
            return Err(Error::Contract {
                step,
                message: format!("response vertex {max} outside [1, {n}]"),
            });
        }
    }
    if edge.iter().any(|x| u.contains(x)) {
        return Err(Error::Contract {
            step,
            message: format!("response {edge:?} intersects the drawn set {u:?}"),
        });
    }
    Ok(edge)
}

/// Rebuilds the graph from a recorded trace.
pub fn replay_trace(n: u32, s: usize, trace: &[TraceStep]) -> Result<MultiHypergraph> {
    let mut graph = MultiHypergraph::new(s, n)?;
    for t in trace {
        graph.insert(t.u.union(&t.v))?;
    }
    Ok(graph)
}

/// Serializes a trace as CSV: step, semicolon-joined U, semicolon-joined V,
/// duplicate flag.
pub fn trace_to_csv(trace: &[TraceStep]) -> String {
    let mut out = String::from("step,U,V,duplicate_flag\n");
    for t in trace {
        let join = |e: &Edge| {
            e.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.step,
            join(&t.u),
            join(&t.v),
            u8::from(t.duplicate)
        ));
    }
    out
}

/// Exact expected number of duplicate draws among `t` uniform r-sets:
/// `C(t, 2) / C(n, r)`.
pub fn expected_duplicates(n: u32, r: u32, t: u64) -> f64 {
    use crate::analysis::big_binomial;
    use num::ToPrimitive;
    let pairs = (t as f64) * (t as f64 - 1.0) / 2.0;
    let cnr = big_binomial(n as u64, r as u64).to_f64().unwrap_or(f64::MAX);
    pairs / cnr
}

/// Empirical mean duplicate count over `trials` runs of `t` draws each.
pub fn duplicate_rate_check(n: u32, r: u32, t: u64, trials: u64, seed: u64) -> Result<f64> {
    if r > n {
        return Err(Error::parameter("r exceeds n"));
    }
    let mut total = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let mut seen: HashSet<Edge> = HashSet::new();
        for _ in 0..t {
            let u = draw_uniform_r_subset(&mut rng, n, r)?;
            if !seen.insert(u) {
                total += 1;
            }
        }
    }
    Ok(total as f64 / trials as f64)
}

/// Always answers with the lexicographically smallest valid response; never
/// reports success. Used as a deterministic regression fixture.
pub struct NullStrategy;

impl Strategy for NullStrategy {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        smallest_outside(view.n, view.s - view.r as usize, u, &[])
    }
}

/// The `s - r` smallest vertices not in `u` and not reserved. Strategies use
/// this for wasted moves so that nothing they track is ever touched.
pub fn smallest_outside(n: u32, count: usize, u: &Edge, reserved: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(count);
    for v in 1..=n {
        if out.len() == count {
            break;
        }
        if !u.contains(v) && !reserved.contains(&v) {
            out.push(v);
        }
    }
    out
}
