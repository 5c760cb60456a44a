//! Baseline: a uniformly random response. Never self-reports; pair it with
//! the engine's periodic containment checks.

use rand::Rng;

use crate::hypergraph::Edge;
use crate::process::{ProcessView, Strategy, TrialRng};

pub struct BaselineRandom {
    rng: TrialRng,
}

impl BaselineRandom {
    /// The generator should be an independent stream from the engine's
    /// (e.g. the trial generator with a different stream id).
    pub fn new(rng: TrialRng) -> BaselineRandom {
        BaselineRandom { rng }
    }
}

impl Strategy for BaselineRandom {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        // Uniform (s - r)-subset of [n] \ U: sample from [1, n - r] by
        // Floyd's method, then shift past the drawn vertices in order.
        let count = view.s - view.r as usize;
        let pool = view.n - view.r;
        let mut chosen: Vec<u32> = Vec::with_capacity(count);
        for j in (pool - count as u32 + 1)..=pool {
            let t = self.rng.gen_range(1..=j);
            if chosen.contains(&t) {
                chosen.push(j);
            } else {
                chosen.push(t);
            }
        }
        chosen
            .into_iter()
            .map(|d| {
                let mut v = d;
                for uv in u.iter() {
                    if v >= uv {
                        v += 1;
                    }
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_target, TargetSpec};
    use crate::process::{run, trial_rng, RunOptions};

    #[test]
    fn responses_are_valid_and_reproducible() {
        let target = build_target(&TargetSpec::Clique { k: 4, s: 3 }).unwrap();
        let play = || {
            let mut strat = BaselineRandom::new(trial_rng(3, 100));
            let mut rng = trial_rng(3, 0);
            run(
                50,
                2,
                3,
                &mut strat,
                &target,
                &mut rng,
                &RunOptions::new(500),
            )
            .unwrap()
            .final_graph
        };
        assert_eq!(play(), play());
    }

    #[test]
    fn rarely_succeeds_below_threshold() {
        // K_4^(3) needs t around n^{5/4}; at t = n the success rate must be
        // tiny.
        let target = build_target(&TargetSpec::Clique { k: 4, s: 3 }).unwrap();
        let n = 2000u32;
        let mut successes = 0;
        for trial in 0..20 {
            let mut strat = BaselineRandom::new(trial_rng(900 + trial, 1));
            let mut rng = trial_rng(900 + trial, 0);
            let out = run(
                n,
                2,
                3,
                &mut strat,
                &target,
                &mut rng,
                &RunOptions::new(n as u64).with_periodic_check(n as u64 / 4),
            )
            .unwrap();
            if out.success_step.is_some() {
                successes += 1;
            }
        }
        assert!(successes <= 1, "baseline succeeded {successes}/20 times");
    }
}
