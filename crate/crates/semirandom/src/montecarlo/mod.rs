//! Reproducible Monte Carlo experiments: success-probability estimation over
//! an (n, t) grid, crossing points, and threshold-exponent fitting.
//!
//! Determinism contract: a config (including its seed and rng algorithm id)
//! pins every trial's generator to (seed, global trial index), trials are
//! aggregated in index order, and serialization uses fixed formatting, so
//! identical configs produce byte-identical outputs regardless of thread
//! count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::starplus_decompose;
use crate::error::{Error, Result};
use crate::hypergraph::{build_target, MultiHypergraph, TargetSpec};
use crate::process::{run, trial_rng, NullStrategy, RunOptions, Strategy, RNG_ALGORITHM};
use crate::strategies::{
    BaselineRandom, CliqueBuilder, CycleGeneralX, CycleThreePhase, LooseCycleBuilder, PathBuilder,
    StarplusBuilder,
};

/// Per-trial step cap; runs are marked capped rather than exceeding it.
pub const BUDGET_CAP: u64 = 100_000_000;

fn default_rng_algorithm() -> String {
    RNG_ALGORITHM.to_string()
}

/// Strategy selector for configs. Structural parameters derive from the
/// experiment's target; the clique seed size may be overridden.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyConfig {
    PathBuilder,
    LooseCycleBuilder,
    CycleThreePhase,
    CycleGeneralX,
    StarplusBuilder,
    CliqueBuilder {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<u32>,
    },
    BaselineRandom,
    Null,
}

/// The t grid per n: explicit steps, or constants times n^exponent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TRule {
    Explicit { ts: Vec<u64> },
    PowerGrid { constants: Vec<f64>, exponent: f64 },
}

impl TRule {
    pub fn ts_for(&self, n: u32) -> Vec<u64> {
        match self {
            TRule::Explicit { ts } => ts.clone(),
            TRule::PowerGrid { constants, exponent } => constants
                .iter()
                .map(|c| ((n as f64).powf(*exponent) * c).round().max(1.0) as u64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub target: TargetSpec,
    pub r: u32,
    pub strategy: StrategyConfig,
    pub n_grid: Vec<u32>,
    pub t_rule: TRule,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_rng_algorithm")]
    pub rng_algorithm: String,
    /// Periodic full containment checks, for strategies that never
    /// self-report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_check_every: Option<u64>,
}

impl ExperimentConfig {
    /// Checks everything except the n grid (single-point estimation supplies
    /// its own n).
    fn validate_base(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::config("trials must be at least 1"));
        }
        let s = self.target.s();
        if self.rng_algorithm != RNG_ALGORITHM {
            return Err(Error::config(format!(
                "unknown rng_algorithm {:?}; this build implements {:?}",
                self.rng_algorithm, RNG_ALGORITHM
            )));
        }
        if self.r < 1 || self.r >= s {
            return Err(Error::config(format!("r={} outside [1, s)", self.r)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_base()?;
        let s = self.target.s();
        for &n in &self.n_grid {
            if n < s {
                return Err(Error::config(format!("n={n} below target uniformity {s}")));
            }
        }
        if self.n_grid.is_empty() {
            return Err(Error::config("n_grid must be non-empty"));
        }
        Ok(())
    }

    /// Builds one strategy instance for a trial.
    pub fn make_strategy(
        &self,
        target: &MultiHypergraph,
        trial_index: u64,
    ) -> Result<Box<dyn Strategy>> {
        let r = self.r;
        match (&self.strategy, &self.target) {
            (StrategyConfig::PathBuilder, TargetSpec::TightPath { m, s, ell }) => {
                Ok(Box::new(PathBuilder::new(*m, *s, *ell, r)?))
            }
            (StrategyConfig::LooseCycleBuilder, TargetSpec::TightCycle { m, s, ell }) => {
                Ok(Box::new(LooseCycleBuilder::new(*m, *s, *ell, r)?))
            }
            (StrategyConfig::CycleThreePhase, TargetSpec::TightCycle { m, s, ell }) => {
                Ok(Box::new(CycleThreePhase::new(*m, *s, *ell, r)?))
            }
            (StrategyConfig::CycleGeneralX, TargetSpec::TightCycle { m, s, ell }) => {
                Ok(Box::new(CycleGeneralX::new(*m, *s, *ell, r)?))
            }
            (StrategyConfig::StarplusBuilder, _) => {
                let d = starplus_decompose(target, target.s() - r as usize)?
                    .ok_or_else(|| Error::config("target has no starplus decomposition"))?;
                Ok(Box::new(StarplusBuilder::new(target, &d, r, None)?))
            }
            (StrategyConfig::CliqueBuilder { k }, spec) => {
                let k = match (k, spec) {
                    (Some(k), _) => *k,
                    (None, TargetSpec::Clique { k, .. }) => *k,
                    _ => {
                        return Err(Error::config(
                            "clique_builder needs k or a clique target",
                        ))
                    }
                };
                Ok(Box::new(CliqueBuilder::new(k, target.s() as u32, r)?))
            }
            (StrategyConfig::BaselineRandom, _) => {
                // Independent stream from the engine's draws for this trial.
                let mut rng = trial_rng(self.seed, trial_index);
                rng.set_stream(1);
                Ok(Box::new(BaselineRandom::new(rng)))
            }
            (StrategyConfig::Null, _) => Ok(Box::new(NullStrategy)),
            (sc, ts) => Err(Error::config(format!(
                "strategy {sc:?} does not apply to target {ts:?}"
            ))),
        }
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    if trials == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (p, (center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct PointEstimate {
    pub n: u32,
    pub t: u64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// True when the per-trial budget cap truncated t.
    pub capped: bool,
}

/// Runs the trials for one (n, t) grid point. Trial generators are seeded by
/// (config seed, trial_base + trial) and results aggregated in index order.
pub fn estimate_success(
    config: &ExperimentConfig,
    n: u32,
    t: u64,
    trial_base: u64,
) -> Result<PointEstimate> {
    config.validate_base()?;
    if n < config.target.s() {
        return Err(Error::config(format!(
            "n={n} below target uniformity {}",
            config.target.s()
        )));
    }
    let target = build_target(&config.target)?;
    let capped = t > BUDGET_CAP;
    let budget = t.min(BUDGET_CAP);
    let results: Vec<Result<bool>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_index = trial_base + trial;
            let mut strategy = config.make_strategy(&target, trial_index)?;
            let mut rng = trial_rng(config.seed, trial_index);
            let mut options = RunOptions::new(budget);
            if let Some(every) = config.success_check_every {
                options = options.with_periodic_check(every);
            }
            let out = run(
                n,
                config.r,
                target.s(),
                strategy.as_mut(),
                &target,
                &mut rng,
                &options,
            )
            .map_err(|e| match e {
                Error::Contract { step, message } => Error::Contract {
                    step,
                    message: format!("trial {trial_index}: {message}"),
                },
                other => other,
            })?;
            Ok(out.success_step.is_some())
        })
        .collect();
    let mut successes = 0u64;
    for r in results {
        if r? {
            successes += 1;
        }
    }
    let (p_hat, ci_lo, ci_hi) = wilson_interval(successes, config.trials);
    Ok(PointEstimate {
        n,
        t,
        trials: config.trials,
        successes,
        p_hat,
        ci_lo,
        ci_hi,
        capped,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    pub n: u32,
    /// Smallest t with estimated success probability 1/2, interpolated on
    /// the logit scale in log t; `None` when the grid never crosses.
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// (log n, log t_star) pairs used in the fit.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub points: Vec<PointEstimate>,
    pub crossings: Vec<Crossing>,
    pub fit: Option<FitResult>,
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn crossing_t_star(points: &[&PointEstimate]) -> Option<f64> {
    let trials = points.first()?.trials as f64;
    let clamp = |p: f64| p.clamp(1.0 / (2.0 * trials), 1.0 - 1.0 / (2.0 * trials));
    let first_above = points.iter().position(|p| p.p_hat >= 0.5)?;
    if first_above == 0 {
        return Some(points[0].t as f64);
    }
    let lo = points[first_above - 1];
    let hi = points[first_above];
    let (x0, y0) = ((lo.t as f64).ln(), logit(clamp(lo.p_hat)));
    let (x1, y1) = ((hi.t as f64).ln(), logit(clamp(hi.p_hat)));
    if (y1 - y0).abs() < 1e-12 {
        return Some(hi.t as f64);
    }
    let x = x0 + (0.0 - y0) * (x1 - x0) / (y1 - y0);
    Some(x.exp())
}

fn least_squares(points: &[(f64, f64)]) -> Option<FitResult> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let sx: f64 = points.iter().map(|(x, _)| x).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let sxx_c = sxx - sx * sx / nf;
    if sxx_c <= 0.0 {
        return None;
    }
    let slope = (sxy - sx * sy / nf) / sxx_c;
    let intercept = (sy - slope * sx) / nf;
    let sse: f64 = points
        .iter()
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx_c).sqrt()
    } else {
        0.0
    };
    Some(FitResult {
        slope,
        intercept,
        stderr,
        points: points.to_vec(),
    })
}

/// Full sweep: success curves for every (n, t), per-n crossing points, and
/// the least-squares slope of log t* against log n.
pub fn sweep_and_fit(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut points = Vec::new();
    let mut crossings = Vec::new();
    let mut fit_points = Vec::new();
    let mut trial_base = 0u64;
    for &n in &config.n_grid {
        let mut ts = config.t_rule.ts_for(n);
        ts.sort_unstable();
        ts.dedup();
        let mut n_points = Vec::new();
        for t in ts {
            let p = estimate_success(config, n, t, trial_base)?;
            trial_base += config.trials;
            n_points.push(p);
        }
        let refs: Vec<&PointEstimate> = n_points.iter().collect();
        let t_star = crossing_t_star(&refs);
        if let Some(ts) = t_star {
            fit_points.push(((n as f64).ln(), ts.ln()));
        }
        crossings.push(Crossing { n, t_star });
        points.extend(n_points);
    }
    Ok(SweepResult {
        points,
        crossings,
        fit: least_squares(&fit_points),
    })
}

impl SweepResult {
    /// CSV with the declared schema: n,t,trials,successes,p_hat,ci_lo,ci_hi.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("n,t,trials,successes,p_hat,ci_lo,ci_hi\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.6},{:.6}\n",
                p.n, p.t, p.trials, p.successes, p.p_hat, p.ci_lo, p.ci_hi
            ));
        }
        out
    }

    pub fn fit_json(&self) -> serde_json::Value {
        match &self.fit {
            Some(f) => json!({
                "slope": f.slope,
                "intercept": f.intercept,
                "stderr": f.stderr,
                "points": f.points,
            }),
            None => json!(null),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "points": self.points,
            "crossings": self.crossings.iter().map(|c| json!({
                "n": c.n,
                "t_star": c.t_star,
            })).collect::<Vec<_>>(),
            "fit": self.fit_json(),
        })
    }
}

/// One-sided two-proportion test that success at the larger t is not lower;
/// returns the indices of adjacent grid pairs violating monotonicity at the
/// given significance.
pub fn monotonicity_violations(
    points: &[PointEstimate],
    significance: f64,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..points.len() {
        let (a, b) = (&points[i - 1], &points[i]);
        if a.n != b.n {
            continue;
        }
        let (s1, n1) = (a.successes as f64, a.trials as f64);
        let (s2, n2) = (b.successes as f64, b.trials as f64);
        if n1 == 0.0 || n2 == 0.0 {
            continue;
        }
        let p1 = s1 / n1;
        let p2 = s2 / n2;
        if p1 <= p2 {
            continue;
        }
        let pool = (s1 + s2) / (n1 + n2);
        let se = (pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2)).sqrt();
        if se == 0.0 {
            continue;
        }
        let z = (p1 - p2) / se;
        let p_value = 0.5 * erfc(z / std::f64::consts::SQRT_2);
        if p_value < significance {
            out.push((i - 1, i));
        }
    }
    out
}

/// Complementary error function (Numerical Recipes rational approximation,
/// absolute error below 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_config() -> ExperimentConfig {
        ExperimentConfig {
            version: 1,
            target: TargetSpec::TightPath { m: 4, s: 3, ell: 1 },
            r: 2,
            strategy: StrategyConfig::PathBuilder,
            n_grid: vec![500, 1000],
            t_rule: TRule::Explicit { ts: vec![2, 3, 4, 5, 6] },
            trials: 60,
            seed: 11,
            rng_algorithm: RNG_ALGORITHM.to_string(),
            success_check_every: None,
        }
    }

    #[test]
    fn null_strategy_never_succeeds() {
        let mut config = path_config();
        config.strategy = StrategyConfig::Null;
        config.n_grid = vec![300];
        let p = estimate_success(&config, 300, 5, 0).unwrap();
        assert_eq!(p.successes, 0);
        assert_eq!(p.p_hat, 0.0);
    }

    #[test]
    fn path_builder_succeeds_with_budget_m() {
        let config = path_config();
        let p = estimate_success(&config, 10_000, 4, 0).unwrap();
        assert!(p.p_hat >= 0.97, "p_hat = {}", p.p_hat);
    }

    #[test]
    fn sweep_is_deterministic_and_monotone() {
        let config = path_config();
        let a = sweep_and_fit(&config).unwrap();
        let b = sweep_and_fit(&config).unwrap();
        assert_eq!(a.points_csv(), b.points_csv());
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
        assert!(monotonicity_violations(&a.points, 1e-3).is_empty());
        // Path crossing sits between t = 3 and t = 4 for every n.
        for c in &a.crossings {
            let t = c.t_star.expect("crosses");
            assert!(t > 3.0 && t <= 4.0, "t* = {t}");
        }
        let fit = a.fit.expect("two points");
        assert!(fit.slope.abs() < 0.1, "slope = {}", fit.slope);
    }

    #[test]
    fn wilson_interval_shrinks_with_trials() {
        let (_, lo1, hi1) = wilson_interval(50, 100);
        let (_, lo2, hi2) = wilson_interval(500, 1000);
        assert!(hi2 - lo2 < hi1 - lo1);
        let (p, lo, hi) = wilson_interval(0, 10);
        assert_eq!(p, 0.0);
        assert!(lo == 0.0 && hi > 0.0);
    }

    #[test]
    fn config_validation() {
        let mut config = path_config();
        config.rng_algorithm = "xorshift".to_string();
        assert!(config.validate().is_err());
        let mut config = path_config();
        config.n_grid = vec![2];
        assert!(config.validate().is_err());
        let mut config = path_config();
        config.trials = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let json = r#"{
            "version": 1,
            "target": {"family": "clique", "k": 4, "s": 3},
            "r": 2,
            "strategy": {"strategy": "starplus_builder"},
            "n_grid": [100],
            "t_rule": {"kind": "explicit", "ts": [10]},
            "trials": 5,
            "seed": 3,
            "extra_knob": true
        }"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
    }

    #[test]
    fn strategy_config_parses_spec_shape() {
        let sc: StrategyConfig =
            serde_json::from_str(r#"{"strategy":"clique_builder","k":6}"#).unwrap();
        assert_eq!(sc, StrategyConfig::CliqueBuilder { k: Some(6) });
    }
}
