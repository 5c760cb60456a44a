//! Pilot run behind the grid constants used by the threshold-exponent fits
//! (in `tests/acceptance.rs` and the `sweep_threshold` example).
//!
//! For each target the crossing point t*(n) sits at c* n^kappa for the
//! theoretical exponent kappa; this pilot scans a coarse geometric grid of
//! constants c at the smallest and largest n of each sweep and prints the
//! success curves, so the production grids can be chosen to bracket the
//! crossing on all n. Run with:
//!
//! ```bash
//! cargo run --release --example pilot_calibration
//! ```

use semirandom::montecarlo::{estimate_success, ExperimentConfig, StrategyConfig, TRule};
use semirandom::process::RNG_ALGORITHM;
use semirandom::TargetSpec;

fn scan(label: &str, config: &ExperimentConfig, ns: &[u32], exponent: f64, constants: &[f64]) {
    println!("== {label} (t = c * n^{exponent})");
    for &n in ns {
        print!("  n={n:>5}:");
        for &c in constants {
            let t = ((n as f64).powf(exponent) * c).round().max(1.0) as u64;
            let p = estimate_success(config, n, t, 0).expect("point");
            print!("  c={c:<4} t={t:<6} p={:.2}", p.p_hat);
        }
        println!();
    }
}

fn main() {
    let three_phase = ExperimentConfig {
        version: 1,
        target: TargetSpec::TightCycle { m: 4, s: 3, ell: 1 },
        r: 2,
        strategy: StrategyConfig::CycleThreePhase,
        n_grid: vec![],
        t_rule: TRule::Explicit { ts: vec![] },
        trials: 60,
        seed: 1_234,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        success_check_every: None,
    };
    scan(
        "loose cycle C_4^(3,1), three-phase builder, r=2",
        &three_phase,
        &[1000, 8000],
        0.5,
        &[1.0, 1.5, 2.25, 3.4, 5.1, 7.6, 11.4],
    );

    let starplus = ExperimentConfig {
        version: 1,
        target: TargetSpec::Clique { k: 4, s: 3 },
        r: 2,
        strategy: StrategyConfig::StarplusBuilder,
        n_grid: vec![],
        t_rule: TRule::Explicit { ts: vec![] },
        trials: 60,
        seed: 4_321,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        success_check_every: None,
    };
    scan(
        "clique K_4^(3) via starplus builder, r=2",
        &starplus,
        &[200, 800],
        1.25,
        &[0.1, 0.2, 0.4, 0.8, 1.6, 3.2],
    );
}
