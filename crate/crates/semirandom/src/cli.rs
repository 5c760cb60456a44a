//! Command-line front end: analyze targets, run simulations and sweeps,
//! execute the verification suite, and query the oracles. Outputs are
//! written atomically (temp file in the destination directory, then rename).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::analysis::threshold_report;
use crate::error::{Error, Result};
use crate::hypergraph::{build_target, Edge, TargetSpec};
use crate::montecarlo::{sweep_and_fit, ExperimentConfig, StrategyConfig};
use crate::oracle::{exact_hit_probability, phi_f, verify_appendix, AppendixRanges, DpMode};
use crate::process::{
    duplicate_rate_check, run, trace_to_csv, trial_rng, RunOptions, RNG_ALGORITHM,
};

#[derive(Debug, Parser)]
#[command(
    name = "semirandom",
    about = "Semi-random hypergraph process: analysis, simulation, verification",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed override for simulate/sweep configs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial-level parallelism (default: SEMIRANDOM_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact threshold-exponent bounds for a target.
    Analyze(AnalyzeArgs),
    /// Run process trials at a single (n, t) point.
    Simulate(SimulateArgs),
    /// Success-probability sweep over an (n, t) grid with exponent fit.
    Sweep(SweepArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Exact oracle queries.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Target as a JSON object, e.g. '{"family":"clique","k":5,"s":3}'.
    #[arg(long)]
    target: String,
    #[arg(long)]
    r: u32,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON config file; see SimulateConfig.
    #[arg(long)]
    config: PathBuf,
    /// Write the first trial's step trace (CSV) to this path.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON config file; see ExperimentConfig.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name; "appendix" is the claim-by-claim enumeration suite.
    #[arg(long, default_value = "appendix")]
    suite: String,
    /// Optional JSON file overriding the enumeration ranges.
    #[arg(long)]
    ranges: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(subcommand)]
    op: OracleOp,
}

#[derive(Debug, Subcommand)]
enum OracleOp {
    /// Probability that t uniform r-set draws meet a multiset requirement.
    Hitprob {
        /// JSON list of [vertices, multiplicity] pairs,
        /// e.g. '[[[1,2],2],[[1,3],1]]'.
        #[arg(long)]
        required: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        t: u64,
    },
    /// Minimize n^v p^e over sub-hypergraphs of a target.
    Phi {
        #[arg(long)]
        target: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p_num: i64,
        #[arg(long)]
        p_den: i64,
    },
    /// Empirical mean duplicate-draw count against the exact expectation.
    Duplicates {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Single-point simulation config.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub version: u32,
    pub target: TargetSpec,
    pub r: u32,
    pub strategy: StrategyConfig,
    pub n: u32,
    pub budget: u64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_rng")]
    pub rng_algorithm: String,
    #[serde(default)]
    pub success_check_every: Option<u64>,
    #[serde(default)]
    pub record_trace: bool,
}

fn default_rng() -> String {
    RNG_ALGORITHM.to_string()
}

/// Parses argv and runs the requested command. Exit codes: 0 success, 1 for
/// configuration or usage errors (the message names the offending field),
/// 2 for resource errors.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    init_threads(cli.threads);
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Resource(_) => 2,
                _ => 1,
            }
        }
    }
}

fn init_threads(threads: Option<usize>) {
    let threads = threads.or_else(|| {
        std::env::var("SEMIRANDOM_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => {
            let spec: TargetSpec = serde_json::from_str(&args.target)
                .map_err(|e| Error::config(format!("field 'target': {e}")))?;
            let target = build_target(&spec)?;
            let report = threshold_report(&target, args.r)?;
            let payload = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report.to_json())? + "\n",
                Format::Csv => report.to_csv(),
            };
            write_output(cli.out.as_deref(), &payload)
        }
        Command::Simulate(args) => {
            let mut config: SimulateConfig = read_config(&args.config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            simulate(
                &config,
                cli.format,
                cli.out.as_deref(),
                args.trace_out.as_deref(),
            )
        }
        Command::Sweep(args) => {
            let mut config: ExperimentConfig = read_config(&args.config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            let result = sweep_and_fit(&config)?;
            let payload = match cli.format {
                Format::Json => serde_json::to_string_pretty(&result.to_json())? + "\n",
                Format::Csv => result.points_csv(),
            };
            write_output(cli.out.as_deref(), &payload)
        }
        Command::Verify(args) => {
            if args.suite != "appendix" {
                return Err(Error::config(format!(
                    "field 'suite': unknown suite {:?} (expected \"appendix\")",
                    args.suite
                )));
            }
            let ranges: AppendixRanges = match args.ranges {
                Some(path) => read_config(&path)?,
                None => AppendixRanges::default(),
            };
            let reports = verify_appendix(&ranges);
            let all_pass = reports.iter().all(|r| r.passed());
            let payload = serde_json::to_string_pretty(&json!({
                "suite": "appendix",
                "all_pass": all_pass,
                "claims": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            }))? + "\n";
            write_output(cli.out.as_deref(), &payload)?;
            if all_pass {
                Ok(())
            } else {
                Err(Error::config("verification found counterexamples"))
            }
        }
        Command::Oracle(args) => oracle(args, cli.out.as_deref()),
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("field 'config': cannot read {path:?}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::config(format!("config {path:?}: {e}")))
}

fn simulate(
    config: &SimulateConfig,
    format: Format,
    out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<()> {
    if config.rng_algorithm != RNG_ALGORITHM {
        return Err(Error::config(format!(
            "field 'rng_algorithm': this build implements {RNG_ALGORITHM:?}"
        )));
    }
    let experiment = ExperimentConfig {
        version: config.version,
        target: config.target.clone(),
        r: config.r,
        strategy: config.strategy.clone(),
        n_grid: vec![config.n],
        t_rule: crate::montecarlo::TRule::Explicit {
            ts: vec![config.budget],
        },
        trials: config.trials,
        seed: config.seed,
        rng_algorithm: config.rng_algorithm.clone(),
        success_check_every: config.success_check_every,
    };
    experiment.validate()?;
    let target = build_target(&config.target)?;
    let mut rows = Vec::new();
    for trial in 0..config.trials {
        let mut strategy = experiment.make_strategy(&target, trial)?;
        let mut rng = trial_rng(config.seed, trial);
        let mut options = RunOptions::new(config.budget);
        options.record_trace = config.record_trace && trial == 0 && trace_out.is_some();
        if let Some(every) = config.success_check_every {
            options = options.with_periodic_check(every);
        }
        let outcome = run(
            config.n,
            config.r,
            target.s(),
            strategy.as_mut(),
            &target,
            &mut rng,
            &options,
        )?;
        if let (Some(path), Some(trace)) = (trace_out, outcome.trace.as_ref()) {
            write_to_path(path, &trace_to_csv(trace))?;
        }
        rows.push((
            trial,
            outcome.success_step,
            outcome.final_graph.edge_count(),
            outcome.duplicate_draws,
        ));
    }
    let successes = rows.iter().filter(|r| r.1.is_some()).count() as u64;
    let payload = match format {
        Format::Csv => {
            let mut s = String::from("trial,success_step,steps,duplicate_draws\n");
            for (trial, step, steps, dups) in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    trial,
                    step.map_or(String::new(), |x| x.to_string()),
                    steps,
                    dups
                ));
            }
            s
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "n": config.n,
                "budget": config.budget,
                "trials": config.trials,
                "successes": successes,
                "runs": rows.iter().map(|(trial, step, steps, dups)| json!({
                    "trial": trial,
                    "success_step": step,
                    "steps": steps,
                    "duplicate_draws": dups,
                })).collect::<Vec<_>>(),
            }))? + "\n"
        }
    };
    write_output(out, &payload)
}

fn oracle(args: OracleArgs, out: Option<&Path>) -> Result<()> {
    let payload = match args.op {
        OracleOp::Hitprob { required, n, r, t } => {
            let parsed: Vec<(Vec<u32>, u32)> = serde_json::from_str(&required)
                .map_err(|e| Error::config(format!("field 'required': {e}")))?;
            let required: Vec<(Edge, u32)> = parsed
                .into_iter()
                .map(|(vs, m)| Edge::new(vs).map(|e| (e, m)))
                .collect::<Result<_>>()?;
            let got = exact_hit_probability(&required, n, r, t, DpMode::Auto)?;
            serde_json::to_string_pretty(&json!({
                "probability": got.value,
                "mode": got.mode,
                "error_bound": got.error_bound,
                "exact": got.exact.map(|q| json!({
                    "num": q.numer().to_string(),
                    "den": q.denom().to_string(),
                })),
            }))? + "\n"
        }
        OracleOp::Phi {
            target,
            n,
            p_num,
            p_den,
        } => {
            let spec: TargetSpec = serde_json::from_str(&target)
                .map_err(|e| Error::config(format!("field 'target': {e}")))?;
            let f = build_target(&spec)?;
            let p = crate::analysis::rational(p_num, p_den);
            let got = phi_f(&f, n, &p)?;
            serde_json::to_string_pretty(&json!({
                "v": got.v,
                "e": got.e,
                "minimizer": got.minimizer,
                "log10_value": got.log10,
                "value": {
                    "num": got.value.numer().to_string(),
                    "den": got.value.denom().to_string(),
                },
            }))? + "\n"
        }
        OracleOp::Duplicates {
            n,
            r,
            t,
            trials,
            seed,
        } => {
            let mean = duplicate_rate_check(n, r, t, trials, seed)?;
            let exact = crate::process::expected_duplicates(n, r, t);
            serde_json::to_string_pretty(&json!({
                "empirical_mean": mean,
                "exact_expectation": exact,
                "trials": trials,
            }))? + "\n"
        }
    };
    write_output(out, &payload)
}

fn write_output(out: Option<&Path>, payload: &str) -> Result<()> {
    match out {
        Some(path) => write_to_path(path, payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// Atomic write: temp file in the same directory, then rename.
fn write_to_path(path: &Path, payload: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(payload.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(())
}
