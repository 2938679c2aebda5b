//! `graphsort` — run, measure, and verify the graph-based randomized
//! sorters from the `graphsort` library.
//!
//! Exit codes: 0 on success, 1 when a verification check fails (or an
//! execution error occurs), 2 on usage/config errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use graphsort::harness::{
    default_budget, fit_scaling, parse_csv, run_all_oracles, run_async_trials, run_experiment,
    verify_qalpha_exact, verify_qalpha_thinned, write_csv, write_json, AsyncTrialConfig,
    ExperimentConfig, FitMetric, HarnessError, InputKind, OracleOutcome, RunStats, SorterSpec,
};
use graphsort::harness::{
    generate_input, oracle_inversion_monotone, oracle_lift, oracle_misplaced_monotone,
    oracle_omega_absorbing, oracle_prefix_ones, oracle_zero_one_principle,
};
use graphsort::sequential::{is_sorted, run_sequential, FaultModel, TraceMode};
use graphsort::{seeding, EdgeSampler, PairWeightSpec, WeightTable};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "graphsort", version, about = "graph-based randomized sorting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one sequential sort and print its statistics.
    Sort(SortArgs),
    /// Run a trial grid (deterministic; identical config => identical bytes).
    Experiment(ExperimentArgs),
    /// Run parallel sorters: synchronous matchings or the async executors.
    Parallel(ParallelArgs),
    /// Fit scaling-law candidates to a results CSV.
    Fit(FitArgs),
    /// Certify matching pair-marginals against alpha / distance.
    VerifyQalpha(QalphaArgs),
    /// Run the analysis-module oracle battery.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SortArgs {
    /// uniform | adjacent | harmonic | gray | custom
    #[arg(long, default_value = "harmonic")]
    family: String,
    /// Harmonic weight scale.
    #[arg(long, default_value_t = 4.0)]
    scale: f64,
    /// Weight table file for --family custom ("i j weight" lines).
    #[arg(long)]
    graph_file: Option<PathBuf>,
    #[arg(long)]
    n: usize,
    /// reverse | alternating | random | zero-one-worst | file:PATH
    #[arg(long, default_value = "random")]
    input: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    fault_prob: Option<f64>,
    /// Override the fail-safe comparison budget.
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    budget_mult: f64,
    /// Capture and report the tail of the comparison trace.
    #[arg(long, default_value_t = 0)]
    trace_tail: usize,
    /// Emit the run record as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file (field names: sorter, inputKind, nList, trials,
    /// masterSeed, faultProb, budgetMultiplier, outputPath).
    #[arg(long, conflicts_with_all = ["sorter", "n_list"])]
    config: Option<PathBuf>,
    /// uniform | adjacent | harmonic | gray | custom | structured |
    /// thinned | dimcut
    #[arg(long)]
    sorter: Option<String>,
    #[arg(long, default_value_t = 4.0)]
    scale: f64,
    /// Proposals per round for the thinned sampler.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Comma-separated lengths, e.g. 64,128,256.
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "reverse")]
    input: String,
    #[arg(long)]
    fault_prob: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    budget_mult: f64,
    /// CSV output path (overrides the config's outputPath).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON mirror of the CSV rows.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct ParallelArgs {
    /// structured | thinned | dimcut | async-atomic | async-mark
    #[arg(long)]
    mode: String,
    #[arg(long)]
    n: usize,
    /// Thinned proposals per round, or async worker count.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "reverse")]
    input: String,
    #[arg(long)]
    fault_prob: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    budget_mult: f64,
    /// Harmonic scale used by the async executors' edge sampler.
    #[arg(long, default_value_t = 4.0)]
    scale: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    csv: PathBuf,
    /// comparisons | rounds
    #[arg(long, default_value = "comparisons")]
    metric: String,
}

#[derive(Args)]
struct QalphaArgs {
    /// exact | montecarlo
    #[arg(long)]
    mode: String,
    #[arg(long)]
    n: usize,
    /// Proposals per matching (montecarlo mode).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Multiplies alpha; values above 1 exist to demonstrate failure.
    #[arg(long, default_value_t = 1.0)]
    alpha_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest length for the exhaustive 0-1 principle sweep.
    #[arg(long)]
    max_n: Option<usize>,
    /// Random traces per permutation in the 0-1 sweep.
    #[arg(long)]
    traces: Option<u64>,
    /// Trace steps each monotonicity oracle must cover.
    #[arg(long)]
    steps: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_usage_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_usage_error(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<HarnessError>(),
        Some(HarnessError::BadConfig(_) | HarnessError::BadInputKind(_) | HarnessError::Json(_))
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sort(args) => cmd_sort(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Parallel(args) => cmd_parallel(args),
        Command::Fit(args) => cmd_fit(args),
        Command::VerifyQalpha(args) => cmd_verify_qalpha(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn sequential_spec(family: &str, scale: f64, graph_file: &Option<PathBuf>, n: usize) -> Result<PairWeightSpec> {
    Ok(match family {
        "uniform" => PairWeightSpec::uniform(n)?,
        "adjacent" => PairWeightSpec::adjacent(n)?,
        "harmonic" => PairWeightSpec::harmonic(n, scale)?,
        "gray" => PairWeightSpec::gray_hypercube(n)?,
        "custom" => {
            let path = graph_file
                .as_ref()
                .ok_or_else(|| anyhow!("--family custom requires --graph-file"))?;
            PairWeightSpec::custom(n, WeightTable::from_path(path)?)?
        }
        other => bail!("unknown family {other:?}"),
    })
}

fn cmd_sort(args: SortArgs) -> Result<ExitCode> {
    let spec = sequential_spec(&args.family, args.scale, &args.graph_file, args.n)?;
    let label = spec.label();
    let sorter_for_budget = match args.family.as_str() {
        "uniform" => SorterSpec::Uniform,
        "adjacent" => SorterSpec::Adjacent,
        "gray" => SorterSpec::Gray,
        "custom" => SorterSpec::Custom { path: args.graph_file.clone().unwrap() },
        _ => SorterSpec::Harmonic { scale: args.scale },
    };
    let budget = args.max_steps.unwrap_or_else(|| {
        ((default_budget(&sorter_for_budget, args.n) as f64) * args.budget_mult).ceil() as u64
    });
    let sampler = EdgeSampler::build(spec)?;
    let fault = match args.fault_prob {
        None => FaultModel::none(),
        Some(p) => FaultModel::constant(p)?,
    };
    let kind = InputKind::parse(&args.input)?;
    let seed = seeding::derive_seed(args.seed, args.n as u64, 0);
    let mut rng = seeding::stream(args.seed, args.n as u64, 0);
    let initial = generate_input(&kind, args.n, &mut rng)?;

    let trace_mode = if args.trace_tail > 0 { TraceMode::Ring(args.trace_tail) } else { TraceMode::Off };
    let started = Instant::now();
    let outcome = run_sequential(&initial, &sampler, &fault, &mut rng, budget, trace_mode)?;
    let wall_ns = started.elapsed().as_nanos() as u64;

    let stats = RunStats {
        sorter: label,
        n: args.n,
        trial: 0,
        seed,
        comparisons: outcome.state.steps(),
        swaps: outcome.state.swaps(),
        rounds: 0,
        sim_time: outcome.state.sim_time(),
        sorted: is_sorted(outcome.state.keys()),
        wall_ns,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
    } else {
        println!(
            "sorter={} n={} seed={} comparisons={} swaps={} sim_time={:.6} sorted={} wall_ns={}",
            stats.sorter,
            stats.n,
            stats.seed,
            stats.comparisons,
            stats.swaps,
            stats.sim_time,
            stats.sorted,
            stats.wall_ns
        );
        for event in &outcome.trace {
            println!(
                "trace step={} pair=({},{}) swapped={} sim_time={:.6}",
                event.step, event.pair.0, event.pair.1, event.swapped, event.sim_time
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_sorter(args: &ExperimentArgs) -> Result<SorterSpec> {
    let name = args
        .sorter
        .as_deref()
        .ok_or_else(|| anyhow!("pass --config FILE or --sorter NAME"))?;
    Ok(match name {
        "uniform" => SorterSpec::Uniform,
        "adjacent" => SorterSpec::Adjacent,
        "harmonic" => SorterSpec::Harmonic { scale: args.scale },
        "gray" => SorterSpec::Gray,
        "custom" => SorterSpec::Custom {
            path: args
                .graph_file
                .clone()
                .ok_or_else(|| anyhow!("--sorter custom requires --graph-file"))?,
        },
        "structured" => SorterSpec::Structured,
        "thinned" => SorterSpec::Thinned {
            p: args.p.ok_or_else(|| anyhow!("--sorter thinned requires --p"))?,
        },
        "dimcut" => SorterSpec::Dimcut,
        other => bail!("unknown sorter {other:?}"),
    })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig {
            sorter: parse_sorter(&args)?,
            input_kind: args.input.clone(),
            n_list: args.n_list.clone(),
            trials: args.trials,
            master_seed: args.seed,
            fault_prob: args.fault_prob,
            budget_multiplier: args.budget_mult,
            output_path: None,
        },
    };
    if let Some(out) = &args.out {
        cfg.output_path = Some(out.clone());
    }
    let out = cfg
        .output_path
        .clone()
        .ok_or_else(|| anyhow!("no output path: pass --out or set outputPath in the config"))?;

    let rows = run_experiment(&cfg)?;
    write_csv(&rows, &out)?;
    if let Some(json_path) = &args.json_out {
        write_json(&rows, json_path)?;
    }
    let unsorted = rows.iter().filter(|r| !r.sorted).count();
    eprintln!(
        "wrote {} rows to {} ({} budget-exhausted)",
        rows.len(),
        out.display(),
        unsorted
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_parallel(args: ParallelArgs) -> Result<ExitCode> {
    let rows = match args.mode.as_str() {
        "structured" | "thinned" | "dimcut" => {
            let sorter = match args.mode.as_str() {
                "structured" => SorterSpec::Structured,
                "dimcut" => SorterSpec::Dimcut,
                _ => SorterSpec::Thinned {
                    p: args.p.ok_or_else(|| anyhow!("--mode thinned requires --p"))?,
                },
            };
            let cfg = ExperimentConfig {
                sorter,
                input_kind: args.input.clone(),
                n_list: vec![args.n],
                trials: args.trials,
                master_seed: args.seed,
                fault_prob: args.fault_prob,
                budget_multiplier: args.budget_mult,
                output_path: None,
            };
            run_experiment(&cfg)?
        }
        "async-atomic" | "async-mark" => {
            let protocol = if args.mode == "async-atomic" {
                graphsort::AsyncProtocol::Atomic
            } else {
                graphsort::AsyncProtocol::MarkRound
            };
            let cfg = AsyncTrialConfig {
                protocol,
                n: args.n,
                workers: args.p.ok_or_else(|| anyhow!("async modes require --p workers"))?,
                trials: args.trials,
                master_seed: args.seed,
                input_kind: InputKind::parse(&args.input)?,
                fault_prob: args.fault_prob,
                budget_multiplier: args.budget_mult,
                scale: args.scale,
            };
            run_async_trials(&cfg)?
        }
        other => bail!("unknown mode {other:?}"),
    };

    write_csv(&rows, &args.out)?;
    if let Some(json_path) = &args.json_out {
        write_json(&rows, json_path)?;
    }
    let unsorted = rows.iter().filter(|r| !r.sorted).count();
    eprintln!(
        "wrote {} rows to {} ({} budget-exhausted)",
        rows.len(),
        args.out.display(),
        unsorted
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(args: FitArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.csv)
        .with_context(|| format!("reading {}", args.csv.display()))?;
    let rows = parse_csv(&text)?;
    let metric = FitMetric::parse(&args.metric)?;
    let report = fit_scaling(&rows, metric)?;
    print!("{report}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_qalpha(args: QalphaArgs) -> Result<ExitCode> {
    let report = match args.mode.as_str() {
        "exact" => verify_qalpha_exact(args.n, args.alpha_scale)?,
        "montecarlo" => {
            let p = args.p.ok_or_else(|| anyhow!("montecarlo mode requires --p"))?;
            verify_qalpha_thinned(args.n, p, args.samples, args.seed)?
        }
        other => bail!("unknown mode {other:?}"),
    };
    println!("{}", report.to_json());
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let outcomes: Vec<OracleOutcome> = match (args.max_n, args.traces, args.steps) {
        (None, None, None) => run_all_oracles(args.seed)?,
        _ => {
            let max_n = args.max_n.unwrap_or(6);
            let traces = args.traces.unwrap_or(100);
            let steps = args.steps.unwrap_or(10_000);
            vec![
                oracle_zero_one_principle(max_n, traces, args.seed),
                oracle_inversion_monotone(64, steps, args.seed),
                oracle_omega_absorbing(64, steps, args.seed),
                oracle_misplaced_monotone(64, steps, args.seed),
                oracle_prefix_ones(64, steps, args.seed),
                oracle_lift(traces.max(1), args.seed),
            ]
        }
    };
    let mut all_passed = true;
    for outcome in &outcomes {
        println!("{}", outcome.to_json());
        all_passed &= outcome.passed();
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
