//! Deterministic trial fan-out.
//!
//! Every run owns a private stream derived from `(masterSeed, n, trial)`,
//! trials execute across worker threads, and results are merged in
//! `(n, trial)` order regardless of completion order — identical configs
//! produce bit-identical output.

use super::inputs::{generate_input, InputKind};
use super::stats::RunStats;
use super::HarnessError;
use crate::graph::{EdgeSampler, PairWeightSpec, WeightTable};
use crate::parallel::{run_async, run_parallel, AsyncProtocol, MatchingKind, MatchingSamplerSpec};
use crate::seeding;
use crate::sequential::{is_sorted, run_sequential, FaultModel, TraceMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Which sorter an experiment exercises.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SorterSpec {
    Uniform,
    Adjacent,
    Harmonic {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Gray,
    Custom {
        path: PathBuf,
    },
    Structured,
    Thinned {
        p: usize,
    },
    Dimcut,
}

fn default_scale() -> f64 {
    4.0
}

impl SorterSpec {
    pub fn is_sequential(&self) -> bool {
        matches!(
            self,
            SorterSpec::Uniform
                | SorterSpec::Adjacent
                | SorterSpec::Harmonic { .. }
                | SorterSpec::Gray
                | SorterSpec::Custom { .. }
        )
    }

    pub fn label(&self) -> String {
        match self {
            SorterSpec::Uniform => "uniform".into(),
            SorterSpec::Adjacent => "adjacent".into(),
            SorterSpec::Harmonic { scale } => format!("harmonic({scale})"),
            SorterSpec::Gray => "gray".into(),
            SorterSpec::Custom { .. } => "custom".into(),
            SorterSpec::Structured => "structured".into(),
            SorterSpec::Thinned { p } => format!("thinned(p={p})"),
            SorterSpec::Dimcut => "dimcut".into(),
        }
    }

    fn pair_weight_spec(&self, n: usize) -> Result<Option<PairWeightSpec>, HarnessError> {
        Ok(match self {
            SorterSpec::Uniform => Some(PairWeightSpec::uniform(n)?),
            SorterSpec::Adjacent => Some(PairWeightSpec::adjacent(n)?),
            SorterSpec::Harmonic { scale } => Some(PairWeightSpec::harmonic(n, *scale)?),
            SorterSpec::Gray => Some(PairWeightSpec::gray_hypercube(n)?),
            SorterSpec::Custom { path } => {
                Some(PairWeightSpec::custom(n, WeightTable::from_path(path)?)?)
            }
            _ => None,
        })
    }

    fn matching_spec(&self, n: usize) -> Result<Option<MatchingSamplerSpec>, HarnessError> {
        Ok(match self {
            SorterSpec::Structured => {
                Some(MatchingSamplerSpec::new(MatchingKind::StructuredPowerOfTwo, n)?)
            }
            SorterSpec::Thinned { p } => {
                Some(MatchingSamplerSpec::new(MatchingKind::ThinnedIid { p: *p }, n)?)
            }
            SorterSpec::Dimcut => Some(MatchingSamplerSpec::new(MatchingKind::HypercubeDimCut, n)?),
            _ => None,
        })
    }
}

fn ceil_lg(n: usize) -> u64 {
    if n <= 1 {
        return 0;
    }
    (usize::BITS - (n - 1).leading_zeros()) as u64
}

/// Fail-safe step/round budgets: generous multiples of the expected orders,
/// so the measured distribution is never truncated in practice.
pub fn default_budget(sorter: &SorterSpec, n: usize) -> u64 {
    let n64 = n as u64;
    let lg = ceil_lg(n).max(1);
    match sorter {
        SorterSpec::Uniform | SorterSpec::Adjacent | SorterSpec::Custom { .. } => {
            64 * n64 * n64 * lg
        }
        SorterSpec::Harmonic { .. } | SorterSpec::Gray => 64 * n64 * lg * lg,
        SorterSpec::Structured | SorterSpec::Dimcut => 256 * lg * lg,
        SorterSpec::Thinned { p } => 256 * (n64 / (*p as u64).max(1)).max(1) * lg * lg,
    }
}

/// Experiment description; JSON config files use these field names in
/// camelCase.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sorter: SorterSpec,
    pub input_kind: String,
    pub n_list: Vec<usize>,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub fault_prob: Option<f64>,
    #[serde(default = "default_multiplier")]
    pub budget_multiplier: f64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

fn default_multiplier() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    fn validate(&self) -> Result<InputKind, HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::BadConfig("trials must be >= 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(HarnessError::BadConfig("nList must be nonempty".into()));
        }
        if !(self.budget_multiplier > 0.0 && self.budget_multiplier.is_finite()) {
            return Err(HarnessError::BadConfig(format!(
                "budgetMultiplier {} must be a positive real",
                self.budget_multiplier
            )));
        }
        if let Some(p) = self.fault_prob {
            FaultModel::constant(p)?;
        }
        // every n must be valid for the chosen sorter
        for &n in &self.n_list {
            self.sorter.pair_weight_spec(n)?;
            self.sorter.matching_spec(n)?;
        }
        InputKind::parse(&self.input_kind)
    }

    fn budget(&self, n: usize) -> u64 {
        ((default_budget(&self.sorter, n) as f64) * self.budget_multiplier).ceil() as u64
    }
}

fn fault_model(fault_prob: Option<f64>) -> Result<FaultModel, HarnessError> {
    Ok(match fault_prob {
        None => FaultModel::none(),
        Some(p) => FaultModel::constant(p)?,
    })
}

/// Runs `trials x |nList|` independent trials and returns their stats in
/// deterministic `(n, trial)` order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunStats>, HarnessError> {
    let input_kind = cfg.validate()?;
    let label = cfg.sorter.label();
    let fault = fault_model(cfg.fault_prob)?;

    let tasks: Vec<(usize, u64)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();

    tasks
        .into_par_iter()
        .map(|(n, trial)| run_one(cfg, &input_kind, &label, &fault, n, trial))
        .collect()
}

fn run_one(
    cfg: &ExperimentConfig,
    input_kind: &InputKind,
    label: &str,
    fault: &FaultModel,
    n: usize,
    trial: u64,
) -> Result<RunStats, HarnessError> {
    let seed = seeding::derive_seed(cfg.master_seed, n as u64, trial);
    let mut rng = seeding::stream(cfg.master_seed, n as u64, trial);
    let input = generate_input(input_kind, n, &mut rng)?;
    let budget = cfg.budget(n);

    if let Some(spec) = cfg.sorter.pair_weight_spec(n)? {
        let sampler = EdgeSampler::build(spec)?;
        let run = run_sequential(&input, &sampler, fault, &mut rng, budget, TraceMode::Off)?;
        Ok(RunStats {
            sorter: label.to_string(),
            n,
            trial,
            seed,
            comparisons: run.state.steps(),
            swaps: run.state.swaps(),
            rounds: 0,
            sim_time: run.state.sim_time(),
            // re-verified by an independent scan, not the engine's flag
            sorted: is_sorted(run.state.keys()),
            wall_ns: 0,
        })
    } else {
        let spec = cfg.sorter.matching_spec(n)?.expect("sorter is parallel");
        let run = run_parallel(&input, &spec, &mut rng, budget)?;
        Ok(RunStats {
            sorter: label.to_string(),
            n,
            trial,
            seed,
            comparisons: run.comparisons,
            swaps: run.state.swaps(),
            rounds: run.rounds,
            sim_time: 0.0,
            sorted: is_sorted(run.state.keys()),
            wall_ns: 0,
        })
    }
}

/// One asynchronous-executor experiment (measured wall time, not
/// bit-reproducible).
#[derive(Debug, Clone)]
pub struct AsyncTrialConfig {
    pub protocol: AsyncProtocol,
    pub n: usize,
    pub workers: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub input_kind: InputKind,
    pub fault_prob: Option<f64>,
    pub budget_multiplier: f64,
    /// Harmonic scale for the shared edge sampler.
    pub scale: f64,
}

pub fn run_async_trials(cfg: &AsyncTrialConfig) -> Result<Vec<RunStats>, HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::BadConfig("trials must be >= 1".into()));
    }
    let fault = fault_model(cfg.fault_prob)?;
    let sampler = EdgeSampler::build(PairWeightSpec::harmonic(cfg.n, cfg.scale)?)?;
    let lg = ceil_lg(cfg.n).max(1);
    let base_budget = match cfg.protocol {
        // total comparisons across workers
        AsyncProtocol::Atomic => 64 * cfg.n as u64 * lg * lg,
        // synchronized rounds
        AsyncProtocol::MarkRound => {
            256 * (cfg.n as u64 / cfg.workers as u64).max(1) * lg * lg
        }
    };
    let budget = ((base_budget as f64) * cfg.budget_multiplier).ceil() as u64;
    let label = match cfg.protocol {
        AsyncProtocol::Atomic => format!("async-atomic(p={})", cfg.workers),
        AsyncProtocol::MarkRound => format!("async-mark(p={})", cfg.workers),
    };

    let mut rows = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let seed = seeding::derive_seed(cfg.master_seed, cfg.n as u64, trial);
        let mut rng = seeding::stream(cfg.master_seed, cfg.n as u64, trial);
        let input = generate_input(&cfg.input_kind, cfg.n, &mut rng)?;
        let run = run_async(&input, cfg.workers, &sampler, &fault, cfg.protocol, budget, seed)?;
        rows.push(RunStats {
            sorter: label.clone(),
            n: cfg.n,
            trial,
            seed,
            comparisons: run.comparisons,
            swaps: run.swaps,
            rounds: run.rounds,
            sim_time: 0.0,
            sorted: is_sorted(&run.keys),
            wall_ns: run.wall.as_nanos() as u64,
        });
    }
    Ok(rows)
}
