//! Reproducible experiment driver: seed fan-out, trial parallelism,
//! scaling-law fitting, marginal certification, and CSV/JSON emission.

mod experiment;
mod fit;
mod inputs;
mod oracle;
mod qalpha;
mod stats;

pub use experiment::{
    default_budget, run_async_trials, run_experiment, AsyncTrialConfig, ExperimentConfig,
    SorterSpec,
};
pub use fit::{fit_scaling, parse_csv, FitMetric, FitReport, LawFit};
pub use inputs::{generate_input, InputKind};
pub use oracle::{
    oracle_inversion_monotone, oracle_lift, oracle_misplaced_monotone, oracle_omega_absorbing,
    oracle_prefix_ones, oracle_zero_one_principle, run_all_oracles, OracleOutcome,
};
pub use qalpha::{verify_qalpha_exact, verify_qalpha_thinned, QalphaReport};
pub use stats::{rows_to_csv, rows_to_json, write_csv, write_json, RunStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    BadConfig(String),
    #[error("unknown input kind {0:?}")]
    BadInputKind(String),
    #[error("input file: {0}")]
    BadInputFile(String),
    #[error("need at least {need} distinct n values, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("csv: {0}")]
    BadCsv(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Engine(#[from] crate::sequential::EngineError),
    #[error(transparent)]
    Parallel(#[from] crate::parallel::ParallelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
