//! Graph-based randomized sorters.
//!
//! The core primitive is dead simple: draw a pair of array positions `{i, j}`
//! with probability proportional to an edge weight `w(i, j)`, then
//! compare-exchange the values at those positions into ascending order.
//! Different weight families give wildly different sorting times:
//!
//! * [`WeightFamily::Uniform`] — every pair equally likely, order `n^2 log n`
//!   comparisons;
//! * [`WeightFamily::Adjacent`] — only neighbours, order `n^2`;
//! * [`WeightFamily::Harmonic`] — `w(i, j) = scale / |j - i|`, order
//!   `n (log n)^2`;
//! * [`WeightFamily::GrayHypercube`] — unit weights on Gray-code hypercube
//!   edges (experimental).
//!
//! On top of the single-pair engine sit synchronous parallel samplers that
//! draw whole matchings per round ([`parallel`]), a genuinely concurrent
//! asynchronous executor ([`parallel::run_async`]), and the measurement
//! machinery used to verify the claimed scaling laws at desk scale
//! ([`analysis`], [`harness`]).

pub mod analysis;
pub mod graph;
pub mod harness;
pub mod parallel;
pub mod seeding;
pub mod sequential;

pub use graph::{EdgeSampler, GraphError, PairWeightSpec, WeightFamily, WeightTable};
pub use graph::{gray_code, gray_rank, is_gray_edge};
pub use parallel::{
    apply_matching, dimcut_matching, exact_structured_marginal, fundamental_block, run_async,
    run_parallel, sample_dimcut_matching, sample_structured_matching, sample_thinned_matching,
    structured_matching, AsyncProtocol, AsyncRun, Matching, MatchingKind, MatchingMeta,
    MatchingSamplerSpec, ParallelError,
};
pub use sequential::{
    is_sorted, run_sequential, EngineError, FaultModel, SequentialRun, SortState, TraceEvent,
    TraceMode,
};
