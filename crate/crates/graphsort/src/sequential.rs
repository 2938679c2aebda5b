//! One-pair-at-a-time compare-exchange dynamics with fault injection,
//! step / continuous-time accounting, and optional trace capture.
//!
//! Each step draws a pair from an [`EdgeSampler`], advances simulated
//! continuous time by an exponential holding time at rate `w(E)` (holding
//! times are drawn per step rather than per edge clock, which is equivalent
//! by superposition), and compare-exchanges the pair. A faulty step still
//! counts as one comparison: the comparator ran, it just did nothing.

use crate::graph::EdgeSampler;
use rand::Rng;
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("initial array must be nonempty")]
    EmptyInput,
    #[error("maxSteps must be positive")]
    ZeroBudget,
    #[error("sampler is over n = {sampler_n} but the array has length {array_n}")]
    LengthMismatch { sampler_n: usize, array_n: usize },
    #[error("pair ({i}, {j}) invalid for length {n}: need i < j < n")]
    BadPair { i: usize, j: usize, n: usize },
    #[error("fault probability {0} outside (0, 1]")]
    BadFaultProbability(f64),
}

/// Independent full scan; empty arrays are vacuously sorted.
pub fn is_sorted(keys: &[u64]) -> bool {
    keys.windows(2).all(|w| w[0] <= w[1])
}

/// The array being sorted plus its step / time counters.
///
/// Sortedness is tracked incrementally through the number of adjacent
/// descents, so `is_sorted` is O(1) and a compare-exchange is O(1).
#[derive(Debug, Clone)]
pub struct SortState {
    keys: Vec<u64>,
    steps: u64,
    swaps: u64,
    rounds: u64,
    sim_time: f64,
    descents: usize,
}

impl SortState {
    pub fn new(keys: Vec<u64>) -> Self {
        let descents = keys.windows(2).filter(|w| w[0] > w[1]).count();
        Self { keys, steps: 0, swaps: 0, rounds: 0, sim_time: 0.0, descents }
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn n(&self) -> usize {
        self.keys.len()
    }

    /// Comparisons performed (faulty attempts included).
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn swaps(&self) -> u64 {
        self.swaps
    }

    /// Synchronous rounds applied; stays 0 under the sequential engine.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn sim_time(&self) -> f64 {
        self.sim_time
    }

    pub fn is_sorted(&self) -> bool {
        self.descents == 0
    }

    /// Sorts positions `i < j` into ascending order. Returns whether a swap
    /// occurred; the step counter advances either way.
    pub fn compare_and_sort(&mut self, i: usize, j: usize) -> Result<bool, EngineError> {
        if i >= j || j >= self.keys.len() {
            return Err(EngineError::BadPair { i, j, n: self.keys.len() });
        }
        Ok(self.compare_exchange(i, j))
    }

    pub(crate) fn compare_exchange(&mut self, i: usize, j: usize) -> bool {
        debug_assert!(i < j && j < self.keys.len());
        self.steps += 1;
        if self.keys[i] <= self.keys[j] {
            return false;
        }
        // adjacencies whose descent status the swap can touch, deduplicated
        // (j - 1 collides with i when the pair is adjacent)
        let last = self.keys.len() - 1;
        let mut affected = [usize::MAX; 4];
        let mut count = 0;
        for candidate in [i.wrapping_sub(1), i, j.wrapping_sub(1), j] {
            if candidate < last && !affected[..count].contains(&candidate) {
                affected[count] = candidate;
                count += 1;
            }
        }
        for &a in &affected[..count] {
            if self.keys[a] > self.keys[a + 1] {
                self.descents -= 1;
            }
        }
        self.keys.swap(i, j);
        for &a in &affected[..count] {
            if self.keys[a] > self.keys[a + 1] {
                self.descents += 1;
            }
        }
        self.swaps += 1;
        true
    }

    /// A comparison attempt that the (faulty) comparator dropped.
    pub(crate) fn count_attempt(&mut self) {
        self.steps += 1;
    }

    pub(crate) fn advance_time(&mut self, dt: f64) {
        debug_assert!(dt >= 0.0);
        self.sim_time += dt;
    }

    pub(crate) fn bump_round(&mut self) {
        self.rounds += 1;
    }

}

/// Comparator reliability model. A failed step proposes the pair but leaves
/// it untouched; it never "unsorts".
#[derive(Clone)]
pub enum FaultModel {
    /// Every comparison succeeds.
    None,
    /// Every comparison succeeds independently with the given probability.
    Constant(f64),
    /// Pair-dependent success probability with a recorded uniform lower bound.
    PerPair {
        lower_bound: f64,
        prob: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>,
    },
}

impl FaultModel {
    pub fn none() -> Self {
        FaultModel::None
    }

    pub fn constant(p: f64) -> Result<Self, EngineError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(EngineError::BadFaultProbability(p));
        }
        Ok(FaultModel::Constant(p))
    }

    pub fn per_pair<F>(lower_bound: f64, prob: F) -> Result<Self, EngineError>
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        if !(lower_bound > 0.0 && lower_bound <= 1.0) {
            return Err(EngineError::BadFaultProbability(lower_bound));
        }
        Ok(FaultModel::PerPair { lower_bound, prob: Arc::new(prob) })
    }

    /// Uniform lower bound `p` on the per-pair success probabilities.
    pub fn lower_bound(&self) -> f64 {
        match self {
            FaultModel::None => 1.0,
            FaultModel::Constant(p) => *p,
            FaultModel::PerPair { lower_bound, .. } => *lower_bound,
        }
    }

    /// Decides whether this step's comparator fires.
    pub fn passes<R: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut R) -> bool {
        match self {
            FaultModel::None => true,
            FaultModel::Constant(p) => rng.gen::<f64>() < *p,
            FaultModel::PerPair { prob, .. } => rng.gen::<f64>() < prob(i, j),
        }
    }
}

impl fmt::Debug for FaultModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultModel::None => write!(f, "FaultModel::None"),
            FaultModel::Constant(p) => write!(f, "FaultModel::Constant({p})"),
            FaultModel::PerPair { lower_bound, .. } => {
                write!(f, "FaultModel::PerPair {{ lower_bound: {lower_bound}, .. }}")
            }
        }
    }
}

/// One replayable comparison event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub step: u64,
    pub pair: (usize, usize),
    pub swapped: bool,
    pub sim_time: f64,
}

/// Trace capture policy. Full capture of a long run does not fit in memory,
/// so it is off by default and a ring buffer keeps only the tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Off,
    Full,
    Ring(usize),
}

enum TraceBuffer {
    Off,
    Full(Vec<TraceEvent>),
    Ring { buf: VecDeque<TraceEvent>, cap: usize },
}

impl TraceBuffer {
    fn new(mode: TraceMode) -> Self {
        match mode {
            TraceMode::Off => TraceBuffer::Off,
            TraceMode::Full => TraceBuffer::Full(Vec::new()),
            TraceMode::Ring(cap) => {
                TraceBuffer::Ring { buf: VecDeque::with_capacity(cap.min(1 << 20)), cap }
            }
        }
    }

    fn push(&mut self, event: TraceEvent) {
        match self {
            TraceBuffer::Off => {}
            TraceBuffer::Full(v) => v.push(event),
            TraceBuffer::Ring { buf, cap } => {
                if *cap == 0 {
                    return;
                }
                if buf.len() == *cap {
                    buf.pop_front();
                }
                buf.push_back(event);
            }
        }
    }

    fn into_vec(self) -> Vec<TraceEvent> {
        match self {
            TraceBuffer::Off => Vec::new(),
            TraceBuffer::Full(v) => v,
            TraceBuffer::Ring { buf, .. } => buf.into(),
        }
    }
}

/// Outcome of a sequential run. `budget_exhausted` is the distinguished
/// not-an-error status for hitting `max_steps` unsorted.
#[derive(Debug)]
pub struct SequentialRun {
    pub state: SortState,
    pub sorted: bool,
    pub budget_exhausted: bool,
    pub trace: Vec<TraceEvent>,
}

/// Runs the randomized sorter until the array is sorted or `max_steps`
/// comparisons have been attempted.
pub fn run_sequential<R: Rng + ?Sized>(
    initial: &[u64],
    sampler: &EdgeSampler,
    fault: &FaultModel,
    rng: &mut R,
    max_steps: u64,
    trace: TraceMode,
) -> Result<SequentialRun, EngineError> {
    if initial.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    if max_steps == 0 {
        return Err(EngineError::ZeroBudget);
    }
    if sampler.n() != initial.len() {
        return Err(EngineError::LengthMismatch {
            sampler_n: sampler.n(),
            array_n: initial.len(),
        });
    }

    let mut state = SortState::new(initial.to_vec());
    let mut buffer = TraceBuffer::new(trace);
    let rate = sampler.total_weight();

    while !state.is_sorted() && state.steps() < max_steps {
        state.advance_time(exponential(rng, rate));
        let (i, j) = sampler.sample_pair(rng);
        let swapped = if fault.passes(i, j, rng) {
            state.compare_exchange(i, j)
        } else {
            state.count_attempt();
            false
        };
        buffer.push(TraceEvent {
            step: state.steps(),
            pair: (i, j),
            swapped,
            sim_time: state.sim_time(),
        });
    }

    let sorted = state.is_sorted();
    Ok(SequentialRun {
        budget_exhausted: !sorted,
        sorted,
        trace: buffer.into_vec(),
        state,
    })
}

/// Exp(rate) holding time by inversion; `1 - u` keeps the log argument
/// strictly positive.
fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}
