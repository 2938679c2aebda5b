//! Synchronous matching-based rounds and the asynchronous executor.
//!
//! One parallel step draws a whole matching (a set of vertex-disjoint index
//! pairs) and compare-exchanges every pair; disjointness makes the order of
//! application irrelevant. Three samplers are provided: the structured
//! power-of-two family (`|M| = n/4` deterministically), iid harmonic
//! proposals thinned by conflict (`|M| <= p`), and hypercube dimension cuts
//! (`|M| = n/2`).

mod async_exec;
mod structured;

pub use async_exec::{run_async, AsyncProtocol, AsyncRun};
pub use structured::{
    circular_distance, exact_structured_marginal, fundamental_block, sample_structured_matching,
    structured_marginal_numerators, structured_matching, structured_outcomes,
};

use crate::graph::{gray_code, gray_rank, EdgeSampler, WeightFamily};
use crate::sequential::SortState;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParallelError {
    #[error("{what} requires a power-of-two length, got {n}")]
    NotPowerOfTwo { what: &'static str, n: usize },
    #[error("{what} requires n >= {min}, got {n}")]
    TooSmall { what: &'static str, n: usize, min: usize },
    #[error("scale k = {k} out of range 1..={levels}")]
    BadLevel { k: u32, levels: u32 },
    #[error("edge length {d} invalid for n = {n}")]
    BadDistance { d: usize, n: usize },
    #[error("rotation {0} out of range 0..=3")]
    BadRotation(u8),
    #[error("pair count p = {p} out of range 1..={max} for n = {n}")]
    POutOfRange { p: usize, n: usize, max: usize },
    #[error("pair ({i}, {j}) out of range for n = {n}")]
    PairOutOfRange { i: usize, j: usize, n: usize },
    #[error("pair indices must be distinct, got {0} twice")]
    DegeneratePair(usize),
    #[error("matching is not vertex-disjoint: index {0} appears twice")]
    Overlap(usize),
    #[error("thinned sampling requires a harmonic edge sampler")]
    NotHarmonic,
    #[error("sampler is over n = {sampler_n} but the array has length {array_n}")]
    LengthMismatch { sampler_n: usize, array_n: usize },
    #[error("initial array must be nonempty")]
    EmptyInput,
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("mark-round protocol requires p <= n/4, got p = {p} for n = {n}")]
    TooManyMarkWorkers { p: usize, n: usize },
}

/// A set of pairwise vertex-disjoint index pairs plus how it was sampled.
#[derive(Debug, Clone)]
pub struct Matching {
    /// Pairs in linear position order (`i < j`), even when generated by
    /// mod-n arithmetic.
    pub pairs: Vec<(usize, usize)>,
    pub meta: MatchingMeta,
}

#[derive(Debug, Clone)]
pub enum MatchingMeta {
    Structured { k: u32, d: usize, r: u8 },
    Thinned { proposed: Vec<(usize, usize)>, retained: Vec<bool> },
    DimCut { bit: u32 },
    Explicit,
}

impl Matching {
    pub fn explicit(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs, meta: MatchingMeta::Explicit }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks ranges and vertex-disjointness against array length `n`.
    pub fn validate(&self, n: usize) -> Result<(), ParallelError> {
        let mut seen = vec![false; n];
        for &(i, j) in &self.pairs {
            if i >= n || j >= n {
                return Err(ParallelError::PairOutOfRange { i, j, n });
            }
            if i == j {
                return Err(ParallelError::DegeneratePair(i));
            }
            for v in [i, j] {
                if seen[v] {
                    return Err(ParallelError::Overlap(v));
                }
                seen[v] = true;
            }
        }
        Ok(())
    }
}

/// Which matching distribution a parallel run draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingKind {
    StructuredPowerOfTwo,
    ThinnedIid { p: usize },
    HypercubeDimCut,
}

#[derive(Debug, Clone, Copy)]
pub struct MatchingSamplerSpec {
    kind: MatchingKind,
    n: usize,
}

impl MatchingSamplerSpec {
    pub fn new(kind: MatchingKind, n: usize) -> Result<Self, ParallelError> {
        match kind {
            MatchingKind::StructuredPowerOfTwo => {
                if !n.is_power_of_two() {
                    return Err(ParallelError::NotPowerOfTwo { what: "structured matching", n });
                }
                if n < 4 {
                    return Err(ParallelError::TooSmall { what: "structured matching", n, min: 4 });
                }
            }
            MatchingKind::HypercubeDimCut => {
                if !n.is_power_of_two() {
                    return Err(ParallelError::NotPowerOfTwo { what: "dimension cut", n });
                }
                if n < 2 {
                    return Err(ParallelError::TooSmall { what: "dimension cut", n, min: 2 });
                }
            }
            MatchingKind::ThinnedIid { p } => {
                if p == 0 || p > n / 4 {
                    return Err(ParallelError::POutOfRange { p, n, max: n / 4 });
                }
            }
        }
        Ok(Self { kind, n })
    }

    pub fn kind(&self) -> MatchingKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> String {
        match self.kind {
            MatchingKind::StructuredPowerOfTwo => "structured".into(),
            MatchingKind::ThinnedIid { p } => format!("thinned(p={p})"),
            MatchingKind::HypercubeDimCut => "dimcut".into(),
        }
    }
}

/// Draws `p` iid pairs from the harmonic edge sampler and keeps exactly
/// those sharing no endpoint with any other draw. Two identical draws
/// intersect each other, so duplicates are dropped as well; `|M| <= p`.
pub fn sample_thinned_matching<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    sampler: &EdgeSampler,
    rng: &mut R,
) -> Result<Matching, ParallelError> {
    if p == 0 || p > n / 4 {
        return Err(ParallelError::POutOfRange { p, n, max: n / 4 });
    }
    if sampler.n() != n {
        return Err(ParallelError::LengthMismatch { sampler_n: sampler.n(), array_n: n });
    }
    if !matches!(sampler.spec().family(), WeightFamily::Harmonic { .. }) {
        return Err(ParallelError::NotHarmonic);
    }

    let mut proposed = Vec::with_capacity(p);
    let mut hits = vec![0_u32; n];
    for _ in 0..p {
        let (i, j) = sampler.sample_pair(rng);
        hits[i] += 1;
        hits[j] += 1;
        proposed.push((i, j));
    }
    let retained: Vec<bool> = proposed
        .iter()
        .map(|&(i, j)| hits[i] == 1 && hits[j] == 1)
        .collect();
    let pairs: Vec<(usize, usize)> = proposed
        .iter()
        .zip(&retained)
        .filter_map(|(&pair, &keep)| keep.then_some(pair))
        .collect();
    Ok(Matching { pairs, meta: MatchingMeta::Thinned { proposed, retained } })
}

/// The dimension-`bit` cut of the Gray hypercube: pairs every position with
/// the one whose Gray code differs in that bit. Always `n/2` pairs.
pub fn dimcut_matching(n: usize, bit: u32) -> Result<Matching, ParallelError> {
    if !n.is_power_of_two() {
        return Err(ParallelError::NotPowerOfTwo { what: "dimension cut", n });
    }
    if n < 2 {
        return Err(ParallelError::TooSmall { what: "dimension cut", n, min: 2 });
    }
    let bits = n.trailing_zeros();
    if bit >= bits {
        return Err(ParallelError::BadLevel { k: bit, levels: bits - 1 });
    }
    let mut pairs = Vec::with_capacity(n / 2);
    for v in 0..n as u64 {
        let code = gray_code(v);
        if code & (1 << bit) == 0 {
            let u = gray_rank(code ^ (1 << bit));
            pairs.push(((v.min(u)) as usize, (v.max(u)) as usize));
        }
    }
    debug_assert_eq!(pairs.len(), n / 2);
    Ok(Matching { pairs, meta: MatchingMeta::DimCut { bit } })
}

/// Draws a uniform dimension and returns its cut.
pub fn sample_dimcut_matching<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<Matching, ParallelError> {
    if !n.is_power_of_two() || n < 2 {
        return Err(ParallelError::NotPowerOfTwo { what: "dimension cut", n });
    }
    let bit = rng.gen_range(0..n.trailing_zeros());
    dimcut_matching(n, bit)
}

/// Compare-exchanges every pair of the matching. Disjointness is validated
/// defensively even though the samplers never produce overlaps. Returns the
/// number of swaps this round.
pub fn apply_matching(state: &mut SortState, m: &Matching) -> Result<u64, ParallelError> {
    m.validate(state.n())?;
    let mut swaps = 0;
    for &(i, j) in &m.pairs {
        if state.compare_exchange(i, j) {
            swaps += 1;
        }
    }
    state.bump_round();
    Ok(swaps)
}

/// Outcome of a synchronous parallel run.
#[derive(Debug)]
pub struct ParallelRun {
    pub state: SortState,
    pub rounds: u64,
    /// Comparisons actually performed (sum of matching sizes).
    pub comparisons: u64,
    /// Proposal attempts: for the thinned sampler every proposal counts,
    /// discarded or not; elsewhere equals `comparisons`.
    pub attempts: u64,
    pub sorted: bool,
    pub budget_exhausted: bool,
}

/// Samples and applies matchings until sorted or `max_rounds` is hit.
pub fn run_parallel<R: Rng + ?Sized>(
    initial: &[u64],
    spec: &MatchingSamplerSpec,
    rng: &mut R,
    max_rounds: u64,
) -> Result<ParallelRun, ParallelError> {
    if initial.is_empty() {
        return Err(ParallelError::EmptyInput);
    }
    if max_rounds == 0 {
        return Err(ParallelError::ZeroBudget);
    }
    if initial.len() != spec.n() {
        return Err(ParallelError::LengthMismatch { sampler_n: spec.n(), array_n: initial.len() });
    }

    let n = spec.n();
    let harmonic = match spec.kind() {
        MatchingKind::ThinnedIid { .. } => Some(
            EdgeSampler::build(
                crate::graph::PairWeightSpec::harmonic(n, 1.0)
                    .expect("validated harmonic spec"),
            )
            .expect("harmonic sampler build"),
        ),
        _ => None,
    };

    let mut state = SortState::new(initial.to_vec());
    let mut attempts = 0_u64;
    while !state.is_sorted() && state.rounds() < max_rounds {
        let matching = match spec.kind() {
            MatchingKind::StructuredPowerOfTwo => sample_structured_matching(n, rng)?,
            MatchingKind::ThinnedIid { p } => {
                attempts += p as u64;
                sample_thinned_matching(n, p, harmonic.as_ref().unwrap(), rng)?
            }
            MatchingKind::HypercubeDimCut => sample_dimcut_matching(n, rng)?,
        };
        if !matches!(spec.kind(), MatchingKind::ThinnedIid { .. }) {
            attempts += matching.len() as u64;
        }
        apply_matching(&mut state, &matching)?;
    }

    let sorted = state.is_sorted();
    Ok(ParallelRun {
        rounds: state.rounds(),
        comparisons: state.steps(),
        attempts,
        sorted,
        budget_exhausted: !sorted,
        state,
    })
}
