//! The structured power-of-two matching family.
//!
//! A matching is indexed by `(K, D, R)`: a scale `K` in `1..=lg n`, an edge
//! length `D` in the dyadic slice `(n/2^(K+1), n/2^K]`, and a rotation `R`
//! in `0..4`. The left endpoints form runs of `n/2^(K+1)` consecutive
//! positions repeating with period `n/2^(K-1)`, shifted by `R` quarter
//! periods; every index is taken mod `n`. Each matching has exactly `n/4`
//! pairwise-disjoint edges, and for a fixed `(K, D)` the four rotations
//! tile all `n` length-`D` edges exactly once.
//!
//! At the top scale `K = lg n` the run length `n/2^(K+1)` degenerates below
//! one; there the family places single edges with period four, which is the
//! unique choice that keeps `|M| = n/4`, keeps the four rotations a tiling,
//! and keeps adjacent pairs reachable (`D = 1` lives only at this scale).

use super::{Matching, MatchingMeta, ParallelError};
use rand::Rng;

fn require_structured_n(n: usize) -> Result<u32, ParallelError> {
    if !n.is_power_of_two() {
        return Err(ParallelError::NotPowerOfTwo { what: "structured matching", n });
    }
    if n < 4 {
        return Err(ParallelError::TooSmall { what: "structured matching", n, min: 4 });
    }
    Ok(n.trailing_zeros())
}

/// The fundamental block `E_{d,k}`: pairs `{i, (i + d) mod n}` for
/// `i = 0 .. n/2^(k+1) - 1`.
pub fn fundamental_block(
    n: usize,
    d: usize,
    k: u32,
) -> Result<Vec<(usize, usize)>, ParallelError> {
    let levels = require_structured_n(n)?;
    if k < 1 || k > levels {
        return Err(ParallelError::BadLevel { k, levels });
    }
    if d == 0 || d >= n {
        return Err(ParallelError::BadDistance { d, n });
    }
    let count = n >> (k + 1);
    Ok((0..count).map(|i| ordered_mod_pair(i, d, n)).collect())
}

fn ordered_mod_pair(i: usize, d: usize, n: usize) -> (usize, usize) {
    let j = (i + d) % n;
    // mod-n arithmetic only generates which pairs exist; the sorter always
    // orders by position index
    (i.min(j), i.max(j))
}

/// Number of admissible edge lengths at scale `k`: the integers in
/// `(n/2^(k+1), n/2^k]`.
pub(crate) fn slice_size(n: usize, k: u32) -> usize {
    (n >> k) - (n >> (k + 1))
}

/// Deterministic matching for outcome `(k, d, r)`.
pub fn structured_matching(
    n: usize,
    k: u32,
    d: usize,
    r: u8,
) -> Result<Matching, ParallelError> {
    let levels = require_structured_n(n)?;
    if k < 1 || k > levels {
        return Err(ParallelError::BadLevel { k, levels });
    }
    let lo = n >> (k + 1);
    let hi = n >> k;
    if d <= lo || d > hi {
        return Err(ParallelError::BadDistance { d, n });
    }
    if r > 3 {
        return Err(ParallelError::BadRotation(r));
    }

    let run = (n >> (k + 1)).max(1);
    let period = 4 * run;
    let mut pairs = Vec::with_capacity(n / 4);
    let mut base = 0;
    while base < n {
        let start = base + (r as usize) * run;
        for t in 0..run {
            pairs.push(ordered_mod_pair((start + t) % n, d, n));
        }
        base += period;
    }
    debug_assert_eq!(pairs.len(), n / 4);
    Ok(Matching { pairs, meta: MatchingMeta::Structured { k, d, r } })
}

/// Draws `K ~ Unif{1..lg n}`, `D ~ Unif` over its dyadic slice, and
/// `R ~ Unif{0..3}`, and returns the corresponding matching of exactly
/// `n/4` disjoint pairs.
pub fn sample_structured_matching<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<Matching, ParallelError> {
    let levels = require_structured_n(n)?;
    let k = rng.gen_range(1..=levels);
    let lo = n >> (k + 1);
    let hi = n >> k;
    let d = rng.gen_range(lo + 1..=hi);
    let r = rng.gen_range(0..4_u8);
    structured_matching(n, k, d, r)
}

/// All `(k, d, r)` outcomes, each with its probability under the sampler.
pub fn structured_outcomes(n: usize) -> Result<Vec<(u32, usize, u8, f64)>, ParallelError> {
    let levels = require_structured_n(n)?;
    let mut out = Vec::new();
    for k in 1..=levels {
        let slice = slice_size(n, k);
        let p = 1.0 / (levels as f64 * slice as f64 * 4.0);
        for d in (n >> (k + 1)) + 1..=(n >> k) {
            for r in 0..4_u8 {
                out.push((k, d, r, p));
            }
        }
    }
    Ok(out)
}

/// Exact pair marginals `q_{i,j} = Pr[{i,j} in M]` for the whole graph, as
/// integer numerators over the common denominator `4 * lg n * n`.
///
/// Each `(k, d, r)` outcome has probability `1 / (4 lg n * s_k)` with
/// `s_k | n`, so its contribution scaled by `4 lg n * n` is the integer
/// `n / s_k`. The returned vector is indexed by `i * n + j` with `i < j`.
pub fn structured_marginal_numerators(n: usize) -> Result<(Vec<u64>, u64), ParallelError> {
    let levels = require_structured_n(n)?;
    let denominator = 4 * levels as u64 * n as u64;
    let mut numerators = vec![0_u64; n * n];
    for k in 1..=levels {
        let contribution = (n / slice_size(n, k)) as u64;
        for d in (n >> (k + 1)) + 1..=(n >> k) {
            for r in 0..4_u8 {
                let m = structured_matching(n, k, d, r)?;
                for (i, j) in m.pairs {
                    numerators[i * n + j] += contribution;
                }
            }
        }
    }
    Ok((numerators, denominator))
}

/// Exact `Pr[{i, j} in M]` by exhaustive enumeration of all `(K, D, R)`
/// outcomes. O(n^2) per call; for many pairs use
/// [`structured_marginal_numerators`] once.
pub fn exact_structured_marginal(n: usize, i: usize, j: usize) -> Result<f64, ParallelError> {
    require_structured_n(n)?;
    if i >= n || j >= n {
        return Err(ParallelError::PairOutOfRange { i, j, n });
    }
    if i == j {
        return Err(ParallelError::DegeneratePair(i));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let (numerators, denominator) = structured_marginal_numerators(n)?;
    Ok(numerators[lo * n + hi] as f64 / denominator as f64)
}

/// Circular distance `min(|j - i|, n - |j - i|)`.
pub fn circular_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}
