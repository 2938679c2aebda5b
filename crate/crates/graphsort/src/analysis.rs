//! Correctness oracles and instrumentation: the 0-1 reduction, dyadic
//! interval bookkeeping for balanced 0-1 states, inversion counting, the
//! misplaced-count recurrence, and coupon-collector formulas.
//!
//! Everything here is a pure function over immutable inputs, safe to call
//! from any number of concurrent trial runners. Interval membership uses
//! exact integer arithmetic on the rescaled grid `{0, 1/n, ..., 1 - 1/n}`:
//! a grid position `p` is represented as `2p` so every dyadic boundary
//! (halves of `1/2^k`) stays an integer.

use crate::sequential::TraceEvent;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("input must be nonempty")]
    Empty,
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("input must be 0-1 valued, found {0}")]
    NotZeroOne(u64),
    #[error("input must be balanced: {ones} ones in length {n}")]
    NotBalanced { ones: usize, n: usize },
    #[error("k = {k} out of range 0..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("interval level {k} out of range 1..={levels}")]
    BadLevel { k: u32, levels: u32 },
    #[error("trace pair ({i}, {j}) invalid for length {n}")]
    BadTracePair { i: usize, j: usize, n: usize },
}

fn require_zero_one(x: &[u64]) -> Result<(), AnalysisError> {
    match x.iter().find(|&&v| v > 1) {
        Some(&v) => Err(AnalysisError::NotZeroOne(v)),
        None => Ok(()),
    }
}

fn require_balanced_grid(x: &[u64]) -> Result<(), AnalysisError> {
    if x.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if !x.len().is_power_of_two() {
        return Err(AnalysisError::NotPowerOfTwo(x.len()));
    }
    require_zero_one(x)?;
    let ones = x.iter().filter(|&&v| v == 1).count();
    if ones * 2 != x.len() {
        return Err(AnalysisError::NotBalanced { ones, n: x.len() });
    }
    Ok(())
}

/// Replaces the `k` largest entries of `x` by 1 and the rest by 0.
///
/// Ties break deterministically: among equal values the higher index turns
/// into a 1 first.
pub fn threshold_projection(x: &[u64], k: usize) -> Result<Vec<u64>, AnalysisError> {
    if k > x.len() {
        return Err(AnalysisError::KOutOfRange { k, n: x.len() });
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_unstable_by_key(|&i| std::cmp::Reverse((x[i], i)));
    let mut out = vec![0_u64; x.len()];
    for &i in order.iter().take(k) {
        out[i] = 1;
    }
    Ok(out)
}

/// Applies a fixed comparator sequence in place.
pub fn replay_comparators(x: &mut [u64], pairs: &[(usize, usize)]) -> Result<(), AnalysisError> {
    for &(i, j) in pairs {
        if i >= j || j >= x.len() {
            return Err(AnalysisError::BadTracePair { i, j, n: x.len() });
        }
        if x[i] > x[j] {
            x.swap(i, j);
        }
    }
    Ok(())
}

/// Agreement report for the 0-1 principle on one comparator sequence.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOneReport {
    pub base_sorted: bool,
    pub projections_sorted: bool,
}

impl ZeroOneReport {
    /// The principle asserts these always agree.
    pub fn agree(&self) -> bool {
        self.base_sorted == self.projections_sorted
    }
}

/// Replays a fixed comparator sequence on `x` and on every threshold
/// projection of `x`, reporting whether "`x` sorted" matches "all
/// projections sorted".
pub fn zero_one_oracle(
    trace: &[(usize, usize)],
    x: &[u64],
) -> Result<ZeroOneReport, AnalysisError> {
    let mut base = x.to_vec();
    replay_comparators(&mut base, trace)?;
    let base_sorted = crate::sequential::is_sorted(&base);

    let mut projections_sorted = true;
    for k in 0..=x.len() {
        let mut proj = threshold_projection(x, k)?;
        replay_comparators(&mut proj, trace)?;
        if !crate::sequential::is_sorted(&proj) {
            projections_sorted = false;
        }
    }
    Ok(ZeroOneReport { base_sorted, projections_sorted })
}

/// Pads a 0-1 sequence to a balanced power-of-two length: `n0` zeros in
/// front, `n1` ones behind, with `n0 = 2^ceil(lg n) - n + k` and
/// `n1 = 2^ceil(lg n) - k` for `k` the number of ones. The result has length
/// `2^(ceil(lg n) + 1)` and exactly half its entries are ones.
///
/// The trailing count is forced: with `n1 = 2^ceil(lg n) + k` (the sign
/// sometimes quoted) the output would hold `2k` ones too many and could not
/// be balanced at that length.
pub fn lift(x: &[u64]) -> Result<Vec<u64>, AnalysisError> {
    if x.is_empty() {
        return Err(AnalysisError::Empty);
    }
    require_zero_one(x)?;
    let n = x.len();
    let k = x.iter().filter(|&&v| v == 1).count();
    let cap = n.next_power_of_two();
    let n0 = cap - n + k;
    let n1 = cap - k;
    let mut out = Vec::with_capacity(2 * cap);
    out.resize(n0, 0);
    out.extend_from_slice(x);
    out.resize(n0 + n + n1, 1);
    debug_assert_eq!(out.len(), 2 * cap);
    Ok(out)
}

/// Exact inversion count: pairs `i < j` with `x[i] > x[j]`. Merge-count,
/// O(n log n).
pub fn inversions(x: &[u64]) -> u64 {
    let mut work = x.to_vec();
    let mut scratch = vec![0_u64; x.len()];
    merge_count(&mut work, &mut scratch)
}

fn merge_count(x: &mut [u64], scratch: &mut [u64]) -> u64 {
    let n = x.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = x.split_at_mut(mid);
    let mut count = merge_count(left, &mut scratch[..mid]) + merge_count(right, &mut scratch[mid..]);
    let (mut i, mut j, mut out) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            // right[j] is inverted with every remaining left element
            count += (left.len() - i) as u64;
            scratch[out] = right[j];
            j += 1;
        } else {
            scratch[out] = left[i];
            i += 1;
        }
        out += 1;
    }
    while i < left.len() {
        scratch[out] = left[i];
        i += 1;
        out += 1;
    }
    while j < right.len() {
        scratch[out] = right[j];
        j += 1;
        out += 1;
    }
    x.copy_from_slice(&scratch[..n]);
    count
}

/// Dyadic level intervals around the midpoint of the rescaled grid.
///
/// Level `k` (1-based, up to `lg n`) carries
/// `I_k^0 = [1/2 - 2^-k, 1/2 - 2^-(k+1))` on the zero side and the mirrored
/// `I_k^1 = [1/2 + 2^-(k+1), 1/2 + 2^-k)` on the one side, plus the tail
/// (`< k`) and center (`>= k`) unions. All bounds are exact.
#[derive(Debug, Clone, Copy)]
pub struct IntervalFamily {
    n: usize,
    levels: u32,
}

impl IntervalFamily {
    pub fn new(n: usize) -> Result<Self, AnalysisError> {
        if n < 2 {
            return Err(AnalysisError::Empty);
        }
        if !n.is_power_of_two() {
            return Err(AnalysisError::NotPowerOfTwo(n));
        }
        Ok(Self { n, levels: n.trailing_zeros() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of levels, `lg n`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// `floor(2n / 2^k)`, the width of `[x, x + 2^-k)` in half-units. Beyond
    /// `k = lg n + 1` the true width is a positive fraction below one
    /// half-unit, which floors to zero.
    fn width(&self, k: u32) -> usize {
        let k = k.min(self.levels + 1);
        (2 * self.n) >> k
    }

    fn check_level(&self, k: u32) -> Result<(), AnalysisError> {
        if k < 1 || k > self.levels {
            return Err(AnalysisError::BadLevel { k, levels: self.levels });
        }
        Ok(())
    }

    /// Grid positions of `I_k^0`.
    pub fn zero_band(&self, k: u32) -> Result<std::ops::Range<usize>, AnalysisError> {
        self.check_level(k)?;
        let lo2 = self.n - self.width(k);
        let hi2 = self.n - self.width(k + 1);
        Ok(half_units_to_grid(lo2, hi2))
    }

    /// Grid positions of `I_k^1`.
    pub fn one_band(&self, k: u32) -> Result<std::ops::Range<usize>, AnalysisError> {
        self.check_level(k)?;
        let lo2 = self.n + self.width(k + 1);
        let hi2 = self.n + self.width(k);
        Ok(half_units_to_grid(lo2, hi2))
    }

    /// Grid positions of `I_{<k}^0 = [0, 1/2 - 2^-k)`.
    pub fn zero_tail(&self, k: u32) -> std::ops::Range<usize> {
        half_units_to_grid(0, self.n.saturating_sub(self.width(k)))
    }

    /// Grid positions of `I_{<k}^1 = [1/2 + 2^-k, 1)`.
    pub fn one_tail(&self, k: u32) -> std::ops::Range<usize> {
        half_units_to_grid(self.n + self.width(k), 2 * self.n)
    }

    /// Grid positions of `I_{>=r}^0 = [1/2 - 2^-r, 1/2)`; `r = 0` covers the
    /// whole front half.
    pub fn zero_center(&self, r: u32) -> std::ops::Range<usize> {
        let lo2 = self.n.saturating_sub(self.width(r));
        half_units_to_grid(lo2, self.n)
    }

    /// Grid positions of `I_{>=r}^1 = [1/2, 1/2 + 2^-r)`. The left endpoint
    /// is closed, so the center position `n/2` always belongs to it.
    pub fn one_center(&self, r: u32) -> std::ops::Range<usize> {
        let hi2 = self.n + self.width(r).max(1);
        half_units_to_grid(self.n, hi2)
    }
}

/// Converts a half-open half-unit interval `[lo2, hi2)` into the grid
/// positions `p` with `lo2 <= 2p < hi2`.
fn half_units_to_grid(lo2: usize, hi2: usize) -> std::ops::Range<usize> {
    let lo = lo2.div_ceil(2);
    let hi = hi2.div_ceil(2);
    lo..hi.max(lo)
}

/// Per-level misplaced counts of a balanced 0-1 state: `M_k^0` zeros sitting
/// in `I_k^1`, `M_k^1` ones sitting in `I_k^0`, their cumulative tails, and
/// the global misplaced count.
#[derive(Debug, Clone)]
pub struct MisplacedCounts {
    per_level_zero: Vec<u64>,
    per_level_one: Vec<u64>,
    global: u64,
}

impl MisplacedCounts {
    pub fn levels(&self) -> u32 {
        self.per_level_zero.len() as u32
    }

    /// `M_k^0`: zeros in `I_k^1`.
    pub fn zeros_at_level(&self, k: u32) -> u64 {
        self.per_level_zero[(k - 1) as usize]
    }

    /// `M_k^1`: ones in `I_k^0`.
    pub fn ones_at_level(&self, k: u32) -> u64 {
        self.per_level_one[(k - 1) as usize]
    }

    /// `M_k = M_k^0 + M_k^1`.
    pub fn total_at_level(&self, k: u32) -> u64 {
        self.zeros_at_level(k) + self.ones_at_level(k)
    }

    /// `M_{<k}^0`: zeros in `I_{<k}^1`, i.e. the sum over levels below `k`.
    /// Valid for `k` up to `levels + 1`.
    pub fn zeros_below_level(&self, k: u32) -> u64 {
        (1..k).map(|l| self.zeros_at_level(l)).sum()
    }

    pub fn ones_below_level(&self, k: u32) -> u64 {
        (1..k).map(|l| self.ones_at_level(l)).sum()
    }

    pub fn total_below_level(&self, k: u32) -> u64 {
        self.zeros_below_level(k) + self.ones_below_level(k)
    }

    /// Global `M`: zeros in the back half.
    pub fn global(&self) -> u64 {
        self.global
    }
}

/// Exact misplaced counts; requires a balanced 0-1 input of power-of-two
/// length.
pub fn misplaced_counts(x: &[u64]) -> Result<MisplacedCounts, AnalysisError> {
    require_balanced_grid(x)?;
    let family = IntervalFamily::new(x.len())?;
    let levels = family.levels();
    let mut per_level_zero = Vec::with_capacity(levels as usize);
    let mut per_level_one = Vec::with_capacity(levels as usize);
    for k in 1..=levels {
        let zeros = family.one_band(k)?.filter(|&p| x[p] == 0).count() as u64;
        let ones = family.zero_band(k)?.filter(|&p| x[p] == 1).count() as u64;
        per_level_zero.push(zeros);
        per_level_one.push(ones);
    }
    let global = (x.len() / 2..x.len()).filter(|&p| x[p] == 0).count() as u64;
    Ok(MisplacedCounts { per_level_zero, per_level_one, global })
}

/// Whether the state lies in the absorbing set `Omega_r`: every zero in
/// `[0, 1/2) ∪ I_{>=r}^1` and every one in `[1/2, 1) ∪ I_{>=r}^0`.
pub fn in_omega(x: &[u64], r: u32) -> Result<bool, AnalysisError> {
    require_balanced_grid(x)?;
    let family = IntervalFamily::new(x.len())?;
    let half = x.len() / 2;
    let zero_ok = family.one_center(r);
    let one_ok = family.zero_center(r);
    for (p, &v) in x.iter().enumerate() {
        if v == 0 && p >= half && !zero_ok.contains(&p) {
            return Ok(false);
        }
        if v == 1 && p < half && !one_ok.contains(&p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Iterates `m_k^r = min(n, decay * m_k^(r-1) + 2 * sum_(l<k) m_l^(r-1))`
/// from `m_k^0 = n` and reports whether `m_k^r <= 2^-(r-3k) * n` holds at
/// every `(r, k)` with `r <= 10 * levels`. The cap reflects that the counts
/// being modelled can never exceed `n`.
pub fn recurrence_bound_check_with_decay(levels: u32, decay: f64) -> bool {
    let levels = levels as usize;
    // normalized to n = 1
    let mut m = vec![1.0_f64; levels + 1];
    for r in 1..=(10 * levels) {
        let mut next = vec![0.0_f64; levels + 1];
        let mut below = 0.0_f64;
        for k in 1..=levels {
            next[k] = (decay * m[k] + 2.0 * below).min(1.0);
            below += m[k];
        }
        m = next;
        for (k, &mk) in m.iter().enumerate().skip(1) {
            let bound = 2.0_f64.powi(3 * k as i32 - r as i32);
            if mk > bound {
                return false;
            }
        }
    }
    true
}

/// The misplaced-count recurrence with decay coefficient 1/3.
///
/// Heads-up: with coefficient 1/3 the `2^-(r-3k) n` bound genuinely fails
/// from level 13 upward (first violation at r = 41, k = 13) — the geometric
/// step needs decay <= 3/14 for the induction to close, and e^-2 (the decay
/// the round length actually provides) satisfies that while 1/3 does not.
/// This function reports what the arithmetic says.
pub fn recurrence_bound_check(levels: u32) -> bool {
    recurrence_bound_check_with_decay(levels, 1.0 / 3.0)
}

/// Expected time to collect `m` coupons at rate 1 each: the harmonic number
/// `H_m`.
pub fn coupon_expectation(m: u64) -> f64 {
    let mut sum = 0.0;
    for i in (1..=m).rev() {
        sum += 1.0 / i as f64;
    }
    sum
}

/// Union bound `m * e^-t` on the probability that some coupon is still
/// missing at time `t`.
pub fn coupon_tail(m: u64, t: f64) -> f64 {
    m as f64 * (-t).exp()
}

/// Result of scanning a recorded trace against an invariant.
#[derive(Debug, Clone)]
pub struct TraceCheck {
    pub steps_checked: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl TraceCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, detail: impl FnOnce() -> String) {
        self.violations += 1;
        if self.first_violation.is_none() {
            self.first_violation = Some(detail());
        }
    }
}

fn apply_event(x: &mut [u64], event: &TraceEvent) -> Result<bool, AnalysisError> {
    let (i, j) = event.pair;
    if i >= j || j >= x.len() {
        return Err(AnalysisError::BadTracePair { i, j, n: x.len() });
    }
    // A recorded non-swap can come from either an ordered pair or a dropped
    // faulty comparison, so only the positive direction is replayable.
    if event.swapped {
        x.swap(i, j);
    }
    Ok(true)
}

/// Swapped steps must strictly decrease the inversion count; skipped steps
/// must leave it unchanged.
pub fn check_inversion_monotone(
    initial: &[u64],
    trace: &[TraceEvent],
) -> Result<TraceCheck, AnalysisError> {
    let mut x = initial.to_vec();
    let mut check = TraceCheck { steps_checked: 0, violations: 0, first_violation: None };
    let mut inv = inversions(&x);
    for event in trace {
        apply_event(&mut x, event)?;
        let next = inversions(&x);
        check.steps_checked += 1;
        if event.swapped {
            if next >= inv {
                check.record(|| {
                    format!("step {}: swap left inversions {} -> {}", event.step, inv, next)
                });
            }
        } else if next != inv {
            check.record(|| {
                format!("step {}: no-op changed inversions {} -> {}", event.step, inv, next)
            });
        }
        inv = next;
    }
    Ok(check)
}

/// Once `Omega_r` holds along a balanced 0-1 trace it must keep holding, for
/// every r.
pub fn check_omega_absorbing(
    initial: &[u64],
    trace: &[TraceEvent],
) -> Result<TraceCheck, AnalysisError> {
    require_balanced_grid(initial)?;
    let levels = initial.len().trailing_zeros();
    let mut x = initial.to_vec();
    let mut check = TraceCheck { steps_checked: 0, violations: 0, first_violation: None };
    let r_values: Vec<u32> = (0..=levels + 1).collect();
    let mut entered: Vec<bool> = r_values
        .iter()
        .map(|&r| in_omega(&x, r).unwrap())
        .collect();
    for event in trace {
        apply_event(&mut x, event)?;
        check.steps_checked += 1;
        for (idx, &r) in r_values.iter().enumerate() {
            let now = in_omega(&x, r)?;
            if entered[idx] && !now {
                check.record(|| format!("step {}: left Omega_{}", event.step, r));
            }
            entered[idx] |= now;
        }
    }
    Ok(check)
}

/// The cumulative misplaced counts `M_{<k}^0`, `M_{<k}^1` and the global
/// count must be nonincreasing along a balanced 0-1 trace.
pub fn check_misplaced_monotone(
    initial: &[u64],
    trace: &[TraceEvent],
) -> Result<TraceCheck, AnalysisError> {
    require_balanced_grid(initial)?;
    let levels = initial.len().trailing_zeros();
    let mut x = initial.to_vec();
    let mut check = TraceCheck { steps_checked: 0, violations: 0, first_violation: None };
    let mut prev = misplaced_counts(&x)?;
    for event in trace {
        apply_event(&mut x, event)?;
        check.steps_checked += 1;
        let now = misplaced_counts(&x)?;
        for k in 1..=levels + 1 {
            if now.zeros_below_level(k) > prev.zeros_below_level(k)
                || now.ones_below_level(k) > prev.ones_below_level(k)
            {
                check.record(|| format!("step {}: M_<{} increased", event.step, k));
            }
        }
        if now.global() > prev.global() {
            check.record(|| format!("step {}: global M increased", event.step));
        }
        prev = now;
    }
    Ok(check)
}

/// On 0-1 inputs, the number of ones strictly left of any threshold must
/// never increase along a trace.
pub fn check_prefix_ones_monotone(
    initial: &[u64],
    trace: &[TraceEvent],
) -> Result<TraceCheck, AnalysisError> {
    require_zero_one(initial)?;
    let n = initial.len();
    let mut x = initial.to_vec();
    let mut check = TraceCheck { steps_checked: 0, violations: 0, first_violation: None };
    let prefix = |x: &[u64]| {
        let mut acc = Vec::with_capacity(n + 1);
        let mut c = 0_u64;
        acc.push(0);
        for &v in x {
            c += v;
            acc.push(c);
        }
        acc
    };
    let mut prev = prefix(&x);
    for event in trace {
        apply_event(&mut x, event)?;
        check.steps_checked += 1;
        let now = prefix(&x);
        for b in 0..=n {
            if now[b] > prev[b] {
                check.record(|| format!("step {}: ones before {} increased", event.step, b));
                break;
            }
        }
        prev = now;
    }
    Ok(check)
}
