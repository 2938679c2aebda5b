//! Batch oracle checks over the analysis module, with JSON-friendly
//! outcome records.

use super::HarnessError;
use crate::analysis;
use crate::graph::{EdgeSampler, PairWeightSpec};
use crate::seeding;
use crate::sequential::{run_sequential, FaultModel, TraceMode};
use rand::Rng;
use serde::Serialize;

/// One oracle's verdict over a batch of trials. Serializes to the report
/// schema `{check, n, trials, failures, firstCounterexample}`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleOutcome {
    pub check: String,
    pub n: usize,
    pub trials: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("outcome serializes")
    }

    fn note(&mut self, detail: impl FnOnce() -> String) {
        self.failures += 1;
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(detail());
        }
    }
}

fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u64> {
    let mut x: Vec<u64> = (0..n as u64).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        x.swap(i, j);
    }
    x
}

fn random_trace<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Vec<(usize, usize)> {
    (0..len)
        .map(|_| {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            (i, j)
        })
        .collect()
}

fn for_each_permutation(n: usize, mut visit: impl FnMut(&[u64])) {
    // Heap's algorithm
    let mut x: Vec<u64> = (1..=n as u64).collect();
    let mut c = vec![0_usize; n];
    visit(&x);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                x.swap(0, i);
            } else {
                x.swap(c[i], i);
            }
            visit(&x);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive 0-1 principle sweep: every permutation of each length up to
/// `max_n`, each replayed against `traces_per_input` random comparator
/// sequences of length 30.
pub fn oracle_zero_one_principle(max_n: usize, traces_per_input: u64, seed: u64) -> OracleOutcome {
    let mut outcome = OracleOutcome {
        check: "zero-one-principle".into(),
        n: max_n,
        trials: 0,
        failures: 0,
        first_counterexample: None,
    };
    let mut rng = seeding::stream(seed, 0x01, 0);
    for n in 2..=max_n {
        for_each_permutation(n, |perm| {
            for _ in 0..traces_per_input {
                let trace = random_trace(n, 30, &mut rng);
                outcome.trials += 1;
                let report = analysis::zero_one_oracle(&trace, perm).expect("valid trace");
                if !report.agree() {
                    let perm = perm.to_vec();
                    outcome.note(|| format!("n={n} perm={perm:?} trace={trace:?}"));
                }
            }
        });
    }
    outcome
}

fn families(n: usize) -> Vec<PairWeightSpec> {
    vec![
        PairWeightSpec::uniform(n).unwrap(),
        PairWeightSpec::adjacent(n).unwrap(),
        PairWeightSpec::harmonic(n, 4.0).unwrap(),
        PairWeightSpec::gray_hypercube(n).unwrap(),
    ]
}

fn traced_runs<R: Rng + ?Sized>(
    n: usize,
    zero_one: bool,
    min_steps: u64,
    rng: &mut R,
) -> Vec<(Vec<u64>, Vec<crate::sequential::TraceEvent>)> {
    let mut out = Vec::new();
    let mut steps = 0_u64;
    'outer: loop {
        for spec in families(n) {
            let sampler = EdgeSampler::build(spec).unwrap();
            let input = if zero_one {
                let mut x = vec![1_u64; n / 2];
                x.extend(std::iter::repeat_n(0, n / 2));
                for i in (1..n).rev() {
                    let j = rng.gen_range(0..=i);
                    x.swap(i, j);
                }
                x
            } else {
                random_permutation(n, rng)
            };
            let run = run_sequential(&input, &sampler, &FaultModel::none(), rng, 1 << 22, TraceMode::Full)
                .expect("run");
            steps += run.trace.len() as u64;
            out.push((input, run.trace));
            if steps >= min_steps {
                break 'outer;
            }
        }
    }
    out
}

/// Inversions strictly decrease on swaps and stay put otherwise, across
/// recorded runs of all four weight families.
pub fn oracle_inversion_monotone(n: usize, min_steps: u64, seed: u64) -> OracleOutcome {
    let mut outcome = OracleOutcome {
        check: "inversion-monotone".into(),
        n,
        trials: 0,
        failures: 0,
        first_counterexample: None,
    };
    let mut rng = seeding::stream(seed, 0x02, 0);
    for (input, trace) in traced_runs(n, false, min_steps, &mut rng) {
        let check = analysis::check_inversion_monotone(&input, &trace).expect("replay");
        outcome.trials += check.steps_checked;
        if !check.passed() {
            outcome.failures += check.violations;
            if outcome.first_counterexample.is_none() {
                outcome.first_counterexample = check.first_violation;
            }
        }
    }
    outcome
}

/// Omega_r membership is absorbing along balanced 0-1 traces.
pub fn oracle_omega_absorbing(n: usize, min_steps: u64, seed: u64) -> OracleOutcome {
    let mut outcome = OracleOutcome {
        check: "omega-absorbing".into(),
        n,
        trials: 0,
        failures: 0,
        first_counterexample: None,
    };
    let mut rng = seeding::stream(seed, 0x03, 0);
    for (input, trace) in traced_runs(n, true, min_steps, &mut rng) {
        let check = analysis::check_omega_absorbing(&input, &trace).expect("replay");
        outcome.trials += check.steps_checked;
        if !check.passed() {
            outcome.failures += check.violations;
            if outcome.first_counterexample.is_none() {
                outcome.first_counterexample = check.first_violation;
            }
        }
    }
    outcome
}

/// Cumulative misplaced counts are nonincreasing along balanced 0-1 traces.
pub fn oracle_misplaced_monotone(n: usize, min_steps: u64, seed: u64) -> OracleOutcome {
    let mut outcome = OracleOutcome {
        check: "misplaced-monotone".into(),
        n,
        trials: 0,
        failures: 0,
        first_counterexample: None,
    };
    let mut rng = seeding::stream(seed, 0x04, 0);
    for (input, trace) in traced_runs(n, true, min_steps, &mut rng) {
        let check = analysis::check_misplaced_monotone(&input, &trace).expect("replay");
        outcome.trials += check.steps_checked;
        if !check.passed() {
            outcome.failures += check.violations;
            if outcome.first_counterexample.is_none() {
                outcome.first_counterexample = check.first_violation;
            }
        }
    }
    outcome
}

/// Prefix one-counts never increase along 0-1 traces.
pub fn oracle_prefix_ones(n: usize, min_steps: u64, seed: u64) -> OracleOutcome {
    let mut outcome = OracleOutcome {
        check: "prefix-ones-monotone".into(),
        n,
        trials: 0,
        failures: 0,
        first_counterexample: None,
    };
    let mut rng = seeding::stream(seed, 0x05, 0);
    for (input, trace) in traced_runs(n, true, min_steps, &mut rng) {
        let check = analysis::check_prefix_ones_monotone(&input, &trace).expect("replay");
        outcome.trials += check.steps_checked;
        if !check.passed() {
            outcome.failures += check.violations;
            if outcome.first_counterexample.is_none() {
                outcome.first_counterexample = check.first_violation;
            }
        }
    }
    outcome
}

/// Lift correctness: balanced output of the right length embedding the
/// input, whose padding never moves under random comparator traffic over
/// the lifted range.
pub fn oracle_lift(trials: u64, seed: u64) -> OracleOutcome {
    let mut outcome = OracleOutcome {
        check: "lift".into(),
        n: 0,
        trials,
        failures: 0,
        first_counterexample: None,
    };
    let mut rng = seeding::stream(seed, 0x06, 0);
    for _ in 0..trials {
        let n = rng.gen_range(1..24);
        let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let k = x.iter().sum::<u64>() as usize;
        let lifted = analysis::lift(&x).expect("0-1 input");
        let big = lifted.len();
        let n0 = big / 2 - n + k;

        let ok_shape = big == 2 * n.next_power_of_two()
            && lifted.iter().filter(|&&v| v == 1).count() * 2 == big
            && lifted[n0..n0 + n] == x[..];
        if !ok_shape {
            let x = x.clone();
            outcome.note(|| format!("shape broken for x={x:?}"));
            continue;
        }

        let mut state = lifted.clone();
        let trace = random_trace(big, 120, &mut rng);
        analysis::replay_comparators(&mut state, &trace).expect("valid trace");
        let padding_fixed =
            state[..n0].iter().all(|&v| v == 0) && state[n0 + n..].iter().all(|&v| v == 1);
        if !padding_fixed {
            outcome.note(|| format!("padding moved for x={x:?}"));
        }
    }
    outcome
}

/// Runs the whole battery at its default sizes.
pub fn run_all_oracles(seed: u64) -> Result<Vec<OracleOutcome>, HarnessError> {
    Ok(vec![
        oracle_zero_one_principle(6, 100, seed),
        oracle_inversion_monotone(64, 10_000, seed),
        oracle_omega_absorbing(64, 10_000, seed),
        oracle_misplaced_monotone(64, 10_000, seed),
        oracle_prefix_ones(64, 10_000, seed),
        oracle_lift(200, seed),
    ])
}
