//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`) and asserting its gate.
//!
//! Three checks encode literature constants that exact computation shows to
//! be unattainable; they are kept as stated rather than loosened, so they
//! fail with diagnostics (see `criterion_05_thinned_round_halving`,
//! `criterion_06_thinned_retention_bound`, `criterion_11_recurrence_bound`).

use graphsort::analysis;
use graphsort::harness::{
    fit_scaling, generate_input, oracle_inversion_monotone, oracle_misplaced_monotone,
    oracle_omega_absorbing, oracle_zero_one_principle, run_async_trials, run_experiment,
    verify_qalpha_exact, verify_qalpha_thinned, AsyncTrialConfig, ExperimentConfig, FitMetric,
    InputKind, RunStats, SorterSpec,
};
use graphsort::parallel::{
    run_async, sample_thinned_matching, structured_matching, structured_outcomes, AsyncProtocol,
};
use graphsort::sequential::is_sorted;
use graphsort::{seeding, EdgeSampler, FaultModel, PairWeightSpec};

fn verdict(id: &str, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {id} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "ACCEPTANCE {id} {name} FAILED: {detail}");
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0_u64;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

fn mean_comparisons(rows: &[RunStats]) -> f64 {
    assert!(rows.iter().all(|r| r.sorted), "a run exhausted its budget");
    mean(rows.iter().map(|r| r.comparisons as f64))
}

fn experiment(sorter: SorterSpec, input: &str, n_list: Vec<usize>, trials: u64, seed: u64) -> Vec<RunStats> {
    run_experiment(&ExperimentConfig {
        sorter,
        input_kind: input.into(),
        n_list,
        trials,
        master_seed: seed,
        fault_prob: None,
        budget_multiplier: 1.0,
        output_path: None,
    })
    .expect("experiment runs")
}

fn harmonic_sum(m: u64) -> f64 {
    (1..=m).rev().map(|k| 1.0 / k as f64).sum()
}

/// Criterion 1: exact harmonic total weight inside its two-sided log bound
/// for every power of two up to 2^14.
#[test]
fn criterion_01_total_weight_bounds() {
    let mut worst_slack = f64::INFINITY;
    let mut pass = true;
    for exp in 1..=14_u32 {
        let n = 1_usize << exp;
        let w = PairWeightSpec::harmonic(n, 4.0).unwrap().total_weight();
        let nf = n as f64;
        let lo = 4.0 * (nf * nf.ln() - nf);
        let hi = 4.0 * (nf * nf.ln() + nf);
        pass &= lo <= w && w <= hi;
        worst_slack = worst_slack.min((w - lo).min(hi - w) / nf);
    }
    verdict(
        "01",
        "harmonic-total-weight-bounds",
        pass,
        &format!("n = 2..2^14, worst slack {worst_slack:.3} * n"),
    );
}

/// Criterion 2: uniform sorter on the alternating input at n = 64 —
/// mean comparisons within 5% of the coupon-collector value C(64,2) * H_32.
#[test]
fn criterion_02_coupon_anchor_uniform() {
    let rows = experiment(SorterSpec::Uniform, "alternating", vec![64], 2000, 0xC0);
    let measured = mean_comparisons(&rows);
    let expected = 2016.0 * harmonic_sum(32);
    let rel = (measured - expected).abs() / expected;
    verdict(
        "02",
        "coupon-anchor-uniform",
        rel <= 0.05,
        &format!("mean {measured:.1} vs analytic {expected:.1}, rel err {:.2}%", rel * 100.0),
    );
}

/// Criterion 3: harmonic sorter on the alternating input at n = 64 — mean
/// comparisons within 10% of (w(E)/4) * H_32 (each effective pair fires at
/// weight 4).
#[test]
fn criterion_03_coupon_anchor_harmonic() {
    let rows = experiment(SorterSpec::Harmonic { scale: 4.0 }, "alternating", vec![64], 2000, 0xC1);
    let measured = mean_comparisons(&rows);
    let total_weight = PairWeightSpec::harmonic(64, 4.0).unwrap().total_weight();
    let expected = total_weight / 4.0 * harmonic_sum(32);
    let rel = (measured - expected).abs() / expected;
    verdict(
        "03",
        "coupon-anchor-harmonic",
        rel <= 0.10,
        &format!("mean {measured:.1} vs analytic {expected:.1}, rel err {:.2}%", rel * 100.0),
    );
}

fn flatness(rows: &[RunStats], metric: impl Fn(&RunStats) -> f64, law: impl Fn(f64) -> f64) -> f64 {
    let mut per_n: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for row in rows {
        assert!(row.sorted, "budget exhausted at n = {}", row.n);
        per_n.entry(row.n).or_default().push(metric(row));
    }
    let normalized: Vec<f64> = per_n
        .iter()
        .map(|(&n, vals)| mean(vals.iter().copied()) / law(n as f64))
        .collect();
    let max = normalized.iter().copied().fold(f64::MIN, f64::max);
    let min = normalized.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

/// Criterion 4: scaling flatness over n in {64..512} on the reverse input,
/// 200 trials per n: uniform flat against n^2 ln n within 1.5, adjacent
/// against n^2 within 1.5, harmonic against n (ln n)^2 within 2.0. The
/// fitter must also elect those laws.
#[test]
fn criterion_04_scaling_flatness() {
    let ns = vec![64, 128, 256, 512];
    let comparisons = |r: &RunStats| r.comparisons as f64;

    let uniform = experiment(SorterSpec::Uniform, "reverse", ns.clone(), 200, 0xC2);
    let f_uniform = flatness(&uniform, comparisons, |n| n * n * n.ln());
    let uniform_winner = fit_scaling(&uniform, FitMetric::Comparisons).unwrap().winner;

    let adjacent = experiment(SorterSpec::Adjacent, "reverse", ns.clone(), 200, 0xC3);
    let f_adjacent = flatness(&adjacent, comparisons, |n| n * n);
    let adjacent_winner = fit_scaling(&adjacent, FitMetric::Comparisons).unwrap().winner;

    let harmonic = experiment(SorterSpec::Harmonic { scale: 4.0 }, "reverse", ns, 200, 0xC4);
    let f_harmonic = flatness(&harmonic, comparisons, |n| n * n.ln() * n.ln());
    let harmonic_winner = fit_scaling(&harmonic, FitMetric::Comparisons).unwrap().winner;

    let pass = f_uniform <= 1.5
        && f_adjacent <= 1.5
        && f_harmonic <= 2.0
        && uniform_winner == "n^2 log n"
        && adjacent_winner == "n^2"
        && harmonic_winner == "n (log n)^2";
    verdict(
        "04",
        "scaling-flatness",
        pass,
        &format!(
            "uniform/(n^2 ln n) {f_uniform:.3} (<=1.5, winner {uniform_winner}); \
             adjacent/n^2 {f_adjacent:.3} (<=1.5, winner {adjacent_winner}); \
             harmonic/(n ln^2 n) {f_harmonic:.3} (<=2.0, winner {harmonic_winner})"
        ),
    );
}

/// Criterion 5, structured half: mean rounds / (lg n)^2 flat within ratio
/// 2.0 over n in {64..512} on the reverse input, 200 trials per n.
#[test]
fn criterion_05_structured_round_law() {
    let rows = experiment(SorterSpec::Structured, "reverse", vec![64, 128, 256, 512], 200, 0xC5);
    let f = flatness(&rows, |r| r.rounds as f64, |n| n.log2() * n.log2());
    verdict(
        "05a",
        "structured-round-law",
        f <= 2.0,
        &format!("rounds/(lg n)^2 flatness {f:.3} (<= 2.0)"),
    );
}

/// Criterion 5, thinned half, as stated: at n = 256 doubling p from 32 to
/// 64 halves mean rounds within 25%, i.e. ratio in [1.5, 2.5].
///
/// Known-failing: retention saturates between p = n/8 and p = n/4 (the
/// conflict-free fraction drops 0.617 -> 0.375, exactly computable), so the
/// comparisons delivered per round grow by only ~1.22x, not 2x, and the
/// measured ratio sits near 1.2. Kept as stated for the record.
#[test]
fn criterion_05_thinned_round_halving() {
    let rows32 = experiment(SorterSpec::Thinned { p: 32 }, "reverse", vec![256], 200, 0xC6);
    let rows64 = experiment(SorterSpec::Thinned { p: 64 }, "reverse", vec![256], 200, 0xC7);
    let m32 = mean(rows32.iter().map(|r| r.rounds as f64));
    let m64 = mean(rows64.iter().map(|r| r.rounds as f64));
    let ratio = m32 / m64;
    verdict(
        "05b",
        "thinned-round-halving",
        (1.5..=2.5).contains(&ratio),
        &format!("mean rounds p=32: {m32:.1}, p=64: {m64:.1}, ratio {ratio:.3} (gate [1.5, 2.5])"),
    );
}

/// Criterion 6, structured half: |M| = n/4 and vertex-disjointness for ALL
/// (K, D, R) outcomes, exhaustively, for n in {8, 16, ..., 1024}.
#[test]
fn criterion_06_structured_matching_exactness() {
    let mut outcomes_checked = 0_u64;
    let mut pass = true;
    let mut n = 8_usize;
    while n <= 1024 {
        for (k, d, r, _) in structured_outcomes(n).unwrap() {
            let m = structured_matching(n, k, d, r).unwrap();
            if m.len() != n / 4 || m.validate(n).is_err() {
                pass = false;
            }
            outcomes_checked += 1;
        }
        n *= 2;
    }
    verdict(
        "06a",
        "structured-matching-exactness",
        pass,
        &format!("{outcomes_checked} (K,D,R) outcomes, all |M| = n/4 and disjoint"),
    );
}

/// Criterion 6, thinned half, as stated: E|M|/p in [0.5, 1.0] within 3
/// standard errors at (n, p) = (1024, 256) over 10^4 draws.
///
/// Known-failing: the exact expectation at p = n/4 is
///   E|M|/p = sum_e (w_e/W) (1 - t_e)^(p-1) = 0.3713,
/// with t_e the probability another draw touches e. The claimed 1/2 lower
/// bound rests on a union bound that counts endpoint collisions once
/// instead of twice; it holds up to p ~ n/8 (0.610 at p = 128) but not at
/// p = n/4. Kept as stated for the record.
#[test]
fn criterion_06_thinned_retention_bound() {
    let (n, p, draws) = (1024_usize, 256_usize, 10_000_u64);
    let sampler = EdgeSampler::build(PairWeightSpec::harmonic(n, 1.0).unwrap()).unwrap();
    let mut rng = seeding::stream(0xC8, n as u64, p as u64);
    let mut fractions = Vec::with_capacity(draws as usize);
    for _ in 0..draws {
        let m = sample_thinned_matching(n, p, &sampler, &mut rng).unwrap();
        fractions.push(m.len() as f64 / p as f64);
    }
    let m = mean(fractions.iter().copied());
    let var = mean(fractions.iter().map(|f| (f - m) * (f - m)));
    let se = (var / draws as f64).sqrt();
    let pass = m + 3.0 * se >= 0.5 && m - 3.0 * se <= 1.0;
    verdict(
        "06b",
        "thinned-retention-bound",
        pass,
        &format!("E|M|/p = {m:.4} +- {:.4} (3 se) at (n, p) = (1024, 256); gate [0.5, 1.0]", 3.0 * se),
    );
}

/// Criterion 7: marginal certificates. Exact enumeration proves the
/// structured marginals dominate 1/(4 lg n * dist) for every pair at
/// n <= 64; Monte Carlo passes for the thinned family at (256, 64) with
/// 10^6 samples.
#[test]
fn criterion_07_qalpha_certificates() {
    let mut detail = String::new();
    let mut pass = true;
    for n in [8_usize, 16, 32, 64] {
        let report = verify_qalpha_exact(n, 1.0).unwrap();
        pass &= report.pass;
        detail.push_str(&format!("exact n={n} margin {:.3}; ", report.worst_margin));
    }
    let mc = verify_qalpha_thinned(256, 64, 1_000_000, 0xC9).unwrap();
    pass &= mc.pass;
    detail.push_str(&format!(
        "thinned (256,64) 10^6 samples worst margin {:.3} at {:?}",
        mc.worst_margin, mc.worst_pair
    ));
    verdict("07", "qalpha-certificates", pass, &detail);
}

/// Criterion 8: the 0-1 principle oracle agrees on every permutation of
/// every length up to 6, with 100 random traces each.
#[test]
fn criterion_08_zero_one_principle() {
    let outcome = oracle_zero_one_principle(6, 100, 0xCA);
    let expected_trials = (2 + 6 + 24 + 120 + 720) * 100;
    let pass = outcome.failures == 0 && outcome.trials == expected_trials;
    verdict(
        "08",
        "zero-one-principle",
        pass,
        &format!("{} replays, {} disagreements", outcome.trials, outcome.failures),
    );
}

/// Criterion 9: on at least 10^4 recorded steps across the four sorter
/// families — inversions strictly decrease on swaps and are otherwise
/// constant; Omega_r membership is absorbing; cumulative misplaced counts
/// are nonincreasing. Zero violations.
#[test]
fn criterion_09_trace_invariants() {
    let inversion = oracle_inversion_monotone(64, 10_000, 0xCB);
    let omega = oracle_omega_absorbing(64, 10_000, 0xCC);
    let misplaced = oracle_misplaced_monotone(64, 10_000, 0xCD);
    let pass = inversion.failures == 0
        && omega.failures == 0
        && misplaced.failures == 0
        && inversion.trials >= 10_000
        && omega.trials >= 10_000
        && misplaced.trials >= 10_000;
    verdict(
        "09",
        "trace-invariants",
        pass,
        &format!(
            "inversion {} steps / {} violations; omega {} / {}; misplaced {} / {}",
            inversion.trials,
            inversion.failures,
            omega.trials,
            omega.failures,
            misplaced.trials,
            misplaced.failures
        ),
    );
}

/// Criterion 10: Constant(1/2) faults double the mean comparison count on
/// the harmonic sorter at n = 256 (ratio in [1.7, 2.3], 500 trials each).
#[test]
fn criterion_10_fault_model() {
    let clean = experiment(SorterSpec::Harmonic { scale: 4.0 }, "reverse", vec![256], 500, 0xCE);
    let faulty = run_experiment(&ExperimentConfig {
        sorter: SorterSpec::Harmonic { scale: 4.0 },
        input_kind: "reverse".into(),
        n_list: vec![256],
        trials: 500,
        master_seed: 0xCF,
        fault_prob: Some(0.5),
        budget_multiplier: 1.0,
        output_path: None,
    })
    .unwrap();
    let ratio = mean_comparisons(&faulty) / mean_comparisons(&clean);
    verdict(
        "10",
        "fault-model-doubling",
        (1.7..=2.3).contains(&ratio),
        &format!("faulty/clean comparison ratio {ratio:.3} (gate [1.7, 2.3])"),
    );
}

/// Criterion 11, as stated: the misplaced-count recurrence iterated with
/// coefficient 1/3 stays below 2^-(r-3k) * n for every N <= 30.
///
/// Known-failing: the induction needs the geometric coefficient <= 3/14,
/// and 1/3 > 3/14; with the m <= n cap the first violation is at
/// (r, k) = (41, 13), so the check is true only through N = 12. The decay
/// the round length actually provides, e^-2 = 0.135, satisfies the bound
/// through N = 40 (`recurrence_bound_check_with_decay`). Kept as stated.
#[test]
fn criterion_11_recurrence_bound() {
    let mut first_failure = None;
    for levels in 1..=30_u32 {
        if !analysis::recurrence_bound_check(levels) && first_failure.is_none() {
            first_failure = Some(levels);
        }
    }
    verdict(
        "11",
        "recurrence-bound",
        first_failure.is_none(),
        &match first_failure {
            None => "true for all N <= 30".to_string(),
            Some(levels) => format!(
                "first false at N = {levels} (coefficient 1/3 exceeds the 3/14 the bound needs; \
                 e^-2 decay passes through N = 40)"
            ),
        },
    );
}

/// Criterion 12, equivalence half: a single atomic worker is the sequential
/// sorter — mean comparisons agree within 5% over 2000 trials each.
#[test]
fn criterion_12_async_equivalence() {
    let n = 128_usize;
    let sequential = experiment(SorterSpec::Harmonic { scale: 4.0 }, "reverse", vec![n], 2000, 0xD0);
    let asynchronous = run_async_trials(&AsyncTrialConfig {
        protocol: AsyncProtocol::Atomic,
        n,
        workers: 1,
        trials: 2000,
        master_seed: 0xD1,
        input_kind: InputKind::Reverse,
        fault_prob: None,
        budget_multiplier: 1.0,
        scale: 4.0,
    })
    .unwrap();
    let ratio = mean_comparisons(&asynchronous) / mean_comparisons(&sequential);
    verdict(
        "12a",
        "async-p1-equivalence",
        (0.95..=1.05).contains(&ratio),
        &format!("async/sequential mean comparison ratio {ratio:.4} (gate 1 +- 0.05)"),
    );
}

/// Criterion 12, safety half: with p = n/8 = 128 workers at n = 1024,
/// terminal arrays are always sorted and value-conserving over 500 runs.
#[test]
fn criterion_12_async_safety() {
    let n = 1024_usize;
    let workers = n / 8;
    let sampler = EdgeSampler::build(PairWeightSpec::harmonic(n, 4.0).unwrap()).unwrap();
    let budget = 64 * (n as u64) * 100;
    let mut failures = 0_u64;
    for trial in 0..500_u64 {
        let mut rng = seeding::stream(0xD2, n as u64, trial);
        let input = generate_input(&InputKind::RandomPermutation, n, &mut rng).unwrap();
        let run = run_async(
            &input,
            workers,
            &sampler,
            &FaultModel::none(),
            AsyncProtocol::Atomic,
            budget,
            seeding::derive_seed(0xD2, n as u64, trial),
        )
        .unwrap();
        let mut expected = input.clone();
        expected.sort_unstable();
        if !(run.sorted && is_sorted(&run.keys) && run.keys == expected) {
            failures += 1;
        }
    }
    verdict(
        "12b",
        "async-safety-128-workers",
        failures == 0,
        &format!("500 runs at (n, p) = (1024, 128), {failures} unsorted or value-losing"),
    );
}

/// Criterion 13 (exploratory, no hard tolerance beyond termination): the
/// Gray-hypercube sorter and the dimension-cut parallel sorter always
/// terminate sorted within budget; their measured costs are reported
/// against the conjectured laws for the record.
#[test]
fn criterion_13_exploratory_gray_dimcut() {
    let ns = vec![64, 128, 256, 512];
    let gray = experiment(SorterSpec::Gray, "reverse", ns.clone(), 200, 0xD3);
    let gray_sorted = gray.iter().all(|r| r.sorted);
    let gray_norm: Vec<String> = [64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let m = mean(gray.iter().filter(|r| r.n == n).map(|r| r.comparisons as f64));
            let lg = (n as f64).log2();
            format!("n={n}: {:.2}", m / (n as f64 * lg * lg))
        })
        .collect();

    let dimcut = experiment(SorterSpec::Dimcut, "reverse", ns, 200, 0xD4);
    let dimcut_sorted = dimcut.iter().all(|r| r.sorted);
    let dimcut_norm: Vec<String> = [64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let m = mean(dimcut.iter().filter(|r| r.n == n).map(|r| r.rounds as f64));
            let lg = (n as f64).log2();
            format!("n={n}: {:.2}", m / (lg * lg))
        })
        .collect();

    verdict(
        "13",
        "exploratory-gray-dimcut",
        gray_sorted && dimcut_sorted,
        &format!(
            "gray comparisons/(n lg^2 n): {}; dimcut rounds/(lg n)^2: {}",
            gray_norm.join(", "),
            dimcut_norm.join(", ")
        ),
    );
}
