use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashMap;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn total_weight_examples() {
    // harmonic(4), n=4: 3 pairs at d=1 weight 4, 2 at d=2 weight 2, 1 at d=3 weight 4/3
    let spec = PairWeightSpec::harmonic(4, 4.0).unwrap();
    assert!(rel_err(spec.total_weight(), 52.0 / 3.0) < 1e-12);

    assert_eq!(PairWeightSpec::uniform(4).unwrap().total_weight(), 6.0);
    assert_eq!(PairWeightSpec::uniform(100).unwrap().total_weight(), 4950.0);
    assert_eq!(PairWeightSpec::adjacent(5).unwrap().total_weight(), 4.0);
    assert_eq!(PairWeightSpec::harmonic(2, 4.0).unwrap().total_weight(), 4.0);
    assert_eq!(PairWeightSpec::gray_hypercube(8).unwrap().total_weight(), 12.0);
}

#[test]
fn total_weight_matches_brute_force_sum() {
    for n in [2_usize, 3, 7, 33, 64, 100] {
        for spec in [
            PairWeightSpec::uniform(n).unwrap(),
            PairWeightSpec::adjacent(n).unwrap(),
            PairWeightSpec::harmonic(n, 4.0).unwrap(),
            PairWeightSpec::harmonic(n, 1.0).unwrap(),
        ] {
            let brute = kahan_sum(
                (0..n).flat_map(|i| {
                    let spec = spec.clone();
                    ((i + 1)..n).map(move |j| spec.pair_weight(i, j).unwrap())
                }),
            );
            assert!(
                rel_err(spec.total_weight(), brute) < 1e-12,
                "{spec}: {} vs {brute}",
                spec.total_weight()
            );
        }
    }
}

#[test]
fn harmonic_total_weight_obeys_log_bounds() {
    // 4(n ln n - n) <= w(E) <= 4(n ln n + n) for every power of two up to 2^14
    for exp in 1..=14_u32 {
        let n = 1_usize << exp;
        let w = PairWeightSpec::harmonic(n, 4.0).unwrap().total_weight();
        let nf = n as f64;
        let lo = 4.0 * (nf * nf.ln() - nf);
        let hi = 4.0 * (nf * nf.ln() + nf);
        assert!(lo <= w && w <= hi, "n={n}: {lo} <= {w} <= {hi}");
    }
}

#[test]
fn pair_probability_examples() {
    let harm = PairWeightSpec::harmonic(4, 4.0).unwrap();
    assert!(rel_err(harm.pair_probability(0, 3).unwrap(), 1.0 / 13.0) < 1e-12);

    let unif = PairWeightSpec::uniform(4).unwrap();
    for i in 0..4 {
        for j in (i + 1)..4 {
            assert!(rel_err(unif.pair_probability(i, j).unwrap(), 1.0 / 6.0) < 1e-12);
        }
    }

    // labels 1 (001) and 3 (010) have Gray codes two bits apart: not an edge
    let gray = PairWeightSpec::gray_hypercube(8).unwrap();
    assert_eq!(gray.pair_probability(1, 3).unwrap(), 0.0);
}

#[test]
fn pair_probability_rejects_bad_pairs() {
    let spec = PairWeightSpec::uniform(4).unwrap();
    assert!(spec.pair_probability(2, 2).is_err());
    assert!(spec.pair_probability(3, 1).is_err());
    assert!(spec.pair_probability(0, 4).is_err());
}

#[test]
fn probabilities_sum_to_one() {
    let mut table = WeightTable::new();
    table.insert(0, 1, 0.5).unwrap();
    table.insert(1, 2, 2.5).unwrap();
    table.insert(0, 3, 1.0).unwrap();
    let specs = vec![
        PairWeightSpec::uniform(17).unwrap(),
        PairWeightSpec::adjacent(9).unwrap(),
        PairWeightSpec::harmonic(33, 4.0).unwrap(),
        PairWeightSpec::harmonic(64, 1.0).unwrap(),
        PairWeightSpec::gray_hypercube(32).unwrap(),
        PairWeightSpec::custom(4, table).unwrap(),
    ];
    for spec in specs {
        let n = spec.n();
        let total = kahan_sum((0..n).flat_map(|i| {
            let spec = spec.clone();
            ((i + 1)..n).map(move |j| spec.pair_probability(i, j).unwrap())
        }));
        assert!((total - 1.0).abs() < 1e-9, "{spec}: sum {total}");
    }
}

#[test]
fn distance_symmetry() {
    for spec in [
        PairWeightSpec::uniform(24).unwrap(),
        PairWeightSpec::adjacent(24).unwrap(),
        PairWeightSpec::harmonic(24, 4.0).unwrap(),
    ] {
        for d in 1..24_usize {
            let base = spec.pair_probability(0, d).unwrap();
            for i in 1..(24 - d) {
                assert_eq!(spec.pair_probability(i, i + d).unwrap(), base);
            }
        }
    }
}

#[test]
fn spec_validation() {
    assert!(PairWeightSpec::uniform(1).is_err());
    assert!(PairWeightSpec::uniform(0).is_err());
    assert!(PairWeightSpec::gray_hypercube(12).is_err());
    assert!(PairWeightSpec::harmonic(8, 0.0).is_err());
    assert!(PairWeightSpec::harmonic(8, -1.0).is_err());
    assert!(PairWeightSpec::harmonic(8, f64::NAN).is_err());

    let mut zero = WeightTable::new();
    zero.insert(0, 1, 0.0).unwrap();
    assert!(PairWeightSpec::custom(4, zero).is_err());

    let mut oob = WeightTable::new();
    oob.insert(0, 9, 1.0).unwrap();
    assert!(PairWeightSpec::custom(4, oob).is_err());
}

#[test]
fn weight_table_parsing() {
    let text = "\
# comment line
0 1 2.0
 2 3 0.25  # trailing comment

1 3 1e-3
";
    let table = WeightTable::parse(text).unwrap();
    assert_eq!(table.len(), 3);
    assert_eq!(table.get(0, 1), 2.0);
    assert_eq!(table.get(3, 2), 0.25);
    assert_eq!(table.get(1, 3), 1e-3);
    assert_eq!(table.get(0, 2), 0.0);

    assert!(WeightTable::parse("0 1").is_err());
    assert!(WeightTable::parse("0 1 2 3").is_err());
    assert!(WeightTable::parse("x 1 2.0").is_err());
    assert!(WeightTable::parse("0 0 1.0").is_err());
    assert!(WeightTable::parse("0 1 1.0\n1 0 2.0").is_err()); // duplicate pair
    assert!(WeightTable::parse("0 1 -2.0").is_err());
}

#[test]
fn custom_connectivity_predicate() {
    let mut table = WeightTable::new();
    table.insert(0, 1, 1.0).unwrap();
    table.insert(2, 3, 1.0).unwrap();
    let disconnected = PairWeightSpec::custom(4, table.clone()).unwrap();
    assert!(!disconnected.is_connected());

    table.insert(1, 2, 0.5).unwrap();
    let connected = PairWeightSpec::custom(4, table).unwrap();
    assert!(connected.is_connected());

    assert!(PairWeightSpec::harmonic(16, 4.0).unwrap().is_connected());
}

#[test]
fn adjacent_n2_always_draws_the_single_edge() {
    let sampler = EdgeSampler::build(PairWeightSpec::adjacent(2).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        assert_eq!(sampler.sample_pair(&mut rng), (0, 1));
    }
}

#[test]
fn uniform_n3_frequencies() {
    let sampler = EdgeSampler::build(PairWeightSpec::uniform(3).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
    for _ in 0..60_000 {
        *counts.entry(sampler.sample_pair(&mut rng)).or_default() += 1;
    }
    assert_eq!(counts.len(), 3);
    for (&pair, &c) in &counts {
        assert!(
            (c as i64 - 20_000).unsigned_abs() <= 600,
            "pair {pair:?} drawn {c} times"
        );
    }
}

#[test]
fn harmonic_long_edge_frequency() {
    // Pr[(0, 3)] = 1/13 for harmonic(4) at n = 4
    let sampler = EdgeSampler::build(PairWeightSpec::harmonic(4, 4.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 100_000_u64;
    let mut hits = 0_u64;
    for _ in 0..draws {
        if sampler.sample_pair(&mut rng) == (0, 3) {
            hits += 1;
        }
    }
    let p = 1.0 / 13.0;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    assert!(
        (hits as f64 - draws as f64 * p).abs() <= 3.0 * sigma,
        "hits {hits} vs expected {}",
        draws as f64 * p
    );
}

fn chi_square_gof(sampler: &EdgeSampler, draws: u64, seed: u64) -> (f64, f64) {
    let n = sampler.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(sampler.sample_pair(&mut rng)).or_default() += 1;
    }
    let mut stat = 0.0;
    let mut cells = 0_usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = sampler.pair_probability(i, j).unwrap();
            if p == 0.0 {
                assert!(!counts.contains_key(&(i, j)), "drew a zero-probability pair");
                continue;
            }
            let expected = draws as f64 * p;
            let observed = counts.get(&(i, j)).copied().unwrap_or(0) as f64;
            stat += (observed - expected).powi(2) / expected;
            cells += 1;
        }
    }
    let critical = ChiSquared::new((cells - 1) as f64).unwrap().inverse_cdf(0.999);
    (stat, critical)
}

#[test]
fn sampler_passes_chi_square_at_n64() {
    let specs = vec![
        PairWeightSpec::uniform(64).unwrap(),
        PairWeightSpec::adjacent(64).unwrap(),
        PairWeightSpec::harmonic(64, 4.0).unwrap(),
        PairWeightSpec::gray_hypercube(64).unwrap(),
    ];
    for (idx, spec) in specs.into_iter().enumerate() {
        let label = spec.to_string();
        let sampler = EdgeSampler::build(spec).unwrap();
        let (stat, critical) = chi_square_gof(&sampler, 1_000_000, 100 + idx as u64);
        assert!(stat < critical, "{label}: chi2 {stat} >= {critical}");
    }
}

#[test]
fn sampler_passes_chi_square_small_and_custom() {
    let mut table = WeightTable::new();
    table.insert(0, 1, 3.0).unwrap();
    table.insert(2, 5, 1.0).unwrap();
    table.insert(1, 4, 0.25).unwrap();
    table.insert(0, 5, 0.0).unwrap(); // never sampled
    let specs = vec![
        PairWeightSpec::harmonic(8, 1.0).unwrap(),
        PairWeightSpec::custom(6, table).unwrap(),
    ];
    for (idx, spec) in specs.into_iter().enumerate() {
        let label = spec.to_string();
        let sampler = EdgeSampler::build(spec).unwrap();
        let (stat, critical) = chi_square_gof(&sampler, 1_000_000, 200 + idx as u64);
        assert!(stat < critical, "{label}: chi2 {stat} >= {critical}");
    }
}
