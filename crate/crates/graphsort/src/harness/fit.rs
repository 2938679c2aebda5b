//! Scaling-law fitting by flatness.
//!
//! For each candidate law `f(n)` the fitter normalizes the per-n means by
//! `f(n)` and scores the law by the max/min ratio of that sequence: a law
//! that matches the data leaves a flat sequence. Logarithm bases cancel in
//! the ratio, so natural log is used throughout.

use super::stats::{RunStats, CSV_HEADER};
use super::HarnessError;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMetric {
    Comparisons,
    Rounds,
}

impl FitMetric {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        match text {
            "comparisons" => Ok(FitMetric::Comparisons),
            "rounds" => Ok(FitMetric::Rounds),
            other => Err(HarnessError::BadConfig(format!("unknown metric {other:?}"))),
        }
    }

    fn extract(&self, row: &RunStats) -> f64 {
        match self {
            FitMetric::Comparisons => row.comparisons as f64,
            FitMetric::Rounds => row.rounds as f64,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            FitMetric::Comparisons => "comparisons",
            FitMetric::Rounds => "rounds",
        }
    }
}

type Law = fn(f64) -> f64;

const LAWS: &[(&str, Law)] = &[
    ("n log n", |n| n * n.ln()),
    ("n^2", |n| n * n),
    ("n^2 log n", |n| n * n * n.ln()),
    ("n^3", |n| n * n * n),
    ("n (log n)^2", |n| n * n.ln() * n.ln()),
    ("(log n)^2", |n| n.ln() * n.ln()),
];

/// One candidate law's normalized sequence and its flatness score.
#[derive(Debug, Clone)]
pub struct LawFit {
    pub law: String,
    /// `(n, mean_metric(n) / f(n))` per distinct n, ascending.
    pub normalized: Vec<(usize, f64)>,
    /// max/min of the normalized sequence; 1.0 is a perfect fit.
    pub flatness: f64,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub metric: &'static str,
    pub means: Vec<(usize, f64)>,
    pub fits: Vec<LawFit>,
    pub winner: String,
}

impl FitReport {
    pub fn fit(&self, law: &str) -> Option<&LawFit> {
        self.fits.iter().find(|f| f.law == law)
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "metric: {}", self.metric)?;
        for (n, mean) in &self.means {
            writeln!(f, "  n = {n:>6}: mean = {mean:.3}")?;
        }
        writeln!(f, "law fits (flatness = max/min of mean/f(n); 1.0 is perfect):")?;
        for fit in &self.fits {
            let marker = if fit.law == self.winner { " <- flattest" } else { "" };
            writeln!(f, "  {:<14} flatness {:.4}{}", fit.law, fit.flatness, marker)?;
        }
        Ok(())
    }
}

/// Scores every candidate law against the per-n means of `metric`.
/// Requires at least 4 distinct n values.
pub fn fit_scaling(rows: &[RunStats], metric: FitMetric) -> Result<FitReport, HarnessError> {
    let mut groups: BTreeMap<usize, (f64, u64)> = BTreeMap::new();
    for row in rows {
        let entry = groups.entry(row.n).or_insert((0.0, 0));
        entry.0 += metric.extract(row);
        entry.1 += 1;
    }
    if groups.len() < 4 {
        return Err(HarnessError::InsufficientData { need: 4, got: groups.len() });
    }
    let means: Vec<(usize, f64)> =
        groups.iter().map(|(&n, &(sum, count))| (n, sum / count as f64)).collect();

    let mut fits = Vec::with_capacity(LAWS.len());
    for &(name, law) in LAWS {
        let normalized: Vec<(usize, f64)> =
            means.iter().map(|&(n, mean)| (n, mean / law(n as f64))).collect();
        let max = normalized.iter().map(|&(_, v)| v).fold(f64::MIN, f64::max);
        let min = normalized.iter().map(|&(_, v)| v).fold(f64::MAX, f64::min);
        let flatness = if min > 0.0 { max / min } else { f64::INFINITY };
        fits.push(LawFit { law: name.to_string(), normalized, flatness });
    }
    let winner = fits
        .iter()
        .min_by(|a, b| a.flatness.total_cmp(&b.flatness))
        .expect("nonempty law list")
        .law
        .clone();
    Ok(FitReport { metric: metric.name(), means, fits, winner })
}

/// Reads rows back from the fixed CSV schema.
pub fn parse_csv(text: &str) -> Result<Vec<RunStats>, HarnessError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(HarnessError::BadCsv(format!("bad header {other:?}")));
        }
    }
    lines.filter(|l| !l.trim().is_empty()).map(RunStats::from_csv_row).collect()
}
