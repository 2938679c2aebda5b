//! Per-run measurement record and its fixed CSV schema.

use super::HarnessError;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One run's measurements. `comparisons` and `sim_time` carry the sorting
/// time in the two clocks; `rounds` stays 0 for sequential runs.
///
/// `wall_ns` is 0 for the deterministic engines —
/// `(config, masterSeed)` determines every output byte, and measured wall
/// time would break that — and carries real wall time only for
/// asynchronous runs, which are not reproducible anyway.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunStats {
    pub sorter: String,
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub comparisons: u64,
    pub swaps: u64,
    pub rounds: u64,
    pub sim_time: f64,
    pub sorted: bool,
    pub wall_ns: u64,
}

pub const CSV_HEADER: &str = "sorter,n,trial,seed,comparisons,swaps,rounds,sim_time,sorted,wall_ns";

impl RunStats {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.sorter,
            self.n,
            self.trial,
            self.seed,
            self.comparisons,
            self.swaps,
            self.rounds,
            self.sim_time,
            self.sorted,
            self.wall_ns
        )
    }

    pub fn from_csv_row(line: &str) -> Result<Self, HarnessError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(HarnessError::BadCsv(format!(
                "expected 10 fields, got {}: {line:?}",
                fields.len()
            )));
        }
        let bad = |what: &str| HarnessError::BadCsv(format!("bad {what} in {line:?}"));
        Ok(RunStats {
            sorter: fields[0].to_string(),
            n: fields[1].parse().map_err(|_| bad("n"))?,
            trial: fields[2].parse().map_err(|_| bad("trial"))?,
            seed: fields[3].parse().map_err(|_| bad("seed"))?,
            comparisons: fields[4].parse().map_err(|_| bad("comparisons"))?,
            swaps: fields[5].parse().map_err(|_| bad("swaps"))?,
            rounds: fields[6].parse().map_err(|_| bad("rounds"))?,
            sim_time: fields[7].parse().map_err(|_| bad("sim_time"))?,
            sorted: fields[8].parse().map_err(|_| bad("sorted"))?,
            wall_ns: fields[9].parse().map_err(|_| bad("wall_ns"))?,
        })
    }
}

pub fn rows_to_csv(rows: &[RunStats]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[RunStats], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, rows_to_csv(rows))?;
    Ok(())
}

pub fn rows_to_json(rows: &[RunStats]) -> Result<String, HarnessError> {
    Ok(serde_json::to_string_pretty(rows)?)
}

pub fn write_json(rows: &[RunStats], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, rows_to_json(rows)?)?;
    Ok(())
}
