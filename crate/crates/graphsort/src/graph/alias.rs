//! Vose alias table: O(1) sampling from a fixed discrete distribution after
//! an O(k) build over k outcomes.

use rand::Rng;

/// Preprocessed alias table over outcomes `0..k`.
#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds the table from nonnegative finite weights. At least one weight
    /// must be positive.
    pub fn new(weights: &[f64]) -> Result<Self, String> {
        let k = weights.len();
        if k == 0 {
            return Err("alias table needs at least one outcome".into());
        }
        if k > u32::MAX as usize {
            return Err("alias table limited to 2^32 outcomes".into());
        }
        let mut total = 0.0;
        for (idx, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(format!("weight {w} at index {idx} is not a finite nonnegative real"));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err("alias table needs at least one positive weight".into());
        }

        // Vose's method: split scaled weights into under- and over-full
        // columns, pairing one of each until both lists drain.
        let scale = k as f64 / total;
        let mut scaled: Vec<f64> = weights.iter().map(|&w| w * scale).collect();
        let mut prob = vec![0.0_f64; k];
        let mut alias = vec![0_u32; k];
        let mut small: Vec<u32> = Vec::with_capacity(k);
        let mut large: Vec<u32> = Vec::with_capacity(k);
        for (idx, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(idx as u32);
            } else {
                large.push(idx as u32);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s as usize] = scaled[s as usize];
            alias[s as usize] = l;
            scaled[l as usize] -= 1.0 - scaled[s as usize];
            if scaled[l as usize] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Rounding leftovers are all (numerically) full columns.
        for &idx in small.iter().chain(large.iter()) {
            prob[idx as usize] = 1.0;
        }
        Ok(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Draws an outcome index in O(1).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let col = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[col] {
            col
        } else {
            self.alias[col] as usize
        }
    }
}
