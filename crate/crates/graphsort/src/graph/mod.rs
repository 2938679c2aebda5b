//! Weighted comparator graphs on `[n]` and O(1) pair sampling.
//!
//! A [`PairWeightSpec`] declares which weight family a sorter draws its pairs
//! from; [`EdgeSampler`] preprocesses it so that a single draw costs O(1)
//! amortized. The distance-symmetric families (uniform, adjacent, harmonic)
//! are stored through their distance profile — distance `d` carries total
//! weight `(n - d) * w(d)` — which keeps the build O(n) even at `n = 2^14`.

mod alias;
mod gray;

pub use alias::AliasTable;
pub use gray::{gray_code, gray_rank, is_gray_edge};

use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("array length must be at least 2, got {0}")]
    LengthTooSmall(usize),
    #[error("{what} requires a power-of-two length, got {n}")]
    NotPowerOfTwo { what: &'static str, n: usize },
    #[error("harmonic scale must be a positive finite real, got {0}")]
    BadScale(f64),
    #[error("custom weight table: {0}")]
    BadTable(String),
    #[error("pair ({i}, {j}) out of range for n = {n}")]
    PairOutOfRange { i: usize, j: usize, n: usize },
    #[error("pair indices must satisfy i < j, got i = j = {0}")]
    DegeneratePair(usize),
    #[error("pair indices must satisfy i < j, got ({0}, {1})")]
    UnorderedPair(usize, usize),
    #[error("failed to read weight table: {0}")]
    Io(#[from] std::io::Error),
}

/// Weight family of a comparator graph.
#[derive(Debug, Clone)]
pub enum WeightFamily {
    /// Every pair carries weight 1 (the complete graph).
    Uniform,
    /// Unit weight on each pair `{k, k+1}` (the path).
    Adjacent,
    /// `w(i, j) = scale / |j - i|`. The library default is `scale = 4`.
    Harmonic { scale: f64 },
    /// Unit weight on Gray-code hypercube edges; requires power-of-two `n`.
    GrayHypercube,
    /// Explicit pair-weight table.
    Custom(WeightTable),
}

impl WeightFamily {
    fn label(&self) -> String {
        match self {
            WeightFamily::Uniform => "uniform".into(),
            WeightFamily::Adjacent => "adjacent".into(),
            WeightFamily::Harmonic { scale } => format!("harmonic({scale})"),
            WeightFamily::GrayHypercube => "gray".into(),
            WeightFamily::Custom(_) => "custom".into(),
        }
    }
}

/// Explicit nonnegative weights on unordered index pairs.
///
/// Text format: one `i j weight` triple per line, whitespace separated,
/// `#` starts a comment. Pairs are normalized to `i < j`; repeating a pair is
/// an error.
#[derive(Debug, Clone, Default)]
pub struct WeightTable {
    entries: BTreeMap<(usize, usize), f64>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: usize, j: usize, weight: f64) -> Result<(), GraphError> {
        if i == j {
            return Err(GraphError::DegeneratePair(i));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(GraphError::BadTable(format!(
                "weight {weight} for pair ({i}, {j}) is not a finite nonnegative real"
            )));
        }
        let key = (i.min(j), i.max(j));
        if self.entries.insert(key, weight).is_some() {
            return Err(GraphError::BadTable(format!(
                "duplicate pair ({}, {})",
                key.0, key.1
            )));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut table = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let mut fields = line.split_whitespace();
            let Some(first) = fields.next() else { continue };
            let bad = |msg: String| {
                GraphError::BadTable(format!("line {}: {msg}", lineno + 1))
            };
            let i: usize = first
                .parse()
                .map_err(|_| bad(format!("bad index {first:?}")))?;
            let j: usize = fields
                .next()
                .ok_or_else(|| bad("missing second index".into()))?
                .parse()
                .map_err(|_| bad("bad second index".into()))?;
            let w: f64 = fields
                .next()
                .ok_or_else(|| bad("missing weight".into()))?
                .parse()
                .map_err(|_| bad("bad weight".into()))?;
            if fields.next().is_some() {
                return Err(bad("trailing fields".into()));
            }
            table.insert(i, j, w)?;
        }
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self, GraphError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &w)| (k, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Declarative description of a weighted comparator graph `G = ([n], w)`.
#[derive(Debug, Clone)]
pub struct PairWeightSpec {
    family: WeightFamily,
    n: usize,
}

impl PairWeightSpec {
    pub fn new(family: WeightFamily, n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::LengthTooSmall(n));
        }
        match &family {
            WeightFamily::Harmonic { scale } => {
                if !scale.is_finite() || *scale <= 0.0 {
                    return Err(GraphError::BadScale(*scale));
                }
            }
            WeightFamily::GrayHypercube => {
                if !n.is_power_of_two() {
                    return Err(GraphError::NotPowerOfTwo { what: "gray hypercube", n });
                }
            }
            WeightFamily::Custom(table) => {
                if table.is_empty() {
                    return Err(GraphError::BadTable("table is empty".into()));
                }
                let mut any_positive = false;
                for ((i, j), w) in table.iter() {
                    if j >= n {
                        return Err(GraphError::PairOutOfRange { i, j, n });
                    }
                    any_positive |= w > 0.0;
                }
                if !any_positive {
                    return Err(GraphError::BadTable("all weights are zero".into()));
                }
            }
            WeightFamily::Uniform | WeightFamily::Adjacent => {}
        }
        Ok(Self { family, n })
    }

    pub fn uniform(n: usize) -> Result<Self, GraphError> {
        Self::new(WeightFamily::Uniform, n)
    }

    pub fn adjacent(n: usize) -> Result<Self, GraphError> {
        Self::new(WeightFamily::Adjacent, n)
    }

    pub fn harmonic(n: usize, scale: f64) -> Result<Self, GraphError> {
        Self::new(WeightFamily::Harmonic { scale }, n)
    }

    pub fn gray_hypercube(n: usize) -> Result<Self, GraphError> {
        Self::new(WeightFamily::GrayHypercube, n)
    }

    pub fn custom(n: usize, table: WeightTable) -> Result<Self, GraphError> {
        Self::new(WeightFamily::Custom(table), n)
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of the unordered pair `{i, j}`; requires `i < j < n`.
    pub fn pair_weight(&self, i: usize, j: usize) -> Result<f64, GraphError> {
        if i == j {
            return Err(GraphError::DegeneratePair(i));
        }
        if i > j {
            return Err(GraphError::UnorderedPair(i, j));
        }
        if j >= self.n {
            return Err(GraphError::PairOutOfRange { i, j, n: self.n });
        }
        let d = j - i;
        Ok(match &self.family {
            WeightFamily::Uniform => 1.0,
            WeightFamily::Adjacent => {
                if d == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFamily::Harmonic { scale } => scale / d as f64,
            WeightFamily::GrayHypercube => {
                if is_gray_edge(i, j, self.n)? {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFamily::Custom(table) => table.get(i, j),
        })
    }

    /// Exact total weight `w(E)`. Harmonic and custom sums use compensated
    /// summation so the result is accurate to ~1e-15 relative.
    pub fn total_weight(&self) -> f64 {
        let n = self.n;
        match &self.family {
            WeightFamily::Uniform => (n as f64) * (n as f64 - 1.0) / 2.0,
            WeightFamily::Adjacent => (n - 1) as f64,
            WeightFamily::Harmonic { scale } => {
                kahan_sum((1..n).map(|d| (n - d) as f64 * scale / d as f64))
            }
            WeightFamily::GrayHypercube => {
                (n as f64) * (n.trailing_zeros() as f64) / 2.0
            }
            WeightFamily::Custom(table) => kahan_sum(table.iter().map(|(_, w)| w)),
        }
    }

    /// `Pr[{i, j}] = w(i, j) / w(E)`; requires `i < j < n`.
    pub fn pair_probability(&self, i: usize, j: usize) -> Result<f64, GraphError> {
        Ok(self.pair_weight(i, j)? / self.total_weight())
    }

    /// True iff the positive-weight edges connect all of `[n]`.
    pub fn is_connected(&self) -> bool {
        match &self.family {
            WeightFamily::Uniform | WeightFamily::Adjacent | WeightFamily::Harmonic { .. } => true,
            // The hypercube is connected for every power-of-two order.
            WeightFamily::GrayHypercube => true,
            WeightFamily::Custom(table) => {
                let mut parent: Vec<usize> = (0..self.n).collect();
                fn find(parent: &mut [usize], mut x: usize) -> usize {
                    while parent[x] != x {
                        parent[x] = parent[parent[x]];
                        x = parent[x];
                    }
                    x
                }
                for ((i, j), w) in table.iter() {
                    if w > 0.0 {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
                let root = find(&mut parent, 0);
                (1..self.n).all(|v| find(&mut parent, v) == root)
            }
        }
    }

    pub fn label(&self) -> String {
        self.family.label()
    }
}

impl fmt::Display for PairWeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[n={}]", self.label(), self.n)
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

enum SamplerKind {
    /// Distance-symmetric families: draw a distance from the alias table
    /// (index `d - 1`), then a uniform offset.
    Distance(AliasTable),
    /// Gray hypercube: uniform vertex plus uniform flipped dimension.
    Gray { bits: u32 },
    /// Explicit pair list with an alias table over it.
    Custom { pairs: Vec<(usize, usize)>, table: AliasTable },
}

/// Preprocessed sampler drawing pairs `{i, j}` with probability
/// `w(i, j) / w(E)` in O(1) amortized.
pub struct EdgeSampler {
    spec: PairWeightSpec,
    total_weight: f64,
    kind: SamplerKind,
}

impl EdgeSampler {
    pub fn build(spec: PairWeightSpec) -> Result<Self, GraphError> {
        let n = spec.n();
        let total_weight = spec.total_weight();
        let kind = match spec.family() {
            WeightFamily::Uniform | WeightFamily::Adjacent | WeightFamily::Harmonic { .. } => {
                let per_distance: Vec<f64> = (1..n)
                    .map(|d| {
                        let w = match spec.family() {
                            WeightFamily::Uniform => 1.0,
                            WeightFamily::Adjacent => {
                                if d == 1 {
                                    1.0
                                } else {
                                    0.0
                                }
                            }
                            WeightFamily::Harmonic { scale } => scale / d as f64,
                            _ => unreachable!(),
                        };
                        (n - d) as f64 * w
                    })
                    .collect();
                SamplerKind::Distance(
                    AliasTable::new(&per_distance).map_err(GraphError::BadTable)?,
                )
            }
            WeightFamily::GrayHypercube => SamplerKind::Gray { bits: n.trailing_zeros() },
            WeightFamily::Custom(table) => {
                let mut pairs = Vec::with_capacity(table.len());
                let mut weights = Vec::with_capacity(table.len());
                for ((i, j), w) in table.iter() {
                    if w > 0.0 {
                        pairs.push((i, j));
                        weights.push(w);
                    }
                }
                SamplerKind::Custom {
                    pairs,
                    table: AliasTable::new(&weights).map_err(GraphError::BadTable)?,
                }
            }
        };
        Ok(Self { spec, total_weight, kind })
    }

    pub fn spec(&self) -> &PairWeightSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn pair_probability(&self, i: usize, j: usize) -> Result<f64, GraphError> {
        Ok(self.spec.pair_weight(i, j)? / self.total_weight)
    }

    /// Draws one pair `(i, j)` with `i < j`.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let n = self.spec.n();
        match &self.kind {
            SamplerKind::Distance(table) => {
                let d = table.sample(rng) + 1;
                let i = rng.gen_range(0..n - d);
                (i, i + d)
            }
            SamplerKind::Gray { bits } => {
                let v = rng.gen_range(0..n) as u64;
                let bit = rng.gen_range(0..*bits);
                let u = gray_rank(gray_code(v) ^ (1 << bit));
                let (a, b) = (v.min(u) as usize, v.max(u) as usize);
                (a, b)
            }
            SamplerKind::Custom { pairs, table } => pairs[table.sample(rng)],
        }
    }
}

impl fmt::Debug for EdgeSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EdgeSampler")
            .field("spec", &self.spec)
            .field("total_weight", &self.total_weight)
            .finish()
    }
}

#[cfg(test)]
mod tests;
