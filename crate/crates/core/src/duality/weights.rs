use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric guard on `Σ P_i ≤ 1` and on `Σ W_i = 1`.
pub const WEIGHT_GUARD: f64 = 1e-12;

/// `P` with `P_i ≥ 0` and `Σ P_i ≤ 1`.
#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SubProbabilityWeight(Vec<f64>);

impl SubProbabilityWeight {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeight("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeight(format!(
                "entry {w} is not a finite non-negative number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + WEIGHT_GUARD {
            return Err(Error::InvalidWeight(format!(
                "total mass {total} exceeds 1"
            )));
        }
        Ok(Self(weights))
    }

    /// A probability vector, `Σ W_i = 1`.
    pub fn probability(weights: Vec<f64>) -> Result<Self> {
        let w = Self::new(weights)?;
        if (w.total() - 1.0).abs() > WEIGHT_GUARD {
            return Err(Error::InvalidWeight(format!(
                "total mass {} is not 1",
                w.total()
            )));
        }
        Ok(w)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total() - 1.0).abs() <= WEIGHT_GUARD
    }
}

impl TryFrom<Vec<f64>> for SubProbabilityWeight {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SubProbabilityWeight> for Vec<f64> {
    fn from(w: SubProbabilityWeight) -> Self {
        w.0
    }
}

/// Which weight set to discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `{P ≥ 0 : Σ P_i ≤ 1}`.
    SubProbability,
    /// `{W ≥ 0 : Σ W_i = 1}`.
    Simplex,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::SubProbability => "sub_probability",
            WeightMode::Simplex => "simplex",
        })
    }
}

/// Number of lattice steps `k = 1/step`.
pub fn steps_per_unit(step: f64) -> Result<u32> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidStep(step));
    }
    let k = (1.0 / step).round();
    if (k * step - 1.0).abs() > WEIGHT_GUARD || k > u32::MAX as f64 {
        return Err(Error::InvalidStep(step));
    }
    Ok(k as u32)
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Closed-form size of the lattice: `C(k + N, N)` for the sub-probability
/// set, `C(k + N - 1, N - 1)` for the simplex.
pub fn lattice_count(dim: usize, steps: u32, mode: WeightMode) -> u128 {
    let (n, k) = (dim as u64, steps as u64);
    match mode {
        WeightMode::SubProbability => binomial(k + n, n),
        WeightMode::Simplex => binomial(k + n - 1, n - 1),
    }
}

/// All `P` with `P_i ∈ {0, step, 2 step, ...}` in the chosen set, in
/// lexicographic order.
pub fn weight_grid(dim: usize, step: f64, mode: WeightMode) -> Result<Vec<SubProbabilityWeight>> {
    if dim == 0 {
        return Err(Error::EmptyVector);
    }
    let k = steps_per_unit(step)?;
    let mut out = Vec::with_capacity(lattice_count(dim, k, mode).min(1 << 24) as usize);
    let mut counts = vec![0u32; dim];
    enumerate(&mut counts, 0, k, k, mode, &mut out);
    Ok(out)
}

fn enumerate(
    counts: &mut [u32],
    pos: usize,
    remaining: u32,
    k: u32,
    mode: WeightMode,
    out: &mut Vec<SubProbabilityWeight>,
) {
    if pos == counts.len() - 1 {
        let choices = match mode {
            WeightMode::SubProbability => 0..=remaining,
            WeightMode::Simplex => remaining..=remaining,
        };
        for c in choices {
            counts[pos] = c;
            // n / k is exact for the lattice endpoints and the closest double otherwise
            let w = counts.iter().map(|&n| n as f64 / k as f64).collect();
            out.push(SubProbabilityWeight(w));
        }
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        enumerate(counts, pos + 1, remaining - c, k, mode, out);
    }
    counts[pos] = 0;
}
