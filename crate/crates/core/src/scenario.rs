//! Scenario data: outcome vectors in ℝ^N, discount vectors in [0,1]^N and
//! sure cash amounts.
//!
//! A [`ScenarioVector`] holds one outcome per scenario. Positive entries are
//! gains, negative entries are losses. The partial order is componentwise.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `X = (X_1, ..., X_N)` of scenario outcomes. All entries are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScenarioVector(Vec<f64>);

impl ScenarioVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { index, value });
        }
        Ok(Self(values))
    }

    /// The sure amount `c1 = (c, ..., c)`.
    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; dim])
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::constant(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `X + z1`.
    pub fn shifted(&self, shift: CashShift) -> Self {
        Self(shift_all(&self.0, shift.amount()))
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &ScenarioVector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// `(D_1 X_1, ..., D_N X_N)`.
    pub fn discounted(&self, discount: &DiscountVector) -> Result<Self> {
        check_dim(discount.dim(), self.dim())?;
        Ok(Self(discount_slice(discount.factors(), &self.0)))
    }

    pub fn clip_losses(&self) -> Self {
        Self(clip_slice(&self.0))
    }
}

impl Deref for ScenarioVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ScenarioVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ScenarioVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ScenarioVector> for Vec<f64> {
    fn from(x: ScenarioVector) -> Self {
        x.0
    }
}

/// `X ∧ 0`, the componentwise minimum with zero. Idempotent.
pub fn clip_losses(x: &ScenarioVector) -> ScenarioVector {
    x.clip_losses()
}

/// Per-scenario discount factors `D_i ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscountVector(Vec<f64>);

impl DiscountVector {
    pub fn new(factors: Vec<f64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in factors.iter().enumerate() {
            // NaN fails the range test as well
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::DiscountOutOfRange { index, value });
            }
        }
        Ok(Self(factors))
    }

    /// `D = 1`, no discounting.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn factors(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DiscountVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<DiscountVector> for Vec<f64> {
    fn from(d: DiscountVector) -> Self {
        d.0
    }
}

/// A sure amount of cash `z` added to every scenario.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CashShift(f64);

impl CashShift {
    pub fn new(amount: f64) -> Result<Self> {
        if !amount.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cash shift must be finite, got {amount}"
            )));
        }
        Ok(Self(amount))
    }

    pub fn amount(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CashShift {
    type Error = Error;

    fn try_from(amount: f64) -> Result<Self> {
        Self::new(amount)
    }
}

impl From<CashShift> for f64 {
    fn from(z: CashShift) -> Self {
        z.0
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

pub(crate) fn shift_all(x: &[f64], z: f64) -> Vec<f64> {
    x.iter().map(|v| v + z).collect()
}

pub(crate) fn clip_slice(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.min(0.0)).collect()
}

pub(crate) fn discount_slice(d: &[f64], x: &[f64]) -> Vec<f64> {
    d.iter().zip(x).map(|(d, x)| d * x).collect()
}
