//! Risk statistics `R: ℝ^N → ℝ` and the catalog of concrete instances.
//!
//! | kind                | `R(X)`                                   | axiom profile          |
//! |---------------------|------------------------------------------|------------------------|
//! | `worst_case`        | `-min_i X_i`                             | A1 A2 A3 A5            |
//! | `neg_expectation`   | `-Σ w_i X_i`                             | A1 A2 A3 A5            |
//! | `entropic`          | `(1/β) ln Σ w_i exp(-β X_i)`             | A1 A2 A3 A5            |
//! | `discounted`        | `base(D_1 X_1, ..., D_N X_N)`            | A2 A3 A5               |
//! | `loss_based`        | `-Σ w_i min(X_i, 0)`                     | A2 A3 A5 B1 B2 B3 B4   |
//! | `scaled_worst_case` | `-c min_i X_i`                           | A2 A3 (A5 fails, c > 1)|
//!
//! `scaled_worst_case` with `c > 1` is kept in the catalog as a negative
//! control: it is convex and monotone but charges more than one unit of capital
//! per unit of cash, so cash sub-additivity fails.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{check_dim, clip_slice, discount_slice, DiscountVector, ScenarioVector};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

const MAX_NESTING: usize = 32;

/// Anything that can be evaluated as a scalar risk statistic on ℝ^N.
pub trait RiskStatistic: Sync {
    /// The dimension the statistic is tied to, if any.
    fn dimension(&self) -> Option<usize> {
        None
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

impl<S: RiskStatistic + ?Sized> RiskStatistic for &S {
    fn dimension(&self) -> Option<usize> {
        (**self).dimension()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }
}

/// Wraps a closure as a statistic. Used for test fixtures and ad-hoc controls.
pub struct FnStatistic<F> {
    f: F,
    dim: Option<usize>,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnStatistic<F> {
    pub fn new(f: F) -> Self {
        Self { f, dim: None }
    }

    pub fn with_dimension(f: F, dim: usize) -> Self {
        Self { f, dim: Some(dim) }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> RiskStatistic for FnStatistic<F> {
    fn dimension(&self) -> Option<usize> {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if let Some(dim) = self.dim {
            check_dim(dim, x.len())?;
        }
        finite((self.f)(x))
    }
}

/// The axioms a statistic can claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// Cash additivity.
    A1,
    /// Monotonicity.
    A2,
    /// Convexity.
    A3,
    /// Cash sub-additivity.
    A5,
    /// Normalization for cash losses.
    B1,
    /// Monotonicity (loss-based form).
    B2,
    /// Loss dependence.
    B3,
    /// Convexity (loss-based form).
    B4,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    WorstCase,
    NegExpectation,
    Entropic,
    Discounted,
    LossBased,
    ScaledWorstCase,
}

impl StatisticKind {
    /// Axioms the catalog documents for this kind.
    pub fn profile(self) -> BTreeSet<Axiom> {
        use Axiom::*;
        let axioms: &[Axiom] = match self {
            StatisticKind::WorstCase | StatisticKind::NegExpectation | StatisticKind::Entropic => {
                &[A1, A2, A3, A5]
            }
            StatisticKind::Discounted => &[A2, A3, A5],
            StatisticKind::LossBased => &[A2, A3, A5, B1, B2, B3, B4],
            StatisticKind::ScaledWorstCase => &[A2, A3],
        };
        axioms.iter().copied().collect()
    }
}

/// Kind plus parameters. Serialized as `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Statistic {
    WorstCase {},
    NegExpectation {
        weights: Vec<f64>,
    },
    Entropic {
        beta: f64,
        weights: Vec<f64>,
    },
    Discounted {
        discount: DiscountVector,
        base: Box<RiskStatisticSpec>,
    },
    LossBased {
        weights: Vec<f64>,
    },
    ScaledWorstCase {
        scale: f64,
    },
}

impl Statistic {
    pub fn kind(&self) -> StatisticKind {
        match self {
            Statistic::WorstCase {} => StatisticKind::WorstCase,
            Statistic::NegExpectation { .. } => StatisticKind::NegExpectation,
            Statistic::Entropic { .. } => StatisticKind::Entropic,
            Statistic::Discounted { .. } => StatisticKind::Discounted,
            Statistic::LossBased { .. } => StatisticKind::LossBased,
            Statistic::ScaledWorstCase { .. } => StatisticKind::ScaledWorstCase,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(flatten)]
    statistic: Statistic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claimed_axioms: Option<BTreeSet<Axiom>>,
}

/// A validated, immutable description of a catalog risk statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct RiskStatisticSpec {
    statistic: Statistic,
    claimed_axioms: Option<BTreeSet<Axiom>>,
}

impl TryFrom<RawSpec> for RiskStatisticSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = Self {
            statistic: raw.statistic,
            claimed_axioms: raw.claimed_axioms,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<RiskStatisticSpec> for RawSpec {
    fn from(spec: RiskStatisticSpec) -> Self {
        RawSpec {
            statistic: spec.statistic,
            claimed_axioms: spec.claimed_axioms,
        }
    }
}

impl RiskStatisticSpec {
    pub fn new(statistic: Statistic) -> Result<Self> {
        Self::try_from(RawSpec {
            statistic,
            claimed_axioms: None,
        })
    }

    pub fn worst_case() -> Self {
        Self {
            statistic: Statistic::WorstCase {},
            claimed_axioms: None,
        }
    }

    pub fn neg_expectation(weights: Vec<f64>) -> Result<Self> {
        Self::new(Statistic::NegExpectation { weights })
    }

    pub fn entropic(beta: f64, weights: Vec<f64>) -> Result<Self> {
        Self::new(Statistic::Entropic { beta, weights })
    }

    pub fn discounted(base: RiskStatisticSpec, discount: DiscountVector) -> Result<Self> {
        Self::new(Statistic::Discounted {
            discount,
            base: Box::new(base),
        })
    }

    pub fn loss_based(weights: Vec<f64>) -> Result<Self> {
        Self::new(Statistic::LossBased { weights })
    }

    pub fn scaled_worst_case(scale: f64) -> Result<Self> {
        Self::new(Statistic::ScaledWorstCase { scale })
    }

    /// Replace the claimed axiom set.
    pub fn with_claims(mut self, claims: impl IntoIterator<Item = Axiom>) -> Self {
        self.claimed_axioms = Some(claims.into_iter().collect());
        self
    }

    pub fn statistic(&self) -> &Statistic {
        &self.statistic
    }

    pub fn kind(&self) -> StatisticKind {
        self.statistic.kind()
    }

    /// Explicit claims if the document carries them, the kind's profile otherwise.
    pub fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        self.claimed_axioms
            .clone()
            .unwrap_or_else(|| self.kind().profile())
    }

    pub fn has_explicit_claims(&self) -> bool {
        self.claimed_axioms.is_some()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization is infallible")
    }

    fn depth(&self) -> usize {
        match &self.statistic {
            Statistic::Discounted { base, .. } => 1 + base.depth(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth() > MAX_NESTING {
            return Err(Error::InvalidParameter(format!(
                "base specs nested deeper than {MAX_NESTING}"
            )));
        }
        match &self.statistic {
            Statistic::WorstCase {} => Ok(()),
            Statistic::NegExpectation { weights } | Statistic::LossBased { weights } => {
                validate_weights(weights)
            }
            Statistic::Entropic { beta, weights } => {
                if !(beta.is_finite() && *beta > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "entropic rate must be positive and finite, got {beta}"
                    )));
                }
                validate_weights(weights)
            }
            Statistic::Discounted { discount, base } => {
                base.validate()?;
                if let Some(dim) = base.dimension() {
                    check_dim(discount.dim(), dim)?;
                }
                Ok(())
            }
            Statistic::ScaledWorstCase { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "scale must be positive and finite, got {scale}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `R(X)` on a validated scenario vector.
    pub fn eval(&self, x: &ScenarioVector) -> Result<f64> {
        self.evaluate(x.as_slice())
    }
}

impl RiskStatistic for RiskStatisticSpec {
    fn dimension(&self) -> Option<usize> {
        match &self.statistic {
            Statistic::WorstCase {} | Statistic::ScaledWorstCase { .. } => None,
            Statistic::NegExpectation { weights }
            | Statistic::Entropic { weights, .. }
            | Statistic::LossBased { weights } => Some(weights.len()),
            Statistic::Discounted { discount, .. } => Some(discount.dim()),
        }
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(dim) = self.dimension() {
            check_dim(dim, x.len())?;
        }
        let value = match &self.statistic {
            Statistic::WorstCase {} => worst_case(x),
            Statistic::NegExpectation { weights } => neg_expectation(weights, x),
            Statistic::Entropic { beta, weights } => entropic(*beta, weights, x),
            Statistic::Discounted { discount, base } => {
                return base.evaluate(&discount_slice(discount.factors(), x));
            }
            Statistic::LossBased { weights } => loss_based(weights, x),
            Statistic::ScaledWorstCase { scale } => scale * worst_case(x),
        };
        finite(value)
    }
}

/// Dispatch over the catalog.
pub fn eval(spec: &RiskStatisticSpec, x: &ScenarioVector) -> Result<f64> {
    spec.eval(x)
}

pub fn eval_worst_case(x: &ScenarioVector) -> f64 {
    worst_case(x)
}

pub fn eval_neg_expectation(weights: &[f64], x: &ScenarioVector) -> Result<f64> {
    validate_weights(weights)?;
    check_dim(weights.len(), x.dim())?;
    finite(neg_expectation(weights, x))
}

pub fn eval_entropic(beta: f64, weights: &[f64], x: &ScenarioVector) -> Result<f64> {
    RiskStatisticSpec::entropic(beta, weights.to_vec())?.eval(x)
}

pub fn eval_discounted(
    base: &RiskStatisticSpec,
    discount: &DiscountVector,
    x: &ScenarioVector,
) -> Result<f64> {
    base.eval(&x.discounted(discount)?)
}

pub fn eval_loss_based(weights: &[f64], x: &ScenarioVector) -> Result<f64> {
    validate_weights(weights)?;
    check_dim(weights.len(), x.dim())?;
    finite(loss_based(weights, x))
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter("weights must not be empty".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "weights must be finite and non-negative, got {w}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "weights must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

fn finite(value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteValue(value))
    }
}

fn worst_case(x: &[f64]) -> f64 {
    -x.iter().copied().fold(f64::INFINITY, f64::min)
}

fn neg_expectation(weights: &[f64], x: &[f64]) -> f64 {
    -weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>()
}

// (1/β) ln Σ w_i exp(t_i) with t_i = -β X_i, shifted by m = max t_i so that
// every exponent is ≤ 0. The sum is written as 1 + Σ w_i expm1(t_i - m) + (Σw - 1)
// so that small β keeps its relative accuracy.
fn entropic(beta: f64, weights: &[f64], x: &[f64]) -> f64 {
    let active = || weights.iter().zip(x).filter(|(w, _)| **w > 0.0);
    let m = active()
        .map(|(_, x)| -beta * x)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    let mut weight_sum = 0.0;
    for (w, x) in active() {
        acc += w * (-beta * x - m).exp_m1();
        weight_sum += w;
    }
    acc += weight_sum - 1.0;
    (m + acc.ln_1p()) / beta
}

fn loss_based(weights: &[f64], x: &[f64]) -> f64 {
    neg_expectation(weights, &clip_slice(x))
}
