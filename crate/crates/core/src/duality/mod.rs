//! Penalty functions over sub-probability weights and the sup-representation
//! `R(X) = sup_P { Σ P_i (-X_i) - α(P) }`.
//!
//! The pairing is `⟨P, X⟩ = Σ P_i (-X_i)`: positions enter with a minus sign so
//! that the representation is antitone in `X`, matching monotonicity. Weights
//! range over `{P ≥ 0 : Σ P_i ≤ 1}`; mass below one is what cash
//! sub-additivity adds over the cash additive case, where only probability
//! vectors carry finite penalty.
//!
//! Two penalties are computed. [`PenaltyMode::AcceptanceSet`] maximizes
//! `⟨P, X⟩ - R(X)` over the acceptance set `{R ≤ 0}`;
//! [`PenaltyMode::Conjugate`] drops the constraint, giving the convex
//! conjugate. Both are searched over a bounded box, and a maximizer on the box
//! boundary is reported as a flagged lower bound.

mod search;
mod surface;
mod weights;

use serde::{Deserialize, Serialize};

pub use search::{
    conjugate_unconstrained, penalty, penalty_min, PenaltyMode, PenaltyValue, SearchConfig,
};
pub use surface::{
    duality_gap_report, penalty_surface, reconstruct, reconstruct_argmax, sample_probes, GapReport,
    GapReportConfig, GapRow, PenaltyEntry, PenaltySurface, Reconstruction,
};
pub use weights::{
    lattice_count, steps_per_unit, weight_grid, SubProbabilityWeight, WeightMode, WEIGHT_GUARD,
};

use crate::error::{Error, Result};
use crate::scenario::{check_dim, ScenarioVector};
use crate::statistic::RiskStatistic;

/// `X` is acceptable when `R(X) ≤ ACCEPTANCE_TOL`.
pub const ACCEPTANCE_TOL: f64 = 1e-12;

/// Penalty surfaces are limited to this many scenarios.
pub const MAX_SURFACE_DIMENSION: usize = 6;

pub(crate) fn pairing_slice(p: &[f64], x: &[f64]) -> f64 {
    -p.iter().zip(x).map(|(p, x)| p * x).sum::<f64>()
}

/// `⟨P, X⟩ = Σ P_i (-X_i)`.
pub fn pairing(p: &SubProbabilityWeight, x: &ScenarioVector) -> Result<f64> {
    check_dim(p.dim(), x.dim())?;
    Ok(pairing_slice(p.as_slice(), x))
}

pub fn acceptance_membership<S: RiskStatistic + ?Sized>(
    stat: &S,
    x: &ScenarioVector,
) -> Result<bool> {
    Ok(stat.evaluate(x)? <= ACCEPTANCE_TOL)
}

/// Points certified to lie in the acceptance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceSample {
    points: Vec<ScenarioVector>,
}

impl AcceptanceSample {
    /// Fails if any point is not acceptable.
    pub fn new<S: RiskStatistic + ?Sized>(stat: &S, points: Vec<ScenarioVector>) -> Result<Self> {
        for (i, x) in points.iter().enumerate() {
            if !acceptance_membership(stat, x)? {
                return Err(Error::InvalidParameter(format!(
                    "point {i} is outside the acceptance set"
                )));
            }
        }
        Ok(Self { points })
    }

    /// Keeps the acceptable candidates.
    pub fn filter<S: RiskStatistic + ?Sized>(
        stat: &S,
        candidates: impl IntoIterator<Item = ScenarioVector>,
    ) -> Result<Self> {
        let mut points = Vec::new();
        for x in candidates {
            if acceptance_membership(stat, &x)? {
                points.push(x);
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ScenarioVector] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `max_X { ⟨P, X⟩ - R(X) }` over the sample, a lower bound for the
    /// acceptance-set penalty at `P`.
    pub fn lower_bound<S: RiskStatistic + ?Sized>(
        &self,
        stat: &S,
        p: &SubProbabilityWeight,
    ) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        for x in &self.points {
            let v = pairing(p, x)? - stat.evaluate(x)?;
            best = Some(best.map_or(v, |b| b.max(v)));
        }
        Ok(best)
    }
}
