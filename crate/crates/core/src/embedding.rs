//! The enlarged space of two-branch positions and the cash additive lift.
//!
//! An [`ExtendedVector`] `X̂ = (X, a)` holds a scenario vector, active on the
//! branch θ = 1, and a sure amount `a`, active on θ = 0. Adding cash shifts
//! both branches, and `X̂ ≥ Ŷ` requires both branches to dominate.
//!
//! Given a cash sub-additive `R`, the lift `ϱ̂(X, a) = R(X - a1) - a` is cash
//! additive whatever `R` is, monotone when `R` is monotone and cash
//! sub-additive, convex when `R` is convex, and agrees with `R` on `(X, 0)`.

use serde::{Deserialize, Serialize};

use crate::axioms::{AxiomId, AxiomReport, CheckConfig, Form, Inputs, Sampler, Sides, TrialSpec};
use crate::error::{Error, Result};
use crate::scenario::{check_dim, shift_all, CashShift, ScenarioVector};
use crate::statistic::RiskStatistic;

/// Tolerance on the lift's cash additivity, which holds by construction.
pub const LIFT_IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExtended")]
pub struct ExtendedVector {
    body: ScenarioVector,
    cash: f64,
}

#[derive(Deserialize)]
struct RawExtended {
    body: ScenarioVector,
    cash: f64,
}

impl TryFrom<RawExtended> for ExtendedVector {
    type Error = Error;

    fn try_from(raw: RawExtended) -> Result<Self> {
        Self::new(raw.body, raw.cash)
    }
}

impl ExtendedVector {
    pub fn new(body: ScenarioVector, cash: f64) -> Result<Self> {
        if !cash.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cash part must be finite, got {cash}"
            )));
        }
        Ok(Self { body, cash })
    }

    pub fn body(&self) -> &ScenarioVector {
        &self.body
    }

    pub fn cash(&self) -> f64 {
        self.cash
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// `X̂ + b1 = (X + b1, a + b)`.
    pub fn shifted(&self, b: CashShift) -> Self {
        Self {
            body: self.body.shifted(b),
            cash: self.cash + b.amount(),
        }
    }

    /// Both branches dominate.
    pub fn dominates(&self, other: &ExtendedVector) -> bool {
        self.body.dominates(&other.body) && self.cash >= other.cash
    }

    /// `λ X̂ + (1 - λ) Ŷ`, branch by branch.
    pub fn mix(&self, other: &ExtendedVector, lambda: f64) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let body = self
            .body
            .iter()
            .zip(other.body.iter())
            .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
            .collect();
        Self::new(
            ScenarioVector::new(body)?,
            lambda * self.cash + (1.0 - lambda) * other.cash,
        )
    }

    /// `X - a1`, the argument `R` sees under the lift.
    pub fn collapsed(&self) -> Vec<f64> {
        shift_all(&self.body, -self.cash)
    }
}

/// The `a = 0` injection `X ↦ (X, 0)`.
pub fn embed(x: &ScenarioVector) -> ExtendedVector {
    ExtendedVector {
        body: x.clone(),
        cash: 0.0,
    }
}

pub fn extended_shift(x: &ExtendedVector, b: CashShift) -> ExtendedVector {
    x.shifted(b)
}

/// `ϱ̂(X, a) = R(X - a1) - a`.
pub fn lift_eval<S: RiskStatistic + ?Sized>(stat: &S, x: &ExtendedVector) -> Result<f64> {
    Ok(stat.evaluate(&x.collapsed())? - x.cash)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub cash_additivity: AxiomReport,
    pub monotonicity: AxiomReport,
    pub convexity: AxiomReport,
    /// `ϱ̂(embed(X)) = R(X)` with zero tolerance.
    pub extension_identity: AxiomReport,
}

impl LiftReport {
    pub fn reports(&self) -> [&AxiomReport; 4] {
        [
            &self.cash_additivity,
            &self.monotonicity,
            &self.convexity,
            &self.extension_identity,
        ]
    }

    pub fn passed(&self) -> bool {
        self.reports().iter().all(|r| r.passed())
    }
}

fn sample_extended(s: &mut Sampler) -> ExtendedVector {
    let body = ScenarioVector::new(s.vector()).expect("sampled entries are finite");
    let cash = s.signed_shift();
    ExtendedVector { body, cash }
}

fn form_of(axiom: AxiomId) -> Form {
    match axiom {
        AxiomId::A1 | AxiomId::LiftExtension => Form::Identity,
        _ => Form::Inequality,
    }
}

/// Both sides of a lift property on recorded inputs.
pub fn measure_lift<S: RiskStatistic + ?Sized>(
    axiom: AxiomId,
    stat: &S,
    inputs: &Inputs,
) -> Result<Sides> {
    let lift = |x: &ExtendedVector| lift_eval(stat, x);
    let sides = match axiom {
        AxiomId::A1 => {
            let x = inputs.get_extended("X")?;
            let b = CashShift::new(inputs.get_scalar("b")?)?;
            Sides::new(lift(&x.shifted(b))?, lift(x)? - b.amount())
        }
        AxiomId::A2 => {
            let x = inputs.get_extended("X")?;
            let y = inputs.get_extended("Y")?;
            Sides::new(lift(x)?, lift(y)?)
        }
        AxiomId::A3 => {
            let x = inputs.get_extended("X")?;
            let y = inputs.get_extended("Y")?;
            let l = inputs.get_scalar("lambda")?;
            Sides::new(lift(&x.mix(y, l)?)?, l * lift(x)? + (1.0 - l) * lift(y)?)
        }
        AxiomId::LiftExtension => {
            let x = ScenarioVector::new(inputs.get_vector("X")?.to_vec())?;
            Sides::new(lift(&embed(&x))?, stat.evaluate(&x)?)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other} is not a lift property"
            )))
        }
    };
    Ok(sides)
}

pub fn replay_lift<S: RiskStatistic + ?Sized>(
    report: &AxiomReport,
    stat: &S,
) -> Result<Option<f64>> {
    let Some(cx) = &report.counterexample else {
        return Ok(None);
    };
    let sides = measure_lift(report.axiom, stat, &cx.inputs)?;
    Ok(Some(sides.violation(form_of(report.axiom))))
}

/// Samples the lift's cash additivity, monotonicity and convexity on the
/// enlarged space, plus the extension identity.
///
/// Cash additivity is held to [`LIFT_IDENTITY_TOL`], monotonicity and
/// convexity to `cfg.tol`.
pub fn verify_lift<S: RiskStatistic + ?Sized>(stat: &S, cfg: &CheckConfig) -> Result<LiftReport> {
    cfg.validate()?;
    let dim = cfg.resolve_dim(stat);
    let spec = |axiom, tolerance| TrialSpec {
        axiom,
        config: cfg,
        dim,
        tolerance,
        form: form_of(axiom),
        epsilon: None,
    };
    let measure = |axiom| move |inputs: &Inputs| measure_lift(axiom, stat, inputs);

    let cash_additivity = spec(AxiomId::A1, LIFT_IDENTITY_TOL).run(
        |s| {
            let x = sample_extended(s);
            let b = s.signed_shift();
            Inputs::default().extended("X", x).scalar("b", b)
        },
        measure(AxiomId::A1),
    )?;
    let monotonicity = spec(AxiomId::A2, cfg.tol).run(
        |s| {
            let y = sample_extended(s);
            let delta = s.perturbation(dim + 1);
            let body = y.body.iter().zip(&delta).map(|(v, d)| v + d).collect();
            let x = ExtendedVector {
                body: ScenarioVector::new(body).expect("finite"),
                cash: y.cash + delta[dim],
            };
            Inputs::default().extended("X", x).extended("Y", y)
        },
        measure(AxiomId::A2),
    )?;
    let convexity = spec(AxiomId::A3, cfg.tol).run(
        |s| {
            let x = sample_extended(s);
            let y = sample_extended(s);
            let lambda = s.unit_interval();
            Inputs::default()
                .extended("X", x)
                .extended("Y", y)
                .scalar("lambda", lambda)
        },
        measure(AxiomId::A3),
    )?;
    let extension_identity = spec(AxiomId::LiftExtension, 0.0).run(
        |s| Inputs::default().vector("X", s.vector()),
        measure(AxiomId::LiftExtension),
    )?;
    Ok(LiftReport {
        cash_additivity,
        monotonicity,
        convexity,
        extension_identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DiscountVector;
    use crate::statistic::RiskStatisticSpec;

    fn sv(v: &[f64]) -> ScenarioVector {
        ScenarioVector::new(v.to_vec()).unwrap()
    }

    fn z(v: f64) -> CashShift {
        CashShift::new(v).unwrap()
    }

    #[test]
    fn embed_examples() {
        let e = embed(&sv(&[1.0, 2.0]));
        assert_eq!(e.body(), &sv(&[1.0, 2.0]));
        assert_eq!(e.cash(), 0.0);
        assert_eq!(embed(&sv(&[0.0])).cash(), 0.0);
        assert!(embed(&sv(&[1.0, 2.0])).dominates(&embed(&sv(&[1.0, 1.0]))));
    }

    #[test]
    fn shift_examples() {
        let e = embed(&sv(&[1.0, 2.0]));
        let s = extended_shift(&e, z(1.0));
        assert_eq!(s.body(), &sv(&[2.0, 3.0]));
        assert_eq!(s.cash(), 1.0);
        assert_eq!(extended_shift(&e, z(0.0)), e);
        assert_eq!(extended_shift(&extended_shift(&e, z(2.5)), z(-2.5)), e);
    }

    #[test]
    fn order_needs_both_branches() {
        let x = ExtendedVector::new(sv(&[2.0, 2.0]), 0.0).unwrap();
        let y = ExtendedVector::new(sv(&[1.0, 1.0]), 1.0).unwrap();
        assert!(!x.dominates(&y));
        assert!(!y.dominates(&x));
    }

    #[test]
    fn lift_examples() {
        let wc = RiskStatisticSpec::worst_case();
        assert_eq!(lift_eval(&wc, &embed(&sv(&[1.0, 2.0]))).unwrap(), -1.0);
        let with_cash = ExtendedVector::new(sv(&[1.0, 2.0]), 1.0).unwrap();
        assert_eq!(lift_eval(&wc, &with_cash).unwrap(), -1.0);
        let ent = RiskStatisticSpec::entropic(1.3, vec![0.2, 0.8]).unwrap();
        let c = 2.75;
        let constant = ExtendedVector::new(sv(&[c, c]), c).unwrap();
        let r0 = ent.eval(&sv(&[0.0, 0.0])).unwrap();
        assert_eq!(lift_eval(&ent, &constant).unwrap(), r0 - c);
    }

    #[test]
    fn lift_of_discounted_worst_case_is_cash_additive() {
        let spec = RiskStatisticSpec::discounted(
            RiskStatisticSpec::worst_case(),
            DiscountVector::new(vec![0.5, 1.0]).unwrap(),
        )
        .unwrap();
        let cfg = CheckConfig {
            trials: 4_000,
            seed: 3,
            ..CheckConfig::default()
        };
        let report = verify_lift(&spec, &cfg).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.extension_identity.max_violation, 0.0);
    }

    #[test]
    fn lift_monotonicity_needs_cash_subadditivity() {
        let scaled = RiskStatisticSpec::scaled_worst_case(2.0).unwrap();
        let cfg = CheckConfig {
            trials: 1_000,
            seed: 3,
            ..CheckConfig::default()
        };
        let report = verify_lift(&scaled, &cfg).unwrap();
        assert!(!report.monotonicity.passed());
        assert!(report.cash_additivity.passed());
        assert!(report.convexity.passed());
        let v = replay_lift(&report.monotonicity, &scaled).unwrap().unwrap();
        assert_eq!(v, report.monotonicity.max_violation);
    }

    #[test]
    fn extended_serializes_as_body_and_cash() {
        let e = ExtendedVector::new(sv(&[1.0, -2.0]), 0.5).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"body":[1.0,-2.0],"cash":0.5}"#);
        assert_eq!(serde_json::from_str::<ExtendedVector>(&json).unwrap(), e);
        assert!(serde_json::from_str::<ExtendedVector>(r#"{"body":[],"cash":0.0}"#).is_err());
    }
}
