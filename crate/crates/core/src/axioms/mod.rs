//! Randomized verification of the risk-statistic axioms.
//!
//! Every check samples inputs from a seeded stream, evaluates both sides of
//! the axiom and reports the worst violator. Identities (A1, B1, B3) are held
//! to [`CheckConfig::tol`]; inequalities (A2, A3, A5 and its one-sided forms,
//! B2, B4) get the floating-point slack [`CheckConfig::slack`]. The loss-based
//! implication chain uses `tol`.
//!
//! Closedness (A4) cannot be falsified by sampling. Finite convex functions on
//! ℝ^N are continuous, so the `A4-proxy` report only probes a local Lipschitz
//! bound: for convex `R`, `|R(X + h d) - R(X)| ≤ h · max(|R(X + d) - R(X)|,
//! |R(X - d) - R(X)|)` for `0 < h ≤ 1`.

mod engine;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use engine::{Form, InputValue, Inputs, NamedInput, Sampler, Sides, TrialSpec};

use crate::error::{Error, Result};
use crate::scenario::{clip_slice, shift_all};
use crate::statistic::RiskStatistic;

/// Resolution of the loss-based limit argument.
pub const EPSILON_SEQUENCE: [f64; 4] = [0.5, 0.1, 0.01, 0.001];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    #[serde(rename = "A4-proxy")]
    A4Proxy,
    A5,
    #[serde(rename = "A5-left")]
    A5Left,
    #[serde(rename = "A5-right")]
    A5Right,
    B1,
    B2,
    B3,
    B4,
    #[serde(rename = "LB⇒CSA")]
    LossImpliesCashSubadditivity,
    #[serde(rename = "lift-extension")]
    LiftExtension,
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("axiom ids serialize");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: Inputs,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub trials: usize,
    pub tolerance: f64,
    /// Largest `|lhs - rhs|` (identities) or `lhs - rhs` (inequalities) seen.
    pub max_violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub trials: usize,
    /// Tolerance for identities.
    pub tol: f64,
    /// Slack allowed on inequalities.
    pub slack: f64,
    /// Entries are sampled on `[center - box, center + box]`; shifts on
    /// `[-box, box]` or `[0, box]`.
    pub box_half_width: f64,
    pub center: f64,
    pub seed: u64,
    /// Used when the statistic is not tied to a dimension.
    pub dim: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            tol: 1e-9,
            slack: 1e-12,
            box_half_width: 10.0,
            center: 0.0,
            seed: 0,
            dim: 2,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.slack >= 0.0 && self.slack.is_finite()) {
            return bad(format!("slack must be non-negative, got {}", self.slack));
        }
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return bad(format!("box must be positive, got {}", self.box_half_width));
        }
        if !self.center.is_finite() {
            return bad("center must be finite".into());
        }
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        Ok(())
    }

    pub fn resolve_dim<S: RiskStatistic + ?Sized>(&self, stat: &S) -> usize {
        stat.dimension().unwrap_or(self.dim)
    }

    fn spec(&self, axiom: AxiomId, dim: usize, form: Form, epsilon: Option<f64>) -> TrialSpec<'_> {
        let tolerance = match (axiom, form) {
            (AxiomId::A4Proxy | AxiomId::LossImpliesCashSubadditivity, _) => self.tol,
            (_, Form::Identity) => self.tol,
            (_, Form::Inequality) => self.slack,
        };
        TrialSpec {
            axiom,
            config: self,
            dim,
            tolerance,
            form,
            epsilon,
        }
    }
}

fn form_of(axiom: AxiomId) -> Form {
    match axiom {
        AxiomId::A1 | AxiomId::B1 | AxiomId::B3 | AxiomId::LiftExtension => Form::Identity,
        _ => Form::Inequality,
    }
}

fn axpy(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(x, y)| a * x + b * y).collect()
}

/// Evaluates both sides of `axiom` on recorded inputs.
pub fn measure<S: RiskStatistic + ?Sized>(
    axiom: AxiomId,
    stat: &S,
    inputs: &Inputs,
    epsilon: Option<f64>,
) -> Result<Sides> {
    let r = |x: &[f64]| stat.evaluate(x);
    let sides = match axiom {
        AxiomId::A1 => {
            let x = inputs.get_vector("X")?;
            let b = inputs.get_scalar("b")?;
            Sides::new(r(&shift_all(x, b))?, r(x)? - b)
        }
        AxiomId::A2 | AxiomId::B2 => {
            let x = inputs.get_vector("X")?;
            let y = inputs.get_vector("Y")?;
            Sides::new(r(x)?, r(y)?)
        }
        AxiomId::A3 | AxiomId::B4 => {
            let x = inputs.get_vector("X")?;
            let y = inputs.get_vector("Y")?;
            let l = inputs.get_scalar("lambda")?;
            Sides::new(r(&axpy(l, x, 1.0 - l, y))?, l * r(x)? + (1.0 - l) * r(y)?)
        }
        AxiomId::A4Proxy => {
            let x = inputs.get_vector("X")?;
            let d = inputs.get_vector("d")?;
            let h = inputs.get_scalar("h")?;
            let base = r(x)?;
            let forward = (r(&axpy(1.0, x, 1.0, d))? - base).abs();
            let backward = (r(&axpy(1.0, x, -1.0, d))? - base).abs();
            Sides::new(
                (r(&axpy(1.0, x, h, d))? - base).abs(),
                h * forward.max(backward),
            )
        }
        AxiomId::A5 => {
            let x = inputs.get_vector("X")?;
            let z1 = inputs.get_scalar("z1")?;
            let z2 = inputs.get_scalar("z2")?;
            Sides::new(r(&shift_all(x, z1))? + z1, r(&shift_all(x, z2))? + z2)
        }
        AxiomId::A5Left => {
            let x = inputs.get_vector("X")?;
            let z = inputs.get_scalar("z")?;
            Sides::new(r(x)? - z, r(&shift_all(x, z))?)
        }
        AxiomId::A5Right => {
            let x = inputs.get_vector("X")?;
            let z = inputs.get_scalar("z")?;
            Sides::new(r(&shift_all(x, -z))?, r(x)? + z)
        }
        AxiomId::B1 => {
            let x = inputs.get_vector("X")?;
            Sides::new(r(x)?, inputs.get_scalar("a")?)
        }
        AxiomId::B3 => {
            let x = inputs.get_vector("X")?;
            Sides::new(r(x)?, r(&clip_slice(x))?)
        }
        AxiomId::LossImpliesCashSubadditivity => {
            let x = inputs.get_vector("X")?;
            let z = inputs.get_scalar("z")?;
            match epsilon {
                Some(eps) => {
                    let scaled: Vec<f64> = x.iter().map(|v| (1.0 - eps) * v - z).collect();
                    Sides::new(r(&scaled)?, (1.0 - eps) * r(x)? + z)
                }
                None => Sides::new(r(&shift_all(x, -z))?, r(x)? + z),
            }
        }
        AxiomId::LiftExtension => {
            return Err(Error::InvalidParameter(
                "lift reports are replayed by the embedding module".into(),
            ))
        }
    };
    Ok(sides)
}

/// Recomputes the violation recorded in a failing report's counterexample.
pub fn replay<S: RiskStatistic + ?Sized>(report: &AxiomReport, stat: &S) -> Result<Option<f64>> {
    let Some(cx) = &report.counterexample else {
        return Ok(None);
    };
    let sides = measure(report.axiom, stat, &cx.inputs, report.epsilon)?;
    Ok(Some(sides.violation(form_of(report.axiom))))
}

fn run<S: RiskStatistic + ?Sized>(
    axiom: AxiomId,
    stat: &S,
    cfg: &CheckConfig,
    epsilon: Option<f64>,
    sample: impl Fn(&mut Sampler) -> Inputs + Sync,
) -> Result<AxiomReport> {
    cfg.validate()?;
    let dim = cfg.resolve_dim(stat);
    cfg.spec(axiom, dim, form_of(axiom), epsilon)
        .run(sample, |inputs| measure(axiom, stat, inputs, epsilon))
}

fn sample_shift(s: &mut Sampler) -> Inputs {
    let x = s.vector();
    let b = s.signed_shift();
    Inputs::default().vector("X", x).scalar("b", b)
}

fn sample_ordered_pair(s: &mut Sampler) -> Inputs {
    let y = s.vector();
    let delta = s.perturbation(s.dim());
    let x = axpy(1.0, &y, 1.0, &delta);
    Inputs::default().vector("X", x).vector("Y", y)
}

fn sample_mixture(s: &mut Sampler, open: bool) -> Inputs {
    let x = s.vector();
    let y = s.vector();
    let lambda = if open {
        s.open_unit_interval()
    } else {
        s.unit_interval()
    };
    Inputs::default()
        .vector("X", x)
        .vector("Y", y)
        .scalar("lambda", lambda)
}

fn sample_nonneg_shift(s: &mut Sampler) -> Inputs {
    let x = s.vector();
    let z = s.nonneg_shift();
    Inputs::default().vector("X", x).scalar("z", z)
}

/// A1: `R(X + b1) = R(X) - b`.
pub fn check_cash_additivity<S: RiskStatistic + ?Sized>(
    stat: &S,
    cfg: &CheckConfig,
) -> Result<AxiomReport> {
    run(AxiomId::A1, stat, cfg, None, sample_shift)
}

/// A2: `X ≥ Y ⇒ R(X) ≤ R(Y)`. `X` is `Y` plus a non-negative perturbation.
pub fn check_monotonicity<S: RiskStatistic + ?Sized>(
    stat: &S,
    cfg: &CheckConfig,
) -> Result<AxiomReport> {
    run(AxiomId::A2, stat, cfg, None, sample_ordered_pair)
}

/// A3: `R(λX + (1-λ)Y) ≤ λR(X) + (1-λ)R(Y)` for `λ ∈ [0, 1]`.
pub fn check_convexity<S: RiskStatistic + ?Sized>(
    stat: &S,
    cfg: &CheckConfig,
) -> Result<AxiomReport> {
    run(AxiomId::A3, stat, cfg, None, |s| sample_mixture(s, false))
}

/// Sampled stand-in for closedness; see the module docs.
pub fn check_continuity_proxy<S: RiskStatistic + ?Sized>(
    stat: &S,
    cfg: &CheckConfig,
) -> Result<AxiomReport> {
    run(AxiomId::A4Proxy, stat, cfg, None, |s| {
        let x = s.vector();
        let d = s.direction();
        let h = s.pick(&[1e-2, 1e-4, 1e-6]);
        Inputs::default()
            .vector("X", x)
            .vector("d", d)
            .scalar("h", h)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashSubadditivityReport {
    /// `R(X + z1 1) + z1 ≤ R(X + z2 1) + z2` for `z1 ≤ z2`.
    pub pair: AxiomReport,
    /// `R(X + z1) ≥ R(X) - z` for `z ≥ 0`.
    pub left: AxiomReport,
    /// `R(X - z1) ≤ R(X) + z` for `z ≥ 0`.
    pub right: AxiomReport,
    /// The pair verdict equals the conjunction of the one-sided verdicts.
    pub consistent: bool,
}

impl CashSubadditivityReport {
    pub fn passed(&self) -> bool {
        self.pair.passed() && self.left.passed() && self.right.passed()
    }

    pub fn reports(&self) -> [&AxiomReport; 3] {
        [&self.pair, &self.left, &self.right]
    }
}

/// A5 in its pair form and both one-sided forms.
pub fn check_cash_subadditivity<S: RiskStatistic + ?Sized>(
    stat: &S,
    cfg: &CheckConfig,
) -> Result<CashSubadditivityReport> {
    let pair = run(AxiomId::A5, stat, cfg, None, |s| {
        let x = s.vector();
        let (a, b) = (s.signed_shift(), s.signed_shift());
        Inputs::default()
            .vector("X", x)
            .scalar("z1", a.min(b))
            .scalar("z2", a.max(b))
    })?;
    let left = run(AxiomId::A5Left, stat, cfg, None, sample_nonneg_shift)?;
    let right = run(AxiomId::A5Right, stat, cfg, None, sample_nonneg_shift)?;
    let consistent = pair.passed() == (left.passed() && right.passed());
    Ok(CashSubadditivityReport {
        pair,
        left,
        right,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossBasedReport {
    pub b1: AxiomReport,
    pub b2: AxiomReport,
    pub b3: AxiomReport,
    pub b4: AxiomReport,
    /// `ρ((1-ε)X - z1) ≤ (1-ε)ρ(X) + z`, one report per ε.
    pub epsilon_chain: Vec<AxiomReport>,
    /// `ρ(X - z1) ≤ ρ(X) + z`.
    pub direct: AxiomReport,
}

impl LossBasedReport {
    pub fn reports(&self) -> Vec<&AxiomReport> {
        let mut out = vec![&self.b1, &self.b2, &self.b3, &self.b4];
        out.extend(&self.epsilon_chain);
        out.push(&self.direct);
        out
    }

    pub fn passed(&self) -> bool {
        self.reports().iter().all(|r| r.passed())
    }
}

/// The cash-loss normalization grid `a ∈ {0, 0.5, ..., 10}`.
pub fn normalization_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 * 0.5).collect()
}

/// B1–B4 and the implication "loss-based ⇒ cash sub-additive", first through
/// the ε-sequence and then directly.
pub fn check_loss_based<S: RiskStatistic + ?Sized>(
    stat: &S,
    cfg: &CheckConfig,
) -> Result<LossBasedReport> {
    cfg.validate()?;
    let dim = cfg.resolve_dim(stat);
    let b1_cases = normalization_grid()
        .into_iter()
        .map(|a| Inputs::default().vector("X", vec![-a; dim]).scalar("a", a))
        .collect();
    let b1 = cfg
        .spec(AxiomId::B1, dim, Form::Identity, None)
        .run_fixed(b1_cases, |inputs| measure(AxiomId::B1, stat, inputs, None))?;
    let b2 = run(AxiomId::B2, stat, cfg, None, sample_ordered_pair)?;
    let b3 = run(AxiomId::B3, stat, cfg, None, |s| {
        Inputs::default().vector("X", s.vector())
    })?;
    let b4 = run(AxiomId::B4, stat, cfg, None, |s| sample_mixture(s, true))?;
    let epsilon_chain = EPSILON_SEQUENCE
        .iter()
        .map(|&eps| {
            run(
                AxiomId::LossImpliesCashSubadditivity,
                stat,
                cfg,
                Some(eps),
                sample_nonneg_shift,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let direct = run(
        AxiomId::LossImpliesCashSubadditivity,
        stat,
        cfg,
        None,
        sample_nonneg_shift,
    )?;
    Ok(LossBasedReport {
        b1,
        b2,
        b3,
        b4,
        epsilon_chain,
        direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DiscountVector;
    use crate::statistic::{FnStatistic, RiskStatisticSpec};

    fn quick(trials: usize) -> CheckConfig {
        CheckConfig {
            trials,
            seed: 11,
            ..CheckConfig::default()
        }
    }

    fn discounted_half() -> RiskStatisticSpec {
        RiskStatisticSpec::discounted(
            RiskStatisticSpec::worst_case(),
            DiscountVector::new(vec![0.5, 1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn cash_additivity_examples() {
        let entropic = RiskStatisticSpec::entropic(1.0, vec![0.5, 0.5]).unwrap();
        assert!(check_cash_additivity(&entropic, &quick(10_000))
            .unwrap()
            .passed());
        assert!(
            check_cash_additivity(&RiskStatisticSpec::worst_case(), &quick(2_000))
                .unwrap()
                .passed()
        );

        let report = check_cash_additivity(&discounted_half(), &quick(2_000)).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.counterexample.is_some());
        // the documented witness
        let witness = Inputs::default()
            .vector("X", vec![0.0, 0.0])
            .scalar("b", 1.0);
        let sides = measure(AxiomId::A1, &discounted_half(), &witness, None).unwrap();
        assert_eq!((sides.lhs, sides.rhs), (-0.5, -1.0));
    }

    #[test]
    fn monotonicity_examples() {
        assert!(
            check_monotonicity(&RiskStatisticSpec::worst_case(), &quick(2_000))
                .unwrap()
                .passed()
        );
        let lb = RiskStatisticSpec::loss_based(vec![0.5, 0.5]).unwrap();
        assert!(check_monotonicity(&lb, &quick(2_000)).unwrap().passed());
        let increasing = FnStatistic::new(|x: &[f64]| x.iter().sum());
        let report = check_monotonicity(&increasing, &quick(1_000)).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn convexity_examples() {
        let entropic = RiskStatisticSpec::entropic(1.0, vec![0.5, 0.5]).unwrap();
        assert!(check_convexity(&entropic, &quick(5_000)).unwrap().passed());
        let linear = RiskStatisticSpec::neg_expectation(vec![0.25, 0.75]).unwrap();
        let report = check_convexity(&linear, &quick(5_000)).unwrap();
        assert!(report.passed());
        assert!(report.max_violation.abs() < 1e-12);

        let concave = FnStatistic::new(|x: &[f64]| {
            let m = x.iter().copied().fold(f64::INFINITY, f64::min);
            -(m * m)
        });
        let cfg = CheckConfig {
            center: 5.5,
            box_half_width: 4.5,
            ..quick(1_000)
        };
        let report = check_convexity(&concave, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let cx = report.counterexample.as_ref().unwrap();
        assert!(cx
            .inputs
            .get_vector("X")
            .unwrap()
            .iter()
            .all(|v| (1.0..=10.0).contains(v)));
    }

    #[test]
    fn cash_subadditivity_examples() {
        let report = check_cash_subadditivity(&discounted_half(), &quick(5_000)).unwrap();
        assert!(report.passed() && report.consistent);

        let scaled = RiskStatisticSpec::scaled_worst_case(2.0).unwrap();
        let report = check_cash_subadditivity(&scaled, &quick(1_000)).unwrap();
        assert!(report.reports().iter().all(|r| !r.passed()));
        assert!(report.consistent);

        let linear = RiskStatisticSpec::neg_expectation(vec![0.5, 0.5]).unwrap();
        let report = check_cash_subadditivity(&linear, &quick(5_000)).unwrap();
        assert!(report.passed());
        assert!(report.pair.max_violation.abs() < 1e-12);
    }

    #[test]
    fn loss_based_examples() {
        let lb = RiskStatisticSpec::loss_based(vec![0.5, 0.5]).unwrap();
        let report = check_loss_based(&lb, &quick(2_000)).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.b1.trials, 21);
        assert_eq!(report.b1.max_violation, 0.0);
        assert_eq!(report.epsilon_chain.len(), 4);

        let wc = RiskStatisticSpec::worst_case();
        let report = check_loss_based(&wc, &quick(2_000)).unwrap();
        assert!(report.b1.passed());
        assert!(!report.b3.passed());
        let b3_at_ones = measure(
            AxiomId::B3,
            &wc,
            &Inputs::default().vector("X", vec![1.0, 1.0]),
            None,
        )
        .unwrap();
        assert_eq!((b3_at_ones.lhs, b3_at_ones.rhs), (-1.0, 0.0));
    }

    #[test]
    fn continuity_proxy_passes_for_catalog() {
        for spec in [
            RiskStatisticSpec::worst_case(),
            RiskStatisticSpec::entropic(2.0, vec![0.3, 0.7]).unwrap(),
            discounted_half(),
        ] {
            assert!(check_continuity_proxy(&spec, &quick(2_000))
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn failures_replay() {
        let scaled = RiskStatisticSpec::scaled_worst_case(2.0).unwrap();
        let report = check_cash_subadditivity(&scaled, &quick(500)).unwrap();
        for r in report.reports() {
            let v = replay(r, &scaled).unwrap().unwrap();
            assert_eq!(v, r.max_violation);
            assert!(v > r.tolerance);
        }
        let pass = check_monotonicity(&scaled, &quick(100)).unwrap();
        assert_eq!(replay(&pass, &scaled).unwrap(), None);
    }

    #[test]
    fn reports_are_reproducible_and_seed_dependent() {
        let scaled = RiskStatisticSpec::scaled_worst_case(2.0).unwrap();
        let a = check_cash_additivity(&scaled, &quick(3_000)).unwrap();
        let b = check_cash_additivity(&scaled, &quick(3_000)).unwrap();
        assert_eq!(a, b);
        let c = check_cash_additivity(
            &scaled,
            &CheckConfig {
                seed: 12,
                ..quick(3_000)
            },
        )
        .unwrap();
        assert_ne!(a.counterexample, c.counterexample);
    }

    #[test]
    fn config_validation() {
        let wc = RiskStatisticSpec::worst_case();
        for cfg in [
            CheckConfig {
                trials: 0,
                ..CheckConfig::default()
            },
            CheckConfig {
                tol: 0.0,
                ..CheckConfig::default()
            },
            CheckConfig {
                box_half_width: -1.0,
                ..CheckConfig::default()
            },
            CheckConfig {
                dim: 0,
                ..CheckConfig::default()
            },
        ] {
            assert!(check_cash_additivity(&wc, &cfg).is_err());
        }
    }

    #[test]
    fn ids_render_like_reports() {
        assert_eq!(AxiomId::A5Left.to_string(), "A5-left");
        assert_eq!(AxiomId::LossImpliesCashSubadditivity.to_string(), "LB⇒CSA");
    }
}
