//! Box-constrained maximization of `f(X) = Σ P_i (-X_i) - R(X)`.
//!
//! A uniform grid over `[-B, B]^N` picks a starting point, then a pattern
//! search refines it along `±e_i`, `±1` and `±(e_i - e_j)` with a shrinking
//! step. `f` is concave whenever `R` is convex, and the acceptance set
//! `{R ≤ 0}` is convex, so the refinement stays in one basin. In the
//! constrained search a rejected move is pulled back to `{R ≤ 0}` along the
//! cash direction `1`, which lets the search slide along a curved boundary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{pairing_slice, SubProbabilityWeight, ACCEPTANCE_TOL};
use crate::error::{Error, Result};
use crate::scenario::check_dim;
use crate::statistic::RiskStatistic;

const TIE: f64 = 1e-12;
const MAX_MOVES_PER_ROUND: usize = 10_000;
const PROJECTION_ITERS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Half-width `B` of the search box `[-B, B]^N`.
    pub box_half_width: f64,
    /// Grid points per axis, endpoints included.
    pub grid_points: usize,
    pub refine_rounds: usize,
    /// Step multiplier between refinement rounds.
    pub shrink: f64,
    /// Cap on the coarse grid size; points per axis shrink to fit.
    pub max_grid_evals: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            box_half_width: 10.0,
            grid_points: 41,
            refine_rounds: 6,
            shrink: 0.1,
            max_grid_evals: 2_000_000,
        }
    }
}

impl SearchConfig {
    pub fn with_box(box_half_width: f64) -> Self {
        Self {
            box_half_width,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "search box must be positive, got {}",
                self.box_half_width
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 grid points per axis".into(),
            ));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        Ok(())
    }

    fn points_per_axis(&self, dim: usize) -> usize {
        let mut m = self.grid_points;
        while m > 2 && (m as f64).powi(dim as i32) > self.max_grid_evals as f64 {
            m -= 1;
        }
        m
    }
}

/// Which penalty to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PenaltyMode {
    /// `sup { Σ P_i (-X_i) - R(X) : R(X) ≤ 0 }`.
    #[serde(rename = "paper-formula", alias = "paper")]
    AcceptanceSet,
    /// `sup { Σ P_i (-X_i) - R(X) }` over the whole box.
    #[serde(rename = "unconstrained-conjugate", alias = "conjugate")]
    Conjugate,
}

impl fmt::Display for PenaltyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyMode::AcceptanceSet => "paper-formula",
            PenaltyMode::Conjugate => "unconstrained-conjugate",
        })
    }
}

impl FromStr for PenaltyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper-formula" => Ok(PenaltyMode::AcceptanceSet),
            "conjugate" | "unconstrained-conjugate" => Ok(PenaltyMode::Conjugate),
            other => Err(Error::InvalidParameter(format!(
                "unknown penalty mode {other:?}"
            ))),
        }
    }
}

/// Result of one penalty search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyValue {
    pub value: f64,
    /// The maximizer sits on the box boundary, so `value` is only a lower
    /// bound and the true supremum may be `+∞`.
    pub on_boundary: bool,
    pub argmax: Vec<f64>,
}

struct Point {
    x: Vec<f64>,
    f: f64,
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Objective<'a, S: ?Sized> {
    stat: &'a S,
    weights: &'a [f64],
    constrained: bool,
}

impl<S: RiskStatistic + ?Sized> Objective<'_, S> {
    /// `None` outside the acceptance set when constrained.
    fn at(&self, x: &[f64]) -> Result<Option<f64>> {
        let r = self.stat.evaluate(x)?;
        if self.constrained && r > ACCEPTANCE_TOL {
            return Ok(None);
        }
        Ok(Some(pairing_slice(self.weights, x) - r))
    }

    /// Like [`Self::at`], but an unacceptable `x` is first moved to the
    /// acceptance boundary along `x + t1`, `t ≥ 0`, staying inside the box.
    fn at_or_projected(&self, mut x: Vec<f64>, b: f64) -> Result<Option<(Vec<f64>, f64)>> {
        if let Some(f) = self.at(&x)? {
            return Ok(Some((x, f)));
        }
        let shifted =
            |x: &[f64], t: f64| -> Vec<f64> { x.iter().map(|v| (v + t).min(b)).collect() };
        let mut hi = b - x.iter().copied().fold(f64::INFINITY, f64::min);
        if hi <= 0.0 || self.stat.evaluate(&shifted(&x, hi))? > ACCEPTANCE_TOL {
            return Ok(None);
        }
        let mut lo = 0.0;
        for _ in 0..PROJECTION_ITERS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.stat.evaluate(&shifted(&x, mid))? <= ACCEPTANCE_TOL {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        x = shifted(&x, hi);
        Ok(self.at(&x)?.map(|f| (x, f)))
    }
}

fn directions(dim: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    let mut push = |d: Vec<f64>| {
        dirs.push(d.iter().map(|v| -v).collect());
        dirs.push(d);
    };
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        push(e);
    }
    if dim > 1 {
        push(vec![1.0; dim]);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e[j] = -1.0;
            push(e);
        }
    }
    dirs
}

fn grid_start<S: RiskStatistic + ?Sized>(
    obj: &Objective<'_, S>,
    dim: usize,
    cfg: &SearchConfig,
) -> Result<Option<(Point, f64)>> {
    let m = cfg.points_per_axis(dim);
    let b = cfg.box_half_width;
    let coord = |k: usize| -b + 2.0 * b * k as f64 / (m - 1) as f64;
    let mut idx = vec![0usize; dim];
    let mut x: Vec<f64> = vec![coord(0); dim];
    let mut best: Option<(Point, f64)> = None;
    loop {
        if let Some(f) = obj.at(&x)? {
            let norm = norm_inf(&x);
            let replace = match &best {
                None => true,
                Some((p, best_norm)) => f > p.f + TIE || (f >= p.f - TIE && norm < *best_norm),
            };
            if replace {
                best = Some((Point { x: x.clone(), f }, norm));
            }
        }
        // odometer, last axis fastest
        let mut axis = dim;
        loop {
            if axis == 0 {
                return Ok(best.map(|(p, _)| (p, 2.0 * b / (m - 1) as f64)));
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < m {
                x[axis] = coord(idx[axis]);
                break;
            }
            idx[axis] = 0;
            x[axis] = coord(0);
        }
    }
}

fn refine<S: RiskStatistic + ?Sized>(
    obj: &Objective<'_, S>,
    mut point: Point,
    spacing: f64,
    cfg: &SearchConfig,
) -> Result<Point> {
    let b = cfg.box_half_width;
    let dirs = directions(point.x.len());
    let mut step = spacing;
    for _ in 0..cfg.refine_rounds {
        for _ in 0..MAX_MOVES_PER_ROUND {
            let mut improved = false;
            for d in &dirs {
                let cand: Vec<f64> = point
                    .x
                    .iter()
                    .zip(d)
                    .map(|(x, d)| (x + step * d).clamp(-b, b))
                    .collect();
                if cand == point.x {
                    continue;
                }
                if let Some((cand, f)) = obj.at_or_projected(cand, b)? {
                    if f > point.f {
                        point = Point { x: cand, f };
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= cfg.shrink;
    }
    Ok(point)
}

fn maximize<S: RiskStatistic + ?Sized>(
    stat: &S,
    p: &SubProbabilityWeight,
    cfg: &SearchConfig,
    constrained: bool,
) -> Result<PenaltyValue> {
    cfg.validate()?;
    let dim = p.dim();
    if let Some(d) = stat.dimension() {
        check_dim(d, dim)?;
    }
    let obj = Objective {
        stat,
        weights: p.as_slice(),
        constrained,
    };
    let (start, spacing) =
        grid_start(&obj, dim, cfg)?.ok_or(Error::NoFeasiblePoint(cfg.box_half_width))?;
    let best = refine(&obj, start, spacing, cfg)?;
    let edge = cfg.box_half_width * (1.0 - 1e-12);
    Ok(PenaltyValue {
        value: best.f,
        on_boundary: best.x.iter().any(|v| v.abs() >= edge),
        argmax: best.x,
    })
}

/// Penalty over the acceptance set:
/// `α(P) = sup { Σ P_i (-X_i) - R(X) : R(X) ≤ 0, X ∈ [-B, B]^N }`.
pub fn penalty_min<S: RiskStatistic + ?Sized>(
    stat: &S,
    p: &SubProbabilityWeight,
    cfg: &SearchConfig,
) -> Result<PenaltyValue> {
    maximize(stat, p, cfg, true)
}

/// Convex conjugate restricted to the box:
/// `α*(P) = sup { Σ P_i (-X_i) - R(X) : X ∈ [-B, B]^N }`.
///
/// Every point the acceptance-set search visits is also admissible here, so
/// the larger of the two searches is returned.
pub fn conjugate_unconstrained<S: RiskStatistic + ?Sized>(
    stat: &S,
    p: &SubProbabilityWeight,
    cfg: &SearchConfig,
) -> Result<PenaltyValue> {
    let free = maximize(stat, p, cfg, false)?;
    match maximize(stat, p, cfg, true) {
        Ok(constrained) if constrained.value > free.value => Ok(constrained),
        Ok(_) | Err(Error::NoFeasiblePoint(_)) => Ok(free),
        Err(e) => Err(e),
    }
}

pub fn penalty<S: RiskStatistic + ?Sized>(
    stat: &S,
    p: &SubProbabilityWeight,
    mode: PenaltyMode,
    cfg: &SearchConfig,
) -> Result<PenaltyValue> {
    match mode {
        PenaltyMode::AcceptanceSet => penalty_min(stat, p, cfg),
        PenaltyMode::Conjugate => conjugate_unconstrained(stat, p, cfg),
    }
}
