//! Scenario-based risk statistics with time value of money.
//!
//! A risk statistic maps a vector of scenario outcomes `X ∈ ℝ^N` to a capital
//! requirement. This crate provides
//!
//! * a catalog of concrete statistics, including discounted ("spot")
//!   statistics and loss-based statistics ([`statistic`]);
//! * a seeded, parallel property checker for cash additivity, monotonicity,
//!   convexity, cash sub-additivity and the loss-based axioms ([`axioms`]);
//! * the two-branch enlarged space on which every cash sub-additive statistic
//!   becomes cash additive ([`embedding`]);
//! * numerical minimal penalty functions over sub-probability weights and the
//!   reconstruction `R(X) = sup_P { Σ P_i (-X_i) - α(P) }` ([`duality`]);
//! * the `cashsub` command-line front end ([`cli`]).

pub mod axioms;
pub mod cli;
pub mod duality;
pub mod embedding;
pub mod error;
pub mod scenario;
pub mod statistic;

pub use error::{Error, Result};
pub use scenario::{clip_losses, CashShift, DiscountVector, ScenarioVector};
pub use statistic::{
    eval, Axiom, FnStatistic, RiskStatistic, RiskStatisticSpec, Statistic, StatisticKind,
};
