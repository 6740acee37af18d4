//! Loss-based statistics: only the negative part of a position matters.
//!
//! cargo run --example loss_based

use cashsub::axioms::{check_loss_based, CheckConfig};
use cashsub::{clip_losses, RiskStatisticSpec, ScenarioVector};

pub fn main() {
    let spec = RiskStatisticSpec::loss_based(vec![0.25, 0.25, 0.5]).unwrap();
    let x = ScenarioVector::new(vec![3.0, -1.0, -2.0]).unwrap();
    let clipped = clip_losses(&x);
    println!("X = {:?}, X ∧ 0 = {:?}", x.as_slice(), clipped.as_slice());
    println!(
        "R(X) = {}, R(X ∧ 0) = {}",
        spec.eval(&x).unwrap(),
        spec.eval(&clipped).unwrap()
    );

    let cfg = CheckConfig {
        trials: 2_000,
        dim: 3,
        ..CheckConfig::default()
    };
    let report = check_loss_based(&spec, &cfg).unwrap();
    for r in report.reports() {
        let eps = r
            .epsilon
            .map(|e| format!(" (epsilon {e})"))
            .unwrap_or_default();
        println!("{}{eps}: {:?}", r.axiom, r.verdict);
    }
}
