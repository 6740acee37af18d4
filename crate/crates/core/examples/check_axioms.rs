//! Randomized axiom checks with counterexamples.
//!
//! cargo run --example check_axioms

use cashsub::axioms::{
    check_cash_additivity, check_cash_subadditivity, check_continuity_proxy, check_convexity,
    check_monotonicity, replay, CheckConfig,
};
use cashsub::{FnStatistic, RiskStatisticSpec};

pub fn main() {
    let cfg = CheckConfig {
        trials: 2_000,
        seed: 7,
        ..CheckConfig::default()
    };
    for spec in [
        RiskStatisticSpec::entropic(1.0, vec![0.25, 0.75]).unwrap(),
        RiskStatisticSpec::scaled_worst_case(2.0).unwrap(),
    ] {
        println!("{:?}", spec.kind());
        let mut reports = vec![
            check_cash_additivity(&spec, &cfg).unwrap(),
            check_monotonicity(&spec, &cfg).unwrap(),
            check_convexity(&spec, &cfg).unwrap(),
            check_continuity_proxy(&spec, &cfg).unwrap(),
        ];
        reports.extend(
            check_cash_subadditivity(&spec, &cfg)
                .unwrap()
                .reports()
                .into_iter()
                .cloned(),
        );
        for r in &reports {
            println!(
                "  {:<10} {:?}  max violation {:.3e}",
                r.axiom.to_string(),
                r.verdict,
                r.max_violation
            );
            if let Some(v) = replay(r, &spec).unwrap() {
                println!("             replayed counterexample: {v:.6}");
            }
        }
    }

    // any closure can be checked; this one increases with the position
    let sum = FnStatistic::new(|x: &[f64]| x.iter().sum());
    let r = check_monotonicity(&sum, &cfg).unwrap();
    println!("sum fixture A2: {:?}", r.verdict);
    println!(
        "{}",
        serde_json::to_string_pretty(&r.counterexample).unwrap()
    );
}
