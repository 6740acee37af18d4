//! The extended-space lift turns a cash sub-additive statistic into a cash
//! additive one.
//!
//! cargo run --example lift

use cashsub::axioms::CheckConfig;
use cashsub::embedding::{embed, lift_eval, verify_lift, ExtendedVector};
use cashsub::{DiscountVector, RiskStatisticSpec, ScenarioVector};

pub fn main() {
    let spec = RiskStatisticSpec::discounted(
        RiskStatisticSpec::worst_case(),
        DiscountVector::new(vec![0.5, 1.0]).unwrap(),
    )
    .unwrap();
    let x = ScenarioVector::new(vec![-1.0, 2.0]).unwrap();
    println!("R(X) = {}", spec.eval(&x).unwrap());
    println!("lift(embed X) = {}", lift_eval(&spec, &embed(&x)).unwrap());
    for a in [0.0, 1.0, 3.0] {
        let xa = ExtendedVector::new(x.clone(), a).unwrap();
        println!("lift(X, cash {a}) = {}", lift_eval(&spec, &xa).unwrap());
    }

    let cfg = CheckConfig {
        trials: 2_000,
        ..CheckConfig::default()
    };
    for spec in [spec, RiskStatisticSpec::scaled_worst_case(2.0).unwrap()] {
        let report = verify_lift(&spec, &cfg).unwrap();
        let verdicts: Vec<String> = report
            .reports()
            .iter()
            .map(|r| format!("{} {:?}", r.axiom, r.verdict))
            .collect();
        println!("{:?}: {}", spec.kind(), verdicts.join(", "));
    }
}
