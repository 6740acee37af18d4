//! Discounting a cash additive statistic: A1 breaks, A5 survives.
//!
//! cargo run --example discounted_spot

use cashsub::axioms::{check_cash_additivity, check_cash_subadditivity, CheckConfig};
use cashsub::{DiscountVector, RiskStatisticSpec, ScenarioVector};

pub fn main() {
    let d = DiscountVector::new(vec![0.95, 0.8, 0.6]).unwrap();
    let spec = RiskStatisticSpec::discounted(
        RiskStatisticSpec::entropic(0.5, vec![0.2, 0.5, 0.3]).unwrap(),
        d,
    )
    .unwrap();
    let x = ScenarioVector::new(vec![1.0, -2.0, 0.5]).unwrap();
    for z in [0.0, 1.0, 2.0, 4.0] {
        let shifted = spec
            .eval(&x.shifted(cashsub::CashShift::new(z).unwrap()))
            .unwrap();
        println!("z = {z}: R(X+z) + z = {:.6}", shifted + z);
    }

    let cfg = CheckConfig {
        trials: 2_000,
        dim: 3,
        ..CheckConfig::default()
    };
    let a1 = check_cash_additivity(&spec, &cfg).unwrap();
    let a5 = check_cash_subadditivity(&spec, &cfg).unwrap();
    println!(
        "A1 {:?} (max violation {:.4})",
        a1.verdict, a1.max_violation
    );
    println!(
        "A5 pair {:?}, left {:?}, right {:?}",
        a5.pair.verdict, a5.left.verdict, a5.right.verdict
    );
}
