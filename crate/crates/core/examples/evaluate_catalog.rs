//! Evaluates every catalog statistic on a few positions and round-trips a
//! spec through JSON.
//!
//! cargo run --example evaluate_catalog

use cashsub::{DiscountVector, RiskStatisticSpec, ScenarioVector};

pub fn main() {
    let specs = [
        RiskStatisticSpec::worst_case(),
        RiskStatisticSpec::neg_expectation(vec![0.5, 0.5]).unwrap(),
        RiskStatisticSpec::entropic(2.0, vec![0.5, 0.5]).unwrap(),
        RiskStatisticSpec::discounted(
            RiskStatisticSpec::worst_case(),
            DiscountVector::new(vec![0.9, 0.5]).unwrap(),
        )
        .unwrap(),
        RiskStatisticSpec::loss_based(vec![0.5, 0.5]).unwrap(),
        RiskStatisticSpec::scaled_worst_case(2.0).unwrap(),
    ];
    let positions = [vec![1.0, 2.0], vec![-1.0, 3.0], vec![-2.5, -0.5]];

    println!(
        "{:<18} {:>12} {:>12} {:>12}",
        "kind", "(1,2)", "(-1,3)", "(-2.5,-0.5)"
    );
    for spec in &specs {
        let values: Vec<String> = positions
            .iter()
            .map(|x| {
                format!(
                    "{:>12.6}",
                    spec.eval(&ScenarioVector::new(x.clone()).unwrap()).unwrap()
                )
            })
            .collect();
        println!("{:<18} {}", format!("{:?}", spec.kind()), values.join(" "));
    }

    let json = specs[3].to_json();
    println!("\n{json}");
    assert_eq!(RiskStatisticSpec::from_json(&json).unwrap(), specs[3]);
}
