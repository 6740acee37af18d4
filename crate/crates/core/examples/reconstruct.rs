//! Rebuilding R from its penalty surface and measuring the gap.
//!
//! cargo run --example reconstruct

use cashsub::duality::{
    duality_gap_report, penalty_surface, reconstruct_argmax, GapReportConfig, PenaltyMode,
    SearchConfig, WeightMode,
};
use cashsub::{RiskStatisticSpec, ScenarioVector};

pub fn main() {
    let search = SearchConfig::default();
    let wc = RiskStatisticSpec::worst_case();
    let s = penalty_surface(
        &wc,
        2,
        0.05,
        WeightMode::SubProbability,
        PenaltyMode::AcceptanceSet,
        &search,
    )
    .unwrap();
    let x = ScenarioVector::new(vec![1.5, -0.5]).unwrap();
    let r = reconstruct_argmax(&s, &x).unwrap();
    println!(
        "worst_case at {:?}: R = {}, reconstruct = {} at P = {:?}",
        x.as_slice(),
        wc.eval(&x).unwrap(),
        r.value,
        r.weight.as_slice()
    );

    let ent = RiskStatisticSpec::entropic(1.0, vec![0.5, 0.5]).unwrap();
    for step in [0.2, 0.1] {
        let cfg = GapReportConfig {
            grid_step: step,
            probe_count: 20,
            ..GapReportConfig::default()
        };
        let g = duality_gap_report(&ent, 2, &search, &cfg).unwrap();
        println!(
            "entropic, step {step}: max gap {:.4} (acceptance-set penalty), {:.4} (conjugate)",
            g.max_acceptance_gap, g.max_conjugate_gap
        );
    }
}
