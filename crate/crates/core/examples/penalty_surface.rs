//! Penalty surfaces over the sub-probability lattice, saved as CSV.
//!
//! cargo run --example penalty_surface

use cashsub::duality::{penalty_surface, PenaltyMode, SearchConfig, WeightMode};
use cashsub::RiskStatisticSpec;

pub fn main() {
    let spec = RiskStatisticSpec::entropic(1.0, vec![0.5, 0.5]).unwrap();
    let search = SearchConfig::default();
    for mode in [PenaltyMode::AcceptanceSet, PenaltyMode::Conjugate] {
        let s = penalty_surface(&spec, 2, 0.25, WeightMode::SubProbability, mode, &search).unwrap();
        println!(
            "{mode}: {} points, {} on the search boundary",
            s.entries.len(),
            s.boundary_count()
        );
        print!("{}", s.to_csv_string());
    }

    let dir = std::env::temp_dir().join("cashsub-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("entropic.penalty.csv");
    let s = penalty_surface(
        &spec,
        2,
        0.1,
        WeightMode::Simplex,
        PenaltyMode::Conjugate,
        &search,
    )
    .unwrap();
    s.save(&path).unwrap();
    println!(
        "saved {} simplex points to {}",
        s.entries.len(),
        path.display()
    );
}
