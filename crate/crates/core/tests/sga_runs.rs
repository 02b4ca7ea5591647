use std::path::PathBuf;

use mrga_core::ga::{run_sga, tour_length};
use mrga_core::oracle::held_karp;
use mrga_core::tsplib::load_instance;
use mrga_core::SgaConfig;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn br17_full_budget_lands_within_five_percent() {
    let inst = load_instance(data("br17.atsp")).unwrap();
    let optimum = held_karp(&inst).unwrap().optimum_length;
    let config = SgaConfig::default();
    assert_eq!(config.max_generations, 10_000);
    let report = run_sga(&inst, &config, 17).unwrap();
    assert_eq!(report.generations, 10_000);
    assert_eq!(tour_length(&report.best_tour, &inst), report.best_length);
    assert!(
        report.best_length as f64 <= optimum as f64 * 1.05,
        "best {} vs optimum {optimum}",
        report.best_length
    );
    assert!(report.trajectory_is_monotone());
}
