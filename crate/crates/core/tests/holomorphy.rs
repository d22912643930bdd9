use painleve_core::holomorphy::{probe_assumption_a, verify_chart_polynomiality, ChartSet};
use painleve_core::systems::{make_system, Family};

#[test]
fn every_family_is_polynomial_in_its_charts() {
    let mut failed = Vec::new();
    for f in [Family::D4, Family::B4First, Family::B4Second, Family::D52] {
        for r in verify_chart_polynomiality(&make_system(f), ChartSet::Family(f)) {
            println!("{}", r.summary());
            if !r.passed() {
                failed.push(r.summary());
            }
        }
    }
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn probe_runs_on_every_family() {
    for f in Family::WEYL {
        for r in probe_assumption_a(&make_system(f)) {
            println!("{}", r.summary());
        }
    }
}
