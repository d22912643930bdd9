use painleve_core::report::Status;
use painleve_core::suite::{run_suite, Suite, SuiteConfig};

#[test]
fn full_random_suite_has_no_failures() {
    let report = run_suite(&SuiteConfig::all_random(0, 8), 4);
    for c in &report.checks {
        if c.status != Status::Pass {
            println!("{}", c.summary());
        }
    }
    assert!(!report.any_failed());
    assert!(report.count(Status::Pass) > 100);
    let names: Vec<_> = report.checks.iter().map(|c| c.check.clone()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn suite_names_parse() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("bogus".parse::<Suite>().is_err());
}
