use painleve_core::report::CheckMode;
use painleve_core::systems::{make_system, Family};
use painleve_core::transforms::{
    alternative_d4_generators, equivalence, equivalence_labels, generators, verify_equivalence, verify_order,
    verify_symmetry, verify_symplectic,
};

#[test]
fn every_generator_is_an_exact_symmetry() {
    let mut failures = Vec::new();
    for f in Family::WEYL {
        let sys = make_system(f);
        for g in generators(f) {
            let r = verify_symmetry(&g, &sys, CheckMode::Exact);
            println!("{}", r.summary());
            if !r.passed() {
                failures.push(r.summary());
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn generators_have_their_declared_order() {
    for f in Family::WEYL {
        for g in generators(f) {
            let r = verify_order(&g, CheckMode::Exact);
            assert!(r.passed(), "{}", r.summary());
        }
    }
}

#[test]
fn equivalences_hold() {
    for label in equivalence_labels() {
        let e = equivalence(&label).unwrap();
        let r = verify_equivalence(&e.map, &make_system(e.source), &make_system(e.target), CheckMode::Exact);
        println!("{}", r.summary());
        assert!(r.passed(), "{}", r.summary());
        let s = verify_symplectic(&e.map);
        assert!(s.passed(), "{}", s.summary());
    }
}

#[test]
fn alternative_generators_against_d4() {
    let sys = make_system(Family::D4);
    for g in alternative_d4_generators() {
        println!("{}", verify_symmetry(&g, &sys, CheckMode::Exact).summary());
    }
}
