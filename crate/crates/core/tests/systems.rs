use painleve_core::algebra::{v, ParseError, RationalExpression, Var};
use painleve_core::systems::{check_field_matches_display, displayed_field, first_integral_search, span_equal};
use painleve_core::systems::{degree_report, make_system, Family, HamiltonianSystem, ParameterVector};

fn parse(s: &str) -> RationalExpression {
    s.parse().unwrap_or_else(|e: ParseError| panic!("{s}: {e}"))
}

fn toy() -> HamiltonianSystem {
    HamiltonianSystem::new(Family::PIII, "toy", v(Var::P), vec![(Var::Q, Var::P)], ParameterVector::unconstrained(vec![])).unwrap()
}

#[test]
fn displayed_systems_match_the_hamiltonians() {
    let mut checked = 0;
    for f in Family::ALL {
        if let Some(display) = displayed_field(f) {
            let system = make_system(f);
            assert_eq!(check_field_matches_display(&system, &display), None, "{}", f.name());
            checked += display.vars.len();
        }
    }
    assert_eq!(checked, 16);
}

#[test]
fn observed_phase_degrees() {
    let got: Vec<(Family, u32)> = degree_report();
    assert_eq!(&got[..4], &[(Family::D4, 4), (Family::B4First, 4), (Family::B4Second, 4), (Family::D52, 6)]);
}

#[test]
fn toy_system_integrals_are_one_p_and_q_minus_t() {
    let basis = first_integral_search(&toy(), 1, (0, 1)).unwrap();
    let expected = vec![parse("1"), parse("p"), parse("q - t")];
    assert_eq!(basis.len(), 3);
    assert!(span_equal(&basis, &expected).unwrap());
}

#[test]
fn degree_zero_gives_constants_only() {
    for f in [Family::D4, Family::B4First] {
        let basis = first_integral_search(&make_system(f), 0, (-1, 1)).unwrap();
        assert!(span_equal(&basis, &[RationalExpression::one()]).unwrap(), "{}", f.name());
    }
}

#[test]
fn d4_has_no_nonconstant_integral_of_degree_two() {
    let basis = first_integral_search(&make_system(Family::D4), 2, (-2, 2)).unwrap();
    assert!(span_equal(&basis, &[RationalExpression::one()]).unwrap(), "{basis:?}");
}

#[test]
fn every_generator_preserves_its_constraint() {
    for f in Family::WEYL {
        for g in painleve_core::transforms::generators(f) {
            assert!(g.preserves_constraint(), "{} {}", f.name(), g.label);
        }
    }
}
