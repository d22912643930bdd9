use num_rational::BigRational;
use painleve_core::algebra::{int, Monomial, Point, Polynomial, RationalExpression, Substitution, Var};
use proptest::prelude::*;

const VARS: [Var; 4] = [Var::X, Var::Y, Var::Z, Var::T];

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u16..3, VARS.len()).prop_map(|exps| Monomial::from_pairs(VARS.iter().copied().zip(exps)))
}

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(), -5i64..=5), 0..5)
        .prop_map(|terms| Polynomial::from_terms(terms.into_iter().map(|(m, c)| (m, int(c)))))
}

fn nonzero_poly() -> impl Strategy<Value = Polynomial> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = RationalExpression> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RationalExpression::new(n, d).unwrap())
}

fn point() -> impl Strategy<Value = Point> {
    prop::collection::vec((-7i64..=7, 1i64..=4), VARS.len()).prop_map(|vals| {
        let mut pt = Point::new();
        for (v, (n, d)) in VARS.iter().zip(vals) {
            pt.set(*v, BigRational::new(n.into(), d.into()));
        }
        pt
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(a in rational(), b in rational(), c in rational()) {
        prop_assert!((&(&a * &b) * &c).equals(&(&a * &(&b * &c))));
    }

    #[test]
    fn multiplication_distributes(a in rational(), b in rational(), c in rational()) {
        prop_assert!((&a * &(&b + &c)).equals(&(&(&a * &b) + &(&a * &c))));
    }

    #[test]
    fn subtraction_inverts_addition(a in rational(), b in rational()) {
        prop_assert!((&(&a + &b) - &b).equals(&a));
    }

    #[test]
    fn product_rule(a in rational(), b in rational()) {
        let lhs = (&a * &b).differentiate(Var::X);
        let rhs = &(&a.differentiate(Var::X) * &b) + &(&a * &b.differentiate(Var::X));
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn substitution_commutes_with_evaluation(a in rational(), img in poly(), pt in point()) {
        let sub = Substitution::new().with(Var::X, RationalExpression::from_poly(img.clone()));
        let Ok(substituted) = a.substitute(&sub) else { return Ok(()); };
        let x_value = img.eval(&pt).unwrap();
        let mut moved = pt.clone();
        moved.set(Var::X, x_value);
        if let (Ok(l), Ok(r)) = (substituted.eval(&pt), a.eval(&moved)) { prop_assert_eq!(l, r) }
    }

    #[test]
    fn exact_divide_recovers_the_factor(a in poly(), b in nonzero_poly()) {
        let q = (&a * &b).exact_divide(&b);
        prop_assert_eq!(q, Some(a));
    }

    #[test]
    fn equality_is_an_equivalence(a in rational(), b in rational(), k in nonzero_poly()) {
        prop_assert!(a.equals(&a));
        prop_assert_eq!(a.equals(&b), b.equals(&a));
        let scaled = RationalExpression::new(&a.numerator().clone() * &k, &a.denominator() * &k).unwrap();
        prop_assert!(scaled.equals(&a));
        prop_assert!(a.equals(&scaled));
    }

    #[test]
    fn display_round_trips_through_the_parser(a in rational()) {
        let text = a.to_string();
        let back: RationalExpression = text.parse().unwrap();
        prop_assert!(back.equals(&a), "{} -> {}", text, back);
    }
}
