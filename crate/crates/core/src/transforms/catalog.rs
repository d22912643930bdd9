//! Generators of the symmetry groups and the equivalence maps between families.

use crate::algebra::{RationalExpression, Substitution, Var};
use crate::systems::{make_system, Family};

use super::{BirationalMap, MapError};

fn parse(src: &str) -> RationalExpression {
    src.parse().unwrap_or_else(|e| panic!("catalog entry `{src}`: {e}"))
}

/// Builds a map from textual images. `params` lists the images of the target
/// family's parameter symbols in order.
fn build(label: &str, source: Family, target: Family, vars: &[(Var, &str)], time: &str, params: &[&str]) -> BirationalMap {
    let mut images = Substitution::new();
    for &(v, e) in vars {
        images.insert(v, parse(e));
    }
    if time != "t" {
        images.insert(Var::T, parse(time));
    }
    let symbols = make_system(target).params.symbols().to_vec();
    assert_eq!(symbols.len(), params.len(), "{label}: parameter arity");
    for (s, e) in symbols.into_iter().zip(params) {
        let image = parse(e);
        if image != RationalExpression::var(s) {
            images.insert(s, image);
        }
    }
    BirationalMap::new(label, source, target, images)
}

fn gen(label: &str, family: Family, vars: &[(Var, &str)], time: &str, params: &[&str]) -> BirationalMap {
    build(label, family, family, vars, time, params).with_order(2)
}

const X: Var = Var::X;
const Y: Var = Var::Y;
const Z: Var = Var::Z;
const W: Var = Var::W;

fn d4() -> Vec<BirationalMap> {
    let f = Family::D4;
    vec![
        gen("s0", f, &[(X, "x + alpha0/(y - 1)")], "t", &["-alpha0", "alpha1", "alpha2 + alpha0", "alpha3", "alpha4"]),
        gen("s1", f, &[(X, "x + alpha1/y")], "t", &["alpha0", "-alpha1", "alpha2 + alpha1", "alpha3", "alpha4"]),
        gen(
            "s2",
            f,
            &[(Y, "y - alpha2*z/(x*z - 1)"), (W, "w - alpha2*x/(x*z - 1)")],
            "t",
            &["alpha0 + alpha2", "alpha1 + alpha2", "-alpha2", "alpha3 + alpha2", "alpha4 + alpha2"],
        ),
        gen("s3", f, &[(Z, "z + alpha3/w")], "t", &["alpha0", "alpha1", "alpha2 + alpha3", "-alpha3", "alpha4"]),
        gen("s4", f, &[(Z, "z + alpha4/(w - t)")], "t", &["alpha0", "alpha1", "alpha2 + alpha4", "alpha3", "-alpha4"]),
        gen(
            "pi1",
            f,
            &[(X, "-x"), (Y, "1 - y"), (Z, "-z"), (W, "-w")],
            "-t",
            &["alpha1", "alpha0", "alpha2", "alpha3", "alpha4"],
        ),
        gen("pi2", f, &[(W, "w - t")], "-t", &["alpha0", "alpha1", "alpha2", "alpha4", "alpha3"]),
        gen(
            "pi3",
            f,
            &[(X, "t*z"), (Y, "w/t"), (Z, "x/t"), (W, "t*y")],
            "t",
            &["alpha4", "alpha3", "alpha2", "alpha1", "alpha0"],
        ),
        gen(
            "pi4",
            f,
            &[(X, "-t*z"), (Y, "(t - w)/t"), (Z, "-x/t"), (W, "t - t*y")],
            "t",
            &["alpha3", "alpha4", "alpha2", "alpha0", "alpha1"],
        ),
    ]
}

/// The second representation of the D4(1) reflections, differing from the
/// first only in the middle node.
pub fn alternative_d4_generators() -> Vec<BirationalMap> {
    let f = Family::D4;
    let rename = |g: BirationalMap, label: &str| g.with_label(label);
    let base = d4();
    vec![
        rename(base[0].clone(), "w0"),
        rename(base[1].clone(), "w1"),
        gen(
            "w2",
            f,
            &[(Y, "y - alpha2/(x - z)"), (W, "w + alpha2/(x - z)")],
            "t",
            &["alpha0 + alpha2", "alpha1 + alpha2", "-alpha2", "alpha3 + alpha2", "alpha4 + alpha2"],
        ),
        rename(base[3].clone(), "w3"),
        rename(base[4].clone(), "w4"),
    ]
}

fn b4_first() -> Vec<BirationalMap> {
    let f = Family::B4First;
    vec![
        gen(
            "s0",
            f,
            &[(X, "-x"), (Y, "-y + 2*alpha0/x - 1/x^2"), (Z, "-z"), (W, "-w")],
            "-t",
            &["-alpha0", "alpha1 + 2*alpha0", "alpha2", "alpha3", "alpha4"],
        ),
        gen("s1", f, &[(X, "x + alpha1/y")], "t", &["alpha0 + alpha1", "-alpha1", "alpha2 + alpha1", "alpha3", "alpha4"]),
        gen(
            "s2",
            f,
            &[(Y, "y - alpha2/(x - z)"), (W, "w + alpha2/(x - z)")],
            "t",
            &["alpha0", "alpha1 + alpha2", "-alpha2", "alpha3 + alpha2", "alpha4 + alpha2"],
        ),
        gen("s3", f, &[(Z, "z + alpha3/w")], "t", &["alpha0", "alpha1", "alpha2 + alpha3", "-alpha3", "alpha4"]),
        gen("s4", f, &[(Z, "z + alpha4/(w - t)")], "t", &["alpha0", "alpha1", "alpha2 + alpha4", "alpha3", "-alpha4"]),
        gen("phi", f, &[(W, "w - t")], "-t", &["alpha0", "alpha1", "alpha2", "alpha4", "alpha3"]),
    ]
}

fn b4_second() -> Vec<BirationalMap> {
    let f = Family::B4Second;
    vec![
        gen("s0", f, &[(X, "x + alpha0/(y - 1)")], "t", &["-alpha0", "alpha1", "alpha2 + alpha0", "alpha3", "alpha4"]),
        gen("s1", f, &[(X, "x + alpha1/y")], "t", &["alpha0", "-alpha1", "alpha2 + alpha1", "alpha3", "alpha4"]),
        gen(
            "s2",
            f,
            &[(Y, "y - alpha2/(x - z)"), (W, "w + alpha2/(x - z)")],
            "t",
            &["alpha0 + alpha2", "alpha1 + alpha2", "-alpha2", "alpha3 + alpha2", "alpha4"],
        ),
        gen("s3", f, &[(Z, "z + alpha3/w")], "t", &["alpha0", "alpha1", "alpha2 + alpha3", "-alpha3", "alpha4 + alpha3"]),
        gen(
            "s4",
            f,
            &[(W, "w - 2*alpha4/z + t/z^2")],
            "-t",
            &["alpha0", "alpha1", "alpha2", "alpha3 + 2*alpha4", "-alpha4"],
        ),
        gen(
            "varphi",
            f,
            &[(X, "-x"), (Y, "1 - y"), (Z, "-z"), (W, "-w")],
            "-t",
            &["alpha1", "alpha0", "alpha2", "alpha3", "alpha4"],
        ),
    ]
}

fn d52() -> Vec<BirationalMap> {
    let f = Family::D52;
    vec![
        gen(
            "s0",
            f,
            &[(X, "-x"), (Y, "-y + 2*alpha0/x - 1/x^2"), (Z, "-z"), (W, "-w")],
            "-t",
            &["-alpha0", "alpha1 + 2*alpha0", "alpha2", "alpha3", "alpha4"],
        ),
        gen("s1", f, &[(X, "x + alpha1/y")], "t", &["alpha0 + alpha1", "-alpha1", "alpha2 + alpha1", "alpha3", "alpha4"]),
        gen(
            "s2",
            f,
            &[(Y, "y - alpha2*z/(x*z - 1)"), (W, "w - alpha2*x/(x*z - 1)")],
            "t",
            &["alpha0", "alpha1 + alpha2", "-alpha2", "alpha3 + alpha2", "alpha4"],
        ),
        gen("s3", f, &[(Z, "z + alpha3/w")], "t", &["alpha0", "alpha1", "alpha2 + alpha3", "-alpha3", "alpha4 + alpha3"]),
        gen(
            "s4",
            f,
            &[(W, "w - 2*alpha4/z + t/z^2")],
            "-t",
            &["alpha0", "alpha1", "alpha2", "alpha3 + 2*alpha4", "-alpha4"],
        ),
        gen(
            "psi",
            f,
            &[(X, "z/t"), (Y, "t*w"), (Z, "t*x"), (W, "y/t")],
            "t",
            &["alpha4", "alpha3", "alpha2", "alpha1", "alpha0"],
        ),
    ]
}

fn d51() -> Vec<BirationalMap> {
    let f = Family::D51;
    vec![
        gen("w0", f, &[(X, "x + beta0/(y + t)")], "t", &["-beta0", "beta1", "beta2 + beta0", "beta3", "beta4", "beta5"]),
        gen("w1", f, &[(X, "x + beta1/y")], "t", &["beta0", "-beta1", "beta2 + beta1", "beta3", "beta4", "beta5"]),
        gen(
            "w2",
            f,
            &[(Y, "y - beta2/(x - z)"), (W, "w + beta2/(x - z)")],
            "t",
            &["beta0 + beta2", "beta1 + beta2", "-beta2", "beta3 + beta2", "beta4", "beta5"],
        ),
        gen(
            "w3",
            f,
            &[(Z, "z + beta3/w")],
            "t",
            &["beta0", "beta1", "beta2 + beta3", "-beta3", "beta4 + beta3", "beta5 + beta3"],
        ),
        gen("w4", f, &[(W, "w - beta4/(z - 1)")], "t", &["beta0", "beta1", "beta2", "beta3 + beta4", "-beta4", "beta5"]),
        gen("w5", f, &[(W, "w - beta5/z")], "t", &["beta0", "beta1", "beta2", "beta3 + beta5", "beta4", "-beta5"]),
    ]
}

/// Every catalogued generator of a family, reflections first.
pub fn generators(family: Family) -> Vec<BirationalMap> {
    match family {
        Family::D4 => d4(),
        Family::B4First => b4_first(),
        Family::B4Second => b4_second(),
        Family::D52 => d52(),
        Family::D51 => d51(),
        _ => Vec::new(),
    }
}

pub fn generator_labels(family: Family) -> Vec<String> {
    generators(family).into_iter().map(|g| g.label).collect()
}

pub fn generator(family: Family, label: &str) -> Result<BirationalMap, MapError> {
    generators(family)
        .into_iter()
        .chain(if family == Family::D4 { alternative_d4_generators() } else { Vec::new() })
        .find(|g| g.label == label)
        .ok_or_else(|| MapError::UnknownLabel {
            family,
            label: label.to_string(),
        })
}

/// A change of parameters and variables carrying one family onto another.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub map: BirationalMap,
    pub source: Family,
    pub target: Family,
}

fn equivalence_catalog() -> Vec<Equivalence> {
    let entry = |label: &str, source, target, vars: &[(Var, &str)], params: &[&str]| Equivalence {
        map: build(label, source, target, vars, "t", params),
        source,
        target,
    };
    let first_chart = [(X, "1/x"), (Y, "-(x*y + alpha1)*x")];
    let second_chart = [(Z, "1/z"), (W, "-(z*w + alpha3)*z")];
    let both = [first_chart[0], first_chart[1], second_chart[0], second_chart[1]];
    vec![
        entry(
            "d4-to-b4a",
            Family::D4,
            Family::B4First,
            &first_chart,
            &["(alpha0 - alpha1)/2", "alpha1", "alpha2", "alpha3", "alpha4"],
        ),
        entry(
            "d4-to-b4b",
            Family::D4,
            Family::B4Second,
            &second_chart,
            &["alpha0", "alpha1", "alpha2", "alpha3", "(alpha4 - alpha3)/2"],
        ),
        entry(
            "b4a-to-b4b",
            Family::B4First,
            Family::B4Second,
            &both,
            &["2*alpha0 + alpha1", "alpha1", "alpha2", "alpha3", "(alpha4 - alpha3)/2"],
        ),
        entry(
            "d4-to-d52",
            Family::D4,
            Family::D52,
            &both,
            &["(alpha0 - alpha1)/2", "alpha1", "alpha2", "alpha3", "(alpha4 - alpha3)/2"],
        ),
        entry(
            "p3-to-p3t",
            Family::PIII,
            Family::PIIITilde,
            &[(Var::Q, "1/q"), (Var::P, "-q*(q*p + gamma0)")],
            &["gamma0", "gamma1", "gamma2"],
        ),
    ]
}

pub fn equivalence_labels() -> Vec<String> {
    equivalence_catalog().into_iter().map(|e| e.map.label).collect()
}

pub fn equivalence(label: &str) -> Option<Equivalence> {
    equivalence_catalog().into_iter().find(|e| e.map.label == label)
}

/// The two-dimensional map between the PIII and PIII-tilde systems.
pub fn planar_equivalence() -> Equivalence {
    equivalence("p3-to-p3t").expect("catalogued")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        assert_eq!(generators(Family::D4).len(), 9);
        for f in [Family::B4First, Family::B4Second, Family::D52, Family::D51] {
            assert_eq!(generators(f).len(), 6);
        }
        assert_eq!(alternative_d4_generators().len(), 5);
    }

    #[test]
    fn s1_transcription() {
        let s1 = generator(Family::D4, "s1").unwrap();
        assert!(s1.image(Var::X).equals(&parse("x + alpha1/y")));
        assert!(s1.image(Var::alpha(1)).equals(&parse("-alpha1")));
        assert!(s1.image(Var::alpha(2)).equals(&parse("alpha2 + alpha1")));
        assert!(s1.image(Var::Y).equals(&parse("y")));
    }

    #[test]
    fn unknown_label() {
        assert!(matches!(generator(Family::D4, "s9"), Err(MapError::UnknownLabel { .. })));
    }

    #[test]
    fn every_parameter_action_preserves_the_normalisation() {
        for f in Family::WEYL {
            for g in generators(f) {
                assert!(g.preserves_constraint(), "{f} {}", g.label);
            }
        }
        for e in equivalence_catalog() {
            assert!(e.map.preserves_constraint(), "{}", e.map.label);
        }
    }
}
