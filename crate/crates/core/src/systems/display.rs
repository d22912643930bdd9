//! Explicitly written systems of equations, independent of the Hamiltonians,
//! used to cross-check the Hamiltonian transcription.

use crate::algebra::{RationalExpression, Var};

use super::{FieldComponents, Family, HamiltonianSystem};

fn parse_all(rows: [&str; 4]) -> FieldComponents {
    let comps = rows
        .iter()
        .map(|r| r.parse::<RationalExpression>().expect("display transcription parses"))
        .collect();
    FieldComponents::new(vec![Var::X, Var::Y, Var::Z, Var::W], comps)
}

/// The written-out equations of motion of a four-dimensional family, when
/// available.
pub fn displayed_field(family: Family) -> Option<FieldComponents> {
    let rows = match family {
        Family::D4 => [
            "(2*x^2*y - x^2 + (alpha0 + alpha1)*x - 2*w)/t + 1",
            "(-2*x*y^2 + 2*x*y - (alpha0 + alpha1)*y + alpha1)/t",
            "(2*z^2*w - t*z^2 - (1 - alpha3 - alpha4)*z + 1 - 2*y)/t",
            "(-2*z*w^2 + 2*t*z*w + (1 - alpha3 - alpha4)*w + alpha3*t)/t",
        ],
        Family::B4First => [
            "(2*x^2*y - t*x^2 - 2*alpha0*x + 1)/t + 2*x^2*w/t",
            "(-2*x*y^2 + 2*t*x*y + 2*alpha0*y + alpha1*t)/t - 2*w*(2*x*y + alpha1)/t",
            "(2*z^2*w - t*z^2 - (1 - alpha3 - alpha4)*z + 1)/t + 2*x*(x*y + alpha1)/t",
            "(-2*z*w^2 + 2*t*z*w + (1 - alpha3 - alpha4)*w + alpha3*t)/t",
        ],
        Family::B4Second => [
            "(2*x^2*y - x^2 + (alpha0 + alpha1)*x + t)/t + 2*z*(z*w + alpha3)/t",
            "(-2*x*y^2 + 2*x*y - (alpha0 + alpha1)*y + alpha1)/t",
            "(2*z^2*w - z^2 + (1 - 2*alpha4)*z + t)/t + 2*y*z^2/t",
            "(-2*z*w^2 + 2*z*w - (1 - 2*alpha4)*w + alpha3)/t - 2*y*(2*z*w + alpha3)/t",
        ],
        Family::D52 => [
            "(2*x^2*y - t*x^2 - 2*alpha0*x + 1)/t - 2*x^2*z*(z*w + alpha3)/t",
            "(-2*x*y^2 + 2*t*x*y + 2*alpha0*y + alpha1*t)/t + 2*z*(z*w + alpha3)*(2*x*y + alpha1)/t",
            "(2*z^2*w - z^2 + (1 - 2*alpha4)*z + t)/t - 2*x*z^2*(x*y + alpha1)/t",
            "(-2*z*w^2 + 2*z*w - (1 - 2*alpha4)*w + alpha3)/t + 2*x*(x*y + alpha1)*(2*z*w + alpha3)/t",
        ],
        _ => return None,
    };
    Some(parse_all(rows))
}

/// Compares Hamilton's equations with the displayed system after eliminating
/// the first parameter through the normalisation. Returns the first component
/// that differs together with its residual.
pub fn check_field_matches_display(
    system: &HamiltonianSystem,
    display: &FieldComponents,
) -> Option<(Var, RationalExpression)> {
    let elim = system.params.elimination();
    let lhs = system.vector_field().substitute(&elim).expect("elimination is polynomial");
    let rhs = display.substitute(&elim).expect("elimination is polynomial");
    lhs.difference(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::make_system;

    #[test]
    fn displayed_systems_match_hamiltonians() {
        for f in [Family::D4, Family::B4First, Family::B4Second, Family::D52] {
            let display = displayed_field(f).unwrap();
            let diff = check_field_matches_display(&make_system(f), &display);
            assert!(diff.is_none(), "{f}: {diff:?}");
        }
    }

    #[test]
    fn perturbed_display_is_rejected() {
        let mut display = displayed_field(Family::D4).unwrap();
        display.components[3] = &display.components[3] + &RationalExpression::var(Var::alpha(2));
        let (var, _) = check_field_matches_display(&make_system(Family::D4), &display).unwrap();
        assert_eq!(var, Var::W);
    }
}
