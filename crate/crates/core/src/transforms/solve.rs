//! Chain rule through a change of variables and closed-form inversion of
//! maps that are triangular with Möbius dependence on each unknown.

use crate::algebra::{RationalExpression, Substitution, Var};
use crate::systems::FieldComponents;

use super::MapError;

/// Components `dN/dτ = (Σ ∂N/∂x·f + ∂N/∂t) / (Σ ∂τ/∂x·f + ∂τ/∂t)` for every
/// new variable `N` given by its expression in the field's variables.
pub fn chain_rule(
    new_vars: &[(Var, RationalExpression)],
    time: &RationalExpression,
    field: &FieldComponents,
) -> Result<FieldComponents, MapError> {
    let total = |g: &RationalExpression| -> RationalExpression {
        let mut acc = g.differentiate(Var::T);
        for (x, f) in field.iter() {
            if g.depends_on(x) {
                acc = &acc + &(&g.differentiate(x) * f);
            }
        }
        acc
    };
    let dtau = total(time);
    if dtau.is_zero() {
        return Err(MapError::NonInvertibleTime);
    }
    let mut vars = Vec::with_capacity(new_vars.len());
    let mut comps = Vec::with_capacity(new_vars.len());
    for (n, g) in new_vars {
        vars.push(*n);
        comps.push(total(g).checked_div(&dtau)?);
    }
    let mut out = FieldComponents::new(vars, comps);
    out.time_factor = dtau;
    Ok(out)
}

/// `(a, b, c, d)` with `e = (a s + b)/(c s + d)`, when `e` has that shape.
fn mobius_coefficients(e: &RationalExpression, s: Var) -> Option<[RationalExpression; 4]> {
    let num = e.numerator();
    let den = e.denominator();
    if num.degree_in(s) > 1 || den.degree_in(s) > 1 {
        return None;
    }
    let split = |p: &crate::algebra::Polynomial| {
        let mut cs = p.coefficients_in(s);
        cs.resize(2, crate::algebra::Polynomial::zero());
        (RationalExpression::from_poly(cs[1].clone()), RationalExpression::from_poly(cs[0].clone()))
    };
    let (a, b) = split(num);
    let (c, d) = split(&den);
    Some([a, b, c, d])
}

/// Solves `new_k = image_k(unknowns)` for the unknowns, one equation at a
/// time, requiring each equation to be Möbius in the single unknown it still
/// contains. Returns `unknown ↦ expression in the new symbols`.
pub fn invert_triangular(
    equations: &[(Var, RationalExpression)],
    unknowns: &[Var],
) -> Result<Substitution, MapError> {
    let mut solved = Substitution::new();
    let mut used = vec![false; equations.len()];
    let is_open = |v: Var, solved: &Substitution| unknowns.contains(&v) && solved.get(v).is_none();
    loop {
        if unknowns.iter().all(|&u| solved.get(u).is_some()) {
            return Ok(solved);
        }
        let mut progress = false;
        for (k, (n, image)) in equations.iter().enumerate() {
            if used[k] {
                continue;
            }
            let e = image.substitute(&solved)?;
            let open: Vec<Var> = e.vars().iter().filter(|&v| is_open(v, &solved)).collect();
            match open.as_slice() {
                [] => used[k] = true,
                [s] => {
                    let Some([a, b, c, d]) = mobius_coefficients(&e, *s) else {
                        continue;
                    };
                    let nv = RationalExpression::var(*n);
                    let value = (&(&d * &nv) - &b).checked_div(&(&a - &(&c * &nv)))?;
                    solved.insert(*s, value);
                    used[k] = true;
                    progress = true;
                }
                _ => {}
            }
        }
        if !progress {
            let missing: Vec<String> = unknowns
                .iter()
                .filter(|&&u| solved.get(u).is_none())
                .map(|u| u.to_string())
                .collect();
            return Err(MapError::EliminationFails(missing.join(", ")));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::v;

    #[test]
    fn inverts_a_nested_chart_shape() {
        // X = 1/x, Y = -(x y + a1) x
        let x = v(Var::X);
        let y = v(Var::Y);
        let a1 = v(Var::alpha(1));
        let eqs = vec![
            (Var::XN, &RationalExpression::one() / &x),
            (Var::YN, -(&(&(&x * &y) + &a1) * &x)),
        ];
        let inv = invert_triangular(&eqs, &[Var::X, Var::Y]).unwrap();
        // Substituting back reproduces the new symbols.
        for (n, e) in &eqs {
            assert!(e.substitute(&inv).unwrap().equals(&v(*n)));
        }
    }

    #[test]
    fn reports_unsolvable_systems() {
        let x = v(Var::X);
        let eqs = vec![(Var::XN, &x * &x)];
        assert!(matches!(invert_triangular(&eqs, &[Var::X]), Err(MapError::EliminationFails(_))));
    }
}
