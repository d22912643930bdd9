//! Polynomial first integrals with Laurent dependence on time.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::linalg::{nullspace, rank};
use crate::algebra::{Monomial, Polynomial, RationalExpression, Var};

use super::HamiltonianSystem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntegralError {
    #[error("empty time-power window [{0}, {1}]")]
    WindowEmpty(i32, i32),
    #[error("expression is not a Laurent polynomial in t")]
    NotLaurent,
}

fn phase_monomials(vars: &[Var], deg: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![Monomial::one()];
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &frontier {
            for &u in vars {
                let n = m.mul(&Monomial::var(u));
                if !next.contains(&n) {
                    next.push(n);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn t_power(k: i32) -> RationalExpression {
    RationalExpression::var(Var::T).pow(k).expect("t is nonzero")
}

/// Splits `e` into `(p, s)` with `e = p · t^(−s)` and `p` polynomial.
fn laurent_parts(e: &RationalExpression) -> Result<(Polynomial, u32), IntegralError> {
    let t = Polynomial::var(Var::T);
    let mut shift = 0;
    for (f, m) in e.denominator_factors() {
        if *f != t {
            return Err(IntegralError::NotLaurent);
        }
        shift += m;
    }
    Ok((e.numerator().clone(), shift))
}

/// Coefficient rows of Laurent polynomials over a shared monomial basis.
fn coefficient_matrix(exprs: &[RationalExpression]) -> Result<(Vec<Vec<BigRational>>, usize), IntegralError> {
    let parts = exprs.iter().map(laurent_parts).collect::<Result<Vec<_>, _>>()?;
    let top = parts.iter().map(|(_, s)| *s).max().unwrap_or(0);
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut columns = Vec::with_capacity(parts.len());
    for (p, s) in &parts {
        let lift = Monomial::var_pow(Var::T, (top - s) as u16);
        let mut col = Vec::new();
        for (m, coeff) in p.terms() {
            let key = m.mul(&lift);
            let n = index.len();
            let i = *index.entry(key).or_insert(n);
            col.push((i, coeff.clone()));
        }
        columns.push(col);
    }
    let mut rows = vec![vec![BigRational::zero(); exprs.len()]; index.len()];
    for (j, col) in columns.into_iter().enumerate() {
        for (i, coeff) in col {
            rows[i][j] = coeff;
        }
    }
    Ok((rows, exprs.len()))
}

/// All first integrals `Σ c·m·t^k` with rational coefficients `c`, phase
/// monomials `m` of degree at most `max_degree` and `k` in `window`. Returns a
/// basis of the solution space.
pub fn first_integral_search(
    system: &HamiltonianSystem,
    max_degree: u32,
    window: (i32, i32),
) -> Result<Vec<RationalExpression>, IntegralError> {
    let (kmin, kmax) = window;
    if kmin > kmax {
        return Err(IntegralError::WindowEmpty(kmin, kmax));
    }
    let field = system.vector_field();
    let elim = system.params.elimination();
    let phase = system.phase_vars();
    let mut basis = Vec::new();
    for m in phase_monomials(&phase, max_degree) {
        for k in kmin..=kmax {
            basis.push(&RationalExpression::from_poly(Polynomial::monomial(m.clone(), BigRational::from_integer(1.into()))) * &t_power(k));
        }
    }
    let derivatives: Vec<RationalExpression> = basis
        .iter()
        .map(|b| {
            let mut d = b.differentiate(Var::T);
            for (u, f) in field.iter() {
                d = &d + &(&b.differentiate(u) * f);
            }
            d.substitute(&elim).expect("elimination is polynomial")
        })
        .collect();
    let (rows, ncols) = coefficient_matrix(&derivatives)?;
    let kernel = nullspace(&rows, ncols);
    Ok(kernel
        .into_iter()
        .map(|vec| {
            vec.iter()
                .zip(&basis)
                .filter(|(c, _)| !c.is_zero())
                .fold(RationalExpression::zero(), |acc, (c, b)| &acc + &b.scale(c))
        })
        .collect())
}

/// Whether two families of Laurent polynomials span the same ℚ-space.
pub fn span_equal(a: &[RationalExpression], b: &[RationalExpression]) -> Result<bool, IntegralError> {
    let all: Vec<RationalExpression> = a.iter().chain(b).cloned().collect();
    let (rows, _) = coefficient_matrix(&all)?;
    let transpose = |cols: std::ops::Range<usize>| -> Vec<Vec<BigRational>> {
        cols.map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
    };
    let n = rows.len();
    let ra = rank(&transpose(0..a.len()), n);
    let rb = rank(&transpose(a.len()..all.len()), n);
    let rall = rank(&transpose(0..all.len()), n);
    Ok(ra == rall && rb == rall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::v;
    use crate::systems::{make_system, Family};

    #[test]
    fn empty_window_is_an_error() {
        let sys = make_system(Family::PIII);
        assert_eq!(first_integral_search(&sys, 1, (1, 0)).unwrap_err(), IntegralError::WindowEmpty(1, 0));
    }

    #[test]
    fn span_comparison() {
        let a = vec![v(Var::X), &v(Var::X) + &v(Var::Y)];
        let b = vec![v(Var::Y), &v(Var::X) - &v(Var::Y)];
        assert!(span_equal(&a, &b).unwrap());
        assert!(!span_equal(&a, &b[..1]).unwrap());
        assert!(span_equal(&[], &[]).unwrap());
    }
}
