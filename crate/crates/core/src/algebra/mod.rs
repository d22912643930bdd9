//! Exact multivariate polynomial and rational-function arithmetic over ℚ.

mod json;
pub mod linalg;
mod parse;
pub mod poly;
pub mod rational;
pub mod var;

pub use poly::{int, rat, Monomial, Point, Polynomial, VarSet};
pub use rational::{c, v, RationalExpression, Substitution};
pub use parse::{parse_expression, ParseError};
pub use var::{Var, VarKind, NVARS};

use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("substitution makes a denominator identically zero")]
    DenominatorVanishes,
    #[error("denominator vanishes at the evaluation point")]
    DenominatorZeroAtPoint,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("variable `{0}` has no value at the evaluation point")]
    Unassigned(Var),
}

pub fn differentiate(f: &RationalExpression, v: Var) -> RationalExpression {
    f.differentiate(v)
}

pub fn substitute(f: &RationalExpression, sub: &Substitution) -> Result<RationalExpression, AlgebraError> {
    f.substitute(sub)
}

/// `Some(q)` with `a = b q`, `None` when `b` does not divide `a`.
pub fn exact_divide(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    a.exact_divide(b)
}

pub fn equals(f: &RationalExpression, g: &RationalExpression) -> bool {
    f.equals(g)
}

pub fn eval(f: &RationalExpression, point: &Point) -> Result<BigRational, AlgebraError> {
    f.eval(point)
}
