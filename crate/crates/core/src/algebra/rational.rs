//! Rational functions over ℚ without multivariate gcd.
//!
//! A [`RationalExpression`] keeps its denominator as a product of primitive
//! polynomial factors. Sums use the factor-wise lcm as common denominator and
//! every result is reduced by trial division of the numerator by its own
//! denominator factors. Equality is decided by cross-multiplication, so the
//! representation never has to be fully reduced.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{int, Monomial, Point, Polynomial, VarSet};
use super::var::Var;
use super::AlgebraError;

/// Factors observed in the denominators of the catalogued maps; used to split
/// freshly created denominators.
fn catalog_factors() -> &'static [Polynomial] {
    use std::sync::OnceLock;
    static CATALOG: OnceLock<Vec<Polynomial>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let v = Polynomial::var;
        let one = Polynomial::one();
        vec![
            &v(Var::Y) - &one,
            &v(Var::W) - &v(Var::T),
            &v(Var::X) - &v(Var::Z),
            &(&v(Var::X) * &v(Var::Z)) - &one,
            &v(Var::Z) - &one,
            &v(Var::Y) + &v(Var::T),
        ]
    })
}

#[derive(Clone)]
pub struct RationalExpression {
    num: Polynomial,
    /// Distinct nonconstant primitive factors with positive leading
    /// coefficient, sorted, each with a positive multiplicity.
    den: Vec<(Polynomial, u32)>,
}

impl RationalExpression {
    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(Polynomial::int(n))
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Polynomial::var(v))
    }

    pub fn from_poly(num: Polynomial) -> Self {
        RationalExpression { num, den: Vec::new() }
    }

    /// `num / den`; fails when `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        let (c, factors) = split_factors(&den, &[]);
        Ok(Self::reduced(num.scale(&c.recip()), factors))
    }

    fn reduced(num: Polynomial, den: Vec<(Polynomial, u32)>) -> Self {
        let (num, den) = cancel(num, den);
        RationalExpression { num, den }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    /// Expanded denominator polynomial.
    pub fn denominator(&self) -> Polynomial {
        expand(&self.den)
    }

    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> VarSet {
        self.den.iter().fold(self.num.vars(), |s, (f, _)| s.union(f.vars()))
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.vars().contains(v)
    }

    /// Exact semantic equality via cross-multiplication.
    pub fn equals(&self, other: &RationalExpression) -> bool {
        cross_difference(self, other).is_zero()
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.num.is_zero() {
            return Err(AlgebraError::DenominatorVanishes);
        }
        let hints: Vec<&Polynomial> = self.den.iter().map(|(f, _)| f).collect();
        let (c, factors) = split_factors(&self.num, &hints);
        let num = expand(&self.den).scale(&c.recip());
        Ok(Self::reduced(num, factors))
    }

    pub fn checked_div(&self, other: &RationalExpression) -> Result<Self, AlgebraError> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let e = e.unsigned_abs();
        let num = base.num.pow(e);
        let den = base.den.iter().map(|(f, k)| (f.clone(), k * e)).collect();
        Ok(RationalExpression { num, den })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalExpression {
            num: self.num.scale(c),
            den: if c.is_zero() { Vec::new() } else { self.den.clone() },
        }
    }

    /// Partial derivative ∂/∂v.
    pub fn differentiate(&self, v: Var) -> Self {
        let dn = self.num.derivative(v);
        let active: Vec<usize> = (0..self.den.len()).filter(|&i| self.den[i].0.depends_on(v)).collect();
        if active.is_empty() {
            return Self::reduced(dn, self.den.clone());
        }
        let product: Polynomial = active
            .iter()
            .fold(Polynomial::one(), |acc, &i| &acc * &self.den[i].0);
        let mut num = &dn * &product;
        for &i in &active {
            let (f, k) = &self.den[i];
            let others = active
                .iter()
                .filter(|&&j| j != i)
                .fold(Polynomial::one(), |acc, &j| &acc * &self.den[j].0);
            let term = &(&self.num * &f.derivative(v)) * &others;
            num = &num - &term.scale(&int(*k as i64));
        }
        let mut den = self.den.clone();
        for &i in &active {
            den[i].1 += 1;
        }
        Self::reduced(num, den)
    }

    /// Simultaneous substitution; variables without an image stay fixed.
    pub fn substitute(&self, sub: &Substitution) -> Result<Self, AlgebraError> {
        if !sub.touches(self.vars()) {
            return Ok(self.clone());
        }
        let mut result = sub.apply_poly(&self.num);
        for (f, k) in &self.den {
            let image = sub.apply_poly(f);
            if image.is_zero() {
                return Err(AlgebraError::DenominatorVanishes);
            }
            let inv = image.recip()?.pow(*k as i32)?;
            result = &result * &inv;
        }
        Ok(result)
    }

    pub fn eval(&self, point: &Point) -> Result<BigRational, AlgebraError> {
        let mut den = BigRational::one();
        for (f, k) in &self.den {
            let value = f.eval(point).map_err(AlgebraError::Unassigned)?;
            if value.is_zero() {
                return Err(AlgebraError::DenominatorZeroAtPoint);
            }
            for _ in 0..*k {
                den *= &value;
            }
        }
        let num = self.num.eval(point).map_err(AlgebraError::Unassigned)?;
        Ok(num / den)
    }

    /// Replaces each variable `v` with `map(v)`; `map` must be injective.
    pub fn rename(&self, map: impl Fn(Var) -> Var + Copy) -> Self {
        let num = self.num.rename(map);
        let mut den = Vec::new();
        let mut c = BigRational::one();
        for (f, k) in &self.den {
            let (fc, g) = f.rename(map).primitive_split();
            for _ in 0..*k {
                c *= &fc;
            }
            den.push((g, *k));
        }
        den.sort();
        RationalExpression {
            num: num.scale(&c.recip()),
            den,
        }
    }

    /// Denominator factors that involve at least one variable accepted by `pred`.
    pub fn denominator_depends_on(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.den.iter().any(|(f, _)| f.vars().any(pred))
    }
}

/// The numerator of `a - b` over the factor-wise lcm of both denominators.
fn cross_difference(a: &RationalExpression, b: &RationalExpression) -> Polynomial {
    let (lcm, ma, mb) = lcm_multipliers(&a.den, &b.den);
    let _ = lcm;
    &(&a.num * &ma) - &(&b.num * &mb)
}

/// Returns the lcm factor list and the cofactors `lcm / a`, `lcm / b`.
fn lcm_multipliers(
    a: &[(Polynomial, u32)],
    b: &[(Polynomial, u32)],
) -> (Vec<(Polynomial, u32)>, Polynomial, Polynomial) {
    let mut table: BTreeMap<&Polynomial, (u32, u32)> = BTreeMap::new();
    for (f, k) in a {
        table.entry(f).or_default().0 = *k;
    }
    for (f, k) in b {
        table.entry(f).or_default().1 = *k;
    }
    let mut lcm = Vec::with_capacity(table.len());
    let mut ma = Polynomial::one();
    let mut mb = Polynomial::one();
    for (f, (ka, kb)) in table {
        let k = ka.max(kb);
        if k > ka {
            ma = &ma * &f.pow(k - ka);
        }
        if k > kb {
            mb = &mb * &f.pow(k - kb);
        }
        lcm.push((f.clone(), k));
    }
    (lcm, ma, mb)
}

fn expand(factors: &[(Polynomial, u32)]) -> Polynomial {
    factors
        .iter()
        .fold(Polynomial::one(), |acc, (f, k)| &acc * &f.pow(*k))
}

fn merge_factors(a: &[(Polynomial, u32)], b: &[(Polynomial, u32)]) -> Vec<(Polynomial, u32)> {
    let mut table: BTreeMap<Polynomial, u32> = BTreeMap::new();
    for (f, k) in a.iter().chain(b.iter()) {
        *table.entry(f.clone()).or_default() += k;
    }
    table.into_iter().collect()
}

/// Divides out denominator factors that divide the numerator.
fn cancel(mut num: Polynomial, mut den: Vec<(Polynomial, u32)>) -> (Polynomial, Vec<(Polynomial, u32)>) {
    if num.is_zero() {
        return (num, Vec::new());
    }
    for (f, k) in den.iter_mut() {
        while *k > 0 {
            match num.exact_divide(f) {
                Some(q) => {
                    num = q;
                    *k -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|(_, k)| *k > 0);
    (num, den)
}

/// Splits a nonzero polynomial into a rational constant and a list of
/// primitive factors: monomial content first, then trial division by the
/// catalogue and by `hints`, then the primitive remainder.
fn split_factors(p: &Polynomial, hints: &[&Polynomial]) -> (BigRational, Vec<(Polynomial, u32)>) {
    let (c, prim) = p.primitive_split();
    let mono = prim.monomial_content();
    let mut rest = if mono.is_one() { prim } else { prim.div_monomial(&mono) };
    let mut table: BTreeMap<Polynomial, u32> = BTreeMap::new();
    for (v, e) in mono.iter() {
        table.insert(Polynomial::var(v), e as u32);
    }
    let mut c = c;
    if !rest.is_constant() {
        let candidates = catalog_factors().iter().chain(hints.iter().copied());
        for f in candidates {
            if f.is_constant() || f.len() > rest.len() {
                continue;
            }
            while !rest.is_constant() {
                match rest.exact_divide(f) {
                    Some(q) => {
                        *table.entry(f.clone()).or_default() += 1;
                        rest = q;
                    }
                    None => break,
                }
            }
        }
        let (rc, rp) = rest.primitive_split();
        c *= rc;
        if !rp.is_constant() {
            *table.entry(rp).or_default() += 1;
        } else {
            c *= rp.constant_value().unwrap();
        }
    } else {
        c *= rest.constant_value().unwrap();
    }
    // Hints are primitive but may carry a negative leading coefficient.
    let mut out = Vec::with_capacity(table.len());
    for (f, k) in table {
        let (fc, g) = f.primitive_split();
        for _ in 0..k {
            c *= &fc;
        }
        out.push((g, k));
    }
    let out = merge_factors(&out, &[]);
    (c, out)
}

/// A simultaneous substitution `v ↦ image`.
#[derive(Clone, Default)]
pub struct Substitution {
    images: BTreeMap<Var, RationalExpression>,
    domain: VarSet,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, image: RationalExpression) -> Self {
        self.insert(v, image);
        self
    }

    pub fn insert(&mut self, v: Var, image: RationalExpression) {
        self.domain.insert(v);
        self.images.insert(v, image);
    }

    pub fn get(&self, v: Var) -> Option<&RationalExpression> {
        self.images.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &RationalExpression)> {
        self.images.iter().map(|(v, e)| (*v, e))
    }

    pub fn domain(&self) -> VarSet {
        self.domain
    }

    fn touches(&self, vars: VarSet) -> bool {
        vars.iter().any(|v| self.domain.contains(v))
    }

    /// Substitutes into a polynomial, homogenising each substituted variable
    /// to its maximal degree so that only one reduction is needed.
    pub fn apply_poly(&self, p: &Polynomial) -> RationalExpression {
        let active: Vec<Var> = p.vars().iter().filter(|v| self.domain.contains(*v)).collect();
        if active.is_empty() {
            return RationalExpression::from_poly(p.clone());
        }
        struct Table {
            var: Var,
            num_pows: Vec<Polynomial>,
            den_pows: Vec<Polynomial>,
        }
        let mut tables = Vec::with_capacity(active.len());
        let mut den_factors: Vec<(Polynomial, u32)> = Vec::new();
        for &v in &active {
            let image = &self.images[&v];
            let e = p.degree_in(v);
            let mut num_pows = vec![Polynomial::one()];
            let mut den_pows = vec![Polynomial::one()];
            let dv = image.denominator();
            for i in 1..=e as usize {
                num_pows.push(&num_pows[i - 1] * &image.num);
                if image.den.is_empty() {
                    den_pows.push(Polynomial::one());
                } else {
                    den_pows.push(&den_pows[i - 1] * &dv);
                }
            }
            let scaled: Vec<(Polynomial, u32)> = image.den.iter().map(|(f, k)| (f.clone(), k * e)).collect();
            den_factors = merge_factors(&den_factors, &scaled);
            tables.push(Table {
                var: v,
                num_pows,
                den_pows,
            });
        }
        let is_active = |v: Var| active.contains(&v);
        let mut num = Polynomial::zero();
        for (mono, coeff) in p.split_by(is_active) {
            let mut term = coeff;
            for t in &tables {
                let e = mono.exp(t.var) as usize;
                let top = t.num_pows.len() - 1;
                term = &term * &t.num_pows[e];
                if top > e && !t.den_pows[top - e].is_one() {
                    term = &term * &t.den_pows[top - e];
                }
            }
            num = &num + &term;
        }
        RationalExpression::reduced(num, den_factors)
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl FromIterator<(Var, RationalExpression)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, RationalExpression)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, e) in iter {
            s.insert(v, e);
        }
        s
    }
}

impl Add for &RationalExpression {
    type Output = RationalExpression;
    fn add(self, rhs: &RationalExpression) -> RationalExpression {
        if self.den.is_empty() && rhs.den.is_empty() {
            return RationalExpression::from_poly(&self.num + &rhs.num);
        }
        if self.num.is_zero() {
            return rhs.clone();
        }
        if rhs.num.is_zero() {
            return self.clone();
        }
        let (lcm, ma, mb) = lcm_multipliers(&self.den, &rhs.den);
        let num = &(&self.num * &ma) + &(&rhs.num * &mb);
        RationalExpression::reduced(num, lcm)
    }
}

impl Sub for &RationalExpression {
    type Output = RationalExpression;
    fn sub(self, rhs: &RationalExpression) -> RationalExpression {
        self + &(-rhs)
    }
}

impl Neg for &RationalExpression {
    type Output = RationalExpression;
    fn neg(self) -> RationalExpression {
        RationalExpression {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalExpression {
    type Output = RationalExpression;
    fn mul(self, rhs: &RationalExpression) -> RationalExpression {
        if self.num.is_zero() || rhs.num.is_zero() {
            return RationalExpression::zero();
        }
        if self.den.is_empty() && rhs.den.is_empty() {
            return RationalExpression::from_poly(&self.num * &rhs.num);
        }
        let (an, bd) = cancel(self.num.clone(), rhs.den.clone());
        let (bn, ad) = cancel(rhs.num.clone(), self.den.clone());
        RationalExpression {
            num: &an * &bn,
            den: merge_factors(&ad, &bd),
        }
    }
}

impl Div for &RationalExpression {
    type Output = RationalExpression;
    /// Panics on division by zero; use [`RationalExpression::checked_div`] otherwise.
    fn div(self, rhs: &RationalExpression) -> RationalExpression {
        self.checked_div(rhs).expect("division by the zero rational expression")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for RationalExpression {
            type Output = RationalExpression;
            fn $method(self, rhs: RationalExpression) -> RationalExpression {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RationalExpression> for RationalExpression {
            type Output = RationalExpression;
            fn $method(self, rhs: &RationalExpression) -> RationalExpression {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalExpression {
    type Output = RationalExpression;
    fn neg(self) -> RationalExpression {
        -&self
    }
}

impl PartialEq for RationalExpression {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl From<Polynomial> for RationalExpression {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<Var> for RationalExpression {
    fn from(v: Var) -> Self {
        Self::var(v)
    }
}

impl From<i64> for RationalExpression {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl fmt::Display for RationalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(p, k)| if *k == 1 { format!("({p})") } else { format!("({p})^{k}") })
            .collect();
        if den.len() == 1 {
            write!(f, "({})/{}", self.num, den[0])
        } else {
            write!(f, "({})/({})", self.num, den.join("*"))
        }
    }
}

impl fmt::Debug for RationalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shorthand used throughout the catalogue.
pub fn v(var: Var) -> RationalExpression {
    RationalExpression::var(var)
}

/// Shorthand for a rational constant `n/d`.
pub fn c(n: i64, d: i64) -> RationalExpression {
    RationalExpression::constant(super::poly::rat(n, d))
}

#[allow(dead_code)]
fn monomial_expr(m: &Monomial) -> RationalExpression {
    RationalExpression::from_poly(Polynomial::monomial(m.clone(), BigRational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{int, rat};

    fn x() -> RationalExpression {
        v(Var::X)
    }
    fn y() -> RationalExpression {
        v(Var::Y)
    }
    fn t() -> RationalExpression {
        v(Var::T)
    }

    #[test]
    fn common_denominator_equality() {
        let lhs = &x().recip().unwrap() + &y().recip().unwrap();
        let rhs = &(&x() + &y()) / &(&x() * &y());
        assert!(lhs.equals(&rhs));
    }

    #[test]
    fn unreduced_equals_reduced() {
        let num = &(&x() * &x()) - &RationalExpression::one();
        let den = &x() - &RationalExpression::one();
        let unreduced = RationalExpression::new(num.numerator().clone(), den.numerator().clone()).unwrap();
        assert!(unreduced.equals(&(&x() + &RationalExpression::one())));
        assert!(unreduced.is_polynomial());
    }

    #[test]
    fn distinct_powers_of_t() {
        let a = &x() / &t();
        let b = &x() / &(&t() * &t());
        assert!(!a.equals(&b));
    }

    #[test]
    fn quotient_rule_base_case() {
        let f = t().recip().unwrap();
        let expected = -(&t() * &t()).recip().unwrap();
        assert!(f.differentiate(Var::T).equals(&expected));
    }

    #[test]
    fn power_rule() {
        let f = &(&x() * &x()) * &y();
        assert!(f.differentiate(Var::X).equals(&(&(&x() * &y()) * &RationalExpression::int(2))));
    }

    #[test]
    fn substitute_inversion() {
        let sub = Substitution::new().with(Var::Q, v(Var::Q).recip().unwrap());
        let r = v(Var::Q).substitute(&sub).unwrap();
        assert!(r.equals(&v(Var::Q).recip().unwrap()));
    }

    #[test]
    fn substitute_partial_numeric() {
        let f = &x() + &(&v(Var::alpha(1)) / &y());
        let sub = Substitution::new()
            .with(Var::X, RationalExpression::int(2))
            .with(Var::Y, RationalExpression::int(1));
        let r = f.substitute(&sub).unwrap();
        assert!(r.equals(&(&RationalExpression::int(2) + &v(Var::alpha(1)))));
    }

    #[test]
    fn substitute_can_vanish_denominator() {
        let f = (&x() - &y()).recip().unwrap();
        let sub = Substitution::new().with(Var::X, y());
        assert_eq!(f.substitute(&sub).unwrap_err(), AlgebraError::DenominatorVanishes);
    }

    #[test]
    fn eval_division_by_zero() {
        let f = x().recip().unwrap();
        let pt = Point::new().with(Var::X, int(0));
        assert_eq!(f.eval(&pt).unwrap_err(), AlgebraError::DenominatorZeroAtPoint);
        let g = &x() + &(&v(Var::alpha(1)) / &y());
        let pt = Point::new()
            .with(Var::X, int(2))
            .with(Var::Y, int(1))
            .with(Var::alpha(1), int(3));
        assert_eq!(g.eval(&pt).unwrap(), int(5));
        let pt = Point::new().with(Var::X, rat(1, 2));
        assert_eq!(x().recip().unwrap().eval(&pt).unwrap(), int(2));
    }

    #[test]
    fn cancellation_after_composition() {
        // x + a/y with x ↦ x + a/y, a ↦ -a collapses back to x.
        let a = v(Var::alpha(1));
        let f = &x() + &(&a / &y());
        let sub = Substitution::new().with(Var::X, f.clone()).with(Var::alpha(1), -&a);
        let r = f.substitute(&sub).unwrap();
        assert!(r.equals(&x()));
        assert!(r.is_polynomial());
    }
}
