//! Sparse multivariate polynomials with arbitrary-precision rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::var::{Var, NVARS};

/// Exponent vector. The derived ordering is graded lexicographic with `x`
/// as the most significant variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: [u16; NVARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            deg: 0,
            exps: [0; NVARS],
        }
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u16) -> Self {
        let mut m = Self::one();
        m.exps[v.index()] = e;
        m.deg = e as u32;
        m
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u16)>) -> Self {
        let mut m = Self::one();
        for (v, e) in pairs {
            m.exps[v.index()] += e;
            m.deg += e as u32;
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.exps[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    /// Nonzero exponents in variable order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var::from_index(i).unwrap(), e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Monomial {
            deg: self.deg + other.deg,
            exps,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut exps = other.exps;
        for (a, b) in exps.iter_mut().zip(self.exps.iter()) {
            *a -= *b;
        }
        Monomial {
            deg: other.deg - self.deg,
            exps,
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        let mut deg = 0;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a = (*a).min(*b);
            deg += *a as u32;
        }
        Monomial { deg, exps }
    }

    /// Total degree restricted to variables accepted by `keep`.
    pub fn degree_in(&self, keep: impl Fn(Var) -> bool) -> u32 {
        self.iter().filter(|(v, _)| keep(*v)).map(|(_, e)| e as u32).sum()
    }

    fn without(&self, v: Var) -> Monomial {
        let mut m = self.clone();
        m.deg -= m.exps[v.index()] as u32;
        m.exps[v.index()] = 0;
        m
    }

    fn set(&mut self, v: Var, e: u16) {
        self.deg = self.deg - self.exps[v.index()] as u32 + e as u32;
        self.exps[v.index()] = e;
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Bitmask of variables occurring in an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn insert(&mut self, v: Var) {
        self.0 |= 1 << v.index();
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::all().filter(move |v| self.contains(*v))
    }

    pub fn any(self, pred: impl Fn(Var) -> bool) -> bool {
        self.iter().any(pred)
    }
}

/// Sparse polynomial over ℚ; terms are kept sorted with the leading
/// (largest) monomial first and never store a zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: Vec<(Monomial, BigRational)>,
}

impl Default for Polynomial {
    fn default() -> Self {
        Self::zero()
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut acc: FxHashMap<Monomial, BigRational> = FxHashMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: FxHashMap<Monomial, BigRational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { terms }
    }

    /// Terms must already be strictly descending with nonzero coefficients.
    fn from_sorted(terms: Vec<(Monomial, BigRational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn leading_term(&self) -> Option<&(Monomial, BigRational)> {
        self.terms.first()
    }

    pub fn vars(&self) -> VarSet {
        let mut set = VarSet::default();
        for (m, _) in &self.terms {
            for (v, _) in m.iter() {
                set.insert(v);
            }
        }
        set
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v) as u32).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v) as u32).min().unwrap_or(0)
    }

    /// Total degree counting only the variables accepted by `keep`.
    pub fn total_degree_in(&self, keep: impl Fn(Var) -> bool + Copy) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(keep)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Self::zero();
        }
        // Multiplication by a monomial preserves a monomial order.
        Polynomial {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, v: Var) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) > 0)
            .map(|(m, c)| {
                let e = m.exp(v);
                let mut n = m.clone();
                n.set(v, e - 1);
                (n, c * int(e as i64))
            })
            .collect();
        // Differentiation in one variable can reorder monomials of equal degree.
        let mut p = Polynomial { terms };
        p.terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        p
    }

    /// gcd of all monomials (the largest monomial dividing every term).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::one(),
            Some((first, _)) => it.fold(first.clone(), |g, (m, _)| g.gcd(m)),
        }
    }

    /// Exact division by a monomial known to divide every term.
    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(n, c)| (m.quotient_of(n), c.clone())).collect(),
        }
    }

    /// Splits `self = content * primitive` where `primitive` has coprime
    /// integer coefficients and a positive leading coefficient.
    pub fn primitive_split(&self) -> (BigRational, Polynomial) {
        if self.is_zero() {
            return (BigRational::zero(), Polynomial::zero());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        if content.is_one() {
            return (content, self.clone());
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Returns `Some(q)` with `self = divisor * q`, or `None` if the division
    /// leaves a remainder. Division uses the graded lexicographic order.
    pub fn exact_divide(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if divisor.terms.len() == 1 {
            let (m, c) = &divisor.terms[0];
            if !self.terms.iter().all(|(n, _)| m.divides(n)) {
                return None;
            }
            return Some(self.div_monomial(m).scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading_term().unwrap();
        let (tm, _) = divisor.terms.last().unwrap();
        if !lm.divides(&self.terms[0].0) || !tm.divides(&self.terms.last().unwrap().0) {
            return None;
        }
        for v in divisor.vars().iter() {
            if divisor.degree_in(v) > self.degree_in(v)
                || divisor.min_degree_in(v) > self.min_degree_in(v)
            {
                return None;
            }
        }
        if !modular::may_divide(self, divisor) {
            return None;
        }

        let mut rem: BTreeMap<Monomial, BigRational> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        let mut quotient = Vec::new();
        let lc_inv = lc.recip();
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(&m) {
                return None;
            }
            let qm = lm.quotient_of(&m);
            let qc = &c * &lc_inv;
            for (dm, dc) in divisor.terms.iter().skip(1) {
                let key = dm.mul(&qm);
                let delta = dc * &qc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        Some(Polynomial::from_sorted(quotient))
    }

    /// Exact evaluation; `point` must assign every variable that occurs.
    pub fn eval(&self, point: &Point) -> Result<BigRational, Var> {
        let mut powers: Vec<Vec<BigRational>> = vec![Vec::new(); NVARS];
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.iter() {
                let base = point.get(v).ok_or(v)?;
                let cache = &mut powers[v.index()];
                if cache.is_empty() {
                    cache.push(BigRational::one());
                }
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * base;
                    cache.push(next);
                }
                term *= &cache[e as usize];
            }
            total += term;
        }
        Ok(total)
    }

    /// Coefficients as polynomials in `v`: `self = Σ_k coeffs[k] v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Polynomial> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigRational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(v) as usize].push((m.without(v), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut terms| {
                terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Polynomial { terms }
            })
            .collect()
    }

    /// Renames variables; the mapping must be injective on the variables present.
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> Polynomial {
        Polynomial::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_pairs(m.iter().map(|(v, e)| (map(v), e))), c.clone())),
        )
    }

    /// Groups terms by their monomial in the variables accepted by `split`,
    /// returning (monomial, coefficient polynomial in the remaining variables).
    pub fn split_by(&self, split: impl Fn(Var) -> bool) -> Vec<(Monomial, Polynomial)> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, BigRational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let outer = Monomial::from_pairs(m.iter().filter(|(v, _)| split(*v)));
            let inner = Monomial::from_pairs(m.iter().filter(|(v, _)| !split(*v)));
            groups.entry(outer).or_default().push((inner, c.clone()));
        }
        groups
            .into_iter()
            .rev()
            .map(|(m, terms)| (m, Polynomial::from_terms(terms)))
            .collect()
    }

    fn merge(&self, other: &Polynomial, negate_other: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate_other { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| {
            (m.clone(), if negate_other { -c } else { c.clone() })
        }));
        Polynomial::from_sorted(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        if rhs.terms.len() == 1 {
            return self.mul_term(&rhs.terms[0].0, &rhs.terms[0].1);
        }
        if self.terms.len() == 1 {
            return rhs.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: FxHashMap<Monomial, BigRational> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * rhs.terms.len(), Default::default());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        Polynomial::from_map(acc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |p: &Polynomial| p.terms.len();
        key(self).cmp(&key(other)).then_with(|| {
            for ((ma, ca), (mb, cb)) in self.terms.iter().zip(other.terms.iter()) {
                let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let coeff = if abs.is_integer() {
                abs.numer().to_string()
            } else {
                format!("({abs})")
            };
            match (m.is_one(), abs.is_one()) {
                (true, _) => f.write_str(&coeff)?,
                (false, true) => write!(f, "{m:?}")?,
                (false, false) => write!(f, "{coeff}*{m:?}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Partial assignment of exact values to variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point {
    values: BTreeMap<Var, BigRational>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, value: BigRational) -> Self {
        self.values.insert(v, value);
        self
    }

    pub fn set(&mut self, v: Var, value: BigRational) {
        self.values.insert(v, value);
    }

    pub fn get(&self, v: Var) -> Option<&BigRational> {
        self.values.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &BigRational)> {
        self.values.iter().map(|(v, c)| (*v, c))
    }
}

impl FromIterator<(Var, BigRational)> for Point {
    fn from_iter<I: IntoIterator<Item = (Var, BigRational)>>(iter: I) -> Self {
        Point {
            values: iter.into_iter().collect(),
        }
    }
}

/// Cheap necessary condition for divisibility: reduce both polynomials to
/// univariate images modulo a prime and test there.
mod modular {
    use super::*;

    const P: u64 = (1 << 61) - 1;

    fn mulmod(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn powmod(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(a: u64) -> u64 {
        powmod(a, P - 2)
    }

    fn reduce_int(n: &BigInt) -> u64 {
        let m = n.mod_floor(&BigInt::from(P));
        m.to_u64().unwrap()
    }

    fn reduce(c: &BigRational) -> Option<u64> {
        let d = reduce_int(c.denom());
        if d == 0 {
            return None;
        }
        Some(mulmod(reduce_int(c.numer()), inv(d)))
    }

    /// Fixed pseudo-random evaluation point, one residue per variable.
    fn residue(v: Var) -> u64 {
        let mut h = 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(v.index() as u64 + 7);
        h ^= h >> 29;
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 32;
        h % (P - 2) + 2
    }

    fn univariate(p: &Polynomial, main: Var) -> Option<Vec<u64>> {
        let mut out = vec![0u64; p.degree_in(main) as usize + 1];
        for (m, c) in p.terms() {
            let mut val = reduce(c)?;
            for (v, e) in m.iter() {
                if v != main {
                    val = mulmod(val, powmod(residue(v), e as u64));
                }
            }
            let k = m.exp(main) as usize;
            out[k] = (out[k] + val) % P;
        }
        Some(out)
    }

    pub(super) fn may_divide(a: &Polynomial, b: &Polynomial) -> bool {
        let main = match b.vars().iter().max_by_key(|v| b.degree_in(*v)) {
            Some(v) => v,
            None => return true,
        };
        let (Some(mut ua), Some(ub)) = (univariate(a, main), univariate(b, main)) else {
            return true;
        };
        let db = ub.len() - 1;
        if ub[db] == 0 {
            return true;
        }
        if ua.len() < ub.len() {
            return ua.iter().all(|&c| c == 0);
        }
        let lead_inv = inv(ub[db]);
        for k in (db..ua.len()).rev() {
            let coef = mulmod(ua[k], lead_inv);
            if coef == 0 {
                continue;
            }
            for (j, &bj) in ub.iter().enumerate() {
                let idx = k - db + j;
                ua[idx] = (ua[idx] + P - mulmod(coef, bj)) % P;
            }
        }
        ua[..db].iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(Var::X)
    }
    fn y() -> Polynomial {
        Polynomial::var(Var::Y)
    }

    #[test]
    fn exact_divide_factorization() {
        let a = &(&x() * &x()) - &Polynomial::one();
        let b = &x() - &Polynomial::one();
        assert_eq!(a.exact_divide(&b).unwrap(), &x() + &Polynomial::one());
    }

    #[test]
    fn exact_divide_reports_remainder() {
        let a = &(&(&x() * &x()) * &y()) + &x();
        assert!(a.exact_divide(&y()).is_none());
    }

    #[test]
    fn exact_divide_epsilon_content() {
        let e = Polynomial::var(Var::EPS);
        let a = &(&e * &x()) + &(&e * &e);
        assert_eq!(a.exact_divide(&e).unwrap(), &x() + &e);
    }

    #[test]
    fn exact_divide_multivariate() {
        // (xz - 1)(y^2 + x z t) / (xz - 1)
        let f = &(&x() * &Polynomial::var(Var::Z)) - &Polynomial::one();
        let g = &(&y() * &y()) + &(&(&x() * &Polynomial::var(Var::Z)) * &Polynomial::var(Var::T));
        let prod = &f * &g;
        assert_eq!(prod.exact_divide(&f).unwrap(), g);
        assert_eq!(prod.exact_divide(&g).unwrap(), f);
        let off = &prod + &Polynomial::var(Var::W);
        assert!(off.exact_divide(&f).is_none());
    }

    #[test]
    fn derivative_power_rule() {
        let f = &(&x() * &x()) * &y();
        assert_eq!(f.derivative(Var::X), (&x() * &y()).scale(&int(2)));
        assert!(f.derivative(Var::Z).is_zero());
    }

    #[test]
    fn primitive_split_normalizes_sign_and_content() {
        let f = (&x().scale(&rat(-2, 3)) + &y().scale(&rat(4, 9))).clone();
        let (c, p) = f.primitive_split();
        assert_eq!(c, rat(-2, 9));
        assert_eq!(p, &x().scale(&int(3)) - &y().scale(&int(2)));
    }

    #[test]
    fn eval_matches_hand_value() {
        let f = &(&x() * &x()) + &y().scale(&int(3));
        let pt = Point::new().with(Var::X, int(2)).with(Var::Y, rat(1, 3));
        assert_eq!(f.eval(&pt).unwrap(), int(5));
        assert_eq!(f.eval(&Point::new().with(Var::X, int(1))), Err(Var::Y));
    }
}
