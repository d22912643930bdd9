//! Catalogue of Hamiltonians, parameter normalisations and vector fields.

mod display;
mod integrals;

pub use display::{check_field_matches_display, displayed_field};
pub use integrals::{first_integral_search, span_equal, IntegralError};

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::algebra::{c, int, rat, v, Point, RationalExpression, Substitution, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Coupled PIII system with W(D4(1)) symmetry.
    D4,
    /// First B4(1) member, Hamiltonian built from two H̃_III blocks.
    B4First,
    /// Second B4(1) member, Hamiltonian built from two H_III blocks.
    B4Second,
    D52,
    /// Coupled PV system with W(D5(1)) symmetry, source of the confluence.
    D51,
    PIII,
    PIIITilde,
    PV,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::D4,
        Family::B4First,
        Family::B4Second,
        Family::D52,
        Family::D51,
        Family::PIII,
        Family::PIIITilde,
        Family::PV,
    ];

    /// The four-dimensional families carrying an affine Weyl group action.
    pub const WEYL: [Family; 5] = [Family::D4, Family::B4First, Family::B4Second, Family::D52, Family::D51];

    pub fn name(self) -> &'static str {
        match self {
            Family::D4 => "D4(1)",
            Family::B4First => "B4(1)-first",
            Family::B4Second => "B4(1)-second",
            Family::D52 => "D5(2)",
            Family::D51 => "D5(1)",
            Family::PIII => "PIII",
            Family::PIIITilde => "PIII-tilde",
            Family::PV => "PV",
        }
    }

    /// Short slug used on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            Family::D4 => "d4",
            Family::B4First => "b4a",
            Family::B4Second => "b4b",
            Family::D52 => "d52",
            Family::D51 => "d51",
            Family::PIII => "p3",
            Family::PIIITilde => "p3t",
            Family::PV => "p5",
        }
    }

    pub fn is_planar(self) -> bool {
        matches!(self, Family::PIII | Family::PIIITilde | Family::PV)
    }

    pub fn pairs(self) -> Vec<(Var, Var)> {
        if self.is_planar() {
            vec![(Var::Q, Var::P)]
        } else {
            vec![(Var::X, Var::Y), (Var::Z, Var::W)]
        }
    }

    pub fn phase_vars(self) -> Vec<Var> {
        self.pairs().into_iter().flat_map(|(u, p)| [u, p]).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown family `{0}`")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['(', ')', '_', ' '], "");
        let family = match key.as_str() {
            "d4" | "d41" => Family::D4,
            "b4a" | "b4first" | "b41-first" | "b41first" | "b4-first" => Family::B4First,
            "b4b" | "b4second" | "b41-second" | "b41second" | "b4-second" => Family::B4Second,
            "d52" | "d5-2" => Family::D52,
            "d51" | "d5-1" => Family::D51,
            "p3" | "piii" => Family::PIII,
            "p3t" | "piii-tilde" | "piiitilde" => Family::PIIITilde,
            "p5" | "pv" => Family::PV,
            _ => return Err(UnknownFamily(s.to_string())),
        };
        Ok(family)
    }
}

/// Ordered parameter symbols with an optional affine normalisation
/// `Σ weights[i]·symbols[i] = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    symbols: Vec<Var>,
    constraint: Option<(Vec<BigRational>, BigRational)>,
}

impl ParameterVector {
    pub fn new(symbols: Vec<Var>, weights: &[i64], rhs: BigRational) -> Self {
        assert_eq!(symbols.len(), weights.len());
        ParameterVector {
            symbols,
            constraint: Some((weights.iter().map(|&w| int(w)).collect(), rhs)),
        }
    }

    pub fn unconstrained(symbols: Vec<Var>) -> Self {
        ParameterVector {
            symbols,
            constraint: None,
        }
    }

    pub fn symbols(&self) -> &[Var] {
        &self.symbols
    }

    pub fn weights(&self) -> Option<&[BigRational]> {
        self.constraint.as_ref().map(|(w, _)| w.as_slice())
    }

    pub fn rhs(&self) -> Option<&BigRational> {
        self.constraint.as_ref().map(|(_, r)| r)
    }

    /// `Σ wᵢ sᵢ − rhs` as an expression.
    pub fn constraint_form(&self) -> RationalExpression {
        match &self.constraint {
            None => RationalExpression::zero(),
            Some((weights, rhs)) => {
                let mut acc = RationalExpression::constant(-rhs.clone());
                for (s, w) in self.symbols.iter().zip(weights) {
                    acc = &acc + &v(*s).scale(w);
                }
                acc
            }
        }
    }

    /// Value of the constraint form; zero iff the values are admissible.
    pub fn constraint_residual(&self, values: &Point) -> Result<BigRational, Var> {
        let Some((weights, rhs)) = &self.constraint else {
            return Ok(BigRational::zero());
        };
        let mut acc = -rhs.clone();
        for (s, w) in self.symbols.iter().zip(weights) {
            acc += w * values.get(*s).ok_or(*s)?;
        }
        Ok(acc)
    }

    /// Expresses the first symbol through the others using the constraint.
    pub fn elimination(&self) -> Substitution {
        let Some((weights, rhs)) = &self.constraint else {
            return Substitution::new();
        };
        let mut expr = RationalExpression::constant(rhs.clone());
        for (s, w) in self.symbols.iter().zip(weights).skip(1) {
            expr = &expr - &v(*s).scale(w);
        }
        Substitution::new().with(self.symbols[0], expr.scale(&weights[0].recip()))
    }

    /// Value of the first symbol that puts `pt` on the constraint hyperplane.
    pub fn solve_first(&self, pt: &Point) -> Option<BigRational> {
        let (weights, rhs) = self.constraint.as_ref()?;
        let mut acc = rhs.clone();
        for (s, w) in self.symbols.iter().zip(weights).skip(1) {
            acc -= w * pt.get(*s)?;
        }
        Some(acc / &weights[0])
    }

    pub fn describe(&self) -> String {
        match &self.constraint {
            None => "unconstrained".into(),
            Some((weights, rhs)) => {
                let lhs: Vec<String> = self
                    .symbols
                    .iter()
                    .zip(weights)
                    .map(|(s, w)| if *w == int(1) { s.to_string() } else { format!("{w}*{s}") })
                    .collect();
                format!("{} = {rhs}", lhs.join(" + "))
            }
        }
    }
}

impl Serialize for ParameterVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ParameterVector", 3)?;
        st.serialize_field("symbols", &self.symbols)?;
        let weights: Option<Vec<String>> = self.weights().map(|w| w.iter().map(|x| x.to_string()).collect());
        st.serialize_field("weights", &weights)?;
        st.serialize_field("rhs", &self.rhs().map(|r| r.to_string()))?;
        st.end()
    }
}

/// Right-hand sides `d(var)/dt` in pair order, plus the time factor `dT/dt`
/// produced by a change of the independent variable.
#[derive(Debug, Clone)]
pub struct FieldComponents {
    pub vars: Vec<Var>,
    pub components: Vec<RationalExpression>,
    pub time_factor: RationalExpression,
}

impl FieldComponents {
    pub fn new(vars: Vec<Var>, components: Vec<RationalExpression>) -> Self {
        assert_eq!(vars.len(), components.len());
        FieldComponents {
            vars,
            components,
            time_factor: RationalExpression::one(),
        }
    }

    pub fn component(&self, var: Var) -> Option<&RationalExpression> {
        self.vars.iter().position(|&u| u == var).map(|i| &self.components[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &RationalExpression)> {
        self.vars.iter().copied().zip(self.components.iter())
    }

    pub fn substitute(&self, sub: &Substitution) -> Result<FieldComponents, crate::algebra::AlgebraError> {
        Ok(FieldComponents {
            vars: self.vars.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.substitute(sub))
                .collect::<Result<_, _>>()?,
            time_factor: self.time_factor.substitute(sub)?,
        })
    }

    /// Component-wise exact comparison; returns the first differing component
    /// and its residual.
    pub fn difference(&self, other: &FieldComponents) -> Option<(Var, RationalExpression)> {
        for (u, a) in self.iter() {
            let b = other.component(u)?;
            if !a.equals(b) {
                return Some((u, a - b));
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    pub family: Family,
    pub label: String,
    pub hamiltonian: RationalExpression,
    pub pairs: Vec<(Var, Var)>,
    pub time: Var,
    pub params: ParameterVector,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("Hamiltonian denominator is not a power of t")]
    DenominatorNotTimePower,
    #[error(transparent)]
    UnknownFamily(#[from] UnknownFamily),
}

impl HamiltonianSystem {
    pub fn new(
        family: Family,
        label: impl Into<String>,
        hamiltonian: RationalExpression,
        pairs: Vec<(Var, Var)>,
        params: ParameterVector,
    ) -> Result<Self, SystemError> {
        let time = Var::T;
        if hamiltonian.denominator_factors().iter().any(|(f, _)| *f != crate::algebra::Polynomial::var(time)) {
            return Err(SystemError::DenominatorNotTimePower);
        }
        Ok(HamiltonianSystem {
            family,
            label: label.into(),
            hamiltonian,
            pairs,
            time,
            params,
        })
    }

    /// Same family and normalisation, different Hamiltonian (used for mutation runs).
    pub fn with_hamiltonian(&self, label: impl Into<String>, hamiltonian: RationalExpression) -> Result<Self, SystemError> {
        Self::new(self.family, label, hamiltonian, self.pairs.clone(), self.params.clone())
    }

    pub fn phase_vars(&self) -> Vec<Var> {
        self.pairs.iter().flat_map(|&(u, p)| [u, p]).collect()
    }

    /// Hamilton's equations `du/dt = ∂H/∂v`, `dv/dt = −∂H/∂u`.
    pub fn vector_field(&self) -> FieldComponents {
        hamiltonian_field(&self.hamiltonian, &self.pairs)
    }

    /// Total degree of the Hamiltonian in the phase variables only.
    pub fn phase_degree(&self) -> u32 {
        self.hamiltonian.numerator().total_degree_in(|u| u.is_phase())
    }
}

pub fn hamiltonian_field(h: &RationalExpression, pairs: &[(Var, Var)]) -> FieldComponents {
    let mut vars = Vec::new();
    let mut comps = Vec::new();
    for &(u, p) in pairs {
        vars.push(u);
        comps.push(h.differentiate(p));
        vars.push(p);
        comps.push(-h.differentiate(u));
    }
    FieldComponents::new(vars, comps)
}

impl Serialize for HamiltonianSystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HamiltonianSystem", 5)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("hamiltonian", &self.hamiltonian)?;
        st.serialize_field("pairs", &self.pairs)?;
        st.serialize_field("params", &self.params)?;
        st.end()
    }
}

/// `H_III(q,p,t;γ0,γ1,γ2) = (q²p(p−1) + q((γ0+γ2)p − γ0) + tp)/t`; γ1 only
/// enters through the normalisation γ0 + 2γ1 + γ2 = 1.
pub fn h_iii(
    q: &RationalExpression,
    p: &RationalExpression,
    t: &RationalExpression,
    g0: &RationalExpression,
    _g1: &RationalExpression,
    g2: &RationalExpression,
) -> RationalExpression {
    let one = RationalExpression::one();
    let num = &(&(&(q * q) * p) * &(p - &one)) + &(&(q * &(&(&(g0 + g2) * p) - g0)) + &(t * p));
    &num / t
}

/// `H̃_III(q,p,t;γ0,γ1,γ2) = (q²p(p−t) − q((−γ0+γ2)p + γ0 t) + p)/t`.
pub fn h_iii_tilde(
    q: &RationalExpression,
    p: &RationalExpression,
    t: &RationalExpression,
    g0: &RationalExpression,
    _g1: &RationalExpression,
    g2: &RationalExpression,
) -> RationalExpression {
    let num = &(&(&(&(q * q) * p) * &(p - t)) - &(q * &(&(&(g2 - g0) * p) + &(g0 * t)))) + p;
    &num / t
}

/// `H_V(q,p,t;γ1,γ2,γ3) = (q(q−1)p(p+t) − (γ1+γ3)qp + γ1 p + γ2 t q)/t`.
pub fn h_v(
    q: &RationalExpression,
    p: &RationalExpression,
    t: &RationalExpression,
    g1: &RationalExpression,
    g2: &RationalExpression,
    g3: &RationalExpression,
) -> RationalExpression {
    let one = RationalExpression::one();
    let num = &(&(&(&(&(q * &(q - &one)) * p) * &(p + t)) - &(&(&(g1 + g3) * q) * p)) + &(g1 * p)) + &(&(g2 * t) * q);
    &num / t
}

fn alphas() -> Vec<Var> {
    (0..5).map(Var::alpha).collect()
}

pub fn parameter_vector(family: Family) -> ParameterVector {
    match family {
        Family::D4 => ParameterVector::new(alphas(), &[1, 1, 2, 1, 1], int(1)),
        Family::B4First => ParameterVector::new(alphas(), &[2, 2, 2, 1, 1], int(1)),
        Family::B4Second => ParameterVector::new(alphas(), &[1, 1, 2, 2, 2], int(1)),
        Family::D52 => ParameterVector::new(alphas(), &[1, 1, 1, 1, 1], rat(1, 2)),
        Family::D51 => ParameterVector::new((0..6).map(Var::beta).collect(), &[1, 1, 2, 2, 1, 1], int(1)),
        Family::PIII | Family::PIIITilde => {
            ParameterVector::new((0..3).map(Var::gamma).collect(), &[1, 2, 1], int(1))
        }
        Family::PV => ParameterVector::unconstrained((1..4).map(Var::gamma).collect()),
    }
}

/// The catalogued Hamiltonian system of a family.
pub fn make_system(family: Family) -> HamiltonianSystem {
    let (x, y, z, w, t) = (v(Var::X), v(Var::Y), v(Var::Z), v(Var::W), v(Var::T));
    let a = |i| v(Var::alpha(i));
    let b = |i| v(Var::beta(i));
    let g = |i| v(Var::gamma(i));
    let one = RationalExpression::one();
    let two = RationalExpression::int(2);
    let half = c(1, 2);
    let four_d = vec![(Var::X, Var::Y), (Var::Z, Var::W)];
    let (h, pairs) = match family {
        Family::D4 => {
            let first = h_iii(&x, &y, &t, &a(1), &(&(&(&(&two * &a(2)) + &a(3)) + &a(4)) * &half), &a(0));
            let second = h_iii_tilde(&z, &w, &t, &a(3), &(&(&a(4) - &a(3)) * &half), &(&one - &a(4)));
            let coupling = &(&(&two * &y) * &w) / &t;
            (&(&first + &second) - &coupling, four_d)
        }
        Family::B4First => {
            let first = h_iii_tilde(
                &x,
                &y,
                &t,
                &a(1),
                &(&a(2) + &(&(&a(3) + &a(4)) * &half)),
                &(&(&two * &a(0)) + &a(1)),
            );
            let second = h_iii_tilde(&z, &w, &t, &a(3), &(&(&a(4) - &a(3)) * &half), &(&one - &a(4)));
            let coupling = &(&(&(&two * &x) * &w) * &(&(&x * &y) + &a(1))) / &t;
            (&(&first + &second) + &coupling, four_d)
        }
        Family::B4Second => {
            let first = h_iii(&x, &y, &t, &a(1), &(&(&a(2) + &a(3)) + &a(4)), &a(0));
            let second = h_iii(&z, &w, &t, &a(3), &a(4), &(&(&one - &a(3)) - &(&two * &a(4))));
            let coupling = &(&(&(&two * &y) * &z) * &(&(&z * &w) + &a(3))) / &t;
            (&(&first + &second) + &coupling, four_d)
        }
        Family::D52 => {
            let first = h_iii_tilde(&x, &y, &t, &a(1), &(&(&a(2) + &a(3)) + &a(4)), &(&(&two * &a(0)) + &a(1)));
            let second = h_iii(&z, &w, &t, &a(3), &a(4), &(&(&one - &a(3)) - &(&two * &a(4))));
            let coupling =
                &(&(&(&(&two * &x) * &z) * &(&(&x * &y) + &a(1))) * &(&(&z * &w) + &a(3))) / &t;
            (&(&first + &second) - &coupling, four_d)
        }
        Family::D51 => {
            let first = h_v(
                &x,
                &y,
                &t,
                &(&b(2) + &b(5)),
                &b(1),
                &(&(&b(2) + &(&two * &b(3))) + &b(4)),
            );
            let second = h_v(&z, &w, &t, &b(5), &b(3), &b(4));
            let coupling = &(&(&(&two * &y) * &z) * &(&(&(&z - &one) * &w) + &b(3))) / &t;
            (&(&first + &second) + &coupling, four_d)
        }
        Family::PIII => {
            let (q, p) = (v(Var::Q), v(Var::P));
            (h_iii(&q, &p, &t, &g(0), &g(1), &g(2)), vec![(Var::Q, Var::P)])
        }
        Family::PIIITilde => {
            let (q, p) = (v(Var::Q), v(Var::P));
            (h_iii_tilde(&q, &p, &t, &g(0), &g(1), &g(2)), vec![(Var::Q, Var::P)])
        }
        Family::PV => {
            let (q, p) = (v(Var::Q), v(Var::P));
            (h_v(&q, &p, &t, &g(1), &g(2), &g(3)), vec![(Var::Q, Var::P)])
        }
    };
    HamiltonianSystem::new(family, family.name(), h, pairs, parameter_vector(family))
        .expect("catalogued Hamiltonians have t-power denominators")
}

/// Looks a family up by name and returns its catalogued system.
pub fn make_hamiltonian(name: &str) -> Result<HamiltonianSystem, SystemError> {
    Ok(make_system(name.parse()?))
}

/// Observed total phase degree of every catalogued four-dimensional Hamiltonian.
pub fn degree_report() -> Vec<(Family, u32)> {
    [Family::D4, Family::B4First, Family::B4Second, Family::D52, Family::D51]
        .into_iter()
        .map(|f| (f, make_system(f).phase_degree()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Point;

    fn pt(values: &[(Var, BigRational)]) -> Point {
        values.iter().cloned().collect()
    }

    #[test]
    fn h_iii_at_unit_point() {
        let sys = make_system(Family::PIII);
        let p = pt(&[(Var::Q, int(1)), (Var::P, int(1)), (Var::T, int(1))]);
        let sub: Substitution = p.iter().map(|(u, c)| (u, RationalExpression::constant(c.clone()))).collect();
        let value = sys.hamiltonian.substitute(&sub).unwrap();
        assert!(value.equals(&(&v(Var::gamma(2)) + &RationalExpression::one())));
        let tilde = make_system(Family::PIIITilde).hamiltonian.substitute(&sub).unwrap();
        assert!(tilde.equals(&(&RationalExpression::one() - &v(Var::gamma(2)))));
        let at_zero = p
            .with(Var::gamma(0), int(0))
            .with(Var::gamma(2), int(0));
        assert_eq!(sys.hamiltonian.eval(&at_zero).unwrap(), int(1));
    }

    #[test]
    fn h_iii_momentum_derivative() {
        let sys = make_system(Family::PIII);
        let (q, p, t) = (v(Var::Q), v(Var::P), v(Var::T));
        let expected = &(&(&(&q * &q) * &(&(&RationalExpression::int(2) * &p) - &RationalExpression::one()))
            + &(&q * &(&v(Var::gamma(0)) + &v(Var::gamma(2)))))
            + &t;
        assert!(sys.hamiltonian.differentiate(Var::P).equals(&(&expected / &t)));
    }

    #[test]
    fn d4_field_components_match_hand_derivation() {
        let field = make_system(Family::D4).vector_field();
        let (x, y, t) = (v(Var::X), v(Var::Y), v(Var::T));
        let a01 = &v(Var::alpha(0)) + &v(Var::alpha(1));
        let two = RationalExpression::int(2);
        let dy = &(&(&(&(-&two * &x) * &(&y * &y)) + &(&(&two * &x) * &y)) - &(&a01 * &y)) + &v(Var::alpha(1));
        assert!(field.component(Var::Y).unwrap().equals(&(&dy / &t)));
        let dx = &(&(&(&(&two * &(&x * &x)) * &y) - &(&x * &x)) + &(&a01 * &x)) - &(&two * &v(Var::W));
        assert!(field.component(Var::X).unwrap().equals(&(&(&dx / &t) + &RationalExpression::one())));
    }

    #[test]
    fn zero_hamiltonian_has_zero_field() {
        let field = hamiltonian_field(&RationalExpression::zero(), &[(Var::X, Var::Y), (Var::Z, Var::W)]);
        assert_eq!(field.components.len(), 4);
        assert!(field.components.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn constraint_residuals() {
        let d4 = parameter_vector(Family::D4);
        let alpha = |vals: [BigRational; 5]| -> Point { (0..5).map(|i| (Var::alpha(i), vals[i].clone())).collect() };
        assert_eq!(d4.constraint_residual(&alpha([int(1), int(0), int(0), int(0), int(0)])).unwrap(), int(0));
        assert_eq!(d4.constraint_residual(&alpha([int(0), int(0), int(0), int(0), int(0)])).unwrap(), int(-1));
        let d52 = parameter_vector(Family::D52);
        let tenth = rat(1, 10);
        let p = alpha([tenth.clone(), tenth.clone(), tenth.clone(), tenth.clone(), tenth]);
        assert_eq!(d52.constraint_residual(&p).unwrap(), int(0));
        assert_eq!(d4.describe(), "alpha0 + alpha1 + 2*alpha2 + alpha3 + alpha4 = 1");
    }

    #[test]
    fn observed_phase_degrees() {
        let degrees: Vec<u32> = degree_report().into_iter().map(|(_, d)| d).collect();
        assert_eq!(&degrees[..4], &[4, 4, 4, 6]);
    }

    #[test]
    fn denominators_are_powers_of_t() {
        for f in Family::ALL {
            let sys = make_system(f);
            assert!(sys
                .hamiltonian
                .denominator_factors()
                .iter()
                .all(|(p, _)| *p == crate::algebra::Polynomial::var(Var::T)));
        }
        let bad = make_system(Family::D4).with_hamiltonian("bad", &v(Var::X) / &v(Var::Y));
        assert_eq!(bad.unwrap_err(), SystemError::DenominatorNotTimePower);
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.slug().parse::<Family>().unwrap(), f);
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("E8".parse::<Family>().is_err());
        assert!(make_hamiltonian("nope").is_err());
    }
}
