//! Canonical coordinate charts in which the systems stay polynomial, and the
//! reconstruction of chart Hamiltonians.

use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::algebra::{Polynomial, RationalExpression, Substitution, Var};
use crate::report::{Mode, VerificationReport, Witness};
use crate::systems::{hamiltonian_field, Family, FieldComponents, HamiltonianSystem};
use crate::transforms::{bracket_defect, chain_rule, invert_triangular, MapError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolomorphyError {
    #[error("no chart r{index} in chart set {set}")]
    UnknownChart { set: String, index: usize },
    #[error("chart is not invertible in closed form: {0}")]
    EliminationFails(String),
    #[error("field is not Hamiltonian: {condition} has residual {residual}")]
    NotHamiltonian { condition: String, residual: RationalExpression },
    #[error("field component {0} is not polynomial in the phase variables")]
    NotPolynomial(Var),
    #[error("chart images are not canonical: {0}")]
    NotCanonical(String),
}

impl From<MapError> for HolomorphyError {
    fn from(e: MapError) -> Self {
        HolomorphyError::EliminationFails(e.to_string())
    }
}

/// Which list of charts is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartSet {
    /// The charts belonging to a four-dimensional family.
    Family(Family),
    /// The exploratory chart list with all five charts of D4 shape, the
    /// middle one taken in the unnested form.
    AssumptionA,
}

impl ChartSet {
    pub fn name(self) -> String {
        match self {
            ChartSet::Family(f) => f.slug().to_string(),
            ChartSet::AssumptionA => "assumption-a".to_string(),
        }
    }
}

impl Serialize for ChartSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

/// A canonical change of coordinates `(x,y,z,w) ↦ (x_i,y_i,z_i,w_i)`. The
/// images are keyed by the phase variable naming the chart slot and are
/// written in the coordinates of `nested_on` when present, otherwise in the
/// original coordinates.
#[derive(Debug, Clone)]
pub struct ChartTransform {
    pub set: ChartSet,
    pub index: usize,
    pub images: Vec<(Var, RationalExpression)>,
    pub nested_on: Option<Box<ChartTransform>>,
}

const PAIRS: [(Var, Var); 2] = [(Var::X, Var::Y), (Var::Z, Var::W)];
const PHASE: [Var; 4] = [Var::X, Var::Y, Var::Z, Var::W];
const FRESH: [Var; 4] = [Var::XN, Var::YN, Var::ZN, Var::WN];

fn parse(src: &str) -> RationalExpression {
    src.parse().unwrap_or_else(|e| panic!("chart entry `{src}`: {e}"))
}

fn chart(set: ChartSet, index: usize, images: [&str; 4], nested_on: Option<ChartTransform>) -> ChartTransform {
    ChartTransform {
        set,
        index,
        images: PHASE.iter().zip(images).map(|(&v, e)| (v, parse(e))).collect(),
        nested_on: nested_on.map(Box::new),
    }
}

const R0_D4: [&str; 4] = ["1/x", "-((y - 1)*x + alpha0)*x", "z", "w"];
const R0_TILDE: [&str; 4] = ["x", "y - 2*alpha0/x + 1/x^2", "z", "w"];
const R1: [&str; 4] = ["1/x", "-(y*x + alpha1)*x", "z", "w"];
const R2_FLAT: [&str; 4] = ["-((x - z)*y - alpha2)*y", "1/y", "z", "w + y"];
const R3: [&str; 4] = ["x", "y", "1/z", "-z*(w*z + alpha3)"];
const R4_D4: [&str; 4] = ["x", "y", "1/z", "-z*((w - t)*z + alpha4)"];
const R4_TILDE: [&str; 4] = ["x", "y", "z", "w - 2*alpha4/z + t/z^2"];

/// All charts of a chart set, ordered by index.
pub fn charts(set: ChartSet) -> Vec<ChartTransform> {
    let nested_r2 = |set| chart(set, 2, R2_FLAT, Some(chart(set, 1, R1, None)));
    let flat_r2 = |set| chart(set, 2, R2_FLAT, None);
    let list: Vec<(usize, [&str; 4])> = match set {
        ChartSet::Family(Family::D4) | ChartSet::AssumptionA => vec![(0, R0_D4), (1, R1), (3, R3), (4, R4_D4)],
        ChartSet::Family(Family::B4First) => vec![(0, R0_TILDE), (1, R1), (3, R3), (4, R4_D4)],
        ChartSet::Family(Family::B4Second) => vec![(0, R0_D4), (1, R1), (3, R3), (4, R4_TILDE)],
        ChartSet::Family(Family::D52) => vec![(0, R0_TILDE), (1, R1), (3, R3), (4, R4_TILDE)],
        ChartSet::Family(_) => return Vec::new(),
    };
    let middle = match set {
        ChartSet::Family(Family::D4) | ChartSet::Family(Family::D52) => nested_r2(set),
        _ => flat_r2(set),
    };
    let mut out: Vec<ChartTransform> = list.into_iter().map(|(i, images)| chart(set, i, images, None)).collect();
    out.insert(2, middle);
    out
}

pub fn chart_by_index(set: ChartSet, index: usize) -> Result<ChartTransform, HolomorphyError> {
    charts(set)
        .into_iter()
        .find(|c| c.index == index)
        .ok_or(HolomorphyError::UnknownChart { set: set.name(), index })
}

impl ChartTransform {
    pub fn label(&self) -> String {
        format!("r{}", self.index)
    }

    /// Images written in the original coordinates, resolving any nesting.
    pub fn composite_images(&self) -> Result<Vec<(Var, RationalExpression)>, HolomorphyError> {
        match &self.nested_on {
            None => Ok(self.images.clone()),
            Some(parent) => {
                let outer: Substitution = parent.composite_images()?.into_iter().collect();
                self.images
                    .iter()
                    .map(|(v, e)| Ok((*v, e.substitute(&outer).map_err(MapError::from)?)))
                    .collect()
            }
        }
    }

    /// Original coordinates written in the chart coordinates.
    pub fn inverse(&self) -> Result<Substitution, HolomorphyError> {
        let own = invert_level(&self.images)?;
        match &self.nested_on {
            None => Ok(own),
            Some(parent) => {
                // parent⁻¹ gives originals in terms of parent coordinates;
                // feed it this level's inverse for those coordinates.
                let parent_inv = parent.inverse()?;
                let to_fresh: Substitution = PHASE
                    .iter()
                    .zip(FRESH)
                    .map(|(&v, f)| (f, own.get(v).cloned().unwrap_or_else(|| RationalExpression::var(f))))
                    .collect();
                PHASE
                    .iter()
                    .map(|&v| {
                        let e = parent_inv.get(v).expect("complete inverse");
                        Ok((v, e.substitute(&to_fresh).map_err(MapError::from)?))
                    })
                    .collect()
            }
        }
    }

    /// Checks the canonical brackets of the composite images.
    pub fn check_canonical(&self) -> Result<(), HolomorphyError> {
        let images = self.composite_images()?;
        match bracket_defect(&images, &PAIRS, &PAIRS) {
            None => Ok(()),
            Some((bracket, residual)) => Err(HolomorphyError::NotCanonical(format!("{bracket} off by {residual}"))),
        }
    }
}

impl Serialize for ChartTransform {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ChartTransform", 4)?;
        st.serialize_field("chart_set", &self.set)?;
        st.serialize_field("index", &self.label())?;
        let images: Vec<(String, &RationalExpression)> =
            self.images.iter().map(|(v, e)| (format!("{v}{}", self.index), e)).collect();
        st.serialize_field("images", &images)?;
        st.serialize_field("nested_on", &self.nested_on.as_ref().map(|p| p.label()))?;
        st.end()
    }
}

/// Inverts one level: originals in terms of fresh symbols standing for the
/// chart coordinates.
fn invert_level(images: &[(Var, RationalExpression)]) -> Result<Substitution, HolomorphyError> {
    let fresh = |v: Var| FRESH[PHASE.iter().position(|&p| p == v).expect("phase slot")];
    let equations: Vec<(Var, RationalExpression)> = images.iter().map(|(v, e)| (fresh(*v), e.clone())).collect();
    Ok(invert_triangular(&equations, &PHASE)?)
}

fn fresh_to_phase(v: Var) -> Var {
    FRESH.iter().position(|&f| f == v).map(|i| PHASE[i]).unwrap_or(v)
}

/// The system's field written in the chart coordinates (named x, y, z, w),
/// with the parameter constraint imposed.
pub fn to_chart(system: &HamiltonianSystem, chart: &ChartTransform) -> Result<FieldComponents, HolomorphyError> {
    chart.check_canonical()?;
    let images = chart.composite_images()?;
    let inverse = chart.inverse()?;
    let constrained = system.params.elimination();
    let field = chain_rule(&images, &RationalExpression::var(Var::T), &system.vector_field())?;
    let comps = field
        .components
        .iter()
        .map(|c| {
            let e = c.substitute(&inverse).and_then(|e| e.substitute(&constrained)).map_err(MapError::from)?;
            Ok(e.rename(fresh_to_phase))
        })
        .collect::<Result<Vec<_>, HolomorphyError>>()?;
    Ok(FieldComponents::new(field.vars, comps))
}

/// Denominator factors of `e` that involve a phase variable, multiplied out.
fn phase_denominator(e: &RationalExpression) -> Polynomial {
    e.denominator_factors()
        .iter()
        .filter(|(f, _)| f.vars().any(|v| v.is_phase()))
        .fold(Polynomial::one(), |acc, (f, k)| &acc * &f.pow(*k))
}

/// Whether `e` is polynomial in the phase variables over ℚ(t, parameters).
pub fn is_phase_polynomial(e: &RationalExpression) -> bool {
    let d = phase_denominator(e);
    d.is_one() || e.numerator().exact_divide(&d).is_some()
}

/// One report per chart of `set`.
pub fn verify_chart_polynomiality(system: &HamiltonianSystem, set: ChartSet) -> Vec<VerificationReport> {
    charts(set)
        .iter()
        .map(|c| {
            let start = Instant::now();
            let check = format!("holomorphy/{}/{}/{}", set.name(), system.family.slug(), c.label());
            let report = match to_chart(system, c) {
                Err(e) => VerificationReport::fail(&check, Mode::Exact, Witness::Message(e.to_string())),
                Ok(field) => match field.iter().find(|(_, e)| !is_phase_polynomial(e)) {
                    Some((v, e)) => VerificationReport::fail(
                        &check,
                        Mode::Exact,
                        Witness::Residual {
                            component: format!("d{v}/dt"),
                            residual: e.clone(),
                        },
                    ),
                    None => match reconstruct_hamiltonian(&field, &PAIRS) {
                        Ok(k) => VerificationReport::pass(&check, Mode::Exact)
                            .with_note("chart_hamiltonian_terms", k.numerator().len()),
                        Err(e) => VerificationReport::fail(&check, Mode::Exact, Witness::Message(e.to_string())),
                    },
                },
            };
            report.with_family(system.family.name()).timed(start)
        })
        .collect()
}

/// Recovers `K` with `∂K/∂v = du/dt`, `∂K/∂u = −dv/dt` for a field that is
/// polynomial in the phase variables, normalised so that `K` has no
/// phase-free part.
pub fn reconstruct_hamiltonian(field: &FieldComponents, pairs: &[(Var, Var)]) -> Result<RationalExpression, HolomorphyError> {
    let mut gradient: Vec<(Var, RationalExpression)> = Vec::new();
    for &(u, v) in pairs {
        let fu = field.component(u).ok_or(HolomorphyError::NotPolynomial(u))?;
        let fv = field.component(v).ok_or(HolomorphyError::NotPolynomial(v))?;
        gradient.push((u, -fv.clone()));
        gradient.push((v, fu.clone()));
    }
    for (v, g) in &gradient {
        if phase_denominator(g) != Polynomial::one() {
            return Err(HolomorphyError::NotPolynomial(*v));
        }
    }
    for (i, (a, ga)) in gradient.iter().enumerate() {
        for (b, gb) in gradient.iter().skip(i + 1) {
            let residual = &ga.differentiate(*b) - &gb.differentiate(*a);
            if !residual.is_zero() {
                return Err(HolomorphyError::NotHamiltonian {
                    condition: format!("∂²K/∂{a}∂{b}"),
                    residual,
                });
            }
        }
    }
    // Radial integration: a phase monomial of degree d in ∂K/∂a contributes
    // a·m/(d+1).
    let mut k = RationalExpression::zero();
    for (a, g) in &gradient {
        let den = g.denominator();
        let mut num = Polynomial::zero();
        for (m, coeff) in g.numerator().split_by(|v| v.is_phase()) {
            let d = m.degree() as i64 + 1;
            let term = Polynomial::monomial(m.mul(&crate::algebra::Monomial::var(*a)), crate::algebra::int(1));
            num = &num + &(&term * &coeff).scale(&crate::algebra::rat(1, d));
        }
        k = &k + &RationalExpression::new(num, den.clone()).expect("nonzero denominator");
    }
    let check = hamiltonian_field(&k, pairs);
    if let Some((v, residual)) = check.difference(field) {
        return Err(HolomorphyError::NotHamiltonian {
            condition: format!("reconstructed d{v}/dt"),
            residual,
        });
    }
    Ok(k)
}

/// Runs the exploratory chart list against a system; outcomes are reported,
/// not judged.
pub fn probe_assumption_a(system: &HamiltonianSystem) -> Vec<VerificationReport> {
    verify_chart_polynomiality(system, ChartSet::AssumptionA)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::v;
    use crate::systems::make_system;

    #[test]
    fn every_chart_is_canonical() {
        for f in [Family::D4, Family::B4First, Family::B4Second, Family::D52] {
            for c in charts(ChartSet::Family(f)) {
                c.check_canonical().unwrap_or_else(|e| panic!("{f} {}: {e}", c.label()));
            }
        }
    }

    #[test]
    fn nesting_is_recorded() {
        let r2 = chart_by_index(ChartSet::Family(Family::D4), 2).unwrap();
        assert_eq!(r2.nested_on.as_ref().unwrap().index, 1);
        assert!(chart_by_index(ChartSet::Family(Family::B4First), 2).unwrap().nested_on.is_none());
        assert!(chart_by_index(ChartSet::Family(Family::D4), 7).is_err());
    }

    #[test]
    fn inverse_undoes_nested_chart() {
        let r2 = chart_by_index(ChartSet::Family(Family::D4), 2).unwrap();
        let inv = r2.inverse().unwrap();
        for (slot, image) in r2.composite_images().unwrap() {
            let fresh = FRESH[PHASE.iter().position(|&p| p == slot).unwrap()];
            assert!(image.substitute(&inv).unwrap().equals(&v(fresh)));
        }
    }

    #[test]
    fn trivial_reconstruction() {
        let field = FieldComponents::new(vec![Var::Q, Var::P], vec![RationalExpression::one(), RationalExpression::zero()]);
        let k = reconstruct_hamiltonian(&field, &[(Var::Q, Var::P)]).unwrap();
        assert!(k.equals(&v(Var::P)));
    }

    #[test]
    fn expansion_is_not_hamiltonian() {
        let field = FieldComponents::new(vec![Var::X, Var::Y], vec![v(Var::X), v(Var::Y)]);
        assert!(matches!(
            reconstruct_hamiltonian(&field, &[(Var::X, Var::Y)]),
            Err(HolomorphyError::NotHamiltonian { .. })
        ));
    }

    #[test]
    fn recovers_d4_hamiltonian() {
        let sys = make_system(Family::D4);
        let k = reconstruct_hamiltonian(&sys.vector_field(), &PAIRS).unwrap();
        let diff = &k - &sys.hamiltonian;
        for u in PHASE {
            assert!(diff.differentiate(u).is_zero());
        }
    }
}
