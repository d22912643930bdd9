//! Birational maps on phase variables, time and parameters, with symmetry,
//! symplecticity and equivalence checks.

mod catalog;
mod solve;

pub use catalog::{
    alternative_d4_generators, equivalence, equivalence_labels, generator, generator_labels, generators,
    planar_equivalence, Equivalence,
};
pub use solve::{chain_rule, invert_triangular};

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::algebra::{AlgebraError, Point, RationalExpression, Substitution, Var};
use crate::report::{CheckMode, VerificationReport, Witness};
use crate::sampling::{Sampler, MAX_RESAMPLES};
use crate::systems::{make_system, Family, FieldComponents, HamiltonianSystem, ParameterVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("no generator `{label}` in family {family}")]
    UnknownLabel { family: Family, label: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("time image has zero derivative")]
    NonInvertibleTime,
    #[error("cannot solve for {0} in closed form")]
    EliminationFails(String),
    #[error("maps act on different families ({0} after {1})")]
    FamilyMismatch(Family, Family),
}

/// A birational map `(phase, t, params) ↦ (phase', t', params')`. Every symbol
/// without an explicit image is mapped to itself. Images are expressions in
/// the source symbols and are keyed by the target symbols.
#[derive(Debug, Clone)]
pub struct BirationalMap {
    pub label: String,
    pub source: Family,
    pub target: Family,
    images: Substitution,
    /// Declared order when the map generates a finite cyclic group.
    pub order: Option<u32>,
}

impl BirationalMap {
    pub fn new(label: impl Into<String>, source: Family, target: Family, images: Substitution) -> Self {
        BirationalMap {
            label: label.into(),
            source,
            target,
            images,
            order: None,
        }
    }

    pub fn identity(family: Family) -> Self {
        Self::new("id", family, family, Substitution::new())
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = Some(order);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn images(&self) -> &Substitution {
        &self.images
    }

    pub fn image(&self, v: Var) -> RationalExpression {
        self.images.get(v).cloned().unwrap_or_else(|| RationalExpression::var(v))
    }

    pub fn time_image(&self) -> RationalExpression {
        self.image(Var::T)
    }

    /// Replaces (or adds) the image of one symbol.
    pub fn set_image(&mut self, v: Var, image: RationalExpression) {
        self.images.insert(v, image);
    }

    /// Point-map composition `outer ∘ inner`: `inner` is applied first, and
    /// its images are substituted into the images of `outer`.
    pub fn compose(outer: &BirationalMap, inner: &BirationalMap) -> Result<BirationalMap, MapError> {
        if outer.source != inner.target {
            return Err(MapError::FamilyMismatch(outer.source, inner.target));
        }
        let mut images = Substitution::new();
        let domain = outer.images.domain().union(inner.images.domain());
        for v in domain.iter() {
            let image = match outer.images.get(v) {
                Some(e) => e.substitute(&inner.images)?,
                None => inner.image(v),
            };
            if image != RationalExpression::var(v) {
                images.insert(v, image);
            }
        }
        Ok(BirationalMap::new(
            format!("{}*{}", outer.label, inner.label),
            inner.source,
            outer.target,
            images,
        ))
    }

    /// Composes a word of maps read right to left: the last entry acts first.
    pub fn compose_word(word: &[&BirationalMap]) -> Result<BirationalMap, MapError> {
        let (last, rest) = word.split_last().expect("nonempty word");
        let mut acc = (*last).clone();
        for g in rest.iter().rev() {
            acc = Self::compose(g, &acc)?;
        }
        acc.label = word.iter().map(|g| g.label.as_str()).collect::<Vec<_>>().join("");
        Ok(acc)
    }

    /// Images of every symbol at a rational point; symbols without an image
    /// keep their value.
    pub fn apply_point(&self, pt: &Point) -> Result<Point, AlgebraError> {
        let mut out = pt.clone();
        for (v, e) in self.images.iter() {
            out.set(v, e.eval(pt)?);
        }
        Ok(out)
    }

    /// Parameter action as a list of `(target symbol, image)` pairs.
    pub fn param_action(&self, params: &ParameterVector) -> Vec<(Var, RationalExpression)> {
        params.symbols().iter().map(|&s| (s, self.image(s))).collect()
    }

    /// Whether the parameter action maps the source normalisation onto the
    /// target one.
    pub fn preserves_constraint(&self) -> bool {
        let source = make_system(self.source).params;
        let target = make_system(self.target).params;
        let image = match target.constraint_form().substitute(&self.images) {
            Ok(e) => e,
            Err(_) => return false,
        };
        image
            .substitute(&source.elimination())
            .map(|e| e.is_zero())
            .unwrap_or(false)
    }
}

impl Serialize for BirationalMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let params = make_system(self.source).params;
        let targets = make_system(self.target).params;
        let mut matrix = Vec::new();
        let mut offsets = Vec::new();
        for &t in targets.symbols() {
            let image = self.image(t);
            let zero: Point = params.symbols().iter().map(|&p| (p, crate::algebra::int(0))).collect();
            let offset = image.eval(&zero).ok();
            let row: Vec<String> = params
                .symbols()
                .iter()
                .map(|&p| {
                    image
                        .differentiate(p)
                        .constant_value()
                        .map(|c| c.to_string())
                        .unwrap_or_else(|| "?".into())
                })
                .collect();
            matrix.push(row);
            offsets.push(offset.map(|o| o.to_string()));
        }
        let vars: BTreeMap<Var, &RationalExpression> = self
            .images
            .iter()
            .filter(|(v, _)| v.is_phase())
            .collect();
        let mut st = s.serialize_struct("BirationalMap", 7)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("var_images", &vars)?;
        st.serialize_field("time_image", &self.time_image())?;
        st.serialize_field("param_matrix", &matrix)?;
        st.serialize_field("param_offset", &offsets)?;
        st.end()
    }
}

/// Pushes a source field through `map`: components are `dX/dT` written in
/// the source variables, keyed by the target phase variables.
pub fn pushforward_field(map: &BirationalMap, field: &FieldComponents) -> Result<FieldComponents, MapError> {
    let targets: Vec<(Var, RationalExpression)> =
        map.target.phase_vars().into_iter().map(|u| (u, map.image(u))).collect();
    chain_rule(&targets, &map.time_image(), field)
}

fn residual_witness(component: Var, residual: RationalExpression) -> Witness {
    Witness::Residual {
        component: component.to_string(),
        residual,
    }
}

fn point_witness(pt: &Point, detail: String) -> Witness {
    Witness::Point {
        values: pt.iter().map(|(v, c)| (v.to_string(), c.to_string())).collect(),
        detail,
    }
}

/// Runs `probe` at seeded random points on the parameter hyperplane,
/// resampling whenever a denominator vanishes. `probe` returns a failure
/// description or `None`.
pub(crate) fn random_check(
    check: &str,
    vars: &[Var],
    params: &ParameterVector,
    seed: u64,
    samples: usize,
    probe: impl Fn(&Point) -> Result<Option<String>, AlgebraError>,
) -> Result<Option<Witness>, String> {
    let mut sampler = Sampler::new(seed, check);
    let mut done = 0;
    let mut misses = 0;
    while done < samples {
        let pt = sampler.point(vars, params);
        match probe(&pt) {
            Ok(None) => done += 1,
            Ok(Some(detail)) => return Ok(Some(point_witness(&pt, detail))),
            Err(AlgebraError::DenominatorZeroAtPoint) | Err(AlgebraError::DenominatorVanishes) => {
                misses += 1;
                if misses > MAX_RESAMPLES {
                    return Err(format!("{misses} sample points hit vanishing denominators"));
                }
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(None)
}

fn finish(
    check: &str,
    family: Family,
    mode: CheckMode,
    start: Instant,
    outcome: Result<Option<Witness>, String>,
) -> VerificationReport {
    let report = match outcome {
        Ok(w) => VerificationReport::from_outcome(check, mode.into(), w),
        Err(why) => VerificationReport::inconclusive(check, mode.into(), why),
    };
    report.with_family(family.name()).timed(start)
}

fn source_vars(family: Family) -> Vec<Var> {
    let mut vars = family.phase_vars();
    vars.push(Var::T);
    vars
}

/// Exact residual of `pushforward(map, source field) − target field ∘ map`,
/// with the first source parameter eliminated.
fn symmetry_residual(map: &BirationalMap, source: &HamiltonianSystem, target: &HamiltonianSystem) -> Result<Option<Witness>, String> {
    let elim = source.params.elimination();
    let lhs = pushforward_field(map, &source.vector_field()).map_err(|e| e.to_string())?;
    let rhs = target.vector_field().substitute(map.images()).map_err(|e| e.to_string())?;
    for (u, l) in lhs.iter() {
        let r = rhs.component(u).expect("same phase variables");
        let diff = (l - r).substitute(&elim).map_err(|e| e.to_string())?;
        if !diff.is_zero() {
            return Ok(Some(residual_witness(u, diff)));
        }
    }
    Ok(None)
}

fn symmetry_probe(
    map: &BirationalMap,
    source: &HamiltonianSystem,
    target: &HamiltonianSystem,
) -> impl Fn(&Point) -> Result<Option<String>, AlgebraError> {
    let field = source.vector_field();
    let target_field = target.vector_field();
    let vars = map.target.phase_vars();
    let src_vars = source.phase_vars();
    let grads: Vec<(Var, Vec<RationalExpression>, RationalExpression)> = vars
        .iter()
        .map(|&u| {
            let g = map.image(u);
            (u, src_vars.iter().map(|&x| g.differentiate(x)).collect(), g.differentiate(Var::T))
        })
        .collect();
    let tau = map.time_image();
    let tau_grad: Vec<RationalExpression> = src_vars.iter().map(|&x| tau.differentiate(x)).collect();
    let tau_t = tau.differentiate(Var::T);
    let map = map.clone();
    move |pt: &Point| {
        let f: Vec<_> = src_vars
            .iter()
            .map(|&x| field.component(x).expect("field component").eval(pt))
            .collect::<Result<_, _>>()?;
        let mut dtau = tau_t.eval(pt)?;
        for (g, fj) in tau_grad.iter().zip(&f) {
            dtau += g.eval(pt)? * fj;
        }
        if num_traits::Zero::is_zero(&dtau) {
            return Err(AlgebraError::DenominatorZeroAtPoint);
        }
        let image = map.apply_point(pt)?;
        for (u, grad, gt) in &grads {
            let mut lhs = gt.eval(pt)?;
            for (g, fj) in grad.iter().zip(&f) {
                lhs += g.eval(pt)? * fj;
            }
            lhs /= &dtau;
            let rhs = target_field.component(*u).expect("target component").eval(&image)?;
            if lhs != rhs {
                return Ok(Some(format!("d{u}/dt: pushforward {lhs} != target {rhs}")));
            }
        }
        Ok(None)
    }
}

/// Whether `map` carries solutions of `system` to solutions of the target
/// family with transformed parameters.
pub fn verify_symmetry(map: &BirationalMap, system: &HamiltonianSystem, mode: CheckMode) -> VerificationReport {
    let start = Instant::now();
    let check = format!("symmetry/{}/{}", system.family.slug(), map.label);
    let target = make_system(map.target);
    let outcome = match mode {
        CheckMode::Exact => symmetry_residual(map, system, &target),
        CheckMode::Random { seed, samples } => random_check(
            &check,
            &source_vars(system.family),
            &system.params,
            seed,
            samples,
            symmetry_probe(map, system, &target),
        ),
    };
    finish(&check, system.family, mode, start, outcome)
}

/// Poisson bracket at fixed time with respect to the given canonical pairs.
pub fn poisson_bracket(f: &RationalExpression, g: &RationalExpression, pairs: &[(Var, Var)]) -> RationalExpression {
    let mut acc = RationalExpression::zero();
    for &(u, p) in pairs {
        acc = &acc + &(&(&f.differentiate(u) * &g.differentiate(p)) - &(&f.differentiate(p) * &g.differentiate(u)));
    }
    acc
}

/// First deviation of the images from the canonical bracket pattern.
pub fn bracket_defect(
    images: &[(Var, RationalExpression)],
    target_pairs: &[(Var, Var)],
    source_pairs: &[(Var, Var)],
) -> Option<(String, RationalExpression)> {
    let partner = |a: Var, b: Var| -> i64 {
        for &(u, p) in target_pairs {
            if (a, b) == (u, p) {
                return 1;
            }
            if (a, b) == (p, u) {
                return -1;
            }
        }
        0
    };
    for (i, (a, fa)) in images.iter().enumerate() {
        for (b, fb) in images.iter().skip(i + 1) {
            let expected = RationalExpression::int(partner(*a, *b));
            let diff = &poisson_bracket(fa, fb, source_pairs) - &expected;
            if !diff.is_zero() {
                return Some((format!("{{{a},{b}}}"), diff));
            }
        }
    }
    None
}

/// Canonical brackets `{X,Y} = {Z,W} = 1`, all cross brackets zero.
pub fn verify_symplectic(map: &BirationalMap) -> VerificationReport {
    let start = Instant::now();
    let check = format!("symplectic/{}", map.label);
    let images: Vec<(Var, RationalExpression)> =
        map.target.phase_vars().into_iter().map(|u| (u, map.image(u))).collect();
    let witness = bracket_defect(&images, &map.target.pairs(), &map.source.pairs()).map(|(component, residual)| {
        Witness::Residual { component, residual }
    });
    finish(&check, map.source, CheckMode::Exact, start, Ok(witness))
}

/// `K∘map − H` must not depend on the phase variables.
fn hamiltonian_defect(map: &BirationalMap, source: &HamiltonianSystem, target: &HamiltonianSystem) -> Result<Option<Witness>, String> {
    let pulled = target.hamiltonian.substitute(map.images()).map_err(|e| e.to_string())?;
    let diff = (&pulled - &source.hamiltonian)
        .substitute(&source.params.elimination())
        .map_err(|e| e.to_string())?;
    for u in source.phase_vars() {
        let d = diff.differentiate(u);
        if !d.is_zero() {
            return Ok(Some(Witness::Residual {
                component: format!("d(K∘g − H)/d{u}"),
                residual: d,
            }));
        }
    }
    Ok(None)
}

/// Field and Hamiltonian correspondence of two systems under `map`.
pub fn verify_equivalence(
    map: &BirationalMap,
    source: &HamiltonianSystem,
    target: &HamiltonianSystem,
    mode: CheckMode,
) -> VerificationReport {
    let start = Instant::now();
    let check = format!("equivalence/{}", map.label);
    let fields = match mode {
        CheckMode::Exact => symmetry_residual(map, source, target),
        CheckMode::Random { seed, samples } => random_check(
            &check,
            &source_vars(source.family),
            &source.params,
            seed,
            samples,
            symmetry_probe(map, source, target),
        ),
    };
    let outcome = match fields {
        Ok(None) => hamiltonian_defect(map, source, target),
        other => other,
    };
    finish(&check, source.family, mode, start, outcome)
}

/// Symbols a map acts on: phase variables, time and the source parameters.
fn acted_symbols(family: Family) -> Vec<Var> {
    let mut out = source_vars(family);
    out.extend_from_slice(make_system(family).params.symbols());
    out
}

/// The identity restricted to the normalisation hyperplane.
fn constrained_identity(family: Family) -> BirationalMap {
    let elim = make_system(family).params.elimination();
    BirationalMap::new("id", family, family, elim)
}

/// Whether a composite word is the identity, modulo the source normalisation.
pub fn verify_identity_word(
    check: &str,
    family: Family,
    word: &[&BirationalMap],
    mode: CheckMode,
) -> VerificationReport {
    let start = Instant::now();
    let outcome = match mode {
        CheckMode::Exact => (|| {
            let mut acc = constrained_identity(family);
            for g in word.iter().rev() {
                acc = BirationalMap::compose(g, &acc).map_err(|e| e.to_string())?;
            }
            let elim = make_system(family).params.elimination();
            for v in acted_symbols(family) {
                let expected = RationalExpression::var(v).substitute(&elim).map_err(|e| e.to_string())?;
                let got = acc.image(v).substitute(&elim).map_err(|e| e.to_string())?;
                if !got.equals(&expected) {
                    return Ok(Some(residual_witness(v, &got - &expected)));
                }
            }
            Ok(None)
        })(),
        CheckMode::Random { seed, samples } => {
            let params = make_system(family).params;
            let symbols = acted_symbols(family);
            random_check(check, &source_vars(family), &params, seed, samples, |pt| {
                let mut cur = pt.clone();
                for g in word.iter().rev() {
                    cur = g.apply_point(&cur)?;
                }
                for &v in &symbols {
                    if cur.get(v) != pt.get(v) {
                        return Ok(Some(format!("{v} is not restored")));
                    }
                }
                Ok(None)
            })
        }
    };
    finish(check, family, mode, start, outcome)
}

/// Checks a declared finite order: `g^order = id`.
pub fn verify_order(map: &BirationalMap, mode: CheckMode) -> VerificationReport {
    let n = map.order.unwrap_or(2) as usize;
    let word: Vec<&BirationalMap> = std::iter::repeat_n(map, n).collect();
    verify_identity_word(&format!("order/{}/{}", map.source.slug(), map.label), map.source, &word, mode)
}

/// Whether two maps agree, modulo the source normalisation.
pub fn maps_equal(a: &BirationalMap, b: &BirationalMap) -> Result<Option<(Var, RationalExpression)>, MapError> {
    let elim = make_system(a.source).params.elimination();
    for v in acted_symbols(a.source) {
        let x = a.image(v).substitute(&elim)?;
        let y = b.image(v).substitute(&elim)?;
        if !x.equals(&y) {
            return Ok(Some((v, &x - &y)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::v;

    #[test]
    fn identity_is_a_symmetry() {
        for f in Family::ALL {
            let sys = make_system(f);
            let r = verify_symmetry(&BirationalMap::identity(f), &sys, CheckMode::Exact);
            assert!(r.passed(), "{}", r.summary());
        }
    }

    #[test]
    fn non_canonical_scaling_is_not_symplectic() {
        let images = Substitution::new().with(Var::X, &RationalExpression::int(2) * &v(Var::X));
        let map = BirationalMap::new("scale", Family::D4, Family::D4, images);
        let r = verify_symplectic(&map);
        assert!(r.failed());
        match r.witness.unwrap() {
            Witness::Residual { residual, .. } => assert!(residual.equals(&RationalExpression::one())),
            w => panic!("unexpected witness {w:?}"),
        }
    }
}
