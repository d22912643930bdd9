//! The ε-confluence from the D5(1) system to the D4(1) system, together with
//! the limit of the matching subgroup of Bäcklund transformations.

use std::time::Instant;

use serde::Serialize;

use crate::algebra::{AlgebraError, Monomial, Polynomial, RationalExpression, Substitution, Var};
use crate::report::{Mode, VerificationReport, Witness};
use crate::systems::{make_system, Family, FieldComponents};
use crate::transforms::{chain_rule, generator, BirationalMap, MapError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DegenerationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("{component} has a pole at eps = 0: {expression}")]
    PoleAtEpsilonZero {
        component: String,
        expression: RationalExpression,
    },
}

/// New coordinates of the confluence, in the order X, Y, Z, W.
pub const NEW_PHASE: [Var; 4] = [Var::XN, Var::YN, Var::ZN, Var::WN];

fn parse(s: &str) -> RationalExpression {
    s.parse().unwrap_or_else(|e| panic!("confluence formula `{s}`: {e}"))
}

/// The change of parameters and variables from the D5(1) symbols
/// `(t, x, y, z, w, β)` to `(T, X, Y, Z, W, α, ε)`, in both directions.
#[derive(Debug, Clone, Serialize)]
pub struct ConfluenceSubstitution {
    /// β's in terms of the α's and ε.
    pub param_map: Substitution,
    /// `(t, x, y, z, w)` in terms of `(T, X, Y, Z, W)` and ε.
    pub var_map: Substitution,
    /// `(T, X, Y, Z, W)`, the α's and ε written in the D5(1) symbols.
    pub inverse: Substitution,
    /// `dt/dT`.
    pub time_factor: RationalExpression,
}

impl ConfluenceSubstitution {
    pub fn new() -> Self {
        let param_map = [
            (Var::beta(0), "alpha0"),
            (Var::beta(1), "alpha1"),
            (Var::beta(2), "alpha2"),
            (Var::beta(3), "alpha3"),
            (Var::beta(4), "alpha4 - alpha3 - 1/eps"),
            (Var::beta(5), "1/eps"),
        ]
        .into_iter()
        .map(|(v, s)| (v, parse(s)))
        .collect();
        let var_map = [
            (Var::T, "-eps*T"),
            (Var::X, "1 + X/(eps*T)"),
            (Var::Y, "eps*T*Y"),
            (Var::Z, "1 + 1/(eps*T*Z)"),
            (Var::W, "-eps*T*(Z*W + alpha3)*Z"),
        ]
        .into_iter()
        .map(|(v, s)| (v, parse(s)))
        .collect();
        let inverse = [
            (Var::TN, "-t*beta5"),
            (Var::XN, "-(x - 1)*t"),
            (Var::YN, "-y/t"),
            (Var::ZN, "-1/(t*(z - 1))"),
            (Var::WN, "t*(z - 1)*(w*(z - 1) + beta3)"),
            (Var::alpha(0), "beta0"),
            (Var::alpha(1), "beta1"),
            (Var::alpha(2), "beta2"),
            (Var::alpha(3), "beta3"),
            (Var::alpha(4), "beta4 + beta3 + beta5"),
            (Var::EPS, "1/beta5"),
        ]
        .into_iter()
        .map(|(v, s)| (v, parse(s)))
        .collect();
        ConfluenceSubstitution {
            param_map,
            var_map,
            inverse,
            time_factor: parse("-eps"),
        }
    }

    /// The forward substitution on every D5(1) symbol at once.
    pub fn forward(&self) -> Substitution {
        self.param_map
            .iter()
            .chain(self.var_map.iter())
            .map(|(v, e)| (v, e.clone()))
            .collect()
    }

    /// Whether the β-images satisfy the D5(1) normalisation exactly when the
    /// α's satisfy the D4(1) one.
    pub fn preserves_constraint(&self) -> bool {
        let d51 = make_system(Family::D51).params.constraint_form();
        let d4 = make_system(Family::D4).params.elimination();
        d51.substitute(&self.param_map)
            .and_then(|e| e.substitute(&d4))
            .map(|e| e.is_zero())
            .unwrap_or(false)
    }
}

impl Default for ConfluenceSubstitution {
    fn default() -> Self {
        Self::new()
    }
}

/// Renames the new coordinates `(T, X, Y, Z, W)` to `(t, x, y, z, w)` so
/// that confluenced expressions can be compared with the D4(1) catalog.
pub fn to_d4_names(v: Var) -> Var {
    match v {
        Var::TN => Var::T,
        Var::XN => Var::X,
        Var::YN => Var::Y,
        Var::ZN => Var::Z,
        Var::WN => Var::W,
        other => other,
    }
}

/// The D5(1) field rewritten in `(T, X, Y, Z, W)` with ε symbolic.
pub fn substitute_confluence(conf: &ConfluenceSubstitution) -> Result<FieldComponents, DegenerationError> {
    let d51 = make_system(Family::D51);
    let field = d51.vector_field().substitute(&conf.param_map)?;
    let new_vars = NEW_PHASE
        .iter()
        .map(|&n| Ok((n, conf.inverse.get(n).expect("phase image").substitute(&conf.param_map)?)))
        .collect::<Result<Vec<_>, DegenerationError>>()?;
    let tau = conf.inverse.get(Var::TN).expect("time image").substitute(&conf.param_map)?;
    let rewritten = chain_rule(&new_vars, &tau, &field)?;
    let forward = conf.var_map.clone();
    let comps = rewritten
        .components
        .iter()
        .map(|c| c.substitute(&forward))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldComponents::new(rewritten.vars, comps))
}

/// The value at ε = 0 of a rational expression that has no pole there.
pub fn epsilon_limit_expr(e: &RationalExpression, component: &str) -> Result<RationalExpression, DegenerationError> {
    let zero = Substitution::new().with(Var::EPS, RationalExpression::zero());
    let mut order = 0u32;
    let mut den = RationalExpression::one();
    for (f, k) in e.denominator_factors() {
        let m = f.min_degree_in(Var::EPS);
        order += m * k;
        let g = f.div_monomial(&Monomial::var_pow(Var::EPS, m as u16));
        den = &den * &zero.apply_poly(&g).pow(*k as i32)?;
    }
    let num = e.numerator();
    if num.min_degree_in(Var::EPS) < order {
        return Err(DegenerationError::PoleAtEpsilonZero {
            component: component.to_string(),
            expression: e.clone(),
        });
    }
    let num: Polynomial = num.div_monomial(&Monomial::var_pow(Var::EPS, order as u16));
    Ok(zero.apply_poly(&num).checked_div(&den)?)
}

/// Componentwise ε → 0 limit of a field.
pub fn epsilon_limit(field: &FieldComponents) -> Result<FieldComponents, DegenerationError> {
    let comps = field
        .iter()
        .map(|(v, e)| epsilon_limit_expr(e, &format!("d{v}/dT")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldComponents::new(field.vars.clone(), comps))
}

/// The limit field, renamed to `(t, x, y, z, w)`, compared with the D4(1)
/// system after eliminating α0 on both sides.
pub fn verify_system_confluence() -> VerificationReport {
    let start = Instant::now();
    let check = "degeneration/system";
    let d4 = make_system(Family::D4);
    let elim = d4.params.elimination();
    let outcome = (|| -> Result<Option<Witness>, DegenerationError> {
        let conf = ConfluenceSubstitution::new();
        let limit = epsilon_limit(&substitute_confluence(&conf)?)?;
        let expected = d4.vector_field();
        for ((n, got), (u, want)) in limit.iter().zip(expected.iter()) {
            let got = got.rename(to_d4_names).substitute(&elim)?;
            let want = want.substitute(&elim)?;
            let residual = &got - &want;
            if !residual.is_zero() {
                return Ok(Some(Witness::Residual {
                    component: format!("d{n}/dT vs d{u}/dt"),
                    residual,
                }));
            }
        }
        Ok(None)
    })();
    report(check, outcome, start)
}

fn report(check: &str, outcome: Result<Option<Witness>, DegenerationError>, start: Instant) -> VerificationReport {
    match outcome {
        Ok(w) => VerificationReport::from_outcome(check, Mode::Exact, w),
        Err(e) => VerificationReport::fail(check, Mode::Exact, Witness::Message(e.to_string())),
    }
    .with_family(Family::D51.name())
    .timed(start)
}

/// The D5(1) words whose limits are the D4(1) reflections s0..s4.
pub const SUBGROUP_WORDS: [(&str, &[&str]); 5] = [
    ("s0", &["w0"]),
    ("s1", &["w1"]),
    ("s2", &["w2"]),
    ("s3", &["w3"]),
    ("s4", &["w4", "w5", "w3", "w4", "w5"]),
];

/// Symbols of the new coordinates whose conjugated images are compared.
fn conjugated_symbols() -> Vec<Var> {
    let mut out = vec![Var::TN];
    out.extend(NEW_PHASE);
    out.extend((0..5).map(Var::alpha));
    out
}

/// `map` written in the new coordinates: each new symbol is expressed in the
/// D5(1) symbols, moved by `map`, and pulled back through the forward
/// substitution. ε is transformed through `ε' = 1/β5'`.
pub fn conjugate(map: &BirationalMap, conf: &ConfluenceSubstitution) -> Result<Substitution, DegenerationError> {
    let forward = conf.forward();
    let mut out = Substitution::new();
    for n in conjugated_symbols().into_iter().chain([Var::EPS]) {
        let back = conf.inverse.get(n).expect("inverse image");
        let moved = back.substitute(map.images())?;
        out.insert(n, moved.substitute(&forward)?);
    }
    Ok(out)
}

/// Limit of one conjugated D5(1) word, compared with the D4(1) generator of
/// the same label.
pub fn verify_generator_limit(label: &str, word: &[&str]) -> VerificationReport {
    let start = Instant::now();
    let check = format!("degeneration/group/{label}");
    let d4 = make_system(Family::D4);
    let elim = d4.params.elimination();
    let outcome = (|| -> Result<Option<Witness>, DegenerationError> {
        let letters = word
            .iter()
            .map(|l| generator(Family::D51, l))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&BirationalMap> = letters.iter().collect();
        let map = BirationalMap::compose_word(&refs)?;
        let target = generator(Family::D4, label)?;
        let conj = conjugate(&map, &ConfluenceSubstitution::new())?;
        for n in conjugated_symbols() {
            let image = conj.get(n).expect("conjugated image");
            let name = to_d4_names(n);
            let got = epsilon_limit_expr(image, &name.to_string())?.rename(to_d4_names).substitute(&elim)?;
            let want = target.image(name).substitute(&elim)?;
            let residual = &got - &want;
            if !residual.is_zero() {
                return Ok(Some(Witness::Residual {
                    component: name.to_string(),
                    residual,
                }));
            }
        }
        Ok(None)
    })();
    report(&check, outcome, start).with_note("word", word.join(""))
}

/// One report per subgroup generator.
pub fn verify_group_convergence() -> Vec<VerificationReport> {
    SUBGROUP_WORDS
        .iter()
        .map(|(label, word)| verify_generator_limit(label, word))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removable_singularity_is_cancelled() {
        let e = parse("(1 + eps*X)/eps - 1/eps");
        assert!(epsilon_limit_expr(&e, "e").unwrap().equals(&parse("X")));
    }

    #[test]
    fn bare_pole_is_reported() {
        assert!(matches!(
            epsilon_limit_expr(&parse("1/eps"), "e"),
            Err(DegenerationError::PoleAtEpsilonZero { .. })
        ));
    }

    #[test]
    fn limit_keeps_nonvanishing_factors() {
        let e = parse("eps/(eps*(1 + eps*X)*(X - 1))");
        assert!(epsilon_limit_expr(&e, "e").unwrap().equals(&parse("1/(X - 1)")));
    }

    #[test]
    fn parameter_images_match_the_confluence_table() {
        let conf = ConfluenceSubstitution::new();
        assert!(conf.param_map.get(Var::beta(4)).unwrap().equals(&parse("alpha4 - alpha3 - 1/eps")));
        assert!(conf.var_map.get(Var::X).unwrap().equals(&parse("1 + X/(eps*T)")));
        assert!(conf.preserves_constraint());
    }

    #[test]
    fn inverse_undoes_the_forward_substitution() {
        let conf = ConfluenceSubstitution::new();
        let forward = conf.forward();
        for (n, e) in conf.inverse.iter() {
            assert!(e.substitute(&forward).unwrap().equals(&RationalExpression::var(n)), "{n}");
        }
    }

    #[test]
    fn identity_conjugates_to_identity() {
        let conf = ConfluenceSubstitution::new();
        let conj = conjugate(&BirationalMap::identity(Family::D51), &conf).unwrap();
        for (n, e) in conj.iter() {
            assert!(e.equals(&RationalExpression::var(n)), "{n}");
        }
    }
}
