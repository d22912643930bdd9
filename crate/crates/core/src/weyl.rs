//! Coxeter presentations read off the parameter actions, relation checks and
//! the translation operators of the D4(1) group.

use std::time::Instant;

use itertools::Itertools;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{int, RationalExpression, Substitution, Var};
use crate::report::{CheckMode, Mode, VerificationReport, Witness};
use crate::systems::{make_system, Family};
use crate::transforms::{alternative_d4_generators, generators, maps_equal, verify_identity_word, BirationalMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeylError {
    #[error("{label} does not act on the parameters as a reflection: {detail}")]
    NonAffineAction { label: String, detail: String },
    #[error("translation index {0} outside 1..=4")]
    UnknownTranslation(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct CoxeterPresentation {
    pub family: Family,
    pub labels: Vec<String>,
    /// `cartan[j][i]` is the coefficient with `s_i(α_j) = α_j − cartan[j][i]·α_i`.
    pub cartan: Vec<Vec<i64>>,
    pub coxeter_m: Vec<Vec<u32>>,
}

/// Reflections of a family: the generators whose label starts with `s` or `w`.
pub fn reflections(family: Family) -> Vec<BirationalMap> {
    generators(family)
        .into_iter()
        .filter(|g| g.label.starts_with('s') || g.label.starts_with('w'))
        .collect()
}

fn coxeter_exponent(product: i64) -> Option<u32> {
    match product {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

/// Reads the Cartan integers off the parameter actions of `reflections`.
pub fn derive_cartan_from(family: Family, reflections: &[BirationalMap]) -> Result<CoxeterPresentation, WeylError> {
    let symbols = make_system(family).params.symbols().to_vec();
    let n = reflections.len();
    let mut cartan = vec![vec![0i64; n]; n];
    for (i, s) in reflections.iter().enumerate() {
        let bad = |detail: String| WeylError::NonAffineAction {
            label: s.label.clone(),
            detail,
        };
        for (j, &aj) in symbols.iter().enumerate().take(n) {
            // s_i(α_j) − α_j must be a constant multiple of α_i.
            let shift = &s.image(aj) - &RationalExpression::var(aj);
            let coeff = shift.differentiate(symbols[i]);
            let rest = &shift - &(&coeff * &RationalExpression::var(symbols[i]));
            let c = coeff.constant_value().filter(|_| rest.is_zero()).ok_or_else(|| bad(format!("image of {aj}")))?;
            if !c.is_integer() {
                return Err(bad(format!("non-integral coefficient {c}")));
            }
            let c = -c.to_integer();
            cartan[j][i] = i64::try_from(c).map_err(|_| bad("coefficient overflow".into()))?;
        }
        if cartan[i][i] != 2 {
            return Err(bad(format!("{} is not negated", symbols[i])));
        }
    }
    let mut coxeter_m = vec![vec![1u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                return Err(WeylError::NonAffineAction {
                    label: reflections[i].label.clone(),
                    detail: format!("asymmetric zero pattern at ({i},{j})"),
                });
            }
            coxeter_m[i][j] = coxeter_exponent(cartan[i][j] * cartan[j][i]).ok_or_else(|| WeylError::NonAffineAction {
                label: reflections[i].label.clone(),
                detail: format!("product {} at ({i},{j})", cartan[i][j] * cartan[j][i]),
            })?;
        }
    }
    Ok(CoxeterPresentation {
        family,
        labels: reflections.iter().map(|g| g.label.clone()).collect(),
        cartan,
        coxeter_m,
    })
}

pub fn derive_cartan(family: Family) -> Result<CoxeterPresentation, WeylError> {
    derive_cartan_from(family, &reflections(family))
}

/// Standard generalized Cartan matrices `a_ij = ⟨α_i^∨, α_j⟩` in the usual
/// affine labelling.
pub fn standard_cartan(family: Family) -> Option<Vec<Vec<i64>>> {
    let n = match family {
        Family::D51 => 6,
        Family::D4 | Family::B4First | Family::B4Second | Family::D52 => 5,
        _ => return None,
    };
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut bond = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match family {
        Family::D4 => {
            for i in [0, 1, 3, 4] {
                bond(i, 2, -1, -1);
            }
        }
        Family::B4First | Family::B4Second => {
            bond(0, 2, -1, -1);
            bond(1, 2, -1, -1);
            bond(2, 3, -1, -1);
            // α4 is the short root.
            bond(3, 4, -1, -2);
        }
        Family::D52 => {
            bond(0, 1, -2, -1);
            bond(1, 2, -1, -1);
            bond(2, 3, -1, -1);
            bond(3, 4, -1, -2);
        }
        Family::D51 => {
            bond(0, 2, -1, -1);
            bond(1, 2, -1, -1);
            bond(2, 3, -1, -1);
            bond(3, 4, -1, -1);
            bond(3, 5, -1, -1);
        }
        _ => unreachable!(),
    }
    Some(a)
}

/// A relabelling `σ` with `standard[σ(i)][σ(j)] = derived a_ij` in the
/// standard convention, if one exists.
pub fn match_standard(p: &CoxeterPresentation) -> Option<Vec<usize>> {
    let standard = standard_cartan(p.family)?;
    let n = p.cartan.len();
    if standard.len() != n {
        return None;
    }
    // The derived matrix stores a_ji at [j][i]; the standard one stores a_ij at [i][j].
    (0..n).permutations(n).find(|sigma| {
        (0..n).all(|i| (0..n).all(|j| standard[sigma[i]][sigma[j]] == p.cartan[j][i]))
    })
}

fn relation_words(p: &CoxeterPresentation) -> Vec<(usize, usize, u32)> {
    let n = p.labels.len();
    (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, if i == j { 1 } else { p.coxeter_m[i][j] }))
        .collect()
}

/// Checks `(s_i s_j)^{m_ij} = id` for all `i ≤ j` of the given reflections.
pub fn verify_coxeter_relations_for(
    family: Family,
    prefix: &str,
    reflections: &[BirationalMap],
    mode: CheckMode,
) -> Vec<VerificationReport> {
    let p = match derive_cartan_from(family, reflections) {
        Ok(p) => p,
        Err(e) => {
            return vec![VerificationReport::fail(
                format!("coxeter/{prefix}/cartan"),
                mode.into(),
                Witness::Message(e.to_string()),
            )
            .with_family(family.name())]
        }
    };
    relation_words(&p)
        .into_iter()
        .map(|(i, j, m)| {
            let (a, b) = (&reflections[i], &reflections[j]);
            let word: Vec<&BirationalMap> = if i == j {
                vec![a, a]
            } else {
                (0..m).flat_map(|_| [a, b]).collect()
            };
            let name = if i == j {
                format!("coxeter/{prefix}/{}^2", a.label)
            } else {
                format!("coxeter/{prefix}/({}{})^{m}", a.label, b.label)
            };
            verify_identity_word(&name, family, &word, mode)
        })
        .collect()
}

pub fn verify_coxeter_relations(family: Family, mode: CheckMode) -> Vec<VerificationReport> {
    verify_coxeter_relations_for(family, family.slug(), &reflections(family), mode)
}

/// The alternative D4(1) reflections checked against the D4(1) relations.
pub fn verify_alternative_relations(mode: CheckMode) -> Vec<VerificationReport> {
    verify_coxeter_relations_for(Family::D4, "d4-alt", &alternative_d4_generators(), mode)
}

/// Whether the derived presentation matches the standard table.
pub fn verify_cartan(family: Family) -> VerificationReport {
    let start = Instant::now();
    let check = format!("cartan/{}", family.slug());
    let report = match derive_cartan(family) {
        Err(e) => VerificationReport::fail(&check, Mode::Exact, Witness::Message(e.to_string())),
        Ok(p) => match match_standard(&p) {
            Some(sigma) => VerificationReport::pass(&check, Mode::Exact)
                .with_note("relabelling", format!("{sigma:?}"))
                .with_note("cartan", format!("{:?}", p.cartan)),
            None => VerificationReport::fail(
                &check,
                Mode::Exact,
                Witness::Message(format!("no relabelling matches; derived {:?}", p.cartan)),
            ),
        },
    };
    report.with_family(family.name()).timed(start)
}

fn automorphisms(family: Family) -> Vec<BirationalMap> {
    generators(family)
        .into_iter()
        .filter(|g| !(g.label.starts_with('s') || g.label.starts_with('w')))
        .collect()
}

/// Index permutation induced by an automorphism on the parameters.
fn parameter_permutation(family: Family, g: &BirationalMap) -> Option<Vec<usize>> {
    let symbols = make_system(family).params.symbols().to_vec();
    symbols
        .iter()
        .map(|&s| {
            let image = g.image(s);
            symbols.iter().position(|&u| image.equals(&RationalExpression::var(u)))
        })
        .collect()
}

/// Orders of the diagram automorphisms, conjugation of the reflections, and
/// for D4(1) the relation π4 = π2π3π2.
pub fn verify_extended_relations(family: Family, mode: CheckMode) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let refl = reflections(family);
    for pi in automorphisms(family) {
        let n = pi.order.unwrap_or(2) as usize;
        let word: Vec<&BirationalMap> = std::iter::repeat_n(&pi, n).collect();
        out.push(verify_identity_word(
            &format!("extended/{}/{}^{n}", family.slug(), pi.label),
            family,
            &word,
            mode,
        ));
        let Some(sigma) = parameter_permutation(family, &pi) else {
            out.push(
                VerificationReport::fail(
                    format!("extended/{}/{}-permutation", family.slug(), pi.label),
                    mode.into(),
                    Witness::Message("parameter action is not a permutation".into()),
                )
                .with_family(family.name()),
            );
            continue;
        };
        // Every automorphism is an involution, so π s_i π = s_σ(i).
        for (i, s) in refl.iter().enumerate() {
            let t = &refl[sigma[i]];
            out.push(verify_identity_word(
                &format!("extended/{}/{}{}{}={}", family.slug(), pi.label, s.label, pi.label, t.label),
                family,
                &[t, &pi, s, &pi],
                mode,
            ));
        }
    }
    if family == Family::D4 {
        out.push(verify_pi4_relation());
    }
    out
}

/// π4 = π2π3π2 as maps, exactly.
pub fn verify_pi4_relation() -> VerificationReport {
    let start = Instant::now();
    let check = "extended/d4/pi4=pi2pi3pi2";
    let gens = generators(Family::D4);
    let find = |l: &str| gens.iter().find(|g| g.label == l).expect("catalogued");
    let outcome = BirationalMap::compose_word(&[find("pi2"), find("pi3"), find("pi2")])
        .and_then(|w| maps_equal(&w, find("pi4")));
    let report = match outcome {
        Ok(None) => VerificationReport::pass(check, Mode::Exact),
        Ok(Some((v, residual))) => VerificationReport::fail(
            check,
            Mode::Exact,
            Witness::Residual {
                component: v.to_string(),
                residual,
            },
        ),
        Err(e) => VerificationReport::inconclusive(check, Mode::Exact, e.to_string()),
    };
    report.with_family(Family::D4.name()).timed(start)
}

/// Words of the four translation operators as written, in substitution order.
pub const TRANSLATION_WORDS: [&[&str]; 4] = [
    &["s3", "s0", "s2", "s4", "s1", "s2", "pi4"],
    &["s4", "s1", "s2", "s3", "s0", "s2", "pi4"],
    &["s3", "s2", "s0", "s1", "s2", "s3", "pi1", "pi2"],
    &["s4", "s3", "s2", "s1", "s0", "s2", "pi1", "pi2"],
];

/// Expected parameter shifts of the translation operators.
pub const TRANSLATION_SHIFTS: [[i64; 5]; 4] = [
    [1, 0, -1, 1, 0],
    [0, 1, -1, 0, 1],
    [0, 0, 0, 1, -1],
    [0, 0, -1, 1, 1],
];

fn word_maps(word: &[&str], params_only: bool) -> Vec<BirationalMap> {
    let gens = generators(Family::D4);
    let symbols = make_system(Family::D4).params.symbols().to_vec();
    word.iter()
        .map(|l| {
            let g = gens.iter().find(|g| g.label == *l).expect("catalogued letter").clone();
            if params_only {
                let images: Substitution = symbols.iter().map(|&s| (s, g.image(s))).collect();
                BirationalMap::new(g.label.clone(), Family::D4, Family::D4, images)
            } else {
                g
            }
        })
        .collect()
}

/// The translation operator `T_k` as a composed map. Letters act as
/// substitutions on functions: in the word `g1 g2 … gn` the letter `g1` is
/// substituted first, so as a point map `gn` is applied last.
pub fn translation_operator(k: usize) -> Result<BirationalMap, WeylError> {
    let word = TRANSLATION_WORDS.get(k.wrapping_sub(1)).ok_or(WeylError::UnknownTranslation(k))?;
    let maps = word_maps(word, false);
    let reversed: Vec<&BirationalMap> = maps.iter().rev().collect();
    let mut t = BirationalMap::compose_word(&reversed).expect("translation words compose");
    t.label = format!("T{k}");
    Ok(t)
}

/// Parameter part of `T_k`, composed cheaply without phase images.
pub fn translation_parameter_action(k: usize) -> Result<BirationalMap, WeylError> {
    let word = TRANSLATION_WORDS.get(k.wrapping_sub(1)).ok_or(WeylError::UnknownTranslation(k))?;
    let maps = word_maps(word, true);
    let reversed: Vec<&BirationalMap> = maps.iter().rev().collect();
    let mut t = BirationalMap::compose_word(&reversed).expect("parameter actions compose");
    t.label = format!("T{k}");
    Ok(t)
}

/// `image(α_j) − α_j` for every parameter, modulo the normalisation.
pub fn parameter_shift(map: &BirationalMap) -> Vec<RationalExpression> {
    let params = make_system(Family::D4).params;
    let elim = params.elimination();
    params
        .symbols()
        .iter()
        .map(|&s| {
            (&map.image(s) - &RationalExpression::var(s))
                .substitute(&elim)
                .expect("elimination is polynomial")
        })
        .collect()
}

pub fn verify_translation_shifts() -> Vec<VerificationReport> {
    (1..=4)
        .map(|k| {
            let start = Instant::now();
            let check = format!("translation/d4/T{k}");
            let t = translation_parameter_action(k).expect("k in range");
            let shift = parameter_shift(&t);
            let expected = TRANSLATION_SHIFTS[k - 1];
            let bad = shift
                .iter()
                .zip(expected)
                .enumerate()
                .find(|(_, (got, want))| !got.equals(&RationalExpression::int(*want)));
            let report = match bad {
                None => VerificationReport::pass(&check, Mode::Exact),
                Some((j, (got, want))) => VerificationReport::fail(
                    &check,
                    Mode::Exact,
                    Witness::Residual {
                        component: Var::alpha(j).to_string(),
                        residual: got - &RationalExpression::int(want),
                    },
                ),
            };
            report.with_family(Family::D4.name()).timed(start)
        })
        .collect()
}

/// Whether a shift vector preserves the D4(1) normalisation.
pub fn shift_preserves_constraint(shift: &[i64; 5]) -> bool {
    let weights = [1, 1, 2, 1, 1];
    shift.iter().zip(weights).map(|(a, w)| a * w).sum::<i64>() == 0
}

/// Image of a concrete parameter vector under a map's parameter action.
pub fn act_on_parameters(map: &BirationalMap, values: &[i64]) -> Vec<num_rational::BigRational> {
    let params = make_system(map.source).params;
    let pt: crate::algebra::Point = params.symbols().iter().zip(values).map(|(&s, &v)| (s, int(v))).collect();
    params
        .symbols()
        .iter()
        .map(|&s| map.image(s).eval(&pt).unwrap_or_else(|_| num_rational::BigRational::zero()))
        .collect()
}
