//! The full verification suite: selection, parallel dispatch and a single
//! order-stable report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{v, RationalExpression, Var};
use crate::degeneration::{verify_group_convergence, verify_system_confluence};
use crate::holomorphy::{verify_chart_polynomiality, ChartSet};
use crate::numerics::{verify_backlund_suite, Benchmark};
use crate::report::{CheckMode, Mode, Status, VerificationReport, Witness};
use crate::sampling::DEFAULT_SAMPLES;
use crate::systems::{
    check_field_matches_display, displayed_field, first_integral_search, make_system, span_equal, Family,
    HamiltonianSystem, ParameterVector,
};
use crate::transforms::{
    equivalence, equivalence_labels, generators, verify_equivalence, verify_order, verify_symmetry, verify_symplectic,
};
use crate::weyl::{verify_alternative_relations, verify_cartan, verify_coxeter_relations, verify_extended_relations, verify_translation_shifts};

/// Families whose symmetry groups are checked.
const GROUP_FAMILIES: [Family; 5] = Family::WEYL;
/// Families with holomorphy charts.
const CHART_FAMILIES: [Family; 4] = [Family::D4, Family::B4First, Family::B4Second, Family::D52];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fields,
    Symmetry,
    Coxeter,
    Extended,
    Translations,
    Holomorphy,
    Equivalence,
    Confluence,
    Numeric,
    Integrals,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Fields,
        Suite::Symmetry,
        Suite::Coxeter,
        Suite::Extended,
        Suite::Translations,
        Suite::Holomorphy,
        Suite::Equivalence,
        Suite::Confluence,
        Suite::Numeric,
        Suite::Integrals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fields => "fields",
            Suite::Symmetry => "symmetry",
            Suite::Coxeter => "coxeter",
            Suite::Extended => "extended",
            Suite::Translations => "translations",
            Suite::Holomorphy => "holomorphy",
            Suite::Equivalence => "equivalence",
            Suite::Confluence => "confluence",
            Suite::Numeric => "numeric",
            Suite::Integrals => "integrals",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite `{0}`")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// What to run and how.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub mode: Mode,
    /// Restricts family-specific checks; `None` means every family.
    pub families: Option<Vec<Family>>,
}

impl SuiteConfig {
    /// Every suite in random mode with the given seed.
    pub fn all_random(seed: u64, samples: usize) -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            mode: Mode::Random { seed, samples },
            families: None,
        }
    }

    pub fn check_mode(&self) -> CheckMode {
        match self.mode {
            Mode::Random { seed, samples } => CheckMode::Random { seed, samples },
            _ => CheckMode::Exact,
        }
    }

    fn wants(&self, f: Family) -> bool {
        self.families.as_ref().is_none_or(|fs| fs.contains(&f))
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::all_random(0, DEFAULT_SAMPLES)
    }
}

/// The aggregated report `{version, config, checks}`, sorted by check name.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub version: &'static str,
    pub config: SuiteConfig,
    pub checks: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

type Job = Box<dyn Fn() -> Vec<VerificationReport> + Send + Sync>;

fn job(f: impl Fn() -> Vec<VerificationReport> + Send + Sync + 'static) -> Job {
    Box::new(f)
}

fn one(f: impl Fn() -> VerificationReport + Send + Sync + 'static) -> Job {
    Box::new(move || vec![f()])
}

/// The planar system `H = p`, whose first integrals are known in closed form.
pub fn toy_system() -> HamiltonianSystem {
    HamiltonianSystem::new(Family::PIII, "toy", v(Var::P), vec![(Var::Q, Var::P)], ParameterVector::unconstrained(vec![]))
        .expect("polynomial Hamiltonian")
}

/// Compares the basis found by the search with an expected span.
fn integral_check(check: &str, system: &HamiltonianSystem, degree: u32, window: (i32, i32), expected: Vec<RationalExpression>) -> VerificationReport {
    let start = Instant::now();
    let report = match first_integral_search(system, degree, window) {
        Err(e) => VerificationReport::fail(check, Mode::Exact, Witness::Message(e.to_string())),
        Ok(basis) => {
            let dim = basis.len();
            match span_equal(&basis, &expected) {
                Ok(true) => VerificationReport::pass(check, Mode::Exact),
                Ok(false) => VerificationReport::fail(
                    check,
                    Mode::Exact,
                    Witness::Message(format!(
                        "basis [{}] differs from the expected span",
                        basis.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
                    )),
                ),
                Err(e) => VerificationReport::fail(check, Mode::Exact, Witness::Message(e.to_string())),
            }
            .with_note("basis_dimension", dim)
        }
    };
    report.with_family(system.family.name()).timed(start)
}

fn field_check(f: Family) -> VerificationReport {
    let start = Instant::now();
    let check = format!("fields/{}", f.slug());
    let system = make_system(f);
    let report = match displayed_field(f) {
        None => VerificationReport::inconclusive(&check, Mode::Exact, "no displayed system"),
        Some(display) => match check_field_matches_display(&system, &display) {
            None => VerificationReport::pass(&check, Mode::Exact).with_note("components", display.vars.len()),
            Some((u, residual)) => VerificationReport::fail(
                &check,
                Mode::Exact,
                Witness::Residual {
                    component: format!("d{u}/dt"),
                    residual,
                },
            ),
        },
    };
    report.with_family(f.name()).timed(start)
}

fn jobs_for(config: &SuiteConfig) -> Vec<Job> {
    let mode = config.check_mode();
    let mut jobs: Vec<Job> = Vec::new();
    for &suite in &config.suites {
        match suite {
            Suite::Fields => {
                for f in CHART_FAMILIES.into_iter().filter(|&f| config.wants(f)) {
                    jobs.push(one(move || field_check(f)));
                }
            }
            Suite::Symmetry => {
                for f in GROUP_FAMILIES.into_iter().filter(|&f| config.wants(f)) {
                    for g in generators(f) {
                        let g2 = g.clone();
                        jobs.push(one(move || verify_symmetry(&g, &make_system(f), mode)));
                        jobs.push(one(move || verify_order(&g2, mode)));
                    }
                }
            }
            Suite::Coxeter => {
                for f in GROUP_FAMILIES.into_iter().filter(|&f| config.wants(f)) {
                    jobs.push(one(move || verify_cartan(f)));
                    jobs.push(job(move || verify_coxeter_relations(f, mode)));
                }
                if config.wants(Family::D4) {
                    jobs.push(job(move || verify_alternative_relations(mode)));
                }
            }
            Suite::Extended => {
                for f in GROUP_FAMILIES.into_iter().filter(|&f| config.wants(f)) {
                    jobs.push(job(move || verify_extended_relations(f, mode)));
                }
            }
            Suite::Translations => {
                if config.wants(Family::D4) {
                    jobs.push(job(verify_translation_shifts));
                }
            }
            Suite::Holomorphy => {
                for f in CHART_FAMILIES.into_iter().filter(|&f| config.wants(f)) {
                    jobs.push(job(move || verify_chart_polynomiality(&make_system(f), ChartSet::Family(f))));
                }
            }
            Suite::Equivalence => {
                for label in equivalence_labels() {
                    let e = equivalence(&label).expect("catalogued");
                    if !config.wants(e.source) && !config.wants(e.target) {
                        continue;
                    }
                    jobs.push(job(move || {
                        vec![
                            verify_equivalence(&e.map, &make_system(e.source), &make_system(e.target), mode),
                            verify_symplectic(&e.map),
                        ]
                    }));
                }
            }
            Suite::Confluence => {
                if config.wants(Family::D51) || config.wants(Family::D4) {
                    jobs.push(one(verify_system_confluence));
                    jobs.push(job(verify_group_convergence));
                }
            }
            Suite::Numeric => {
                if config.wants(Family::D4) {
                    jobs.push(job(|| {
                        verify_backlund_suite(&Benchmark::d4_default(), true).unwrap_or_else(|e| {
                            vec![VerificationReport::fail("numeric/d4", Mode::Numeric, Witness::Message(e.to_string()))]
                        })
                    }));
                }
            }
            Suite::Integrals => {
                jobs.push(one(|| {
                    let expected = ["1", "p", "q - t"].iter().map(|s| s.parse().expect("literal")).collect();
                    integral_check("integrals/toy/deg1", &toy_system(), 1, (0, 1), expected)
                }));
                if config.wants(Family::D4) {
                    jobs.push(one(|| {
                        integral_check(
                            "integrals/d4/deg2",
                            &make_system(Family::D4),
                            2,
                            (-2, 2),
                            vec![RationalExpression::one()],
                        )
                    }));
                }
            }
        }
    }
    jobs
}

/// Runs the configured suites on at most `jobs` worker threads.
pub fn run_suite(config: &SuiteConfig, jobs: usize) -> SuiteReport {
    let work = jobs_for(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let mut checks: Vec<VerificationReport> = pool.install(|| work.par_iter().flat_map(|j| j()).collect());
    checks.sort_by(|a, b| a.check.cmp(&b.check));
    SuiteReport {
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        checks,
    }
}
