//! Complex-domain integration of the catalogued systems and numerical
//! cross-checks of Bäcklund transformations.

mod compile;
mod dopri;

pub use compile::{CompiledExpr, CompiledField, CompiledPoly, Env, NearSingular, DENOMINATOR_GUARD};
pub use dopri::{DenseSegment, DenseStep, StepStats, Tolerance};

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::Var;
use crate::report::{Mode, VerificationReport, Witness};
use crate::systems::{make_system, Family, HamiltonianSystem, ParameterVector};
use crate::transforms::{generators, BirationalMap};

/// Largest admissible violation of a parameter normalisation.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;
/// Pass threshold for pointwise differences and defects in numeric checks.
pub const NUMERIC_THRESHOLD: f64 = 1e-6;
/// Stencil half-width, in the segment parameter, for derivative estimates.
const STENCIL: f64 = 4e-3;

#[derive(Debug, Clone, thiserror::Error)]
pub enum NumericError {
    #[error("singular start: {0}")]
    SingularStart(String),
    #[error("step failure at t = {t}: {detail}")]
    StepFailure {
        t: Complex64,
        detail: String,
        partial: Option<Box<Trajectory>>,
    },
    #[error("parameters violate the normalisation by {0:.3e}")]
    Constraint(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

fn serialize_params<S: Serializer>(params: &[(Var, Complex64)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(params.iter().map(|(v, c)| (v.name(), [c.re, c.im])))
}

/// Samples of a numerical solution along a polyline in the complex t-plane.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub vars: Vec<Var>,
    pub times: Vec<Complex64>,
    pub states: Vec<Vec<Complex64>>,
    #[serde(serialize_with = "serialize_params")]
    pub params: Vec<(Var, Complex64)>,
    pub tol: Tolerance,
    pub stats: StepStats,
    /// `(segment, s)` for every sample.
    #[serde(skip)]
    pub locations: Vec<(usize, f64)>,
    #[serde(skip)]
    pub dense: Vec<DenseSegment>,
}

#[derive(Serialize)]
struct JsonLine {
    t_re: f64,
    t_im: f64,
    state: Vec<[f64; 2]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[Complex64] {
        self.states.last().expect("nonempty trajectory")
    }

    /// One JSON object `{t_re, t_im, state}` per sample.
    pub fn write_json_lines(&self, mut out: impl Write) -> std::io::Result<()> {
        for (t, y) in self.times.iter().zip(&self.states) {
            let line = JsonLine {
                t_re: t.re,
                t_im: t.im,
                state: y.iter().map(|c| [c.re, c.im]).collect(),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// dy/dt at sample `i` from the dense output, or from neighbouring
    /// samples when no dense output is stored.
    fn derivative(&self, i: usize) -> Vec<Complex64> {
        if self.dense.is_empty() {
            return self.sample_difference(i);
        }
        let (seg, s) = self.locations[i];
        let d = &self.dense[seg];
        let y = |s: f64| d.eval(s);
        let h = STENCIL;
        let combine = |coeffs: &[(f64, f64)]| -> Vec<Complex64> {
            let pts: Vec<(f64, Vec<Complex64>)> = coeffs.iter().map(|&(off, c)| (c, y(s + off * h))).collect();
            (0..pts[0].1.len())
                .map(|k| pts.iter().fold(Complex64::new(0.0, 0.0), |acc, (c, v)| acc + *c * v[k]) / (12.0 * h))
                .collect()
        };
        let ds = if s - 2.0 * h >= 0.0 && s + 2.0 * h <= 1.0 {
            combine(&[(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)])
        } else if s - 2.0 * h < 0.0 {
            combine(&[(0.0, -25.0), (1.0, 48.0), (2.0, -36.0), (3.0, 16.0), (4.0, -3.0)])
        } else {
            combine(&[(0.0, 25.0), (-1.0, -48.0), (-2.0, 36.0), (-3.0, -16.0), (-4.0, 3.0)])
        };
        let span = d.b - d.a;
        ds.into_iter().map(|v| v / span).collect()
    }

    fn sample_difference(&self, i: usize) -> Vec<Complex64> {
        let n = self.len();
        let (a, b) = match (i, n) {
            (_, 0 | 1) => return vec![Complex64::new(0.0, 0.0); self.vars.len()],
            (0, _) => (0, 1),
            (i, n) if i + 1 == n => (i - 1, i),
            (i, _) => (i - 1, i + 1),
        };
        let dt = self.times[b] - self.times[a];
        self.states[b]
            .iter()
            .zip(&self.states[a])
            .map(|(yb, ya)| (yb - ya) / dt)
            .collect()
    }
}

/// Largest defect of a trajectory and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Defect {
    pub max: f64,
    pub index: usize,
}

/// Max over samples of |estimated dy/dt − field(sample)|.
pub fn residual(field: &CompiledField, traj: &Trajectory) -> Result<Defect, NearSingular> {
    let mut env = Env::with_values(&traj.params);
    let mut f = vec![Complex64::new(0.0, 0.0); field.dim()];
    let mut worst = Defect { max: 0.0, index: 0 };
    for i in 0..traj.len() {
        field.eval(&mut env, traj.times[i], &traj.states[i], &mut f)?;
        let d = traj.derivative(i);
        let gap = d.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if gap > worst.max || gap.is_nan() {
            worst = Defect { max: gap, index: i };
        }
    }
    Ok(worst)
}

/// Checks the parameter normalisation numerically.
pub fn constraint_violation(params: &ParameterVector, values: &[(Var, Complex64)]) -> f64 {
    let (Some(weights), Some(rhs)) = (params.weights(), params.rhs()) else {
        return 0.0;
    };
    let lookup = |v: Var| values.iter().find(|(u, _)| *u == v).map(|(_, c)| *c).unwrap_or_default();
    let sum = params
        .symbols()
        .iter()
        .zip(weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (&s, w)| acc + w.to_f64().unwrap_or(f64::NAN) * lookup(s));
    (sum - rhs.to_f64().unwrap_or(f64::NAN)).norm()
}

/// Integrates a compiled field along the polyline `path`, sampling each
/// segment at `samples` equal steps of its parameter.
pub fn integrate_field(
    field: &CompiledField,
    params: &[(Var, Complex64)],
    initial: &[Complex64],
    path: &[Complex64],
    tol: Tolerance,
    samples: usize,
) -> Result<Trajectory, NumericError> {
    if path.len() < 2 || samples == 0 {
        return Err(NumericError::Invalid("a path needs two vertices and at least one sample".into()));
    }
    if initial.len() != field.dim() {
        return Err(NumericError::Invalid(format!(
            "initial state has {} entries, the field has {}",
            initial.len(),
            field.dim()
        )));
    }
    for w in path.windows(2) {
        if segment_distance_to_origin(w[0], w[1]) < DENOMINATOR_GUARD {
            return Err(NumericError::SingularStart(format!("segment {} -> {} passes through t = 0", w[0], w[1])));
        }
    }
    let mut env = Env::with_values(params);
    let mut traj = Trajectory {
        vars: field.vars.clone(),
        times: Vec::new(),
        states: Vec::new(),
        params: params.to_vec(),
        tol,
        stats: StepStats::default(),
        locations: Vec::new(),
        dense: Vec::new(),
    };
    let mut y = initial.to_vec();
    for (seg, w) in path.windows(2).enumerate() {
        match dopri::integrate_segment(field, &mut env, w[0], w[1], &y, tol, &mut traj.stats) {
            Ok(run) => {
                let first = if seg == 0 { 0 } else { 1 };
                for j in first..=samples {
                    let s = j as f64 / samples as f64;
                    traj.times.push(run.dense.time(s));
                    traj.states.push(if j == samples { run.end.clone() } else { run.dense.eval(s) });
                    traj.locations.push((seg, s));
                }
                y = run.end;
                traj.dense.push(run.dense);
            }
            Err((NumericError::StepFailure { t, detail, .. }, dense)) => {
                if !dense.steps.is_empty() {
                    let last = dense.steps.last().expect("nonempty");
                    let reached = last.s0 + last.h;
                    for j in 0..=samples {
                        let s = j as f64 / samples as f64;
                        if s > reached || (seg > 0 && j == 0) {
                            continue;
                        }
                        traj.times.push(dense.time(s));
                        traj.states.push(dense.eval(s));
                        traj.locations.push((seg, s));
                    }
                    traj.dense.push(dense);
                }
                return Err(NumericError::StepFailure {
                    t,
                    detail,
                    partial: Some(Box::new(traj)),
                });
            }
            Err((e, _)) => return Err(e),
        }
    }
    Ok(traj)
}

fn segment_distance_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    (a + d * s).norm()
}

/// Integrates a catalogued system after checking its parameter normalisation.
pub fn integrate(
    system: &HamiltonianSystem,
    params: &[(Var, Complex64)],
    initial: &[Complex64],
    path: &[Complex64],
    tol: Tolerance,
    samples: usize,
) -> Result<Trajectory, NumericError> {
    let violation = constraint_violation(&system.params, params);
    if violation.is_nan() || violation > CONSTRAINT_TOLERANCE {
        return Err(NumericError::Constraint(violation));
    }
    let field = CompiledField::new(&system.vector_field(), system.time);
    integrate_field(&field, params, initial, path, tol, samples)
}

/// A reproducible integration setup.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Benchmark {
    pub family: String,
    pub state: Vec<Complex64>,
    /// Values of the family's parameters, in catalog order.
    pub params: Vec<Complex64>,
    pub path: Vec<Complex64>,
    pub tol: Tolerance,
    pub samples_per_segment: usize,
}

impl Benchmark {
    /// The D4(1) benchmark: state (1/2, 1/3, 1/5, 1/7) at t = 1,
    /// α = (1/8, 1/8, 1/8, 1/4, 1/4), path [1, 2], tolerance 1e-10.
    pub fn d4_default() -> Self {
        let r = |x: f64| Complex64::new(x, 0.0);
        Benchmark {
            family: Family::D4.slug().to_string(),
            state: vec![r(0.5), r(1.0 / 3.0), r(0.2), r(1.0 / 7.0)],
            params: vec![r(0.125), r(0.125), r(0.125), r(0.25), r(0.25)],
            path: vec![r(1.0), r(2.0)],
            tol: Tolerance::both(1e-10),
            samples_per_segment: 32,
        }
    }

    pub fn family(&self) -> Result<Family, NumericError> {
        self.family.parse().map_err(|e: crate::systems::UnknownFamily| NumericError::Invalid(e.to_string()))
    }

    pub fn system(&self) -> Result<HamiltonianSystem, NumericError> {
        Ok(make_system(self.family()?))
    }

    pub fn param_values(&self, system: &HamiltonianSystem) -> Result<Vec<(Var, Complex64)>, NumericError> {
        let symbols = system.params.symbols();
        if symbols.len() != self.params.len() {
            return Err(NumericError::Invalid(format!(
                "{} expects {} parameters, got {}",
                system.family.name(),
                symbols.len(),
                self.params.len()
            )));
        }
        Ok(symbols.iter().copied().zip(self.params.iter().copied()).collect())
    }

    pub fn run(&self) -> Result<Trajectory, NumericError> {
        let system = self.system()?;
        let params = self.param_values(&system)?;
        integrate(&system, &params, &self.state, &self.path, self.tol, self.samples_per_segment)
    }
}

/// A perturbation of one target parameter, compensated on another so that
/// the normalisation still holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mutation {
    pub param: Var,
    pub delta: f64,
    pub compensate: Var,
    pub compensation: f64,
}

impl Mutation {
    /// Perturbs the `k`-th parameter by `delta` and compensates on the next
    /// one (cyclically), scaled by the ratio of normalisation weights.
    pub fn cyclic(params: &ParameterVector, k: usize, delta: f64) -> Self {
        let symbols = params.symbols();
        let j = (k + 1) % symbols.len();
        let compensation = match params.weights() {
            Some(w) => -delta * w[k].to_f64().unwrap_or(f64::NAN) / w[j].to_f64().unwrap_or(f64::NAN),
            None => 0.0,
        };
        Mutation {
            param: symbols[k],
            delta,
            compensate: symbols[j],
            compensation,
        }
    }

    fn apply(&self, values: &mut [(Var, Complex64)]) {
        for (v, c) in values.iter_mut() {
            if *v == self.param {
                *c += self.delta;
            }
            if *v == self.compensate {
                *c += self.compensation;
            }
        }
    }
}

/// Measurements from integrating a source solution, mapping it, and
/// integrating the target system independently.
#[derive(Debug, Clone, Serialize)]
pub struct BacklundOutcome {
    pub difference: f64,
    pub index: usize,
    pub source_defect: Defect,
    pub target_defect: Defect,
}

impl BacklundOutcome {
    pub fn passes(&self) -> bool {
        self.difference <= NUMERIC_THRESHOLD
            && self.source_defect.max <= NUMERIC_THRESHOLD
            && self.target_defect.max <= NUMERIC_THRESHOLD
    }
}

fn eval_map(images: &[(Var, CompiledExpr)], env: &Env) -> Result<Vec<(Var, Complex64)>, NearSingular> {
    images.iter().map(|(v, e)| Ok((*v, e.eval(env)?))).collect()
}

/// Runs the source and target integrations for `map` on `bench`.
pub fn run_backlund(
    map: &BirationalMap,
    bench: &Benchmark,
    mutation: Option<&Mutation>,
) -> Result<BacklundOutcome, NumericError> {
    let source = bench.system()?;
    if source.family != map.source {
        return Err(NumericError::Invalid(format!(
            "{} acts on {}, benchmark is {}",
            map.label,
            map.source.name(),
            source.family.name()
        )));
    }
    let target = make_system(map.target);
    let params = bench.param_values(&source)?;
    let phase: Vec<(Var, CompiledExpr)> = target
        .phase_vars()
        .into_iter()
        .map(|v| (v, CompiledExpr::new(&map.image(v))))
        .collect();
    let target_params: Vec<(Var, CompiledExpr)> = target
        .params
        .symbols()
        .iter()
        .map(|&v| (v, CompiledExpr::new(&map.image(v))))
        .collect();
    let time = CompiledExpr::new(&map.time_image());
    let singular = |e: NearSingular| NumericError::SingularStart(format!("map {}: {e}", map.label));

    let src_field = CompiledField::new(&source.vector_field(), source.time);
    let src = integrate(&source, &params, &bench.state, &bench.path, bench.tol, bench.samples_per_segment)?;

    let mut env = Env::with_values(&params);
    src_field.load(&mut env, src.times[0], &src.states[0]);
    let mut tgt_params = eval_map(&target_params, &env).map_err(singular)?;
    if let Some(m) = mutation {
        m.apply(&mut tgt_params);
    }
    let tgt_initial: Vec<Complex64> = eval_map(&phase, &env).map_err(singular)?.into_iter().map(|(_, c)| c).collect();
    let tgt_path = bench
        .path
        .iter()
        .map(|&t| {
            env.set(source.time, t);
            time.eval(&env)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(singular)?;
    let tgt = integrate(&target, &tgt_params, &tgt_initial, &tgt_path, bench.tol, bench.samples_per_segment)?;
    let tgt_field = CompiledField::new(&target.vector_field(), target.time);

    let mut worst = (0.0f64, 0usize);
    for i in 0..src.len() {
        src_field.load(&mut env, src.times[i], &src.states[i]);
        let mapped = eval_map(&phase, &env).map_err(singular)?;
        let gap = mapped
            .iter()
            .zip(&tgt.states[i])
            .map(|((_, a), b)| (a - b).norm())
            .fold(0.0, f64::max);
        if gap > worst.0 || gap.is_nan() {
            worst = (gap, i);
        }
    }
    let defect = |f: &CompiledField, t: &Trajectory| residual(f, t).map_err(|e| NumericError::SingularStart(e.to_string()));
    Ok(BacklundOutcome {
        difference: worst.0,
        index: worst.1,
        source_defect: defect(&src_field, &src)?,
        target_defect: defect(&tgt_field, &tgt)?,
    })
}

fn outcome_report(check: String, outcome: Result<BacklundOutcome, NumericError>, expect_pass: bool) -> VerificationReport {
    match outcome {
        Err(e) => VerificationReport::fail(check, Mode::Numeric, Witness::Message(e.to_string())),
        Ok(o) => {
            let ok = o.passes() == expect_pass;
            let report = if ok {
                VerificationReport::pass(check, Mode::Numeric)
            } else {
                let detail = if expect_pass {
                    "mapped source differs from target"
                } else {
                    "perturbed target still agrees with the mapped source"
                };
                VerificationReport::fail(
                    check,
                    Mode::Numeric,
                    Witness::Numeric {
                        index: o.index,
                        value: o.difference,
                        detail: detail.to_string(),
                    },
                )
            };
            report
                .with_note("max_difference", format!("{:.3e}", o.difference))
                .with_note("source_defect", format!("{:.3e}", o.source_defect.max))
                .with_note("target_defect", format!("{:.3e}", o.target_defect.max))
        }
    }
}

/// Whether `map` carries the benchmark solution to a solution of the target
/// system, within [`NUMERIC_THRESHOLD`].
pub fn verify_backlund_numeric(map: &BirationalMap, bench: &Benchmark) -> VerificationReport {
    let start = Instant::now();
    let check = format!("numeric/{}/{}", map.source.slug(), map.label);
    outcome_report(check, run_backlund(map, bench, None), true)
        .with_family(map.source.name())
        .timed(start)
}

/// Passes when perturbing the target parameters makes the numeric check fail.
pub fn verify_mutation_detected(map: &BirationalMap, bench: &Benchmark, mutation: &Mutation) -> VerificationReport {
    let start = Instant::now();
    let check = format!("mutation/{}/{}/{}", map.source.slug(), map.label, mutation.param);
    outcome_report(check, run_backlund(map, bench, Some(mutation)), false)
        .with_family(map.source.name())
        .timed(start)
}

/// Numeric checks of every generator of the benchmark family, plus one
/// mutation run per generator and parameter, evaluated in parallel.
pub fn verify_backlund_suite(bench: &Benchmark, mutate: bool) -> Result<Vec<VerificationReport>, NumericError> {
    let family = bench.family()?;
    let params = make_system(family).params;
    let maps = generators(family);
    let mut jobs: Vec<(usize, Option<Mutation>)> = (0..maps.len()).map(|g| (g, None)).collect();
    if mutate {
        for g in 0..maps.len() {
            for k in 0..params.symbols().len() {
                jobs.push((g, Some(Mutation::cyclic(&params, k, 1e-3))));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|(g, m)| match m {
            None => verify_backlund_numeric(&maps[*g], bench),
            Some(m) => verify_mutation_detected(&maps[*g], bench, m),
        })
        .collect())
}
