//! Dormand–Prince 5(4) integration along a complex polyline with dense output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::compile::{CompiledField, Env, NearSingular};
use super::NumericError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Largest step in the segment parameter. Short steps keep the dense
/// output accurate enough for derivative estimates.
const MAX_STEP: f64 = 1.0 / 64.0;

/// Relative and absolute local error tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn both(tol: f64) -> Self {
        Tolerance { rel: tol, abs: tol }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// One accepted step on a segment, in the segment parameter `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub s0: f64,
    pub h: f64,
    coeffs: [Vec<Complex64>; 5],
}

impl DenseStep {
    /// The continuous extension at `s` (which should lie in `[s0, s0 + h]`).
    pub fn eval(&self, s: f64) -> Vec<Complex64> {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        (0..r1.len())
            .map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
            .collect()
    }
}

/// Dense output of one polyline segment `t = a + s (b − a)`.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub a: Complex64,
    pub b: Complex64,
    pub steps: Vec<DenseStep>,
}

impl DenseSegment {
    pub fn time(&self, s: f64) -> Complex64 {
        self.a + (self.b - self.a) * s
    }

    pub fn eval(&self, s: f64) -> Vec<Complex64> {
        let i = self.steps.partition_point(|st| st.s0 + st.h < s).min(self.steps.len() - 1);
        self.steps[i].eval(s)
    }
}

/// Outcome of integrating one segment.
pub(crate) struct SegmentRun {
    pub dense: DenseSegment,
    pub end: Vec<Complex64>,
}

fn axpy(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) -> Vec<Complex64> {
    (0..y.len())
        .map(|i| y[i] + h * terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (c, k)| acc + *c * k[i]))
        .collect()
}

/// Integrates `dy/ds = (b − a) f(a + s (b − a), y)` over `s ∈ [0, 1]`.
pub(crate) fn integrate_segment(
    field: &CompiledField,
    env: &mut Env,
    a: Complex64,
    b: Complex64,
    y0: &[Complex64],
    tol: Tolerance,
    stats: &mut StepStats,
) -> Result<SegmentRun, (NumericError, DenseSegment)> {
    let n = field.dim();
    let span = b - a;
    let mut rhs = |s: f64, y: &[Complex64], out: &mut Vec<Complex64>| -> Result<(), NearSingular> {
        stats.evaluations += 1;
        field.eval(env, a + span * s, y, out)?;
        for o in out.iter_mut() {
            *o *= span;
        }
        Ok(())
    };
    let mut dense = DenseSegment { a, b, steps: Vec::new() };
    let mut y = y0.to_vec();
    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    if let Err(e) = rhs(0.0, &y, &mut k1) {
        return Err((NumericError::SingularStart(format!("at t = {a}: {e}")), dense));
    }
    let mut s = 0.0f64;
    let h = initial_step(&y, &k1, tol);
    const MIN_STEP: f64 = 1e-14;
    let mut h = h.min(MAX_STEP);
    let mut last_reject = false;
    while s < 1.0 {
        if h < MIN_STEP {
            return Err((
                NumericError::StepFailure {
                    t: a + span * s,
                    detail: format!("step size {h:.3e} underflowed"),
                    partial: None,
                },
                dense,
            ));
        }
        let h_try = h.min(1.0 - s);
        let stages = (|| -> Result<_, NearSingular> {
            let mut k2 = vec![Complex64::new(0.0, 0.0); n];
            let mut k3 = k2.clone();
            let mut k4 = k2.clone();
            let mut k5 = k2.clone();
            let mut k6 = k2.clone();
            let mut k7 = k2.clone();
            rhs(s + C2 * h_try, &axpy(&y, h_try, &[(A21, &k1)]), &mut k2)?;
            rhs(s + C3 * h_try, &axpy(&y, h_try, &[(A31, &k1), (A32, &k2)]), &mut k3)?;
            rhs(s + C4 * h_try, &axpy(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut k4)?;
            rhs(
                s + C5 * h_try,
                &axpy(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                &mut k5,
            )?;
            rhs(
                s + h_try,
                &axpy(&y, h_try, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                &mut k6,
            )?;
            let y_new = axpy(&y, h_try, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            rhs(s + h_try, &y_new, &mut k7)?;
            Ok((k2, k3, k4, k5, k6, k7, y_new))
        })();
        let (_k2, k3, k4, k5, k6, k7, y_new) = match stages {
            Ok(v) => v,
            Err(_) => {
                stats.rejected += 1;
                h = h_try * 0.25;
                last_reject = true;
                continue;
            }
        };
        let mut err = 0.0;
        for i in 0..n {
            let e = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h = h_try * 0.25;
            last_reject = true;
            continue;
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0).min(MAX_STEP / h_try);
        if err <= 1.0 {
            let ydiff: Vec<Complex64> = (0..n).map(|i| y_new[i] - y[i]).collect();
            let bspl: Vec<Complex64> = (0..n).map(|i| h_try * k1[i] - ydiff[i]).collect();
            let r4: Vec<Complex64> = (0..n).map(|i| ydiff[i] - h_try * k7[i] - bspl[i]).collect();
            let r5: Vec<Complex64> = (0..n)
                .map(|i| h_try * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            dense.steps.push(DenseStep {
                s0: s,
                h: h_try,
                coeffs: [y.clone(), ydiff, bspl, r4, r5],
            });
            stats.accepted += 1;
            s = if 1.0 - (s + h_try) < 1e-15 { 1.0 } else { s + h_try };
            y = y_new;
            k1 = k7;
            h = if last_reject { h_try * factor.min(1.0) } else { h_try * factor };
            last_reject = false;
        } else {
            stats.rejected += 1;
            h = h_try * factor.min(1.0);
            last_reject = true;
        }
    }
    Ok(SegmentRun { dense, end: y })
}

fn initial_step(y: &[Complex64], f: &[Complex64], tol: Tolerance) -> f64 {
    let n = y.len() as f64;
    let (mut d0, mut d1) = (0.0, 0.0);
    for (yi, fi) in y.iter().zip(f) {
        let sc = tol.abs + tol.rel * yi.norm();
        d0 += (yi.norm() / sc).powi(2);
        d1 += (fi.norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(1e-10, 0.1)
}
