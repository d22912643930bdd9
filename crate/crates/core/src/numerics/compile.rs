//! Floating-point evaluation of exact expressions over ℂ.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::algebra::{Polynomial, RationalExpression, Var, NVARS};
use crate::systems::FieldComponents;

/// Smallest admissible magnitude of a denominator factor.
pub const DENOMINATOR_GUARD: f64 = 1e-8;

/// Values for every kernel variable; unassigned entries are zero.
#[derive(Debug, Clone, Copy)]
pub struct Env([Complex64; NVARS]);

impl Env {
    pub fn new() -> Self {
        Env([Complex64::new(0.0, 0.0); NVARS])
    }

    pub fn set(&mut self, v: Var, value: Complex64) {
        self.0[v.index()] = value;
    }

    pub fn get(&self, v: Var) -> Complex64 {
        self.0[v.index()]
    }

    pub fn with_values(values: &[(Var, Complex64)]) -> Self {
        let mut env = Self::new();
        for &(v, c) in values {
            env.set(v, c);
        }
        env
    }
}

impl Default for Env {
    fn default() -> Self {
        Self::new()
    }
}

/// A coefficient with its `(variable index, exponent)` factors.
type Term = (Complex64, Vec<(usize, u16)>);

/// A polynomial as a list of `(coefficient, [(variable index, exponent)])`,
/// evaluated in Horner form along its leading variable.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    lead: Option<usize>,
    /// Coefficients of increasing powers of the leading variable.
    layers: Vec<Vec<Term>>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let lead = p.vars().iter().next();
        let mut layers: Vec<Vec<Term>> = Vec::new();
        for (m, c) in p.terms() {
            let k = lead.map_or(0, |v| m.exp(v) as usize);
            if layers.len() <= k {
                layers.resize_with(k + 1, Vec::new);
            }
            let rest = m
                .iter()
                .filter(|&(v, _)| Some(v) != lead)
                .map(|(v, e)| (v.index(), e))
                .collect();
            layers[k].push((Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0), rest));
        }
        CompiledPoly {
            lead: lead.map(|v| v.index()),
            layers,
        }
    }

    pub fn eval(&self, env: &Env) -> Complex64 {
        let layer = |terms: &[Term]| {
            terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (c, exps)| {
                acc + exps.iter().fold(*c, |t, &(i, e)| t * env.0[i].powu(e as u32))
            })
        };
        let x = self.lead.map_or(Complex64::new(0.0, 0.0), |i| env.0[i]);
        self.layers
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, terms| acc * x + layer(terms))
    }
}

/// The denominator factor that came too close to zero.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("denominator factor {factor} has magnitude {magnitude:.3e}")]
pub struct NearSingular {
    pub factor: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone)]
pub struct CompiledExpr {
    num: CompiledPoly,
    den: Vec<(CompiledPoly, u32, String)>,
}

impl CompiledExpr {
    pub fn new(e: &RationalExpression) -> Self {
        CompiledExpr {
            num: CompiledPoly::new(e.numerator()),
            den: e
                .denominator_factors()
                .iter()
                .map(|(f, k)| (CompiledPoly::new(f), *k, f.to_string()))
                .collect(),
        }
    }

    pub fn eval(&self, env: &Env) -> Result<Complex64, NearSingular> {
        let mut den = Complex64::new(1.0, 0.0);
        for (f, k, name) in &self.den {
            let value = f.eval(env);
            if value.norm().is_nan() || value.norm() < DENOMINATOR_GUARD {
                return Err(NearSingular {
                    factor: name.clone(),
                    magnitude: value.norm(),
                });
            }
            den *= value.powu(*k);
        }
        Ok(self.num.eval(env) / den)
    }
}

/// A field `d(var)/d(time)` ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledField {
    pub vars: Vec<Var>,
    pub time: Var,
    comps: Vec<CompiledExpr>,
}

impl CompiledField {
    pub fn new(field: &FieldComponents, time: Var) -> Self {
        CompiledField {
            vars: field.vars.clone(),
            time,
            comps: field.components.iter().map(CompiledExpr::new).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Loads `t` and `state` into `env`.
    pub fn load(&self, env: &mut Env, t: Complex64, state: &[Complex64]) {
        env.set(self.time, t);
        for (&v, &y) in self.vars.iter().zip(state) {
            env.set(v, y);
        }
    }

    /// The field at `(t, state)`, with parameters taken from `env`.
    pub fn eval(&self, env: &mut Env, t: Complex64, state: &[Complex64], out: &mut [Complex64]) -> Result<(), NearSingular> {
        self.load(env, t, state);
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = c.eval(env)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluates_rational_expressions() {
        let e: RationalExpression = "(x^2*y - 3*t)/(t*(y - 1))".parse().unwrap();
        let env = Env::with_values(&[(Var::X, cx(2.0)), (Var::Y, cx(3.0)), (Var::T, cx(0.5))]);
        let got = CompiledExpr::new(&e).eval(&env).unwrap();
        assert!((got - cx((12.0 - 1.5) / 1.0)).norm() < 1e-14);
    }

    #[test]
    fn guards_small_denominators() {
        let e: RationalExpression = "1/(y - 1)".parse().unwrap();
        let env = Env::with_values(&[(Var::Y, cx(1.0 + 1e-12))]);
        assert!(CompiledExpr::new(&e).eval(&env).is_err());
    }

    #[test]
    fn complex_values_round_trip() {
        let e: RationalExpression = "x^3 - 2*x*z + z^2".parse().unwrap();
        let x = Complex64::new(0.3, -1.2);
        let z = Complex64::new(-0.7, 0.4);
        let env = Env::with_values(&[(Var::X, x), (Var::Z, z)]);
        let want = x.powu(3) - 2.0 * x * z + z * z;
        assert!((CompiledExpr::new(&e).eval(&env).unwrap() - want).norm() < 1e-14);
    }
}
