//! Symbol table shared by every expression in the crate.
//!
//! Variables are a closed set known at compile time. The index order is the
//! global variable order used by the monomial ordering: phase variables come
//! first, then time, then ε, then parameter symbols.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of distinct symbols known to the kernel.
pub const NVARS: usize = 33;

const NAMES: [&str; NVARS] = [
    "x", "y", "z", "w", "q", "p", "X", "Y", "Z", "W", "t", "T", "eps", "alpha0", "alpha1",
    "alpha2", "alpha3", "alpha4", "beta0", "beta1", "beta2", "beta3", "beta4", "beta5", "A0",
    "A1", "A2", "A3", "A4", "gamma0", "gamma1", "gamma2", "gamma3",
];

/// Index of a symbol in the kernel's global variable order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Phase,
    Time,
    Epsilon,
    Parameter,
}

impl Var {
    pub const X: Var = Var(0);
    pub const Y: Var = Var(1);
    pub const Z: Var = Var(2);
    pub const W: Var = Var(3);
    pub const Q: Var = Var(4);
    pub const P: Var = Var(5);
    /// Capital letters are the "new" coordinates of a change of variables.
    pub const XN: Var = Var(6);
    pub const YN: Var = Var(7);
    pub const ZN: Var = Var(8);
    pub const WN: Var = Var(9);
    pub const T: Var = Var(10);
    pub const TN: Var = Var(11);
    pub const EPS: Var = Var(12);

    const ALPHA0: u8 = 13;
    const BETA0: u8 = 18;
    const CAP_A0: u8 = 24;
    const GAMMA0: u8 = 29;

    pub fn alpha(i: usize) -> Var {
        assert!(i < 5, "alpha index out of range");
        Var(Self::ALPHA0 + i as u8)
    }

    pub fn beta(i: usize) -> Var {
        assert!(i < 6, "beta index out of range");
        Var(Self::BETA0 + i as u8)
    }

    pub fn cap_a(i: usize) -> Var {
        assert!(i < 5, "A index out of range");
        Var(Self::CAP_A0 + i as u8)
    }

    pub fn gamma(i: usize) -> Var {
        assert!(i < 4, "gamma index out of range");
        Var(Self::GAMMA0 + i as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Option<Var> {
        (i < NVARS).then_some(Var(i as u8))
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn kind(self) -> VarKind {
        match self.0 {
            0..=9 => VarKind::Phase,
            10 | 11 => VarKind::Time,
            12 => VarKind::Epsilon,
            _ => VarKind::Parameter,
        }
    }

    pub fn is_phase(self) -> bool {
        self.kind() == VarKind::Phase
    }

    pub fn is_parameter(self) -> bool {
        self.kind() == VarKind::Parameter
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS).map(|i| Var(i as u8))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variable name `{0}`")]
pub struct UnknownVariable(pub String);

impl FromStr for Var {
    type Err = UnknownVariable;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let alias = match s {
            "ε" | "epsilon" => "eps",
            other => other,
        };
        NAMES
            .iter()
            .position(|n| *n == alias)
            .map(|i| Var(i as u8))
            .ok_or_else(|| UnknownVariable(s.to_string()))
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for v in Var::all() {
            assert_eq!(v.name().parse::<Var>().unwrap(), v);
        }
        assert_eq!("ε".parse::<Var>().unwrap(), Var::EPS);
        assert!("frob".parse::<Var>().is_err());
    }

    #[test]
    fn order_puts_phase_before_time_before_parameters() {
        assert!(Var::X < Var::Y && Var::Y < Var::Z && Var::Z < Var::W);
        assert!(Var::W < Var::T && Var::T < Var::EPS && Var::EPS < Var::alpha(0));
        assert_eq!(Var::alpha(4).name(), "alpha4");
        assert_eq!(Var::beta(5).name(), "beta5");
        assert_eq!(Var::cap_a(0).name(), "A0");
        assert_eq!(Var::gamma(3).name(), "gamma3");
        assert!(Var::gamma(1).is_parameter());
        assert!(Var::ZN.is_phase());
    }
}
