//! Configuration types, coupling presets and the coupling constraint.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootSystem {
    A,
    B,
    C,
    D,
}

impl RootSystem {
    pub const ALL: [RootSystem; 4] = [RootSystem::A, RootSystem::B, RootSystem::C, RootSystem::D];

    /// Size of the Lax matrix for `n` particles.
    pub fn lax_size(self, n: usize) -> usize {
        match self {
            RootSystem::A => n,
            RootSystem::B => 2 * n + 1,
            RootSystem::C | RootSystem::D => 2 * n,
        }
    }

    pub fn is_bcd(self) -> bool {
        !matches!(self, RootSystem::A)
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootSystem::A => "A",
            RootSystem::B => "B",
            RootSystem::C => "C",
            RootSystem::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for RootSystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(RootSystem::A),
            "B" | "b" => Ok(RootSystem::B),
            "C" | "c" => Ok(RootSystem::C),
            "D" | "d" => Ok(RootSystem::D),
            other => Err(Error::InvalidInput(format!(
                "unknown root system {other:?}"
            ))),
        }
    }
}

/// Coupling constants `(g1, g2, g4)`. The A-type model uses `g2` alone.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings<T> {
    pub g1: T,
    pub g2: T,
    pub g4: T,
}

impl<T: Scalar> Couplings<T> {
    pub fn new(g1: T, g2: T, g4: T) -> Self {
        Self { g1, g2, g4 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// `g1 (g1² − 2 g2² + √2 g2 g4)`
    pub fn constraint(&self) -> T {
        let two = T::from_int(2);
        self.g1.clone()
            * (self.g1.square() - two * self.g2.square()
                + T::sqrt2() * self.g2.clone() * self.g4.clone())
    }

    fn largest(&self) -> f64 {
        [&self.g1, &self.g2, &self.g4]
            .iter()
            .map(|g| g.magnitude())
            .fold(0.0, f64::max)
    }
}

/// Couplings for which the classical Lax matrix is dual to the Gaudin model.
pub fn preset_couplings<T: Scalar>(kind: RootSystem, hbar: &T, xi: &T) -> Couplings<T> {
    let h = hbar.clone();
    match kind {
        RootSystem::B => Couplings::new(T::sqrt2() * h.clone(), h, T::zero()),
        RootSystem::C => Couplings::new(T::zero(), h.clone(), T::sqrt2() * h * xi.clone()),
        RootSystem::D | RootSystem::A => Couplings::new(T::zero(), h, T::zero()),
    }
}

/// Checks the constraint required by the Lax representation.
pub fn validate_couplings<T: Scalar>(c: &Couplings<T>) -> Result<()> {
    let r = c.constraint();
    let ok = if T::EXACT {
        r.is_zero()
    } else {
        r.magnitude() <= 1e-12 * c.largest().powi(3).max(1.0)
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ConstraintViolated {
            residual: r.magnitude(),
        })
    }
}

/// Rejects coordinates that vanish (when `boundary` is set) or coincide up to
/// sign.
pub fn check_coordinates<T: Scalar>(z: &[T], boundary: bool) -> Result<()> {
    for (i, zi) in z.iter().enumerate() {
        if boundary && zi.is_zero() {
            return Err(Error::ZeroCoordinate { index: i });
        }
        for (j, zj) in z.iter().enumerate().skip(i + 1) {
            let minus = zi.clone() - zj.clone();
            let plus = zi.clone() + zj.clone();
            if minus.is_zero() || (boundary && plus.is_zero()) {
                return Err(Error::CoincidingCoordinates { i, j });
            }
        }
    }
    Ok(())
}

/// Complex number serialized as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Parses `"re+imi"`, `"re-imi"`, `"imi"` or a plain real number.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// A model instance as read from a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub root_system: RootSystem,
    pub n: usize,
    pub m: usize,
    pub z: Vec<Pair>,
    #[serde(default)]
    pub xi: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default)]
    pub omega: f64,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn new(
        root_system: RootSystem,
        m: usize,
        z: &[Complex64],
        xi: f64,
        hbar: f64,
        omega: f64,
    ) -> Result<Self> {
        let spec = Self {
            root_system,
            n: z.len(),
            m,
            z: z.iter().copied().map(to_pair).collect(),
            xi,
            hbar,
            omega,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn z(&self) -> Vec<Complex64> {
        self.z.iter().copied().map(from_pair).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if self.z.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for n = {}",
                self.z.len(),
                self.n
            )));
        }
        if self.m > self.n / 2 {
            return Err(Error::InvalidInput(format!(
                "m = {} exceeds floor(n/2) = {}",
                self.m,
                self.n / 2
            )));
        }
        if self.hbar == 0.0 || !self.hbar.is_finite() {
            return Err(Error::InvalidInput(
                "hbar must be finite and nonzero".into(),
            ));
        }
        if matches!(self.root_system, RootSystem::B | RootSystem::D) && self.xi != 0.0 {
            return Err(Error::InvalidInput(format!(
                "xi must be 0 for {}",
                self.root_system
            )));
        }
        if self.z.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        check_coordinates(&self.z(), self.root_system.is_bcd())
    }
}

/// A candidate set of Bethe roots with solver metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub mu: Vec<Complex64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub seed_id: u64,
    /// Roots vanish or collide up to sign within `1e-8`.
    pub singular: bool,
    pub jacobian_condition: f64,
}

impl BetheState {
    pub fn m(&self) -> usize {
        self.mu.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use num_traits::Zero;

    #[test]
    fn presets() {
        let one = Exact::from_int(1);
        let half = Exact::rational(1, 2);
        let b = preset_couplings(RootSystem::B, &one, &half);
        assert_eq!(
            b,
            Couplings::new(Exact::sqrt2(), one.clone(), Exact::from_int(0))
        );
        let c = preset_couplings(RootSystem::C, &one, &half);
        assert_eq!(c.g4, Exact::sqrt2() * half);
        let d = preset_couplings(RootSystem::D, &Exact::from_int(2), &Exact::from_int(0));
        assert_eq!(
            d,
            Couplings::new(Exact::from_int(0), Exact::from_int(2), Exact::from_int(0))
        );
    }

    #[test]
    fn constraint_examples() {
        let ok = Couplings::new(Exact::sqrt2(), Exact::from_int(1), Exact::from_int(0));
        assert!(validate_couplings(&ok).is_ok());
        assert!(ok.constraint().is_zero());
        let free = Couplings::new(0.0, 1.0, 7.0);
        assert!(validate_couplings(&free).is_ok());
        let bad = Couplings::new(1.0, 0.0, 0.0);
        assert_eq!(
            validate_couplings(&bad),
            Err(Error::ConstraintViolated { residual: 1.0 })
        );
    }

    #[test]
    fn coordinates_must_be_admissible() {
        assert!(check_coordinates(&[1.0, 2.0], true).is_ok());
        assert_eq!(
            check_coordinates(&[1.0, -1.0], true),
            Err(Error::CoincidingCoordinates { i: 0, j: 1 })
        );
        assert_eq!(
            check_coordinates(&[0.0, 1.0], true),
            Err(Error::ZeroCoordinate { index: 0 })
        );
        assert!(check_coordinates(&[0.0, 1.0], false).is_ok());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex("-3i").unwrap(), Complex64::new(0.0, -3.0));
        assert_eq!(
            parse_complex("2e-3+1e+2i").unwrap(),
            Complex64::new(2e-3, 100.0)
        );
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ModelSpec::new(
            RootSystem::C,
            1,
            &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.5)],
            0.5,
            1.0,
            0.0,
        )
        .unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"root_system\":\"C\""));
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn spec_rejects_bad_inputs() {
        let z = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert!(ModelSpec::new(RootSystem::C, 1, &z, 0.0, 1.0, 0.0).is_err());
        let z = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(ModelSpec::new(RootSystem::D, 1, &z, 0.5, 1.0, 0.0).is_err());
        assert!(ModelSpec::new(RootSystem::C, 2, &z, 0.0, 1.0, 0.0).is_err());
    }
}
