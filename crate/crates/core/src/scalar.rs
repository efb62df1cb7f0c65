//! Scalar families.
//!
//! Every matrix-producing routine in this crate is generic over [`Scalar`].
//! Two families are provided: double precision (`f64`, [`Complex64`]) for
//! dynamics and root finding, and exact arithmetic in the quadratic field
//! Q(√2) (optionally over the Gaussian rationals) for identity checks. The
//! field extension is needed because the B-type couplings carry a factor √2.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Relative tolerance used by float-mode equality checks.
pub const FLOAT_RTOL: f64 = 1e-10;

/// A field of scalars usable by the matrix and model code.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact and equality is decidable.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Exact conversion of a double-precision complex number, `None` when the
    /// value cannot be represented (non-finite, or non-real for a real field).
    fn from_complex(z: Complex64) -> Option<Self>;

    fn sqrt2() -> Self;

    /// Nearest double-precision complex value.
    fn to_complex(&self) -> Complex64;

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Zero test: exact for exact fields, `|x| <= FLOAT_RTOL * scale` otherwise.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= FLOAT_RTOL * scale.max(f64::MIN_POSITIVE)
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    fn powi(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out * self.clone();
        }
        out
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        (z.im == 0.0 && z.re.is_finite()).then_some(z.re)
    }

    fn sqrt2() -> Self {
        std::f64::consts::SQRT_2
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        z.is_finite().then_some(z)
    }

    fn sqrt2() -> Self {
        Complex64::new(std::f64::consts::SQRT_2, 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Base fields for [`Sqrt2Ext`]: the rationals and the Gaussian rationals.
pub trait ExactBase:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(n: i64) -> Self;
    fn from_complex(z: Complex64) -> Option<Self>;
    fn to_complex(&self) -> Complex64;
    /// Round real and imaginary parts to the nearest multiple of `2^-bits`.
    fn round_dyadic(&self, bits: u32) -> Self;
}

fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

fn round_rational(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

impl ExactBase for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        if z.im != 0.0 {
            return None;
        }
        BigRational::from_float(z.re)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn round_dyadic(&self, bits: u32) -> Self {
        round_rational(self, bits)
    }
}

impl ExactBase for Complex<BigRational> {
    fn from_int(n: i64) -> Self {
        Complex::new(<BigRational as ExactBase>::from_int(n), BigRational::zero())
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        Some(Complex::new(
            BigRational::from_float(z.re)?,
            BigRational::from_float(z.im)?,
        ))
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn round_dyadic(&self, bits: u32) -> Self {
        Complex::new(
            round_rational(&self.re, bits),
            round_rational(&self.im, bits),
        )
    }
}

/// Element `a + b·√2` of the quadratic extension of `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sqrt2Ext<T> {
    pub a: T,
    pub b: T,
}

impl<T: ExactBase> Sqrt2Ext<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    pub fn from_base(a: T) -> Self {
        Self { a, b: T::zero() }
    }

    /// Galois conjugate `a − b·√2`.
    pub fn conj(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a² − 2b²`, an element of the base field.
    pub fn norm(&self) -> T {
        let two = T::from_int(2);
        self.a.clone() * self.a.clone() - two * self.b.clone() * self.b.clone()
    }

    pub fn round_dyadic(&self, bits: u32) -> Self {
        Self {
            a: self.a.round_dyadic(bits),
            b: self.b.round_dyadic(bits),
        }
    }
}

impl<T: ExactBase> Zero for Sqrt2Ext<T> {
    fn zero() -> Self {
        Self {
            a: T::zero(),
            b: T::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<T: ExactBase> One for Sqrt2Ext<T> {
    fn one() -> Self {
        Self {
            a: T::one(),
            b: T::zero(),
        }
    }
}

impl<T: ExactBase> Add for Sqrt2Ext<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl<T: ExactBase> Sub for Sqrt2Ext<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl<T: ExactBase> Neg for Sqrt2Ext<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl<T: ExactBase> Mul for Sqrt2Ext<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.b.is_zero() && rhs.b.is_zero() {
            return Self::from_base(self.a * rhs.a);
        }
        let two = T::from_int(2);
        Self {
            a: self.a.clone() * rhs.a.clone() + two * self.b.clone() * rhs.b.clone(),
            b: self.a * rhs.b + self.b * rhs.a,
        }
    }
}

impl<T: ExactBase> Div for Sqrt2Ext<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.b.is_zero() {
            return Self {
                a: self.a / rhs.a.clone(),
                b: self.b / rhs.a,
            };
        }
        let n = rhs.norm();
        let num = self * rhs.conj();
        Self {
            a: num.a / n.clone(),
            b: num.b / n,
        }
    }
}

impl<T: ExactBase> Scalar for Sqrt2Ext<T> {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Self::from_base(T::from_int(n))
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        T::from_complex(z).map(Self::from_base)
    }

    fn sqrt2() -> Self {
        Self {
            a: T::zero(),
            b: T::one(),
        }
    }

    fn to_complex(&self) -> Complex64 {
        self.a.to_complex() + self.b.to_complex() * std::f64::consts::SQRT_2
    }

    fn magnitude(&self) -> f64 {
        if self.b.is_zero() {
            return self.a.to_complex().norm();
        }
        // s·t equals the exact norm, so the larger of |s|, |t| is free of
        // cancellation and the smaller one is recovered from the norm.
        let a = self.a.to_complex();
        let b = self.b.to_complex() * std::f64::consts::SQRT_2;
        let s = (a + b).norm();
        let t = (a - b).norm();
        if s >= t {
            s
        } else {
            self.norm().to_complex().norm() / t
        }
    }
}

/// Exact rational (Q(√2)) scalars.
pub type Exact = Sqrt2Ext<BigRational>;

/// Exact Gaussian rational (Q(i, √2)) scalars.
pub type ExactComplex = Sqrt2Ext<Complex<BigRational>>;

impl Exact {
    pub fn rational(num: i64, den: i64) -> Self {
        Self::from_base(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

impl From<Exact> for ExactComplex {
    fn from(x: Exact) -> Self {
        let lift = |r: BigRational| Complex::new(r, BigRational::zero());
        Self::new(lift(x.a), lift(x.b))
    }
}

impl std::fmt::Display for Exact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt2", self.b)
        } else {
            write!(
                f,
                "{}{}{}*sqrt2",
                self.a,
                if self.b.is_negative() { "" } else { "+" },
                self.b
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squares_to_two() {
        let r = Exact::sqrt2();
        assert_eq!(r.clone() * r, Exact::from_int(2));
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = Exact::new(
            BigRational::new(3.into(), 7.into()),
            BigRational::new((-2).into(), 5.into()),
        );
        let y = Exact::new(
            BigRational::new(1.into(), 3.into()),
            BigRational::new(4.into(), 9.into()),
        );
        assert_eq!((x.clone() / y.clone()) * y, x);
    }

    #[test]
    fn magnitude_survives_cancellation() {
        // 99 − 70√2 ≈ 5.05e-3, and (99 − 70√2)^8 is far below f64 cancellation.
        let x = Exact::new(
            BigRational::from_integer(99.into()),
            BigRational::from_integer((-70).into()),
        );
        let x8 = x.powi(8);
        let expected = (99.0 - 70.0 * std::f64::consts::SQRT_2).powi(8);
        let got = x8.magnitude();
        assert!((got / expected - 1.0).abs() < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn gaussian_extension_is_a_field() {
        let i = ExactComplex::from_base(Complex::new(BigRational::zero(), BigRational::one()));
        let x = ExactComplex::sqrt2() + i.clone();
        let inv = x.recip();
        assert_eq!(inv * x, ExactComplex::one());
        assert_eq!(i.clone() * i, -ExactComplex::one());
    }

    #[test]
    fn dyadic_rounding() {
        let x = Exact::rational(1, 3).round_dyadic(4);
        assert_eq!(x, Exact::rational(5, 16));
    }
}
