//! Truncated power series `c_0 + c_1 ε + … + c_{K-1} ε^{K-1}`.
//!
//! Used to expand the spin-chain transfer matrix in the small parameter
//! exactly: every arithmetic operation is carried out modulo `ε^K`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T, const K: usize> {
    c: [T; K],
}

impl<T: Scalar, const K: usize> Jet<T, K> {
    pub fn constant(x: T) -> Self {
        let mut c: [T; K] = std::array::from_fn(|_| T::zero());
        c[0] = x;
        Self { c }
    }

    /// `x0 + x1·ε`
    pub fn linear(x0: T, x1: T) -> Self {
        let mut j = Self::constant(x0);
        if K > 1 {
            j.c[1] = x1;
        }
        j
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.c[k]
    }

    pub fn coeffs(&self) -> &[T; K] {
        &self.c
    }
}

impl<T: Scalar, const K: usize> Zero for Jet<T, K> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl<T: Scalar, const K: usize> One for Jet<T, K> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Scalar, const K: usize> Add for Jet<T, K> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a = a.clone() + b;
        }
        Self { c }
    }
}

impl<T: Scalar, const K: usize> Sub for Jet<T, K> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a = a.clone() - b;
        }
        Self { c }
    }
}

impl<T: Scalar, const K: usize> Neg for Jet<T, K> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            c: self.c.map(|x| -x),
        }
    }
}

impl<T: Scalar, const K: usize> Mul for Jet<T, K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c: [T; K] = std::array::from_fn(|_| T::zero());
        for i in 0..K {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..K - i {
                if rhs.c[j].is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].clone() + self.c[i].clone() * rhs.c[j].clone();
            }
        }
        Self { c }
    }
}

impl<T: Scalar, const K: usize> Div for Jet<T, K> {
    type Output = Self;
    /// Series division; the divisor's constant term must be invertible.
    fn div(self, rhs: Self) -> Self {
        let mut q: [T; K] = std::array::from_fn(|_| T::zero());
        let d0 = rhs.c[0].clone();
        for k in 0..K {
            let mut acc = self.c[k].clone();
            for j in 1..=k {
                acc = acc - rhs.c[j].clone() * q[k - j].clone();
            }
            q[k] = acc / d0.clone();
        }
        Self { c: q }
    }
}

impl<T: Scalar, const K: usize> Scalar for Jet<T, K> {
    const EXACT: bool = T::EXACT;

    fn from_int(n: i64) -> Self {
        Self::constant(T::from_int(n))
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        T::from_complex(z).map(Self::constant)
    }

    fn sqrt2() -> Self {
        Self::constant(T::sqrt2())
    }

    /// Constant term.
    fn to_complex(&self) -> Complex64 {
        self.c[0].to_complex()
    }

    /// Largest coefficient magnitude.
    fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    type J = Jet<Exact, 4>;

    fn q(n: i64, d: i64) -> Exact {
        Exact::rational(n, d)
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 − ε) = 1 + ε + ε² + ε³ mod ε⁴
        let x = J::one() / J::linear(q(1, 1), q(-1, 1));
        assert!(x.coeffs().iter().all(|c| *c == q(1, 1)));
    }

    #[test]
    fn product_truncates() {
        let e = J::linear(q(0, 1), q(1, 1));
        let e4 = e.powi(4);
        assert!(e4.is_zero());
        let e3 = e.powi(3);
        assert_eq!(*e3.coeff(3), q(1, 1));
    }

    #[test]
    fn division_inverts_product() {
        let a = J::linear(q(3, 2), q(-1, 5)) * J::linear(q(2, 1), q(7, 3));
        let b = J::linear(q(-4, 7), q(1, 9));
        assert_eq!((a.clone() * b.clone()) / b, a);
    }
}
