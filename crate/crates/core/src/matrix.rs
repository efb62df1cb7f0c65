//! Dense square matrices over a [`Scalar`] field.
//!
//! Inversion and determinants use Gaussian elimination with the largest
//! available pivot; in exact mode any nonzero pivot is exact, so the result
//! does not depend on conditioning. Characteristic polynomials use the
//! Faddeev–LeVerrier recurrence, which only divides by integers.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for row in self.data.chunks(self.n.max(1)) {
            list.entry(&row);
        }
        list.finish()
    }
}

/// Outcome of comparing two quantities that should agree.
///
/// In exact mode `exact_zero` records whether the difference vanished
/// identically; `max_abs` is the largest entrywise difference in double
/// precision and `scale` the largest magnitude involved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max_abs: f64,
    pub scale: f64,
    pub exact_zero: Option<bool>,
}

impl Residual {
    pub fn from_diffs<T: Scalar>(diffs: &[T], scale: f64) -> Self {
        let max_abs = diffs.iter().map(|d| d.magnitude()).fold(0.0, f64::max);
        let exact_zero = T::EXACT.then(|| diffs.iter().all(|d| d.is_zero()));
        Self {
            max_abs,
            scale,
            exact_zero,
        }
    }

    pub fn zero_exact() -> Self {
        Self {
            max_abs: 0.0,
            scale: 0.0,
            exact_zero: Some(true),
        }
    }

    /// `max_abs / scale`, with the scale floored at 1 when nothing is large.
    pub fn relative(&self) -> f64 {
        self.max_abs / self.scale.max(1.0)
    }

    /// Exact zero in exact mode, `relative() <= rtol` otherwise.
    pub fn holds(&self, rtol: f64) -> bool {
        match self.exact_zero {
            Some(z) => z,
            None => self.relative() <= rtol,
        }
    }

    /// Worst of two residuals.
    pub fn combine(self, other: Self) -> Self {
        Self {
            max_abs: self.max_abs.max(other.max_abs),
            scale: self.scale.max(other.scale),
            exact_zero: match (self.exact_zero, other.exact_zero) {
                (Some(a), Some(b)) => Some(a && b),
                _ => None,
            },
        }
    }
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a {n}x{n} matrix",
                bad.len()
            )));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal(diag: Vec<T>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, d) in diag.into_iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.n).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SquareMatrix<U> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_complex(&self) -> SquareMatrix<Complex64> {
        self.map(|x| x.to_complex())
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|x| x.magnitude()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.n;
        Self::from_fn(self.n * m, |i, j| {
            self[(i / m, j / m)].clone() * other[(i % m, j % m)].clone()
        })
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), |i, j| self[(keep[i], keep[j])].clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Entrywise comparison against `other`.
    pub fn residual(&self, other: &Self) -> Residual {
        assert_eq!(
            self.n, other.n,
            "residual between matrices of different sizes"
        );
        let diffs: Vec<T> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Residual::from_diffs(&diffs, self.max_abs().max(other.max_abs()))
    }

    /// Residual of `self` against the zero matrix, relative to `scale`.
    pub fn residual_zero(&self, scale: f64) -> Residual {
        Residual::from_diffs(&self.data, scale)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn pivot_row(&self, col: usize, start: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in start..self.n {
            let v = &self[(r, col)];
            if v.is_zero() {
                continue;
            }
            let mag = v.magnitude();
            if best.is_none_or(|(_, m)| mag > m) {
                best = Some((r, mag));
            }
        }
        best.map(|(r, _)| r)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    fn float_pivot_floor(&self) -> f64 {
        if T::EXACT {
            0.0
        } else {
            self.max_abs() * f64::EPSILON * (self.n as f64)
        }
    }

    pub fn det(&self) -> T {
        let mut a = self.clone();
        let floor = self.float_pivot_floor();
        let mut det = T::one();
        for col in 0..self.n {
            let Some(p) = a.pivot_row(col, col) else {
                return T::zero();
            };
            if a[(p, col)].magnitude() <= floor {
                return T::zero();
            }
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..self.n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                for c in col..self.n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let floor = self.float_pivot_floor();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = a.pivot_row(col, col).ok_or(Error::SingularMatrix)?;
            if a[(p, col)].magnitude() <= floor {
                return Err(Error::SingularMatrix);
            }
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / pivot.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in 0..n {
                    let va = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = va;
                    let vi = inv[(r, c)].clone() - factor.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = vi;
                }
            }
        }
        Ok(inv)
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for a {}x{} system",
                rhs.len(),
                self.n,
                self.n
            )));
        }
        let inv = self.inverse()?;
        Ok((0..self.n)
            .map(|i| {
                inv.row(i)
                    .iter()
                    .zip(rhs)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// `det(self − λ·I)` as a polynomial in λ (leading coefficient `(−1)^n`),
    /// computed with the Faddeev–LeVerrier recurrence.
    pub fn char_poly(&self) -> Polynomial<T> {
        let n = self.n;
        // c[k] is the coefficient of λ^k in det(λI − A).
        let mut c = vec![T::zero(); n + 1];
        c[n] = T::one();
        let mut m = Self::zeros(n);
        for k in 1..=n {
            m = &(self * &m) + &Self::identity(n).scale(&c[n + 1 - k]);
            let am = self * &m;
            c[n - k] = -am.trace() / T::from_int(k as i64);
        }
        let p = Polynomial::new(c);
        if n % 2 == 1 {
            -&p
        } else {
            p
        }
    }

    /// Eigenvalues in double precision, ordered by magnitude then phase.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let m =
            DMatrix::from_row_iterator(self.n, self.n, self.data.iter().map(|x| x.to_complex()));
        let schur = Schur::try_new(m, f64::EPSILON, 100_000).ok_or(Error::EigenNonConvergence)?;
        let mut eig: Vec<Complex64> = schur
            .eigenvalues()
            .ok_or(Error::EigenNonConvergence)?
            .iter()
            .copied()
            .collect();
        sort_spectrum(&mut eig);
        Ok(eig)
    }
}

fn phase(z: &Complex64) -> f64 {
    // −0.0 imaginary parts would put negative reals at −π.
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    im.atan2(z.re)
}

/// Deterministic ordering: magnitude, then phase in (−π, π].
pub fn sort_spectrum(eig: &mut [Complex64]) {
    eig.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then_with(|| phase(a).total_cmp(&phase(b)))
    });
}

/// Largest distance between two multisets of eigenvalues under greedy
/// nearest-neighbour matching.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn add(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix sizes differ");
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn sub(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix sizes differ");
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn neg(self) -> SquareMatrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Scalar> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix sizes differ");
        let n = self.n;
        let mut out = SquareMatrix::<T>::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}
