//! Dual spectral matrices, characteristic-polynomial identities and the
//! on-shell nilpotency check.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::{
    bethe_residual, gaudin_eigs_a, gaudin_eigs_b, gaudin_eigs_boundary, polish_exact, BetheSystem,
};
use crate::error::{Error, Result};
use crate::lax::{build_lax_a, build_lax_bcd, recip};
use crate::matrix::{spectrum_distance, Residual, SquareMatrix};
use crate::model::{check_coordinates, to_pair, BetheState, Couplings, Pair, RootSystem};
use crate::poly::Polynomial;
use crate::scalar::{ExactComplex, Scalar, FLOAT_RTOL};

/// N×N matrix: the A-type Lax matrix at `q̇ = H^A(q, μ, ω)`.
pub fn build_primary_a<T: Scalar>(
    q: &[T],
    mu: &[T],
    omega: &T,
    hbar: &T,
) -> Result<SquareMatrix<T>> {
    let h = gaudin_eigs_a(q, mu, omega, hbar)?;
    build_lax_a(&h, q, hbar)
}

/// M×M matrix with diagonal `ω − Σ_{γ≠α} ħ/(μ_α−μ_γ) − Σ_k ħ/(q_k−μ_α)`.
pub fn build_dual_a<T: Scalar>(q: &[T], mu: &[T], omega: &T, hbar: &T) -> Result<SquareMatrix<T>> {
    let m = mu.len();
    let mut out = SquareMatrix::zeros(m);
    for a in 0..m {
        let mut d = omega.clone();
        for b in 0..m {
            if b != a {
                let w = hbar.clone()
                    * recip(mu[a].clone() - mu[b].clone(), || format!("mu_{a} = mu_{b}"))?;
                d = d - w.clone();
                out[(a, b)] = w;
            }
        }
        for (k, qk) in q.iter().enumerate() {
            d = d - hbar.clone() * recip(qk.clone() - mu[a].clone(), || format!("q_{k} = mu_{a}"))?;
        }
        out[(a, a)] = d;
    }
    Ok(out)
}

/// (2N+1)×(2N+1) B-type Lax matrix at `q̇ = H̃(q, μ)` with couplings
/// `(√2ħ, ħ, 0)`.
pub fn build_primary_b<T: Scalar>(q: &[T], mu: &[T], hbar: &T) -> Result<SquareMatrix<T>> {
    check_coordinates(q, true)?;
    let h = gaudin_eigs_b(q, mu, hbar)?;
    let c = Couplings::new(T::sqrt2() * hbar.clone(), hbar.clone(), T::zero());
    build_lax_bcd(&h, q, &c, RootSystem::B)
}

/// 2M×2M block matrix `[[Ã, B̃], [−B̃, −Ã]]`.
pub fn build_dual_b<T: Scalar>(q: &[T], mu: &[T], hbar: &T) -> Result<SquareMatrix<T>> {
    check_coordinates(mu, true)?;
    let m = mu.len();
    let mut out = SquareMatrix::zeros(2 * m);
    for i in 0..m {
        for j in 0..m {
            let (a, b) = if i == j {
                let inv = hbar.clone() * recip(mu[i].clone(), || format!("mu_{i} = 0"))?;
                let mut d = inv.clone();
                for (k, qk) in q.iter().enumerate() {
                    d = d
                        + hbar.clone()
                            * recip(mu[i].clone() - qk.clone(), || format!("mu_{i} = q_{k}"))?
                        + hbar.clone()
                            * recip(mu[i].clone() + qk.clone(), || format!("mu_{i} = -q_{k}"))?;
                }
                for l in 0..m {
                    if l != i {
                        d = d
                            - hbar.clone() / (mu[i].clone() - mu[l].clone())
                            - hbar.clone() / (mu[i].clone() + mu[l].clone());
                    }
                }
                (d, inv)
            } else {
                (
                    hbar.clone() / (mu[i].clone() - mu[j].clone()),
                    hbar.clone() / (mu[i].clone() + mu[j].clone()),
                )
            };
            out[(i, j)] = a.clone();
            out[(m + i, m + j)] = -a;
            out[(i, m + j)] = b.clone();
            out[(m + i, j)] = -b;
        }
    }
    Ok(out)
}

/// 2N×2N C-type Lax matrix at `q̇ = H(q, μ, ξ)` with couplings `(0, ħ, √2ħξ)`.
pub fn build_primary_c<T: Scalar>(q: &[T], mu: &[T], xi: &T, hbar: &T) -> Result<SquareMatrix<T>> {
    check_coordinates(q, true)?;
    let h = gaudin_eigs_boundary(q, mu, xi, hbar)?;
    let c = Couplings::new(
        T::zero(),
        hbar.clone(),
        T::sqrt2() * hbar.clone() * xi.clone(),
    );
    build_lax_bcd(&h, q, &c, RootSystem::C)
}

/// 2M×2M C-type Lax matrix at coordinates `μ`, velocities
/// `H(μ, q, 1−ξ)` and couplings `(0, ħ, √2ħ(1−ξ))`.
pub fn build_dual_c<T: Scalar>(q: &[T], mu: &[T], xi: &T, hbar: &T) -> Result<SquareMatrix<T>> {
    let dual_xi = T::one() - xi.clone();
    build_primary_c(mu, q, &dual_xi, hbar)
}

/// Primary and dual matrices with the polynomial relating their
/// characteristic polynomials: `det(𝓛 − λ) = factor(λ) · det(𝓛̃ − λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityPair<T> {
    pub primary: SquareMatrix<T>,
    pub dual: SquareMatrix<T>,
    pub factor: Polynomial<T>,
}

/// `param` is `ω` for A and `ξ` for C; B and D ignore it (D uses `ξ = 0`).
pub fn duality_pair<T: Scalar>(
    kind: RootSystem,
    q: &[T],
    mu: &[T],
    param: &T,
    hbar: &T,
) -> Result<DualityPair<T>> {
    let (n, m) = (q.len(), mu.len());
    let gap = |extra: usize| {
        (2 * n + extra)
            .checked_sub(2 * m)
            .ok_or_else(|| Error::InvalidInput(format!("M = {m} exceeds N = {n}")))
    };
    Ok(match kind {
        RootSystem::A => {
            let k = n
                .checked_sub(m)
                .ok_or_else(|| Error::InvalidInput(format!("M = {m} exceeds N = {n}")))?;
            DualityPair {
                primary: build_primary_a(q, mu, param, hbar)?,
                dual: build_dual_a(q, mu, param, hbar)?,
                factor: Polynomial::new(vec![param.clone(), -T::one()]).pow(k),
            }
        }
        RootSystem::B => DualityPair {
            primary: build_primary_b(q, mu, hbar)?,
            dual: build_dual_b(q, mu, hbar)?,
            factor: Polynomial::monomial(-T::one(), gap(1)?),
        },
        RootSystem::C | RootSystem::D => {
            let xi = if kind == RootSystem::D {
                T::zero()
            } else {
                param.clone()
            };
            DualityPair {
                primary: build_primary_c(q, mu, &xi, hbar)?,
                dual: build_dual_c(q, mu, &xi, hbar)?,
                factor: Polynomial::monomial(T::one(), gap(0)?),
            }
        }
    })
}

/// Coefficientwise deviation of `det(𝓛 − λ)` from `factor · det(𝓛̃ − λ)`.
pub fn identity_residual<T: Scalar>(
    kind: RootSystem,
    q: &[T],
    mu: &[T],
    param: &T,
    hbar: &T,
) -> Result<Residual> {
    let pair = duality_pair(kind, q, mu, param, hbar)?;
    let lhs = pair.primary.char_poly();
    let rhs = &pair.factor * &pair.dual.char_poly();
    Ok(lhs.residual(&rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedSingular,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Inputs printed in full precision so that a certificate can be replayed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateInputs {
    pub q: Vec<String>,
    pub mu: Vec<String>,
    pub param: String,
    pub hbar: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCertificate {
    pub kind: RootSystem,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub inputs: CertificateInputs,
    pub mode: Mode,
    pub residual: Residual,
    pub verdict: Verdict,
}

pub fn certify<T: Scalar + fmt::Display>(
    kind: RootSystem,
    q: &[T],
    mu: &[T],
    param: &T,
    hbar: &T,
) -> Result<IdentityCertificate> {
    let residual = identity_residual(kind, q, mu, param, hbar)?;
    let show = |v: &[T]| v.iter().map(|x| x.to_string()).collect();
    Ok(IdentityCertificate {
        kind,
        n: q.len(),
        m: mu.len(),
        inputs: CertificateInputs {
            q: show(q),
            mu: show(mu),
            param: param.to_string(),
            hbar: hbar.to_string(),
        },
        mode: if T::EXACT {
            Mode::Rational
        } else {
            Mode::Float
        },
        verdict: Verdict::from_bool(residual.holds(FLOAT_RTOL)),
        residual,
    })
}

/// Upper bound on the moduli of the roots of a polynomial
/// `p_n λ^n + … + p_0`: `2 · max_k |p_{n−k}/p_n|^{1/k}`, with the constant
/// term halved.
pub fn root_bound<T: Scalar>(p: &Polynomial<T>) -> f64 {
    let Some(n) = p.degree() else {
        return f64::INFINITY;
    };
    let lead = p.leading();
    let mut best: f64 = 0.0;
    for k in 1..=n {
        let mut c = (p.coeff(n - k) / lead.clone()).magnitude();
        if k == n {
            c /= 2.0;
        }
        best = best.max(c.powf(1.0 / k as f64));
    }
    2.0 * best
}

/// Outcome of the on-shell check for one Bethe state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilpotencyReport {
    pub kind: RootSystem,
    pub mu: Vec<Pair>,
    /// `‖Lⁿ‖^{1/n}` for the on-shell matrix built in exact arithmetic at
    /// the polished roots, entries rounded to `ENTRY_BITS` binary digits.
    pub eigen_bound: f64,
    /// Largest eigenvalue modulus from the double-precision eigensolver.
    pub float_max_eig: f64,
    /// Bethe residual after exact polishing.
    pub polished_residual: f64,
    /// `|ħ| / min |z_i − z_k|` (or `|ħ| / min |z_i|` for a single site).
    pub scale: f64,
    pub relative: f64,
    pub passed: bool,
}

/// Polishing rounds and working precision (bits) for the exact refinement.
pub const POLISH_STEPS: usize = 8;
pub const POLISH_BITS: u32 = 384;
/// Precision of the rounded matrix entries.
pub const ENTRY_BITS: u32 = 320;

fn pair_scale(z: &[Complex64], hbar: f64) -> f64 {
    let mut d = f64::INFINITY;
    for (i, a) in z.iter().enumerate() {
        for b in &z[i + 1..] {
            d = d.min((a - b).norm());
        }
    }
    if !d.is_finite() {
        d = z.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
    }
    hbar.abs() / d
}

fn lift_all(v: &[Complex64]) -> Result<Vec<ExactComplex>> {
    v.iter()
        .map(|&x| {
            ExactComplex::from_complex(x)
                .ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
        })
        .collect()
}

fn lift(x: f64) -> Result<ExactComplex> {
    ExactComplex::from_complex(Complex64::new(x, 0.0))
        .ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

/// Primary matrix of the duality at `q = z` for B, C or D.
fn primary_bcd<T: Scalar>(
    kind: RootSystem,
    z: &[T],
    mu: &[T],
    xi: &T,
    hbar: &T,
) -> Result<SquareMatrix<T>> {
    match kind {
        RootSystem::B => build_primary_b(z, mu, hbar),
        RootSystem::C => build_primary_c(z, mu, xi, hbar),
        RootSystem::D => build_primary_c(z, mu, &T::zero(), hbar),
        RootSystem::A => Err(Error::InvalidInput("use a_type_spectrum for A".into())),
    }
}

fn bethe_system<T: Scalar>(kind: RootSystem, xi: T) -> BetheSystem<T> {
    match kind {
        RootSystem::B => BetheSystem::BoundaryB,
        RootSystem::D => BetheSystem::BoundaryC { xi: T::zero() },
        _ => BetheSystem::BoundaryC { xi },
    }
}

/// On-shell nilpotency of the primary Lax matrix. Floating-point
/// eigenvalues of a nilpotent matrix carry errors of order `ε^{1/n}`, so the
/// float roots are refined by exact Newton steps, the matrix is formed in
/// exact arithmetic and every eigenvalue is bounded by `‖Lⁿ‖^{1/n}`.
pub fn onshell_nilpotency(
    kind: RootSystem,
    z: &[Complex64],
    state: &BetheState,
    xi: f64,
    hbar: f64,
    rtol: f64,
) -> Result<NilpotencyReport> {
    if !state.converged || state.singular {
        return Err(Error::InvalidInput(
            "state is not a converged regular Bethe state".into(),
        ));
    }
    let ze = lift_all(z)?;
    let (xe, he) = (lift(xi)?, lift(hbar)?);
    let sys = bethe_system(kind, xe.clone());
    let mu = polish_exact(&sys, &ze, &state.mu, &he, POLISH_STEPS, POLISH_BITS)?;
    let polished_residual = bethe_residual(&sys, &ze, &mu, &he)?
        .iter()
        .map(|r| r.magnitude())
        .fold(0.0, f64::max);
    let exact = primary_bcd(kind, &ze, &mu, &xe, &he)?.map(|x| x.round_dyadic(ENTRY_BITS));
    let size = exact.dim();
    let eigen_bound = exact.pow(size as u32).norm_inf().powf(1.0 / size as f64);
    let hc = Complex64::new(hbar, 0.0);
    let float = primary_bcd(kind, z, &state.mu, &Complex64::new(xi, 0.0), &hc)?;
    let float_max_eig = float
        .eigenvalues()?
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max);
    let scale = pair_scale(z, hbar);
    let relative = eigen_bound / scale;
    Ok(NilpotencyReport {
        kind,
        mu: state.mu.iter().copied().map(to_pair).collect(),
        eigen_bound,
        float_max_eig,
        polished_residual,
        scale,
        relative,
        passed: relative <= rtol,
    })
}

/// Distance between the A-type Lax spectrum at an on-shell state and
/// `{ω × (N−M), −ω × M}`.
pub fn a_type_spectrum(z: &[Complex64], state: &BetheState, omega: f64, hbar: f64) -> Result<f64> {
    let om = Complex64::new(omega, 0.0);
    let l = build_primary_a(z, &state.mu, &om, &Complex64::new(hbar, 0.0))?;
    let n = z.len();
    let m = state.mu.len();
    let mut want = vec![om; n - m];
    want.extend(std::iter::repeat_n(-om, m));
    Ok(spectrum_distance(&l.eigenvalues()?, &want))
}

/// On shell the dual diagonal `H(μ, q, 1−ξ)` reduces to `−H(μ, ∅, 1−ξ)`.
pub fn onshell_reduction_residual<T: Scalar>(
    q: &[T],
    mu: &[T],
    xi: &T,
    hbar: &T,
) -> Result<Residual> {
    let dual_xi = T::one() - xi.clone();
    let full = gaudin_eigs_boundary(mu, q, &dual_xi, hbar)?;
    let reduced = gaudin_eigs_boundary(mu, &[], &dual_xi, hbar)?;
    let diffs: Vec<T> = full
        .iter()
        .zip(&reduced)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    let scale = full
        .iter()
        .chain(&reduced)
        .map(|x| x.magnitude())
        .fold(0.0, f64::max);
    Ok(Residual::from_diffs(&diffs, scale))
}

/// Laurent data of a rational function of `x` with at most double poles at
/// `x = ±q_k` and a finite limit at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentData<T> {
    pub a0: T,
    /// For each `k`: `(c_k^−, a_k^−)` at `x = q_k` and `(c_k^+, a_k^+)` at
    /// `x = −q_k`.
    pub minus: Vec<(T, T)>,
    pub plus: Vec<(T, T)>,
    /// Agreement of the fitted form with direct evaluation at extra nodes.
    pub structure: Residual,
}

/// Extra evaluation nodes used to confirm the pole structure.
const CHECK_NODES: usize = 3;

fn laurent<T: Scalar>(f: &dyn Fn(&T) -> Result<T>, q: &[T]) -> Result<LaurentData<T>> {
    let n = q.len();
    let one = Polynomial::constant(T::one());
    let factors: Vec<Polynomial<T>> = q
        .iter()
        .flat_map(|qk| {
            [
                Polynomial::new(vec![-qk.clone(), T::one()]),
                Polynomial::new(vec![qk.clone(), T::one()]),
            ]
        })
        .collect();
    let qpoly = factors.iter().fold(one.clone(), |acc, p| &acc * &p.pow(2));
    let need = 4 * n + 1 + CHECK_NODES;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut j = 0i64;
    while xs.len() < need {
        j += 1;
        if j > 64 * need as i64 {
            return Err(Error::ExtractionFailure(
                "could not place interpolation nodes".into(),
            ));
        }
        let x = T::from_ratio(17 + 13 * j, 11) * if j % 2 == 0 { T::one() } else { -T::one() };
        if qpoly.eval(&x).is_negligible(1.0) {
            continue;
        }
        if let Ok(v) = f(&x) {
            ys.push(v * qpoly.eval(&x));
            xs.push(x);
        }
    }
    let fit = 4 * n + 1;
    let p = Polynomial::interpolate(&xs[..fit], &ys[..fit])?;
    let diffs: Vec<T> = xs[fit..]
        .iter()
        .zip(&ys[fit..])
        .map(|(x, y)| p.eval(x) - y.clone())
        .collect();
    let scale = ys.iter().map(|y| y.magnitude()).fold(0.0, f64::max);
    let structure = Residual::from_diffs(&diffs, scale);
    let dp = p.derivative();
    let pole = |idx: usize| -> (T, T) {
        let root = -factors[idx].coeff(0);
        let rest = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .fold(one.clone(), |acc, (_, f)| &acc * &f.pow(2));
        let (r, dr) = (rest.eval(&root), rest.derivative().eval(&root));
        let (pv, dpv) = (p.eval(&root), dp.eval(&root));
        let c = pv.clone() / r.clone();
        let a = (dpv * r.clone() - pv * dr) / r.square();
        (c, a)
    };
    Ok(LaurentData {
        a0: p.coeff(4 * n),
        minus: (0..n).map(|k| pole(2 * k)).collect(),
        plus: (0..n).map(|k| pole(2 * k + 1)).collect(),
        structure,
    })
}

/// Relations between the Laurent data of both determinants in `μ_1` at one
/// value of `λ`, and of the primary data against the closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub structure: Residual,
    pub a0: Residual,
    pub double_poles: Residual,
    pub simple_poles: Residual,
    pub closed_forms: Residual,
}

impl ResidueCheck {
    pub fn holds(&self, rtol: f64) -> bool {
        [
            self.structure,
            self.a0,
            self.double_poles,
            self.simple_poles,
            self.closed_forms,
        ]
        .iter()
        .all(|r| r.holds(rtol))
    }
}

fn pair_residual<T: Scalar>(pairs: &[(T, T)]) -> Residual {
    let diffs: Vec<T> = pairs.iter().map(|(a, b)| a.clone() - b.clone()).collect();
    let scale = pairs
        .iter()
        .flat_map(|(a, b)| [a.magnitude(), b.magnitude()])
        .fold(0.0, f64::max);
    Residual::from_diffs(&diffs, scale)
}

fn without<T: Clone>(v: &[T], skip: usize) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, x)| x.clone())
        .collect()
}

/// `F = ħ(ξ−½)/p + Σ_{j≠k}(ħ/(p−q_j) + ħ/(p+q_j)) − Σ_{l≥2}(ħ/(p−μ_l) + ħ/(p+μ_l))`
/// at the pole `p = ±q_k`.
fn residue_weight<T: Scalar>(p: &T, k: usize, q: &[T], mu: &[T], xi: &T, hbar: &T) -> T {
    let half = T::from_ratio(1, 2);
    let mut s = (xi.clone() - half) / p.clone();
    for (j, qj) in q.iter().enumerate() {
        if j != k {
            s = s + (p.clone() - qj.clone()).recip() + (p.clone() + qj.clone()).recip();
        }
    }
    for ml in &mu[1..] {
        s = s - (p.clone() - ml.clone()).recip() - (p.clone() + ml.clone()).recip();
    }
    hbar.clone() * s
}

/// C-type check of the pole structure of both sides of the identity as
/// functions of `μ_1`, at each `λ` in `lambdas`.
pub fn residue_structure_check<T: Scalar>(
    q: &[T],
    mu: &[T],
    xi: &T,
    hbar: &T,
    lambdas: &[T],
) -> Result<Vec<ResidueCheck>> {
    if mu.is_empty() {
        return Err(Error::InvalidInput("the residue check needs M >= 1".into()));
    }
    let n = q.len();
    let gap = 2 * n - 2 * mu.len();
    let with_mu1 = |x: &T| {
        let mut m = mu.to_vec();
        m[0] = x.clone();
        m
    };
    let mut out = Vec::with_capacity(lambdas.len());
    for lam in lambdas {
        let lhs = |x: &T| {
            Ok(build_primary_c(q, &with_mu1(x), xi, hbar)?
                .char_poly()
                .eval(lam))
        };
        let rhs = |x: &T| {
            Ok(build_dual_c(q, &with_mu1(x), xi, hbar)?
                .char_poly()
                .eval(lam))
        };
        let left = laurent(&lhs, q)?;
        let right = laurent(&rhs, q)?;
        let factor = lam.powi(gap as u32);
        let scaled = |(c, a): &(T, T)| (factor.clone() * c.clone(), factor.clone() * a.clone());
        let doubles: Vec<(T, T)> = left
            .minus
            .iter()
            .chain(&left.plus)
            .zip(right.minus.iter().chain(&right.plus))
            .map(|(l, r)| (l.0.clone(), scaled(r).0))
            .collect();
        let simples: Vec<(T, T)> = left
            .minus
            .iter()
            .chain(&left.plus)
            .zip(right.minus.iter().chain(&right.plus))
            .map(|(l, r)| (l.1.clone(), scaled(r).1))
            .collect();
        let rest_mu = &mu[1..];
        let mut closed = vec![(
            left.a0.clone(),
            build_primary_c(q, rest_mu, xi, hbar)?.char_poly().eval(lam),
        )];
        for k in 0..n {
            let sub = build_primary_c(&without(q, k), rest_mu, xi, hbar)?
                .char_poly()
                .eval(lam);
            for (p, data) in [
                (q[k].clone(), &left.minus[k]),
                (-q[k].clone(), &left.plus[k]),
            ] {
                let w = residue_weight(&p, k, q, mu, xi, hbar);
                closed.push((data.0.clone(), -(hbar.square()) * sub.clone()));
                closed.push((
                    data.1.clone(),
                    -(T::from_int(2) * hbar.clone() * w * sub.clone()),
                ));
            }
        }
        out.push(ResidueCheck {
            structure: left.structure.combine(right.structure),
            a0: pair_residual(&[(left.a0.clone(), factor.clone() * right.a0.clone())]),
            double_poles: pair_residual(&doubles),
            simple_poles: pair_residual(&simples),
            closed_forms: pair_residual(&closed),
        });
    }
    Ok(out)
}

/// `|det(𝓛 − λ)|` of the C-type primary matrix along `q_1 = q_2 (1 + t)`.
pub fn merge_regularity<T: Scalar>(
    q: &[T],
    mu: &[T],
    xi: &T,
    hbar: &T,
    lambda: &T,
    ts: &[T],
) -> Result<Vec<f64>> {
    if q.len() < 2 {
        return Err(Error::InvalidInput(
            "the regularity probe needs N >= 2".into(),
        ));
    }
    ts.iter()
        .map(|t| {
            let mut qq = q.to_vec();
            qq[0] = q[1].clone() * (T::one() + t.clone());
            Ok(build_primary_c(&qq, mu, xi, hbar)?
                .char_poly()
                .eval(lambda)
                .magnitude())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Exact {
        Exact::rational(n, d)
    }

    #[test]
    fn a_type_small_cases() {
        let om = q(2, 7);
        assert_eq!(
            build_primary_a(&[q(3, 1)], &[], &om, &q(1, 1)).unwrap(),
            SquareMatrix::diagonal(vec![om.clone()])
        );
        let d = build_dual_a(&[q(1, 1), q(4, 1)], &[q(2, 1)], &om, &q(1, 1)).unwrap();
        assert_eq!(d[(0, 0)], om.clone() - q(1, -1) - q(1, 2));
        let r = identity_residual(
            RootSystem::A,
            &[q(1, 1), q(4, 1), q(-2, 3)],
            &[q(5, 2)],
            &om,
            &q(3, 5),
        )
        .unwrap();
        assert_eq!(r.exact_zero, Some(true));
        assert_eq!(
            build_dual_a::<Exact>(&[q(1, 1)], &[], &om, &q(1, 1))
                .unwrap()
                .char_poly(),
            Polynomial::constant(q(1, 1))
        );
    }

    #[test]
    fn b_type_one_by_one_matrices() {
        let (q1, m1, h) = (q(3, 2), q(-5, 7), q(2, 3));
        let l = build_primary_b(std::slice::from_ref(&q1), std::slice::from_ref(&m1), &h).unwrap();
        let ht = q(2, 1) * h.clone() / q1.clone()
            - h.clone() / (q1.clone() - m1.clone())
            - h.clone() / (q1.clone() + m1.clone());
        let s = Exact::sqrt2() * h.clone() / q1.clone();
        let zero = q(0, 1);
        let expected = SquareMatrix::from_rows(vec![
            vec![ht.clone(), zero.clone(), s.clone()],
            vec![zero.clone(), -ht, -s.clone()],
            vec![-s.clone(), s, zero],
        ])
        .unwrap();
        assert_eq!(l, expected);
        let hg = -h.clone() / m1.clone()
            - h.clone() / (m1.clone() - q1.clone())
            - h.clone() / (m1.clone() + q1.clone());
        let inv = h.clone() / m1.clone();
        let dual = build_dual_b(std::slice::from_ref(&q1), std::slice::from_ref(&m1), &h).unwrap();
        let expected =
            SquareMatrix::from_rows(vec![vec![-hg.clone(), inv.clone()], vec![-inv, hg]]).unwrap();
        assert_eq!(dual, expected);
        let r = identity_residual(RootSystem::B, &[q1], &[m1], &zero_param(), &h).unwrap();
        assert_eq!(r.exact_zero, Some(true));
    }

    fn zero_param() -> Exact {
        q(0, 1)
    }

    #[test]
    fn b_dual_is_c_lax_at_minus_one() {
        let (qs, ms, h) = ([q(1, 3), q(-7, 4), q(5, 2)], [q(2, 9), q(-11, 5)], q(4, 3));
        let explicit = build_dual_b(&qs, &ms, &h).unwrap();
        let vel: Vec<Exact> = gaudin_eigs_boundary(&ms, &qs, &q(-1, 1), &h)
            .unwrap()
            .into_iter()
            .map(|x| -x)
            .collect();
        let c = Couplings::new(q(0, 1), h.clone(), Exact::sqrt2() * h.clone());
        assert_eq!(
            explicit,
            build_lax_bcd(&vel, &ms, &c, RootSystem::C).unwrap()
        );
    }

    #[test]
    fn c_type_two_one_example() {
        let (qs, ms, xi, h) = ([q(3, 5), q(-8, 3)], [q(7, 4)], q(2, 9), q(5, 6));
        let dual = build_dual_c(&qs, &ms, &xi, &h).unwrap();
        let m1 = ms[0].clone();
        let diag = h.clone() * (q(1, 1) - xi.clone()) / m1.clone()
            - qs.iter().fold(q(0, 1), |acc, qk| {
                acc + h.clone() / (m1.clone() - qk.clone()) + h.clone() / (m1.clone() + qk.clone())
            });
        let off = h.clone() * (q(1, 1) - xi.clone()) / m1.clone();
        let expected =
            SquareMatrix::from_rows(vec![vec![diag.clone(), off.clone()], vec![-off, -diag]])
                .unwrap();
        assert_eq!(dual, expected);
        let r = identity_residual(RootSystem::C, &qs, &ms, &xi, &h).unwrap();
        assert_eq!(r.exact_zero, Some(true));
        let one = build_dual_c(&qs, &ms, &q(1, 1), &h).unwrap();
        assert!(one[(0, 1)].is_zero());
    }

    #[test]
    fn m_zero_reduces_to_powers_of_lambda() {
        let qs = [q(2, 3), q(-5, 4), q(9, 7)];
        for kind in [RootSystem::B, RootSystem::C, RootSystem::D] {
            let r = identity_residual(kind, &qs, &[], &q(1, 3), &q(3, 2)).unwrap();
            assert_eq!(r.exact_zero, Some(true), "{kind}");
        }
    }

    #[test]
    fn root_bound_examples() {
        let p = Polynomial::from_roots(&[2.0, -3.0, 0.5]);
        let b = root_bound(&p);
        assert!((3.0..=2.0 * 6.0).contains(&b));
        assert_eq!(root_bound(&Polynomial::monomial(1.0, 4)), 0.0);
    }

    #[test]
    fn certificate_json_shape() {
        let cert = certify(
            RootSystem::C,
            &[q(1, 2), q(3, 1)],
            &[q(-2, 5)],
            &q(1, 2),
            &q(1, 1),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["N"], 2);
        assert_eq!(v["M"], 1);
        assert_eq!(v["mode"], "rational");
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["inputs"]["mu"][0], "-2/5");
    }

    #[test]
    fn residue_relations_two_sites() {
        let checks = residue_structure_check(
            &[q(3, 2), q(-5, 3)],
            &[q(7, 5)],
            &q(1, 3),
            &q(2, 1),
            &[q(1, 4), q(-3, 7)],
        )
        .unwrap();
        for c in checks {
            assert!(c.holds(0.0), "{c:?}");
        }
    }
}
