//! Gaudin eigenvalues, Bethe equations and a multistart Newton solver.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lax::recip;
use crate::matrix::SquareMatrix;
use crate::model::BetheState;
use crate::scalar::{ExactComplex, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum BetheSystem<T> {
    /// Periodic model with twist `ω`.
    ATwisted { omega: T },
    /// Boundary model; covers C and, at `ξ = 0`, D.
    BoundaryC { xi: T },
    /// Boundary model with a hidden site at the origin.
    BoundaryB,
}

impl<T: Scalar> BetheSystem<T> {
    pub fn is_boundary(&self) -> bool {
        !matches!(self, BetheSystem::ATwisted { .. })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BetheSystem<U> {
        match self {
            BetheSystem::ATwisted { omega } => BetheSystem::ATwisted { omega: f(omega) },
            BetheSystem::BoundaryC { xi } => BetheSystem::BoundaryC { xi: f(xi) },
            BetheSystem::BoundaryB => BetheSystem::BoundaryB,
        }
    }
}

/// `H_i = ω + Σ_{k≠i} ħ/(z_i − z_k) + Σ_γ ħ/(μ_γ − z_i)`
pub fn gaudin_eigs_a<T: Scalar>(z: &[T], mu: &[T], omega: &T, hbar: &T) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let mut s = T::zero();
        for k in 0..z.len() {
            if k != i {
                s = s + recip(z[i].clone() - z[k].clone(), || format!("z_{i} = z_{k}"))?;
            }
        }
        for (g, m) in mu.iter().enumerate() {
            s = s + recip(m.clone() - z[i].clone(), || format!("mu_{g} = z_{i}"))?;
        }
        out.push(omega.clone() + hbar.clone() * s);
    }
    Ok(out)
}

/// `H_i/ħ = ξ/z_i + Σ_{k≠i}(1/(z_i−z_k) + 1/(z_i+z_k)) − Σ_γ(1/(z_i−μ_γ) + 1/(z_i+μ_γ))`
pub fn gaudin_eigs_boundary<T: Scalar>(z: &[T], mu: &[T], xi: &T, hbar: &T) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let mut s = xi.clone() * recip(z[i].clone(), || format!("z_{i} = 0"))?;
        for k in 0..z.len() {
            if k != i {
                s = s
                    + recip(z[i].clone() - z[k].clone(), || format!("z_{i} = z_{k}"))?
                    + recip(z[i].clone() + z[k].clone(), || format!("z_{i} = -z_{k}"))?;
            }
        }
        for (g, m) in mu.iter().enumerate() {
            s = s
                - recip(z[i].clone() - m.clone(), || format!("z_{i} = mu_{g}"))?
                - recip(z[i].clone() + m.clone(), || format!("z_{i} = -mu_{g}"))?;
        }
        out.push(hbar.clone() * s);
    }
    Ok(out)
}

/// The boundary eigenvalues with `2/z_i` as the first term.
pub fn gaudin_eigs_b<T: Scalar>(z: &[T], mu: &[T], hbar: &T) -> Result<Vec<T>> {
    gaudin_eigs_boundary(z, mu, &T::from_int(2), hbar)
}

pub fn gaudin_eigs<T: Scalar>(sys: &BetheSystem<T>, z: &[T], mu: &[T], hbar: &T) -> Result<Vec<T>> {
    match sys {
        BetheSystem::ATwisted { omega } => gaudin_eigs_a(z, mu, omega, hbar),
        BetheSystem::BoundaryC { xi } => gaudin_eigs_boundary(z, mu, xi, hbar),
        BetheSystem::BoundaryB => gaudin_eigs_b(z, mu, hbar),
    }
}

/// Left-hand side minus right-hand side of the Bethe equations.
pub fn bethe_residual<T: Scalar>(
    sys: &BetheSystem<T>,
    z: &[T],
    mu: &[T],
    hbar: &T,
) -> Result<Vec<T>> {
    let two = T::from_int(2);
    let mut out = Vec::with_capacity(mu.len());
    for (a, ma) in mu.iter().enumerate() {
        let r = match sys {
            BetheSystem::ATwisted { omega } => {
                let mut s = T::zero();
                for (k, zk) in z.iter().enumerate() {
                    s = s + recip(ma.clone() - zk.clone(), || format!("mu_{a} = z_{k}"))?;
                }
                for (c, mc) in mu.iter().enumerate() {
                    if c != a {
                        s = s - two.clone()
                            * recip(ma.clone() - mc.clone(), || format!("mu_{a} = mu_{c}"))?;
                    }
                }
                two.clone() * omega.clone() + hbar.clone() * s
            }
            BetheSystem::BoundaryC { .. } | BetheSystem::BoundaryB => {
                let mut s = match sys {
                    BetheSystem::BoundaryC { xi } => {
                        two.clone()
                            * (xi.clone() - T::one())
                            * recip(ma.clone(), || format!("mu_{a} = 0"))?
                    }
                    _ => T::zero(),
                };
                for (k, zk) in z.iter().enumerate() {
                    s = s
                        + recip(ma.clone() - zk.clone(), || format!("mu_{a} = z_{k}"))?
                        + recip(ma.clone() + zk.clone(), || format!("mu_{a} = -z_{k}"))?;
                }
                for (c, mc) in mu.iter().enumerate() {
                    if c != a {
                        s = s
                            - two.clone()
                                * recip(ma.clone() - mc.clone(), || format!("mu_{a} = mu_{c}"))?
                            - two.clone()
                                * recip(ma.clone() + mc.clone(), || format!("mu_{a} = -mu_{c}"))?;
                    }
                }
                s
            }
        };
        out.push(r);
    }
    Ok(out)
}

/// `∂ residual_a / ∂ μ_b` in closed form.
pub fn bethe_jacobian<T: Scalar>(
    sys: &BetheSystem<T>,
    z: &[T],
    mu: &[T],
    hbar: &T,
) -> Result<SquareMatrix<T>> {
    // Poles are reported by the residual.
    bethe_residual(sys, z, mu, hbar)?;
    let m = mu.len();
    let two = T::from_int(2);
    let mut j = SquareMatrix::zeros(m);
    for a in 0..m {
        let ma = &mu[a];
        match sys {
            BetheSystem::ATwisted { .. } => {
                let mut d = T::zero();
                for zk in z {
                    d = d - (ma.clone() - zk.clone()).square().recip();
                }
                for b in 0..m {
                    if b != a {
                        let w = two.clone() * (ma.clone() - mu[b].clone()).square().recip();
                        d = d + w.clone();
                        j[(a, b)] = -(hbar.clone() * w);
                    }
                }
                j[(a, a)] = hbar.clone() * d;
            }
            _ => {
                let mut d = match sys {
                    BetheSystem::BoundaryC { xi } => {
                        -(two.clone() * (xi.clone() - T::one())) / ma.square()
                    }
                    _ => T::zero(),
                };
                for zk in z {
                    d = d
                        - (ma.clone() - zk.clone()).square().recip()
                        - (ma.clone() + zk.clone()).square().recip();
                }
                for b in 0..m {
                    if b != a {
                        let wm = two.clone() * (ma.clone() - mu[b].clone()).square().recip();
                        let wp = two.clone() * (ma.clone() + mu[b].clone()).square().recip();
                        d = d + wm.clone() + wp.clone();
                        j[(a, b)] = wp - wm;
                    }
                }
                j[(a, a)] = d;
            }
        }
    }
    Ok(j)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub seed_count: usize,
    pub rng_seed: u64,
    /// Overrides the default convergence tolerance.
    pub tol: Option<f64>,
    pub max_steps: usize,
    pub max_backtracks: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seed_count: 64,
            rng_seed: 0,
            tol: None,
            max_steps: 200,
            max_backtracks: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub states: Vec<BetheState>,
    pub attempts: usize,
    pub deduplication_radius: f64,
    pub tolerance: f64,
    pub diverged: usize,
    pub stalled: usize,
}

impl SolveReport {
    pub fn regular_states(&self) -> impl Iterator<Item = &BetheState> {
        self.states.iter().filter(|s| s.converged && !s.singular)
    }
}

/// Iterates beyond this multiple of `max(1, max |z|)` count as diverged.
pub const ESCAPE_RADIUS: f64 = 1e4;

/// Threshold for flagging roots that vanish or collide up to sign.
pub const SINGULAR_RADIUS: f64 = 1e-8;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn phase_key(z: &Complex64) -> f64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    im.atan2(z.re)
}

/// Sign-fixes boundary roots (positive real part, ties by imaginary part)
/// and sorts by magnitude, then phase.
pub fn canonicalize(mu: &[Complex64], boundary: bool) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = mu
        .iter()
        .map(|&m| {
            let flip = boundary
                && (m.re < -1e-13 * m.norm() || (m.re.abs() <= 1e-13 * m.norm() && m.im < 0.0));
            if flip {
                -m
            } else {
                m
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then_with(|| phase_key(a).total_cmp(&phase_key(b)))
    });
    out
}

/// Whether two canonical root sets agree up to relabeling within `radius`.
fn same_state(a: &[Complex64], b: &[Complex64], radius: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match b
            .iter()
            .enumerate()
            .position(|(i, y)| !used[i] && (x - y).norm() <= radius)
        {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

fn is_singular(mu: &[Complex64], z: &[Complex64], boundary: bool) -> bool {
    let scale = 1.0f64.max(z.iter().map(|x| x.norm()).fold(0.0, f64::max));
    let eps = SINGULAR_RADIUS * scale;
    for (a, ma) in mu.iter().enumerate() {
        if boundary && ma.norm() < eps {
            return true;
        }
        for mb in &mu[a + 1..] {
            if (ma - mb).norm() < eps || (boundary && (ma + mb).norm() < eps) {
                return true;
            }
        }
    }
    false
}

/// 2-norm condition number via singular values.
pub fn condition_number(j: &SquareMatrix<Complex64>) -> f64 {
    if j.dim() == 0 {
        return 1.0;
    }
    let m = DMatrix::from_row_iterator(j.dim(), j.dim(), j.entries().iter().copied());
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

enum SeedOutcome {
    Converged(Vec<Complex64>, f64),
    Diverged,
    Stalled,
}

fn newton(
    sys: &BetheSystem<Complex64>,
    z: &[Complex64],
    hbar: Complex64,
    mut mu: Vec<Complex64>,
    tol: f64,
    opts: &SolveOptions,
) -> SeedOutcome {
    let Ok(mut r) = bethe_residual(sys, z, &mu, &hbar) else {
        return SeedOutcome::Diverged;
    };
    let mut rn = norm(&r);
    // Every term decays like 1/μ, so runaway iterates look converged.
    let cap = ESCAPE_RADIUS * z.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for _ in 0..opts.max_steps {
        if !rn.is_finite() || mu.iter().any(|m| m.norm() > cap) {
            return SeedOutcome::Diverged;
        }
        if rn <= tol {
            return SeedOutcome::Converged(mu, rn);
        }
        let Ok(j) = bethe_jacobian(sys, z, &mu, &hbar) else {
            return SeedOutcome::Diverged;
        };
        let rhs: Vec<Complex64> = r.iter().map(|x| -x).collect();
        let Ok(step) = j.solve(&rhs) else {
            return SeedOutcome::Stalled;
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<Complex64> = mu.iter().zip(&step).map(|(m, s)| m + s * t).collect();
            if let Ok(rt) = bethe_residual(sys, z, &trial, &hbar) {
                let nt = norm(&rt);
                if nt.is_finite() && nt < rn {
                    mu = trial;
                    r = rt;
                    rn = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return if rn <= tol && mu.iter().all(|m| m.norm() <= cap) {
                SeedOutcome::Converged(mu, rn)
            } else {
                SeedOutcome::Stalled
            };
        }
    }
    if mu.iter().any(|m| m.norm() > cap) {
        SeedOutcome::Diverged
    } else if rn <= tol {
        SeedOutcome::Converged(mu, rn)
    } else if rn.is_finite() {
        SeedOutcome::Stalled
    } else {
        SeedOutcome::Diverged
    }
}

fn seeds(z: &[Complex64], m: usize, opts: &SolveOptions, seed_id: u64) -> Vec<Complex64> {
    // The first few seeds sit at midpoints of coordinate pairs.
    let n = z.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |k| (i, k)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    rng.set_stream(seed_id);
    let mags: Vec<f64> = z.iter().map(|x| x.norm()).filter(|x| *x > 0.0).collect();
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min).min(1.0) * 0.25;
    let hi = mags.iter().copied().fold(0.0, f64::max).max(1.0) * 2.0;
    let deterministic = (seed_id as usize) < pairs.len().max(1) && !pairs.is_empty();
    (0..m)
        .map(|g| {
            if deterministic {
                let (i, k) = pairs[(seed_id as usize + g) % pairs.len()];
                let mid = (z[i] + z[k]) * 0.5;
                // Offset each root so that the starting point is not degenerate.
                mid * (1.0 + 0.1 * g as f64) + Complex64::new(0.0, 0.05 * (g as f64 + 1.0))
            } else {
                let r = (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp();
                let th = rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(r, th)
            }
        })
        .collect()
}

/// Default convergence tolerance `1e-12 · max(1, |ħ| / min|z|)`.
pub fn default_tolerance(z: &[Complex64], hbar: Complex64) -> f64 {
    let zmin = z
        .iter()
        .map(|x| x.norm())
        .filter(|x| *x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let ratio = if zmin.is_finite() {
        hbar.norm() / zmin
    } else {
        1.0
    };
    1e-12 * ratio.max(1.0)
}

/// Damped Newton iteration from `seed_count` starts, deduplicated modulo
/// relabeling and (for boundary systems) sign flips of individual roots.
pub fn solve_bethe(
    sys: &BetheSystem<Complex64>,
    z: &[Complex64],
    m: usize,
    hbar: Complex64,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let tol = opts.tol.unwrap_or_else(|| default_tolerance(z, hbar));
    let boundary = sys.is_boundary();
    if m == 0 {
        let state = BetheState {
            mu: Vec::new(),
            residual_norm: 0.0,
            converged: true,
            seed_id: 0,
            singular: false,
            jacobian_condition: 1.0,
        };
        return Ok(SolveReport {
            states: vec![state],
            attempts: 0,
            deduplication_radius: 0.0,
            tolerance: tol,
            diverged: 0,
            stalled: 0,
        });
    }
    let outcomes: Vec<(u64, SeedOutcome)> = (0..opts.seed_count as u64)
        .into_par_iter()
        .map(|id| (id, newton(sys, z, hbar, seeds(z, m, opts, id), tol, opts)))
        .collect();
    let (mut diverged, mut stalled) = (0, 0);
    let mut found: Vec<BetheState> = Vec::new();
    let mut radius: f64 = 0.0;
    for (id, out) in outcomes {
        match out {
            SeedOutcome::Diverged => diverged += 1,
            SeedOutcome::Stalled => stalled += 1,
            SeedOutcome::Converged(mu, rn) => {
                let mu = canonicalize(&mu, boundary);
                let scale = mu.iter().map(|x| x.norm()).fold(0.0, f64::max);
                let dedup = 1e-8 * scale.max(f64::MIN_POSITIVE);
                radius = radius.max(dedup);
                if found.iter().any(|s| same_state(&s.mu, &mu, dedup)) {
                    continue;
                }
                let cond = bethe_jacobian(sys, z, &mu, &hbar)
                    .map(|j| condition_number(&j))
                    .unwrap_or(f64::INFINITY);
                found.push(BetheState {
                    singular: is_singular(&mu, z, boundary),
                    mu,
                    residual_norm: rn,
                    converged: true,
                    seed_id: id,
                    jacobian_condition: cond,
                });
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoSolutionsFound {
            attempts: opts.seed_count,
            diverged,
            stalled,
        });
    }
    found.sort_by(|a, b| {
        for (x, y) in a.mu.iter().zip(&b.mu) {
            let o = x
                .norm()
                .total_cmp(&y.norm())
                .then_with(|| phase_key(x).total_cmp(&phase_key(y)));
            if o.is_ne() {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(SolveReport {
        states: found,
        attempts: opts.seed_count,
        deduplication_radius: radius,
        tolerance: tol,
        diverged,
        stalled,
    })
}

/// Binary digits kept in the Jacobian during exact refinement.
const JACOBIAN_BITS: u32 = 128;

/// Newton refinement of a float root in exact arithmetic. The residual is
/// exact; the Jacobian is evaluated at the iterate rounded to
/// `JACOBIAN_BITS` digits, which keeps the solve cheap and still gains about
/// that many bits per step. Iterates are rounded to multiples of `2^-bits`,
/// and the loop stops when a step no longer changes the rounded iterate.
pub fn polish_exact(
    sys: &BetheSystem<ExactComplex>,
    z: &[ExactComplex],
    mu: &[Complex64],
    hbar: &ExactComplex,
    steps: usize,
    bits: u32,
) -> Result<Vec<ExactComplex>> {
    let mut cur: Vec<ExactComplex> = mu
        .iter()
        .map(|&m| {
            ExactComplex::from_complex(m)
                .ok_or_else(|| Error::InvalidInput(format!("non-finite root {m}")))
        })
        .collect::<Result<_>>()?;
    for _ in 0..steps {
        let r = bethe_residual(sys, z, &cur, hbar)?;
        if r.iter().all(|x| x.is_zero()) {
            break;
        }
        let coarse: Vec<ExactComplex> = cur.iter().map(|m| m.round_dyadic(JACOBIAN_BITS)).collect();
        let j = bethe_jacobian(sys, z, &coarse, hbar)?.map(|x| x.round_dyadic(JACOBIAN_BITS));
        let rhs: Vec<ExactComplex> = r.into_iter().map(|x| -x.round_dyadic(bits + 32)).collect();
        let step = j.solve(&rhs)?;
        let next: Vec<ExactComplex> = cur
            .iter()
            .zip(step)
            .map(|(m, s)| (m.clone() + s).round_dyadic(bits))
            .collect();
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::rational(n, d)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn a_type_eigenvalues() {
        let om = q(3, 7);
        assert_eq!(
            gaudin_eigs_a(&[q(2, 1)], &[], &om, &q(1, 1)).unwrap(),
            vec![om.clone()]
        );
        let h = gaudin_eigs_a(&[q(0, 1), q(1, 1)], &[], &om, &q(1, 1)).unwrap();
        assert_eq!(h, vec![om.clone() - q(1, 1), om.clone() + q(1, 1)]);
        let h = gaudin_eigs_a(&[q(1, 1), q(3, 1)], &[q(2, 1)], &om, &q(1, 1)).unwrap();
        assert_eq!(h[0], om + q(1, 2));
    }

    #[test]
    fn boundary_eigenvalues() {
        let xi = q(2, 9);
        let h = gaudin_eigs_boundary(&[q(5, 3)], &[], &xi, &q(3, 2)).unwrap();
        assert_eq!(h, vec![xi.clone() * q(3, 2) / q(5, 3)]);
        let h = gaudin_eigs_boundary(&[q(1, 1), q(2, 1)], &[], &xi, &q(1, 1)).unwrap();
        assert_eq!(h[0], xi - q(2, 3));
        let hb = gaudin_eigs_b(&[q(4, 1)], &[], &q(1, 1)).unwrap();
        assert_eq!(hb, vec![q(1, 2)]);
    }

    #[test]
    fn b_type_example_with_one_root() {
        let (q1, mu1, h) = (q(3, 2), q(-2, 5), q(4, 3));
        let got = gaudin_eigs_b(std::slice::from_ref(&q1), std::slice::from_ref(&mu1), &h).unwrap();
        let expected = q(2, 1) * h.clone() / q1.clone()
            - h.clone() / (q1.clone() - mu1.clone())
            - h / (q1 + mu1);
        assert_eq!(got, vec![expected]);
    }

    #[test]
    fn closed_form_roots_are_on_shell() {
        let z = [q(1, 1), q(2, 1)];
        let sys = BetheSystem::BoundaryC { xi: q(0, 1) };
        let r = bethe_residual(&sys, &z, &[Exact::sqrt2()], &q(1, 1)).unwrap();
        assert!(r[0].is_zero());
        let off = bethe_residual(&sys, &z, &[q(3, 2)], &q(1, 1)).unwrap();
        assert!(!off[0].is_zero());
        // B-type: μ² = 5/2 is on shell; check through u = μ² with μ² rational.
        let zc = [c(1.0), c(2.0)];
        let rb =
            bethe_residual(&BetheSystem::BoundaryB, &zc, &[c(2.5f64.sqrt())], &c(1.0)).unwrap();
        assert!(rb[0].norm() < 1e-14);
    }

    #[test]
    fn single_root_jacobian() {
        let z = [c(1.0), c(2.5)];
        let xi = c(0.3);
        let mu = c(0.7);
        let j = bethe_jacobian(&BetheSystem::BoundaryC { xi }, &z, &[mu], &c(1.0)).unwrap();
        let mut expected = -2.0 * (xi - 1.0) / (mu * mu);
        for zk in z {
            expected -= 1.0 / ((mu - zk) * (mu - zk)) + 1.0 / ((mu + zk) * (mu + zk));
        }
        assert!((j[(0, 0)] - expected).norm() < 1e-12);
    }

    #[test]
    fn two_root_off_diagonal() {
        let z = [c(1.0), c(2.0), c(3.0), c(4.0)];
        let (m1, m2) = (c(0.6), c(1.7));
        let j = bethe_jacobian(
            &BetheSystem::BoundaryC { xi: c(0.0) },
            &z,
            &[m1, m2],
            &c(1.0),
        )
        .unwrap();
        let expected = -2.0 / ((m1 - m2) * (m1 - m2)) + 2.0 / ((m1 + m2) * (m1 + m2));
        assert!((j[(0, 1)] - expected).norm() < 1e-12);
        assert!((j[(0, 1)] - j[(1, 0)]).norm() < 1e-12);
    }

    #[test]
    fn canonical_form() {
        let mu = [Complex64::new(-2.0, 0.5), Complex64::new(0.0, -1.0)];
        let can = canonicalize(&mu, true);
        assert_eq!(
            can,
            vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, -0.5)]
        );
        let kept = canonicalize(&mu, false);
        assert_eq!(kept[0], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn zero_magnons_give_the_empty_state() {
        let rep = solve_bethe(
            &BetheSystem::BoundaryB,
            &[c(1.0)],
            0,
            c(1.0),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.states.len(), 1);
        assert!(rep.states[0].mu.is_empty());
    }

    #[test]
    fn exact_polish_improves_residual() {
        let z = [c(1.0), c(2.0)];
        let sys = BetheSystem::BoundaryC { xi: c(0.5) };
        let rep = solve_bethe(
            &sys,
            &z,
            1,
            c(1.0),
            &SolveOptions {
                seed_count: 16,
                ..Default::default()
            },
        )
        .unwrap();
        let st = rep.regular_states().next().unwrap();
        let ze: Vec<ExactComplex> = z
            .iter()
            .map(|&x| ExactComplex::from_complex(x).unwrap())
            .collect();
        let sys_e = sys.map(|x| ExactComplex::from_complex(*x).unwrap());
        let one = ExactComplex::from_int(1);
        let mu = polish_exact(&sys_e, &ze, &st.mu, &one, 4, 256).unwrap();
        let r = bethe_residual(&sys_e, &ze, &mu, &one).unwrap();
        assert!(r[0].magnitude() < 1e-60);
    }
}
