//! Conjugation of the special-velocity Lax matrices to nilpotent matrices.

use crate::error::{Error, Result};
use crate::lax::build_lax_bcd;
use crate::matrix::{Residual, SquareMatrix};
use crate::model::{check_coordinates, preset_couplings, RootSystem};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationKit<T> {
    pub d0: SquareMatrix<T>,
    pub v: SquareMatrix<T>,
    pub c0: SquareMatrix<T>,
    pub ctilde: SquareMatrix<T>,
}

fn require_bcd(kind: RootSystem) -> Result<()> {
    if kind.is_bcd() {
        Ok(())
    } else {
        Err(Error::InvalidInput(
            "factorization is defined for B, C and D".into(),
        ))
    }
}

/// `(C0)_{i,i+1} = i + 1` and `C̃_{i,i+1} = 1` for even `i` (zero-based rows).
pub fn nilpotent_pair<T: Scalar>(size: usize) -> (SquareMatrix<T>, SquareMatrix<T>) {
    let c0 = SquareMatrix::from_fn(size, |i, j| {
        if j == i + 1 {
            T::from_int(j as i64)
        } else {
            T::zero()
        }
    });
    let ct = SquareMatrix::from_fn(size, |i, j| {
        if j == i + 1 && i % 2 == 0 {
            T::one()
        } else {
            T::zero()
        }
    });
    (c0, ct)
}

pub fn build_kit<T: Scalar>(q: &[T], kind: RootSystem) -> Result<FactorizationKit<T>> {
    require_bcd(kind)?;
    check_coordinates(q, true)?;
    let n = q.len();
    let size = kind.lax_size(n);
    let prod = |i: usize| -> T {
        (0..n)
            .filter(|&k| k != i)
            .fold(T::one(), |acc, k| acc * (q[i].square() - q[k].square()))
    };
    let mut diag = Vec::with_capacity(size);
    match kind {
        RootSystem::B => {
            let half: Vec<T> = (0..n)
                .map(|i| T::sqrt2() * q[i].square() * prod(i))
                .collect();
            diag.extend(half.iter().cloned());
            diag.extend(half);
            diag.push(q.iter().fold(T::one(), |acc, x| acc * -x.square()));
        }
        _ => {
            let two = T::from_int(2);
            let half: Vec<T> = (0..n)
                .map(|i| two.clone() * q[i].clone() * prod(i))
                .collect();
            diag.extend(half.iter().cloned());
            diag.extend(half.into_iter().map(|x| -x));
        }
    }
    let v = SquareMatrix::from_fn(size, |i, j| {
        if i < n {
            q[i].powi(j as u32)
        } else if i < 2 * n {
            (-q[i - n].clone()).powi(j as u32)
        } else if j == 0 {
            T::one()
        } else {
            T::zero()
        }
    });
    let (c0, ctilde) = nilpotent_pair(size);
    Ok(FactorizationKit {
        d0: SquareMatrix::diagonal(diag),
        v,
        c0,
        ctilde,
    })
}

/// C/D: `q̇_i = ξħ/q_i + Σ_{k≠i} (ħ/(q_i − q_k) + ħ/(q_i + q_k))`; B uses
/// `2ħ/q_i` in place of the first term. D ignores `xi`.
pub fn special_velocities<T: Scalar>(
    q: &[T],
    kind: RootSystem,
    xi: &T,
    hbar: &T,
) -> Result<Vec<T>> {
    require_bcd(kind)?;
    check_coordinates(q, true)?;
    let lead = match kind {
        RootSystem::B => T::from_int(2),
        RootSystem::D => T::zero(),
        _ => xi.clone(),
    };
    Ok((0..q.len())
        .map(|i| {
            let mut s = lead.clone() / q[i].clone();
            for k in 0..q.len() {
                if k != i {
                    s = s
                        + (q[i].clone() - q[k].clone()).recip()
                        + (q[i].clone() + q[k].clone()).recip();
                }
            }
            hbar.clone() * s
        })
        .collect())
}

/// Coefficient of `C̃`: `−(1 − 2ξ)` for C/D, `+1` for B.
pub fn ctilde_weight<T: Scalar>(kind: RootSystem, xi: &T) -> T {
    match kind {
        RootSystem::B => T::one(),
        RootSystem::D => -T::one(),
        _ => -(T::one() - T::from_int(2) * xi.clone()),
    }
}

/// `ħ (D0)⁻¹ V (C0 + s C̃) V⁻¹ D0`
pub fn factorized_lax<T: Scalar>(
    q: &[T],
    kind: RootSystem,
    xi: &T,
    hbar: &T,
) -> Result<SquareMatrix<T>> {
    let kit = build_kit(q, kind)?;
    let core = &kit.c0 + &kit.ctilde.scale(&ctilde_weight(kind, xi));
    let d0_inv = kit.d0.inverse()?;
    let v_inv = kit.v.inverse()?;
    let prod = &(&(&(&d0_inv * &kit.v) * &core) * &v_inv) * &kit.d0;
    Ok(prod.scale(hbar))
}

/// The Lax matrix at the special velocities with preset couplings.
pub fn special_lax<T: Scalar>(
    q: &[T],
    kind: RootSystem,
    xi: &T,
    hbar: &T,
) -> Result<SquareMatrix<T>> {
    let xi_eff = if kind == RootSystem::D {
        T::zero()
    } else {
        xi.clone()
    };
    let qdot = special_velocities(q, kind, &xi_eff, hbar)?;
    build_lax_bcd(&qdot, q, &preset_couplings(kind, hbar, &xi_eff), kind)
}

pub fn factorization_residual<T: Scalar>(
    q: &[T],
    kind: RootSystem,
    xi: &T,
    hbar: &T,
) -> Result<Residual> {
    let direct = special_lax(q, kind, xi, hbar)?;
    let fact = factorized_lax(q, kind, xi, hbar)?;
    Ok(direct.residual(&fact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::rational(n, d)
    }

    #[test]
    fn single_particle_kits() {
        let q1 = q(3, 5);
        let kit = build_kit(std::slice::from_ref(&q1), RootSystem::C).unwrap();
        assert_eq!(
            kit.d0,
            SquareMatrix::diagonal(vec![q(2, 1) * q1.clone(), q(-2, 1) * q1.clone()])
        );
        assert_eq!(
            kit.v,
            SquareMatrix::from_rows(vec![vec![q(1, 1), q1.clone()], vec![q(1, 1), -q1.clone()]])
                .unwrap()
        );
        assert_eq!(kit.c0[(0, 1)], q(1, 1));
        assert_eq!(kit.ctilde[(0, 1)], q(1, 1));
        let kb = build_kit(std::slice::from_ref(&q1), RootSystem::B).unwrap();
        let s = Exact::sqrt2() * q1.square();
        assert_eq!(
            kb.d0,
            SquareMatrix::diagonal(vec![s.clone(), s, -q1.square()])
        );
        assert_eq!(kb.v.row(2), &[q(1, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn nilpotent_pattern() {
        let (c0, ct) = nilpotent_pair::<Exact>(5);
        for i in 0..4 {
            assert_eq!(c0[(i, i + 1)], Exact::from_int(i as i64 + 1));
            let expected = if (i + 2) % 2 == 0 { 1 } else { 0 };
            assert_eq!(ct[(i, i + 1)], Exact::from_int(expected));
        }
        let s = Exact::rational(-7, 3);
        assert!((&c0 + &ct.scale(&s)).pow(5).is_zero());
    }

    #[test]
    fn special_velocity_examples() {
        let v = special_velocities(&[q(1, 1), q(2, 1)], RootSystem::C, &q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(v, vec![q(-2, 3), q(4, 3)]);
        let v = special_velocities(&[q(5, 2)], RootSystem::B, &q(0, 1), &q(3, 1)).unwrap();
        assert_eq!(v, vec![q(12, 5)]);
        let v = special_velocities(&[q(5, 2)], RootSystem::C, &q(1, 3), &q(3, 1)).unwrap();
        assert_eq!(v, vec![q(2, 5)]);
    }

    #[test]
    fn single_particle_factorization_is_exact() {
        for xi in [q(0, 1), q(1, 2), q(1, 1), q(-5, 7)] {
            let r = factorization_residual(&[q(-4, 9)], RootSystem::C, &xi, &q(2, 3)).unwrap();
            assert_eq!(r.exact_zero, Some(true));
        }
    }

    #[test]
    fn three_particle_b_factorization_is_exact() {
        let qs = [q(1, 3), q(-5, 4), q(7, 2)];
        let r = factorization_residual(&qs, RootSystem::B, &q(0, 1), &q(3, 7)).unwrap();
        assert_eq!(r.exact_zero, Some(true));
    }
}
