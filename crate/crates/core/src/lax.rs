//! Classical Lax pairs, Hamiltonians and dynamics of the Calogero-Moser
//! models.
//!
//! Block layout for B, C and D (row/column blocks of size N, N and, for B,
//! one extra index):
//!
//! ```text
//! L = [ P+A   B    C ]      M = [ Ǎ+d  B̌    Č ]
//!     [ -B  -P-A  -C ]          [ B̌   Ǎ+d   Č ]
//!     [ -Cᵀ   Cᵀ   0 ]          [ Čᵀ   Čᵀ  d0 ]
//! ```
//!
//! C and D drop the last row and column, which vanish with `g1 = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::model::{check_coordinates, validate_couplings, Couplings, RootSystem};
use crate::scalar::Scalar;

pub(crate) fn recip<T: Scalar>(x: T, what: impl FnOnce() -> String) -> Result<T> {
    if x.is_zero() {
        Err(Error::PoleCollision(what()))
    } else {
        Ok(T::one() / x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T> {
    pub q: Vec<T>,
    pub p: Vec<T>,
}

impl<T: Scalar> PhasePoint<T> {
    pub fn new(q: Vec<T>, p: Vec<T>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates, {} momenta",
                q.len(),
                p.len()
            )));
        }
        Ok(Self { q, p })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaxPair<T> {
    pub l: SquareMatrix<T>,
    pub m: SquareMatrix<T>,
}

impl<T: Scalar> LaxPair<T> {
    pub fn size(&self) -> usize {
        self.l.dim()
    }
}

fn check_len<T>(qdot: &[T], q: &[T]) -> Result<()> {
    if qdot.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} velocities, {} coordinates",
            qdot.len(),
            q.len()
        )));
    }
    Ok(())
}

/// `L_ij = δ_ij q̇_i + g (1 − δ_ij) / (q_i − q_j)`
pub fn build_lax_a<T: Scalar>(qdot: &[T], q: &[T], g: &T) -> Result<SquareMatrix<T>> {
    check_len(qdot, q)?;
    check_coordinates(q, false)?;
    let n = q.len();
    let mut l = SquareMatrix::zeros(n);
    for i in 0..n {
        l[(i, i)] = qdot[i].clone();
        for j in 0..n {
            if i != j {
                l[(i, j)] = g.clone() / (q[i].clone() - q[j].clone());
            }
        }
    }
    Ok(l)
}

pub fn build_m_a<T: Scalar>(q: &[T], g: &T) -> Result<SquareMatrix<T>> {
    check_coordinates(q, false)?;
    let n = q.len();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = g.clone() / (q[i].clone() - q[j].clone()).square();
                m[(i, j)] = -v.clone();
                m[(i, i)] = m[(i, i)].clone() + v;
            }
        }
    }
    Ok(m)
}

fn check_bcd<T: Scalar>(q: &[T], c: &Couplings<T>, kind: RootSystem) -> Result<()> {
    validate_couplings(c)?;
    check_coordinates(q, true)?;
    match kind {
        RootSystem::A => Err(Error::InvalidInput(
            "A-type matrices use build_lax_a".into(),
        )),
        RootSystem::C if !c.g1.is_zero() => {
            Err(Error::InvalidInput("C-type requires g1 = 0".into()))
        }
        RootSystem::D if !(c.g1.is_zero() && c.g4.is_zero()) => {
            Err(Error::InvalidInput("D-type requires g1 = g4 = 0".into()))
        }
        _ => Ok(()),
    }
}

/// Lax matrix of size `2N+1` (B) or `2N` (C, D).
pub fn build_lax_bcd<T: Scalar>(
    qdot: &[T],
    q: &[T],
    c: &Couplings<T>,
    kind: RootSystem,
) -> Result<SquareMatrix<T>> {
    check_len(qdot, q)?;
    check_bcd(q, c, kind)?;
    let n = q.len();
    let mut l = SquareMatrix::zeros(kind.lax_size(n));
    let two = T::from_int(2);
    for a in 0..n {
        for b in 0..n {
            let (pa, bb) = if a == b {
                (
                    qdot[a].clone(),
                    c.g4.clone() * T::sqrt2() / (two.clone() * q[a].clone()),
                )
            } else {
                (
                    c.g2.clone() / (q[a].clone() - q[b].clone()),
                    c.g2.clone() / (q[a].clone() + q[b].clone()),
                )
            };
            l[(a, b)] = pa.clone();
            l[(n + a, n + b)] = -pa;
            l[(a, n + b)] = bb.clone();
            l[(n + a, b)] = -bb;
        }
        if kind == RootSystem::B {
            let ca = c.g1.clone() / q[a].clone();
            l[(a, 2 * n)] = ca.clone();
            l[(n + a, 2 * n)] = -ca.clone();
            l[(2 * n, a)] = -ca.clone();
            l[(2 * n, n + a)] = ca;
        }
    }
    Ok(l)
}

/// `M` in the full `(2N+1)` layout; `redefine_corner` subtracts `d0` from the
/// last diagonal entry.
pub fn build_m_bcd_full<T: Scalar>(
    q: &[T],
    c: &Couplings<T>,
    redefine_corner: bool,
) -> Result<SquareMatrix<T>> {
    validate_couplings(c)?;
    check_coordinates(q, true)?;
    let n = q.len();
    let mut m = SquareMatrix::zeros(2 * n + 1);
    let two = T::from_int(2);
    let four = T::from_int(4);
    // g1²/g2 = 2 g2 − √2 g4 whenever g1 ≠ 0; zero otherwise.
    let g1_term = if c.g1.is_zero() {
        T::zero()
    } else {
        c.g1.square() / c.g2.clone()
    };
    let mut d0 = T::zero();
    for a in 0..n {
        let qa2 = q[a].square();
        d0 = d0 + two.clone() * c.g2.clone() / qa2.clone();
        let mut da = g1_term.clone() / qa2.clone()
            + c.g4.clone() * T::sqrt2() / (four.clone() * qa2.clone());
        for b in 0..n {
            let (ab, bb) = if a == b {
                (
                    T::zero(),
                    -(c.g4.clone() * T::sqrt2()) / (four.clone() * qa2.clone()),
                )
            } else {
                let dm = (q[a].clone() - q[b].clone()).square();
                let dp = (q[a].clone() + q[b].clone()).square();
                da = da + c.g2.clone() / dm.clone() + c.g2.clone() / dp.clone();
                (-(c.g2.clone() / dm), -(c.g2.clone() / dp))
            };
            m[(a, b)] = ab.clone();
            m[(n + a, n + b)] = ab;
            m[(a, n + b)] = bb.clone();
            m[(n + a, b)] = bb;
        }
        m[(a, a)] = m[(a, a)].clone() + da.clone();
        m[(n + a, n + a)] = m[(n + a, n + a)].clone() + da;
        let ca = -(c.g1.clone() / qa2);
        m[(a, 2 * n)] = ca.clone();
        m[(n + a, 2 * n)] = ca.clone();
        m[(2 * n, a)] = ca.clone();
        m[(2 * n, n + a)] = ca;
    }
    if !redefine_corner {
        m[(2 * n, 2 * n)] = d0;
    }
    Ok(m)
}

/// `M` matched to [`build_lax_bcd`]: full size for B, last row and column
/// dropped for C and D.
pub fn build_m_bcd<T: Scalar>(
    q: &[T],
    c: &Couplings<T>,
    kind: RootSystem,
) -> Result<SquareMatrix<T>> {
    check_bcd(q, c, kind)?;
    let full = build_m_bcd_full(q, c, false)?;
    Ok(match kind {
        RootSystem::B => full,
        _ => full.principal_submatrix(&(0..2 * q.len()).collect::<Vec<_>>()),
    })
}

pub fn lax_pair<T: Scalar>(
    pt: &PhasePoint<T>,
    c: &Couplings<T>,
    kind: RootSystem,
) -> Result<LaxPair<T>> {
    match kind {
        RootSystem::A => Ok(LaxPair {
            l: build_lax_a(&pt.p, &pt.q, &c.g2)?,
            m: build_m_a(&pt.q, &c.g2)?,
        }),
        _ => Ok(LaxPair {
            l: build_lax_bcd(&pt.p, &pt.q, c, kind)?,
            m: build_m_bcd(&pt.q, c, kind)?,
        }),
    }
}

fn kinetic<T: Scalar>(p: &[T]) -> T {
    p.iter().fold(T::zero(), |acc, x| acc + x.square()) / T::from_int(2)
}

/// `H = ½Σp² − g²Σ_{i<j} (q_i − q_j)⁻²`
pub fn hamiltonian_a<T: Scalar>(pt: &PhasePoint<T>, g: &T) -> Result<T> {
    check_coordinates(&pt.q, false)?;
    let q = &pt.q;
    let mut v = T::zero();
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            v = v + (q[i].clone() - q[j].clone()).square().recip();
        }
    }
    Ok(kinetic(&pt.p) - g.square() * v)
}

pub fn hamiltonian_bcd<T: Scalar>(pt: &PhasePoint<T>, c: &Couplings<T>) -> Result<T> {
    check_coordinates(&pt.q, true)?;
    let q = &pt.q;
    let mut pair = T::zero();
    let mut single = T::zero();
    let four = T::from_int(4);
    for a in 0..q.len() {
        let qa2 = q[a].square();
        single = single + c.g4.square() / (four.clone() * qa2.clone()) + c.g1.square() / qa2;
        for b in a + 1..q.len() {
            pair = pair
                + (q[a].clone() - q[b].clone()).square().recip()
                + (q[a].clone() + q[b].clone()).square().recip();
        }
    }
    Ok(kinetic(&pt.p) - c.g2.square() * pair - single)
}

pub fn hamiltonian<T: Scalar>(pt: &PhasePoint<T>, c: &Couplings<T>, kind: RootSystem) -> Result<T> {
    match kind {
        RootSystem::A => hamiltonian_a(pt, &c.g2),
        _ => hamiltonian_bcd(pt, c),
    }
}

/// `(q̇, ṗ) = (p, −∂H/∂q)` in closed form.
pub fn equations_of_motion<T: Scalar>(
    pt: &PhasePoint<T>,
    c: &Couplings<T>,
    kind: RootSystem,
) -> Result<(Vec<T>, Vec<T>)> {
    check_coordinates(&pt.q, kind.is_bcd())?;
    let q = &pt.q;
    let n = q.len();
    let two = T::from_int(2);
    let mut pdot = vec![T::zero(); n];
    for a in 0..n {
        let mut grad = T::zero();
        let g2sq = c.g2.square();
        for b in 0..n {
            if a == b {
                continue;
            }
            grad = grad + two.clone() * g2sq.clone() / (q[a].clone() - q[b].clone()).powi(3);
            if kind.is_bcd() {
                grad = grad + two.clone() * g2sq.clone() / (q[a].clone() + q[b].clone()).powi(3);
            }
        }
        if kind.is_bcd() {
            let qa3 = q[a].powi(3);
            grad = grad
                + c.g4.square() / (two.clone() * qa3.clone())
                + two.clone() * c.g1.square() / qa3;
        }
        pdot[a] = -grad;
    }
    Ok((pt.p.clone(), pdot))
}

/// Smallest of `|q_i − q_k|` and, for B/C/D, `|q_i + q_k|` and `|q_i|`.
pub fn collision_distance<T: Scalar>(q: &[T], kind: RootSystem) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..q.len() {
        if kind.is_bcd() {
            d = d.min(q[i].magnitude());
        }
        for k in i + 1..q.len() {
            d = d.min((q[i].clone() - q[k].clone()).magnitude());
            if kind.is_bcd() {
                d = d.min((q[i].clone() + q[k].clone()).magnitude());
            }
        }
    }
    d
}

/// Distance below which [`evolve`] aborts.
pub const COLLISION_GUARD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub dt: f64,
    pub points: Vec<PhasePoint<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &PhasePoint<T> {
        self.points
            .last()
            .expect("trajectory holds the initial point")
    }

    /// Columns `t, q_1..q_N, p_1..p_N`; complex parts are dropped when every
    /// imaginary part vanishes, otherwise entries print as `re+imi`.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(0, |p| p.n());
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",q_{i}"));
        }
        for i in 1..=n {
            out.push_str(&format!(",p_{i}"));
        }
        out.push('\n');
        for (k, pt) in self.points.iter().enumerate() {
            out.push_str(&format!("{}", k as f64 * self.dt));
            for x in pt.q.iter().chain(&pt.p) {
                out.push(',');
                out.push_str(&format_scalar(x.to_complex()));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn format_scalar(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn axpy<T: Scalar>(x: &[T], a: &T, y: &[T]) -> Vec<T> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| xi.clone() + a.clone() * yi.clone())
        .collect()
}

/// Fixed-step fourth-order Runge-Kutta. Every intermediate point is recorded.
pub fn evolve<T: Scalar>(
    start: &PhasePoint<T>,
    c: &Couplings<T>,
    kind: RootSystem,
    dt: f64,
    steps: usize,
) -> Result<Trajectory<T>> {
    let h = T::from_complex(Complex64::new(dt, 0.0))
        .ok_or_else(|| Error::InvalidInput(format!("step {dt} is not representable")))?;
    let half = h.clone() / T::from_int(2);
    let sixth = h.clone() / T::from_int(6);
    let two = T::from_int(2);
    let mut points = Vec::with_capacity(steps + 1);
    points.push(start.clone());
    let mut cur = start.clone();
    for step in 0..steps {
        let guard = |pt: &PhasePoint<T>| -> Result<()> {
            let d = collision_distance(&pt.q, kind);
            if d < COLLISION_GUARD {
                Err(Error::SingularityApproached { step, distance: d })
            } else {
                Ok(())
            }
        };
        guard(&cur)?;
        let (k1q, k1p) = equations_of_motion(&cur, c, kind)?;
        let p2 = PhasePoint {
            q: axpy(&cur.q, &half, &k1q),
            p: axpy(&cur.p, &half, &k1p),
        };
        guard(&p2)?;
        let (k2q, k2p) = equations_of_motion(&p2, c, kind)?;
        let p3 = PhasePoint {
            q: axpy(&cur.q, &half, &k2q),
            p: axpy(&cur.p, &half, &k2p),
        };
        guard(&p3)?;
        let (k3q, k3p) = equations_of_motion(&p3, c, kind)?;
        let p4 = PhasePoint {
            q: axpy(&cur.q, &h, &k3q),
            p: axpy(&cur.p, &h, &k3p),
        };
        guard(&p4)?;
        let (k4q, k4p) = equations_of_motion(&p4, c, kind)?;
        let combine = |x: &[T], k1: &[T], k2: &[T], k3: &[T], k4: &[T]| -> Vec<T> {
            (0..x.len())
                .map(|i| {
                    let s = k1[i].clone()
                        + two.clone() * k2[i].clone()
                        + two.clone() * k3[i].clone()
                        + k4[i].clone();
                    x[i].clone() + sixth.clone() * s
                })
                .collect()
        };
        cur = PhasePoint {
            q: combine(&cur.q, &k1q, &k2q, &k3q, &k4q),
            p: combine(&cur.p, &k1p, &k2p, &k3p, &k4p),
        };
        points.push(cur.clone());
    }
    Ok(Trajectory { dt, points })
}

/// Eigenvalues sorted by magnitude, then phase.
pub fn spectrum<T: Scalar>(m: &SquareMatrix<T>) -> Result<Vec<Complex64>> {
    m.eigenvalues()
}

/// `tr(L^k) / (2k)` for B, C, D and `tr(L^k) / k` for A, `k = 1..=kmax`.
pub fn integrals_of_motion<T: Scalar>(l: &SquareMatrix<T>, kmax: u32, kind: RootSystem) -> Vec<T> {
    let norm = if kind.is_bcd() { 2 } else { 1 };
    let mut out = Vec::with_capacity(kmax as usize);
    let mut power = SquareMatrix::identity(l.dim());
    for k in 1..=kmax {
        power = &power * l;
        out.push(power.trace() / T::from_int((norm * k) as i64));
    }
    out
}

/// Matrix as nested `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl<T: Scalar> From<&SquareMatrix<T>> for MatrixJson {
    fn from(m: &SquareMatrix<T>) -> Self {
        MatrixJson(
            m.rows()
                .map(|r| {
                    r.iter()
                        .map(|x| {
                            let z = x.to_complex();
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::preset_couplings;
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::rational(n, d)
    }

    #[test]
    fn a_type_examples() {
        let l = build_lax_a(&[0.0, 0.0], &[0.0, 1.0], &1.0).unwrap();
        assert_eq!(
            l,
            SquareMatrix::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
        );
        let l1 = build_lax_a(&[5.0], &[2.0], &3.0).unwrap();
        assert_eq!(l1[(0, 0)], 5.0);
        let m = build_m_a(&[0.0, 1.0], &1.0).unwrap();
        assert_eq!(
            m,
            SquareMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
        );
        assert!(build_m_a(&[0.0, 1.0, 3.0], &0.0).unwrap().is_zero());
    }

    #[test]
    fn a_type_m_rows_sum_to_zero() {
        let m = build_m_a(&[q(1, 3), q(-2, 5), q(7, 2)], &q(3, 4)).unwrap();
        for r in m.rows() {
            let s = r.iter().cloned().fold(Exact::from_int(0), |a, b| a + b);
            assert_eq!(s, Exact::from_int(0));
        }
    }

    #[test]
    fn c_type_single_particle() {
        let (h, xi, q1) = (q(3, 2), q(2, 5), q(-7, 3));
        let c = preset_couplings(RootSystem::C, &h, &xi);
        let qdot = xi.clone() * h.clone() / q1.clone();
        let l = build_lax_bcd(
            std::slice::from_ref(&qdot),
            std::slice::from_ref(&q1),
            &c,
            RootSystem::C,
        )
        .unwrap();
        let expected = SquareMatrix::from_rows(vec![
            vec![qdot.clone(), qdot.clone()],
            vec![-qdot.clone(), -qdot],
        ])
        .unwrap();
        assert_eq!(l, expected);
    }

    #[test]
    fn b_type_single_particle_corners() {
        let h = q(1, 1);
        let c = preset_couplings(RootSystem::B, &h, &q(0, 1));
        let q1 = q(2, 1);
        let l = build_lax_bcd(&[q(1, 1)], std::slice::from_ref(&q1), &c, RootSystem::B).unwrap();
        let corner = Exact::sqrt2() * h / q1;
        assert_eq!(l[(0, 2)], corner);
        assert_eq!(l[(1, 2)], -corner.clone());
        assert_eq!(l[(2, 0)], -corner.clone());
        assert_eq!(l[(2, 1)], corner);
        assert_eq!(l[(2, 2)], q(0, 1));
    }

    #[test]
    fn m_matrix_entries() {
        let g4 = q(3, 1);
        let c = Couplings::new(q(0, 1), q(1, 1), g4.clone());
        let q1 = q(2, 1);
        let m = build_m_bcd(std::slice::from_ref(&q1), &c, RootSystem::C).unwrap();
        // B̌_11 = −g4√2/(4q²), d_1 = g4√2/(4q²)
        let unit = g4 * Exact::sqrt2() / (q(4, 1) * q1.square());
        assert_eq!(m[(0, 1)], -unit.clone());
        assert_eq!(m[(0, 0)], unit);
        let zero = build_m_bcd(&[q(1, 1), q(2, 1)], &Couplings::zero(), RootSystem::C).unwrap();
        assert!(zero.is_zero());
        let b = preset_couplings(RootSystem::B, &q(1, 1), &q(0, 1));
        let qs = [q(1, 2), q(5, 3)];
        let mb = build_m_bcd(&qs, &b, RootSystem::B).unwrap();
        let d0 = q(2, 1) * (qs[0].square().recip() + qs[1].square().recip());
        assert_eq!(mb[(4, 4)], d0);
    }

    #[test]
    fn hamiltonian_examples() {
        let pt = PhasePoint::new(vec![1.0, 3.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(hamiltonian_bcd(&pt, &Couplings::zero()).unwrap(), 1.0);
        let pt = PhasePoint::new(vec![q(3, 2)], vec![q(-1, 3)]).unwrap();
        let g4 = q(5, 7);
        let c = Couplings::new(q(0, 1), q(0, 1), g4.clone());
        let expected = q(1, 18) - g4.square() / (q(4, 1) * q(9, 4));
        assert_eq!(hamiltonian_bcd(&pt, &c).unwrap(), expected);
    }

    #[test]
    fn free_motion_has_no_force() {
        let pt = PhasePoint::new(vec![1.0, 2.5], vec![0.3, -0.2]).unwrap();
        let (_, pdot) = equations_of_motion(&pt, &Couplings::zero(), RootSystem::C).unwrap();
        assert!(pdot.iter().all(|x| *x == 0.0));
        let (_, pdot) =
            equations_of_motion(&pt, &Couplings::new(0.0, 0.7, 0.0), RootSystem::A).unwrap();
        let expected = -2.0 * 0.49 / (1.0f64 - 2.5).powi(3);
        assert!((pdot[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn free_evolution_is_linear() {
        let pt = PhasePoint::new(vec![1.0, 2.0], vec![0.5, -0.25]).unwrap();
        let tr = evolve(&pt, &Couplings::zero(), RootSystem::C, 0.1, 10).unwrap();
        let last = tr.last();
        assert!((last.q[0] - 1.5).abs() < 1e-13);
        assert!((last.q[1] - 1.75).abs() < 1e-13);
        assert_eq!(tr.points.len(), 11);
        assert!(tr
            .to_csv()
            .starts_with("t,q_1,q_2,p_1,p_2\n0,1,2,0.5,-0.25\n"));
    }

    #[test]
    fn collisions_abort_evolution() {
        let pt = PhasePoint::new(vec![1.0, 2.0], vec![1.0, -1.0]).unwrap();
        let err = evolve(&pt, &Couplings::zero(), RootSystem::D, 0.05, 40).unwrap_err();
        assert!(matches!(err, Error::SingularityApproached { .. }));
    }

    #[test]
    fn integrals_examples() {
        let z: SquareMatrix<f64> = SquareMatrix::zeros(3);
        assert!(integrals_of_motion(&z, 3, RootSystem::C)
            .iter()
            .all(|x| *x == 0.0));
        let d = SquareMatrix::diagonal(vec![2.0, -2.0]);
        assert_eq!(integrals_of_motion(&d, 2, RootSystem::C)[1], 2.0);
    }

    #[test]
    fn spectrum_examples() {
        let id: SquareMatrix<f64> = SquareMatrix::identity(3);
        assert!(spectrum(&id)
            .unwrap()
            .iter()
            .all(|z| (z.re - 1.0).abs() < 1e-14));
    }
}
