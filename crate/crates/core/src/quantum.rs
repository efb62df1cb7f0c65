//! Dense spin-chain operators on `(C²)^⊗n`.
//!
//! Site 0 is the most significant bit of a basis index; bit value 0 is spin
//! up (σ₃ = +1). The magnon number of a basis state is its popcount.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lax::{format_scalar, recip};
use crate::matrix::{sort_spectrum, Residual, SquareMatrix};
use crate::model::check_coordinates;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::Jet;

/// Largest supported chain length.
pub const MAX_SITES: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperator<T> {
    pub sites: usize,
    pub mat: SquareMatrix<T>,
}

impl<T: Scalar> SpinOperator<T> {
    pub fn new(sites: usize, mat: SquareMatrix<T>) -> Result<Self> {
        if mat.dim() != 1 << sites {
            return Err(Error::DimensionMismatch(format!(
                "{}-dim matrix on {sites} sites",
                mat.dim()
            )));
        }
        Ok(Self { sites, mat })
    }

    pub fn identity(sites: usize) -> Self {
        Self {
            sites,
            mat: SquareMatrix::identity(1 << sites),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Whether every matrix element connects states of equal magnon number.
    pub fn conserves_magnons(&self) -> bool {
        let d = self.dim();
        (0..d)
            .all(|r| (0..d).all(|c| r.count_ones() == c.count_ones() || self.mat[(r, c)].is_zero()))
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites > MAX_SITES {
        Err(Error::InvalidInput(format!(
            "{sites} sites exceed the cap of {MAX_SITES}"
        )))
    } else {
        Ok(())
    }
}

fn bit(state: usize, site: usize, sites: usize) -> usize {
    (state >> (sites - 1 - site)) & 1
}

fn swap_bits(state: usize, i: usize, k: usize, sites: usize) -> usize {
    let (bi, bk) = (bit(state, i, sites), bit(state, k, sites));
    if bi == bk {
        state
    } else {
        state ^ (1 << (sites - 1 - i)) ^ (1 << (sites - 1 - k))
    }
}

fn check_pair(i: usize, k: usize, sites: usize) -> Result<()> {
    if i >= sites || k >= sites || i == k {
        return Err(Error::IndexOutOfRange(format!(
            "site pair ({i}, {k}) on {sites} sites"
        )));
    }
    Ok(())
}

/// Transposition of tensor legs `i` and `k` (zero-based).
pub fn permutation_op<T: Scalar>(i: usize, k: usize, sites: usize) -> Result<SpinOperator<T>> {
    check_sites(sites)?;
    check_pair(i, k, sites)?;
    let d = 1 << sites;
    let mut m = SquareMatrix::zeros(d);
    for s in 0..d {
        m[(swap_bits(s, i, k, sites), s)] = T::one();
    }
    Ok(SpinOperator { sites, mat: m })
}

/// Adds `coef · P_ik` (or `coef · σ₃⁽ⁱ⁾ P_ik σ₃⁽ⁱ⁾` when `twisted`) to `m`.
fn add_perm<T: Scalar>(
    m: &mut SquareMatrix<T>,
    i: usize,
    k: usize,
    sites: usize,
    coef: &T,
    twisted: bool,
) {
    for s in 0..m.dim() {
        let t = swap_bits(s, i, k, sites);
        let sign_flip = twisted && t != s;
        let v = if sign_flip {
            -coef.clone()
        } else {
            coef.clone()
        };
        m[(t, s)] = m[(t, s)].clone() + v;
    }
}

fn add_sigma3<T: Scalar>(m: &mut SquareMatrix<T>, i: usize, sites: usize, coef: &T) {
    for s in 0..m.dim() {
        let v = if bit(s, i, sites) == 0 {
            coef.clone()
        } else {
            -coef.clone()
        };
        m[(s, s)] = m[(s, s)].clone() + v;
    }
}

fn boundary_terms<T: Scalar>(
    z: &[T],
    sites: usize,
    i: usize,
    m: &mut SquareMatrix<T>,
    hbar: &T,
) -> Result<()> {
    for k in 0..z.len() {
        if k == i {
            continue;
        }
        let cm = hbar.clone() * recip(z[i].clone() - z[k].clone(), || format!("z_{i} = z_{k}"))?;
        let cp = hbar.clone() * recip(z[i].clone() + z[k].clone(), || format!("z_{i} = -z_{k}"))?;
        add_perm(m, i, k, sites, &cm, false);
        add_perm(m, i, k, sites, &cp, true);
    }
    Ok(())
}

/// Boundary Gaudin Hamiltonians on `N = z.len()` sites.
pub fn gaudin_hamiltonians_boundary<T: Scalar>(
    z: &[T],
    xi: &T,
    hbar: &T,
) -> Result<Vec<SpinOperator<T>>> {
    let sites = z.len();
    check_sites(sites)?;
    check_coordinates(z, true)?;
    (0..sites)
        .map(|i| {
            let mut m = SquareMatrix::zeros(1 << sites);
            add_sigma3(
                &mut m,
                i,
                sites,
                &(hbar.clone() * xi.clone() / z[i].clone()),
            );
            boundary_terms(z, sites, i, &mut m, hbar)?;
            Ok(SpinOperator { sites, mat: m })
        })
        .collect()
}

/// B-type Hamiltonians: `N` visible sites plus a hidden site at the origin,
/// stored last. Only the `N` visible Hamiltonians are built.
pub fn gaudin_hamiltonians_b<T: Scalar>(z: &[T], hbar: &T) -> Result<Vec<SpinOperator<T>>> {
    let n = z.len();
    let sites = n + 1;
    check_sites(sites)?;
    check_coordinates(z, true)?;
    (0..n)
        .map(|i| {
            let mut m = SquareMatrix::zeros(1 << sites);
            let c = hbar.clone() / z[i].clone();
            add_perm(&mut m, i, n, sites, &c, false);
            add_perm(&mut m, i, n, sites, &c, true);
            boundary_terms(z, sites, i, &mut m, hbar)?;
            Ok(SpinOperator { sites, mat: m })
        })
        .collect()
}

/// Largest `‖[H_i, H_j]‖` relative to `max ‖H‖²`, in max-entry norm.
pub fn commutator_residual<T: Scalar>(hams: &[SpinOperator<T>]) -> f64 {
    let scale = hams
        .iter()
        .map(|h| h.mat.max_abs())
        .fold(0.0, f64::max)
        .powi(2)
        .max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for (i, a) in hams.iter().enumerate() {
        for b in &hams[i + 1..] {
            worst = worst.max(a.mat.commutator(&b.mat).max_abs());
        }
    }
    worst / scale
}

fn embed_one<T: Scalar>(op: &SquareMatrix<T>, a: usize, sites: usize) -> SquareMatrix<T> {
    let d = 1 << sites;
    let sh = sites - 1 - a;
    SquareMatrix::from_fn(d, |r, c| {
        if (r ^ c) & !(1 << sh) != 0 {
            return T::zero();
        }
        op[((r >> sh) & 1, (c >> sh) & 1)].clone()
    })
}

/// Places a 4×4 operator on sites `a`, `b` (first tensor factor on `a`).
pub fn embed_two<T: Scalar>(
    op: &SquareMatrix<T>,
    a: usize,
    b: usize,
    sites: usize,
) -> Result<SquareMatrix<T>> {
    check_pair(a, b, sites)?;
    let d = 1 << sites;
    let (sa, sb) = (sites - 1 - a, sites - 1 - b);
    let mask = (1 << sa) | (1 << sb);
    Ok(SquareMatrix::from_fn(d, |r, c| {
        if (r ^ c) & !mask != 0 {
            return T::zero();
        }
        let ri = 2 * ((r >> sa) & 1) + ((r >> sb) & 1);
        let ci = 2 * ((c >> sa) & 1) + ((c >> sb) & 1);
        op[(ri, ci)].clone()
    }))
}

/// `R(u) = 1 + (η/u) P` on two sites.
pub fn r_matrix<T: Scalar>(u: &T, eta: &T) -> Result<SquareMatrix<T>> {
    let w = eta.clone() * recip(u.clone(), || "spectral parameter u = 0".into())?;
    let p = permutation_op::<T>(0, 1, 2)?.mat;
    Ok(&SquareMatrix::identity(4) + &p.scale(&w))
}

/// `K⁻(u) = diag(1 + αη/u, −1 + αη/u)` and
/// `K⁺(u) = diag(1 − βη/(u+η), −1 − βη/(u+η))`.
pub fn k_matrices<T: Scalar>(
    u: &T,
    alpha: &T,
    beta: &T,
    eta: &T,
) -> Result<(SquareMatrix<T>, SquareMatrix<T>)> {
    let a = alpha.clone() * eta.clone() * recip(u.clone(), || "K-matrix pole u = 0".into())?;
    let b = beta.clone()
        * eta.clone()
        * recip(u.clone() + eta.clone(), || "K-matrix pole u = -eta".into())?;
    let km = SquareMatrix::diagonal(vec![T::one() + a.clone(), -T::one() + a]);
    let kp = SquareMatrix::diagonal(vec![T::one() - b.clone(), -T::one() - b]);
    Ok((km, kp))
}

/// `R12(u1−u2) R13(u1) R23(u2) − R23(u2) R13(u1) R12(u1−u2)`
pub fn ybe_residual<T: Scalar>(u1: &T, u2: &T, eta: &T) -> Result<Residual> {
    let r12 = embed_two(&r_matrix(&(u1.clone() - u2.clone()), eta)?, 0, 1, 3)?;
    let r13 = embed_two(&r_matrix(u1, eta)?, 0, 2, 3)?;
    let r23 = embed_two(&r_matrix(u2, eta)?, 1, 2, 3)?;
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    Ok(lhs.residual(&rhs))
}

/// Residual of the reflection equation for `K⁻`.
pub fn reflection_residual<T: Scalar>(u1: &T, u2: &T, alpha: &T, eta: &T) -> Result<Residual> {
    let zero = T::zero();
    let (k1, _) = k_matrices(u1, alpha, &zero, eta)?;
    let (k2, _) = k_matrices(u2, alpha, &zero, eta)?;
    let id = SquareMatrix::identity(2);
    let k1 = k1.kron(&id);
    let k2 = id.kron(&k2);
    let rm = r_matrix(&(u1.clone() - u2.clone()), eta)?;
    let rp = r_matrix(&(u1.clone() + u2.clone()), eta)?;
    let lhs = &(&(&rm * &k1) * &rp) * &k2;
    let rhs = &(&(&k2 * &rp) * &k1) * &rm;
    Ok(lhs.residual(&rhs))
}

/// Residual of the dual reflection equation for `K⁺` (with partial
/// transposes, which are trivial for diagonal K).
pub fn dual_reflection_residual<T: Scalar>(u1: &T, u2: &T, beta: &T, eta: &T) -> Result<Residual> {
    let zero = T::zero();
    let (_, k1) = k_matrices(u1, &zero, beta, eta)?;
    let (_, k2) = k_matrices(u2, &zero, beta, eta)?;
    let id = SquareMatrix::identity(2);
    let k1 = k1.transpose().kron(&id);
    let k2 = id.kron(&k2.transpose());
    let two = T::from_int(2);
    let ra = r_matrix(&(u2.clone() - u1.clone()), eta)?;
    let rb = r_matrix(&(-u1.clone() - u2.clone() - two * eta.clone()), eta)?;
    let lhs = &(&(&ra * &k1) * &rb) * &k2;
    let rhs = &(&(&k2 * &rb) * &k1) * &ra;
    Ok(lhs.residual(&rhs))
}

/// Double-row transfer matrix on `N = z.len()` sites. The auxiliary space is
/// an extra leading site that is traced out.
pub fn transfer_matrix<T: Scalar>(
    u: &T,
    z: &[T],
    alpha: &T,
    beta: &T,
    eta: &T,
) -> Result<SpinOperator<T>> {
    let n = z.len();
    let sites = n + 1;
    check_sites(sites)?;
    let (km, kp) = k_matrices(u, alpha, beta, eta)?;
    let mut prod = embed_one(&kp, 0, sites);
    for (k, zk) in z.iter().enumerate() {
        let r = r_matrix(&(u.clone() - zk.clone()), eta)
            .map_err(|_| Error::PoleCollision(format!("u = z_{k}")))?;
        prod = &prod * &embed_two(&r, 0, k + 1, sites)?;
    }
    prod = &prod * &embed_one(&km, 0, sites);
    for (k, zk) in z.iter().enumerate().rev() {
        let r = r_matrix(&(u.clone() + zk.clone()), eta)
            .map_err(|_| Error::PoleCollision(format!("u = -z_{k}")))?;
        prod = &prod * &embed_two(&r, 0, k + 1, sites)?;
    }
    let d = 1 << n;
    let t = SquareMatrix::from_fn(d, |r, c| {
        prod[(r, c)].clone() + prod[(d + r, d + c)].clone()
    });
    Ok(SpinOperator { sites: n, mat: t })
}

pub fn transfer_commutator_residual<T: Scalar>(
    u: &T,
    v: &T,
    z: &[T],
    alpha: &T,
    beta: &T,
    eta: &T,
) -> Result<Residual> {
    let tu = transfer_matrix(u, z, alpha, beta, eta)?;
    let tv = transfer_matrix(v, z, alpha, beta, eta)?;
    let scale = tu.mat.max_abs() * tv.mat.max_abs();
    Ok(tu.mat.commutator(&tv.mat).residual_zero(scale))
}

/// `γ(u) = Σ (1/(u − z_i) + 1/(u + z_i))`
pub fn gamma<T: Scalar>(u: &T, z: &[T]) -> Result<T> {
    let mut s = T::zero();
    for (i, zi) in z.iter().enumerate() {
        s = s
            + recip(u.clone() - zi.clone(), || format!("u = z_{i}"))?
            + recip(u.clone() + zi.clone(), || format!("u = -z_{i}"))?;
    }
    Ok(s)
}

/// `T^G(u) = −2αβ/u² + (1/ħ) Σ (H_i/(u − z_i) − H_i/(u + z_i))` with `ξ = α − β`.
pub fn gaudin_generating<T: Scalar>(
    u: &T,
    z: &[T],
    alpha: &T,
    beta: &T,
    hbar: &T,
) -> Result<SquareMatrix<T>> {
    let hams = gaudin_hamiltonians_boundary(z, &(alpha.clone() - beta.clone()), hbar)?;
    let d = 1 << z.len();
    let c = -(T::from_int(2) * alpha.clone() * beta.clone()) / u.square();
    let mut out = SquareMatrix::identity(d).scale(&c);
    for (i, h) in hams.iter().enumerate() {
        let w = recip(u.clone() - z[i].clone(), || format!("u = z_{i}"))?
            - recip(u.clone() + z[i].clone(), || format!("u = -z_{i}"))?;
        out = &out + &h.mat.scale(&(w / hbar.clone()));
    }
    Ok(out)
}

/// Residuals of the first three coefficients of `T(u)` at `η = εħ` against
/// `2`, `ħγ(u)` and `ħ² T^G(u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaudinLimitCheck {
    pub order0: Residual,
    pub order1: Residual,
    pub order2: Residual,
}

impl GaudinLimitCheck {
    pub fn holds(&self, rtol: f64) -> bool {
        self.order0.holds(rtol) && self.order1.holds(rtol) && self.order2.holds(rtol)
    }
}

fn expected_coefficients<T: Scalar>(
    u: &T,
    z: &[T],
    alpha: &T,
    beta: &T,
    hbar: &T,
) -> Result<[SquareMatrix<T>; 3]> {
    let d = 1 << z.len();
    Ok([
        SquareMatrix::identity(d).scale(&T::from_int(2)),
        SquareMatrix::identity(d).scale(&(hbar.clone() * gamma(u, z)?)),
        gaudin_generating(u, z, alpha, beta, hbar)?.scale(&hbar.square()),
    ])
}

/// Expansion of the transfer matrix in truncated series arithmetic; exact
/// when `T` is exact.
pub fn gaudin_limit_series<T: Scalar>(
    u: &T,
    z: &[T],
    alpha: &T,
    beta: &T,
    hbar: &T,
) -> Result<GaudinLimitCheck> {
    type J<S> = Jet<S, 3>;
    let lift = |x: &T| J::constant(x.clone());
    let zj: Vec<J<T>> = z.iter().map(lift).collect();
    let eta = J::linear(T::zero(), hbar.clone());
    let t = transfer_matrix(&lift(u), &zj, &lift(alpha), &lift(beta), &eta)?;
    let want = expected_coefficients(u, z, alpha, beta, hbar)?;
    let coeff = |k: usize| t.mat.map(|x| x.coeff(k).clone());
    Ok(GaudinLimitCheck {
        order0: coeff(0).residual(&want[0]),
        order1: coeff(1).residual(&want[1]),
        order2: coeff(2).residual(&want[2]),
    })
}

/// Float variant: evaluates `T(u)` at `η = εħ` for `ε ∈ {0} ∪ eps_grid` and
/// extracts the coefficients by polynomial extrapolation.
pub fn gaudin_limit_residual(
    u: f64,
    z: &[f64],
    alpha: f64,
    beta: f64,
    hbar: f64,
    eps_grid: &[f64],
) -> Result<GaudinLimitCheck> {
    if eps_grid.len() < 3 {
        return Err(Error::ExtractionFailure(
            "at least three grid points are needed".into(),
        ));
    }
    let mut nodes = vec![0.0];
    nodes.extend_from_slice(eps_grid);
    let mats: Vec<SquareMatrix<f64>> = nodes
        .iter()
        .map(|e| transfer_matrix(&u, z, &alpha, &beta, &(e * hbar)).map(|t| t.mat))
        .collect::<Result<_>>()?;
    let d = 1 << z.len();
    let mut coeffs = [
        SquareMatrix::zeros(d),
        SquareMatrix::zeros(d),
        SquareMatrix::zeros(d),
    ];
    for r in 0..d {
        for c in 0..d {
            let ys: Vec<f64> = mats.iter().map(|m| m[(r, c)]).collect();
            let p = Polynomial::interpolate(&nodes, &ys)
                .map_err(|e| Error::ExtractionFailure(e.to_string()))?;
            for (k, m) in coeffs.iter_mut().enumerate() {
                m[(r, c)] = p.coeff(k);
            }
        }
    }
    let want = expected_coefficients(&u, z, &alpha, &beta, &hbar)?;
    Ok(GaudinLimitCheck {
        order0: coeffs[0].residual(&want[0]),
        order1: coeffs[1].residual(&want[1]),
        order2: coeffs[2].residual(&want[2]),
    })
}

/// Joint eigenvalues of commuting Hamiltonians within one magnon sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointRecord {
    pub m: usize,
    pub eigs: Vec<Complex64>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSpectrum {
    pub sites: usize,
    pub records: Vec<JointRecord>,
}

impl JointSpectrum {
    pub fn sector(&self, m: usize) -> impl Iterator<Item = &JointRecord> {
        self.records.iter().filter(move |r| r.m == m)
    }

    pub fn sector_dimension(&self, m: usize) -> usize {
        self.sector(m).map(|r| r.multiplicity).sum()
    }

    /// Whether a tuple appears in sector `m` within `rtol` relative to
    /// `max(1, max |tuple|)`.
    pub fn contains(&self, m: usize, tuple: &[Complex64], rtol: f64) -> bool {
        self.distance(m, tuple) <= rtol * tuple.iter().map(|x| x.norm()).fold(1.0, f64::max)
    }

    /// Smallest max-entry distance from `tuple` to a record in sector `m`.
    pub fn distance(&self, m: usize, tuple: &[Complex64]) -> f64 {
        self.sector(m)
            .filter(|r| r.eigs.len() == tuple.len())
            .map(|r| {
                r.eigs
                    .iter()
                    .zip(tuple)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Columns `sector, H_1..H_N, multiplicity`.
    pub fn to_csv(&self) -> String {
        let n = self.records.first().map_or(0, |r| r.eigs.len());
        let mut out = String::from("sector");
        for i in 1..=n {
            out.push_str(&format!(",H_{i}"));
        }
        out.push_str(",multiplicity\n");
        for r in &self.records {
            out.push_str(&r.m.to_string());
            for e in &r.eigs {
                out.push(',');
                out.push_str(&format_scalar(*e));
            }
            out.push_str(&format!(",{}\n", r.multiplicity));
        }
        out
    }
}

/// Relative tolerance for clustering eigenvalues of the random combination.
pub const CLUSTER_RTOL: f64 = 1e-9;
const MAX_ATTEMPTS: usize = 5;

fn to_dmatrix(m: &SquareMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

fn is_hermitian(m: &DMatrix<Complex64>, tol: f64) -> bool {
    (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| (m[(r, c)] - m[(c, r)].conj()).norm() <= tol))
}

/// Eigenvalues with orthonormal eigenspace bases, grouped into clusters.
fn eigenspaces(c: &DMatrix<Complex64>, scale: f64) -> Result<Vec<(Complex64, DMatrix<Complex64>)>> {
    let d = c.nrows();
    let tol = CLUSTER_RTOL * scale;
    if is_hermitian(c, 1e-13 * scale) {
        let eig = SymmetricEigen::new(c.clone());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut out: Vec<(Complex64, DMatrix<Complex64>)> = Vec::new();
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= tol {
                end += 1;
            }
            let cols: Vec<usize> = order[start..end].to_vec();
            let w = DMatrix::from_fn(d, cols.len(), |r, k| eig.eigenvectors[(r, cols[k])]);
            let mean = cols.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / cols.len() as f64;
            out.push((Complex64::new(mean, 0.0), w));
            start = end;
        }
        return Ok(out);
    }
    let schur =
        Schur::try_new(c.clone(), f64::EPSILON, 100_000).ok_or(Error::EigenNonConvergence)?;
    let mut vals: Vec<Complex64> = schur
        .eigenvalues()
        .ok_or(Error::EigenNonConvergence)?
        .iter()
        .copied()
        .collect();
    sort_spectrum(&mut vals);
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for v in vals {
        match clusters.iter_mut().find(|cl| (cl[0] - v).norm() <= tol) {
            Some(cl) => cl.push(v),
            None => clusters.push(vec![v]),
        }
    }
    let mut out = Vec::new();
    for cl in clusters {
        let lam = cl.iter().sum::<Complex64>() / cl.len() as f64;
        let shifted = c - DMatrix::<Complex64>::identity(d, d) * lam;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.ok_or(Error::EigenNonConvergence)?;
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let take = &idx[..cl.len()];
        if take.iter().any(|&k| svd.singular_values[k] > 1e-6 * scale) {
            return Err(Error::ExtractionFailure(
                "combination is not diagonalizable".into(),
            ));
        }
        let w = DMatrix::from_fn(d, take.len(), |r, k| vt[(take[k], r)].conj());
        out.push((lam, w));
    }
    Ok(out)
}

/// Joint spectrum of commuting, magnon-conserving operators. Each sector is
/// diagonalized through a random linear combination; an eigenspace is
/// accepted when every operator restricts to a multiple of the identity on
/// it, otherwise new coefficients are drawn.
pub fn diagonalize_joint<T: Scalar>(
    hams: &[SpinOperator<T>],
    rng_seed: u64,
) -> Result<JointSpectrum> {
    let Some(first) = hams.first() else {
        return Err(Error::InvalidInput("no operators to diagonalize".into()));
    };
    let sites = first.sites;
    if hams.iter().any(|h| h.sites != sites) {
        return Err(Error::DimensionMismatch(
            "operators act on different chains".into(),
        ));
    }
    if hams.iter().any(|h| !h.conserves_magnons()) {
        return Err(Error::InvalidInput("operator mixes magnon sectors".into()));
    }
    let mats: Vec<SquareMatrix<Complex64>> = hams.iter().map(|h| h.mat.to_complex()).collect();
    let scale = mats
        .iter()
        .map(|m| m.max_abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut records = Vec::new();
    for m in 0..=sites {
        let idx: Vec<usize> = (0..1usize << sites)
            .filter(|s| s.count_ones() as usize == m)
            .collect();
        let blocks: Vec<DMatrix<Complex64>> = mats.iter().map(|h| to_dmatrix(h, &idx)).collect();
        let mut done = None;
        for _ in 0..MAX_ATTEMPTS {
            let coefs: Vec<f64> = (0..blocks.len())
                .map(|_| rng.random_range(0.5..1.5))
                .collect();
            let comb = blocks
                .iter()
                .zip(&coefs)
                .fold(DMatrix::zeros(idx.len(), idx.len()), |acc, (b, c)| {
                    acc + b * Complex64::new(*c, 0.0)
                });
            let spaces = match eigenspaces(&comb, scale * blocks.len() as f64) {
                Ok(s) => s,
                Err(Error::ExtractionFailure(_)) => continue,
                Err(e) => return Err(e),
            };
            let mut recs = Vec::new();
            let mut ok = true;
            'spaces: for (_, w) in &spaces {
                let k = w.ncols();
                let wh = w.adjoint();
                let mut eigs = Vec::with_capacity(blocks.len());
                for b in &blocks {
                    let r = &wh * b * w;
                    let mean = r.trace() / k as f64;
                    let off = (0..k)
                        .flat_map(|i| (0..k).map(move |j| (i, j)))
                        .map(|(i, j)| {
                            let target = if i == j {
                                mean
                            } else {
                                Complex64::new(0.0, 0.0)
                            };
                            (r[(i, j)] - target).norm()
                        })
                        .fold(0.0, f64::max);
                    if off > 1e-8 * scale {
                        ok = false;
                        break 'spaces;
                    }
                    eigs.push(mean);
                }
                recs.push(JointRecord {
                    m,
                    eigs,
                    multiplicity: k,
                });
            }
            if ok {
                done = Some(recs);
                break;
            }
        }
        records.extend(done.ok_or(Error::DegenerateCombination {
            attempts: MAX_ATTEMPTS,
        })?);
    }
    Ok(JointSpectrum { sites, records })
}
