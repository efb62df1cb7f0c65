mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qcdual::bethe::gaudin_eigs_boundary;
use qcdual::quantum::{
    commutator_residual, diagonalize_joint, dual_reflection_residual, gaudin_hamiltonians_b,
    gaudin_hamiltonians_boundary, gaudin_limit_series, reflection_residual,
    transfer_commutator_residual, ybe_residual,
};
use qcdual::sampling::RationalSampler;
use qcdual::Scalar;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn boundary_hamiltonians_commute() {
    let mut s = RationalSampler::new(5);
    for draw in 0..20 {
        let n = 1 + draw % 5;
        let z: Vec<f64> = s.coordinates(n).iter().map(|x| x.to_complex().re).collect();
        let xi = s.rational().to_complex().re;
        let c = commutator_residual(&gaudin_hamiltonians_boundary(&z, &xi, &1.0).unwrap());
        assert!(c <= 1e-12, "n={n}: {c:e}");
        let b = commutator_residual(&gaudin_hamiltonians_b(&z, &1.0).unwrap());
        assert!(b <= 1e-12, "B n={n}: {b:e}");
    }
}

#[test]
fn sectors_have_binomial_dimensions() {
    for n in 1..=5 {
        let z: Vec<f64> = (1..=n)
            .map(|k| k as f64 + 0.25 * k as f64 * k as f64)
            .collect();
        let spec =
            diagonalize_joint(&gaudin_hamiltonians_boundary(&z, &0.3, &1.0).unwrap(), 9).unwrap();
        let mut total = 0;
        for m in 0..=n {
            assert_eq!(spec.sector_dimension(m), binomial(n, m), "n={n} m={m}");
            total += spec.sector_dimension(m);
        }
        assert_eq!(total, 1 << n);
    }
}

#[test]
fn two_site_bethe_tuple_is_in_the_spectrum() {
    let z = [1.0, 2.0];
    let spec =
        diagonalize_joint(&gaudin_hamiltonians_boundary(&z, &0.0, &1.0).unwrap(), 3).unwrap();
    let zc: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mu = [Complex64::new(2f64.sqrt(), 0.0)];
    let one = Complex64::new(1.0, 0.0);
    let tuple = gaudin_eigs_boundary(&zc, &mu, &Complex64::new(0.0, 0.0), &one).unwrap();
    assert!(spec.contains(1, &tuple, 1e-8));
    let empty = gaudin_eigs_boundary(&zc, &[], &Complex64::new(0.0, 0.0), &one).unwrap();
    assert!(spec.contains(0, &empty, 1e-8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn structure_equations_hold_exactly(
        u in common::rational(),
        v in common::rational(),
        alpha in common::rational(),
        beta in common::rational(),
        eta in common::rational(),
        z in common::coordinates(2),
    ) {
        prop_assume!(u != v);
        if let Ok(r) = ybe_residual(&u, &v, &eta) {
            prop_assert!(r.holds(0.0));
        }
        if let Ok(r) = reflection_residual(&u, &v, &alpha, &eta) {
            prop_assert!(r.holds(0.0));
        }
        if let Ok(r) = dual_reflection_residual(&u, &v, &beta, &eta) {
            prop_assert!(r.holds(0.0));
        }
        if let Ok(r) = transfer_commutator_residual(&u, &v, &z, &alpha, &beta, &eta) {
            prop_assert!(r.holds(0.0));
        }
    }

    #[test]
    fn gaudin_limit_is_exact(
        u in common::rational(),
        alpha in common::rational(),
        beta in common::rational(),
        hbar in common::rational(),
        z in common::coordinates(2),
    ) {
        if let Ok(check) = gaudin_limit_series(&u, &z, &alpha, &beta, &hbar) {
            prop_assert!(check.holds(0.0));
        }
    }
}
