mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qcdual::bethe::{polish_exact, solve_bethe, BetheSystem, SolveOptions};
use qcdual::identities::{
    certify, identity_residual, merge_regularity, onshell_nilpotency, onshell_reduction_residual,
    IdentityCertificate, Verdict,
};
use qcdual::model::{check_coordinates, RootSystem};
use qcdual::{Exact, ExactComplex, Scalar};

fn joint_ok(z: &[Exact], mu: &[Exact]) -> bool {
    let all: Vec<Exact> = z.iter().chain(mu).cloned().collect();
    check_coordinates(&all, true).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn off_shell_identities_are_exact(
        q in common::coordinates(3),
        mu in common::coordinates(1),
        param in common::rational(),
        hbar in common::rational(),
    ) {
        prop_assume!(joint_ok(&q, &mu));
        for kind in RootSystem::ALL {
            let r = identity_residual(kind, &q, &mu, &param, &hbar).unwrap();
            prop_assert!(r.holds(0.0), "{} q={:?} mu={:?}", kind, q, mu);
        }
    }

    #[test]
    fn primary_char_poly_stays_bounded_at_merging_coordinates(
        q in common::coordinates(3),
        mu in common::coordinates(1),
        xi in common::rational(),
        hbar in common::rational(),
        lambda in common::rational(),
    ) {
        prop_assume!(joint_ok(&q, &mu));
        let ts = [common::ratio(1, 1000), common::ratio(1, 10_000), common::ratio(1, 100_000)];
        let vals = merge_regularity(&q, &mu, &xi, &hbar, &lambda, &ts).unwrap();
        for w in vals.windows(2) {
            prop_assert!(w[1] <= 1.1 * w[0] + 1e-300, "{:?}", vals);
        }
    }
}

#[test]
fn reduction_holds_exactly_at_an_algebraic_root() {
    let z = [Exact::from_int(1), Exact::from_int(2)];
    let mu = [Exact::sqrt2()];
    let hbar = common::ratio(3, 7);
    let r = onshell_reduction_residual(&z, &mu, &Exact::from_int(0), &hbar).unwrap();
    assert!(r.holds(0.0));
    let off =
        onshell_reduction_residual(&z, &[common::ratio(3, 2)], &Exact::from_int(0), &hbar).unwrap();
    assert!(!off.holds(0.0));
}

#[test]
fn reduction_holds_on_polished_roots() {
    let zf: Vec<Complex64> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    let hbar = Complex64::new(1.0, 0.0);
    let xi = 0.5;
    let sys = BetheSystem::BoundaryC {
        xi: Complex64::new(xi, 0.0),
    };
    let report = solve_bethe(&sys, &zf, 1, hbar, &SolveOptions::default()).unwrap();
    let ze: Vec<ExactComplex> = zf
        .iter()
        .map(|&x| ExactComplex::from_complex(x).unwrap())
        .collect();
    let xe = ExactComplex::from_complex(Complex64::new(xi, 0.0)).unwrap();
    let he = ExactComplex::from_int(1);
    let sys_e = BetheSystem::BoundaryC { xi: xe.clone() };
    let mut seen = 0;
    for s in report.regular_states() {
        let float =
            onshell_reduction_residual(&zf, &s.mu, &Complex64::new(xi, 0.0), &hbar).unwrap();
        assert!(float.holds(1e-8), "{float:?}");
        let mu = polish_exact(&sys_e, &ze, &s.mu, &he, 8, 256).unwrap();
        let exact = onshell_reduction_residual(&ze, &mu, &xe, &he).unwrap();
        assert!(exact.relative() <= 1e-60, "{exact:?}");
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn closed_form_states_are_nilpotent() {
    let z: Vec<Complex64> = [1.0, 2.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let hbar = Complex64::new(1.0, 0.0);
    for (kind, sys) in [
        (
            RootSystem::D,
            BetheSystem::BoundaryC {
                xi: Complex64::new(0.0, 0.0),
            },
        ),
        (RootSystem::B, BetheSystem::BoundaryB),
    ] {
        let report = solve_bethe(&sys, &z, 1, hbar, &SolveOptions::default()).unwrap();
        let states: Vec<_> = report.regular_states().collect();
        assert!(!states.is_empty());
        for s in states {
            let rep = onshell_nilpotency(kind, &z, s, 0.0, 1.0, 1e-8).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }
}

#[test]
fn certificates_round_trip_and_carry_inputs() {
    let q = [common::ratio(1, 2), common::ratio(3, 1)];
    let mu = [common::ratio(-5, 3)];
    let cert = certify(
        RootSystem::C,
        &q,
        &mu,
        &common::ratio(1, 3),
        &common::ratio(2, 5),
    )
    .unwrap();
    assert_eq!(cert.verdict, Verdict::Pass);
    let text = serde_json::to_string(&cert).unwrap();
    let back: IdentityCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(back.inputs.q, vec!["1/2".to_string(), "3".to_string()]);
}
