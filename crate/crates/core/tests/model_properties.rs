mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qcdual::model::{preset_couplings, validate_couplings, ModelSpec, RootSystem};
use qcdual::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn float_presets_satisfy_the_constraint(hbar in -5.0f64..5.0, xi in -3.0f64..3.0) {
        for kind in RootSystem::ALL {
            prop_assert!(validate_couplings(&preset_couplings(kind, &hbar, &xi)).is_ok());
        }
    }

    #[test]
    fn exact_presets_satisfy_the_constraint(hbar in common::rational(), xi in common::rational()) {
        for kind in RootSystem::ALL {
            prop_assert!(validate_couplings(&preset_couplings(kind, &hbar, &xi)).is_ok());
        }
    }

    #[test]
    fn spec_rejects_sign_coincidences(z in common::float_coordinates(3), i in 0usize..3, j in 0usize..3, flip in any::<bool>()) {
        prop_assume!(i != j);
        let mut zc: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        zc[i] = if flip { -zc[j] } else { zc[j] };
        let r = ModelSpec::new(RootSystem::C, 1, &zc, 0.5, 1.0, 0.0);
        prop_assert!(matches!(r, Err(Error::CoincidingCoordinates { .. })), "{:?}", r);
    }

    #[test]
    fn spec_rejects_zero_coordinates(z in common::float_coordinates(3), i in 0usize..3) {
        let mut zc: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        zc[i] = Complex64::new(0.0, 0.0);
        let r = ModelSpec::new(RootSystem::D, 1, &zc, 0.0, 1.0, 0.0);
        prop_assert!(matches!(r, Err(Error::ZeroCoordinate { .. })), "{:?}", r);
    }
}

#[test]
fn violated_constraint_is_reported() {
    let c = qcdual::model::Couplings::new(1.0, 0.0, 0.0);
    match validate_couplings(&c) {
        Err(Error::ConstraintViolated { residual }) => assert_eq!(residual, 1.0),
        other => panic!("{other:?}"),
    }
}
