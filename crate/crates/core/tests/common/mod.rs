#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::collection::vec;
use proptest::prelude::*;
use qcdual::model::check_coordinates;
use qcdual::Exact;

pub fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![1i64..=40, -40i64..=-1]
}

pub fn rational() -> impl Strategy<Value = Exact> {
    (nonzero(), nonzero())
        .prop_map(|(n, d)| Exact::from_base(BigRational::new(BigInt::from(n), BigInt::from(d))))
}

pub fn coordinates(n: usize) -> impl Strategy<Value = Vec<Exact>> {
    vec(rational(), n).prop_filter("admissible", |v| check_coordinates(v, true).is_ok())
}

pub fn float_coordinates(n: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(0.2f64..4.0, n).prop_filter("separated", |v| {
        let mut ok = true;
        for i in 0..v.len() {
            for j in 0..i {
                ok &= (v[i] - v[j]).abs() > 0.05;
            }
        }
        ok
    })
}

pub fn ratio(n: i64, d: i64) -> Exact {
    Exact::from_base(BigRational::new(BigInt::from(n), BigInt::from(d)))
}
