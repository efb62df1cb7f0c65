//! Random rational test points.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::check_coordinates;
use crate::scalar::Exact;

/// Numerators and denominators are drawn from `[−BOUND, BOUND] \ {0}`.
pub const BOUND: i64 = 40;

/// Seeded source of random rationals.
pub struct RationalSampler {
    rng: ChaCha8Rng,
}

impl RationalSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn nonzero(&mut self) -> i64 {
        let k = self.rng.random_range(1..=BOUND);
        if self.rng.random::<bool>() {
            k
        } else {
            -k
        }
    }

    pub fn rational(&mut self) -> Exact {
        let (n, d) = (self.nonzero(), self.nonzero());
        Exact::from_base(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `n` nonzero rationals, pairwise distinct up to sign.
    pub fn coordinates(&mut self, n: usize) -> Vec<Exact> {
        loop {
            let v: Vec<Exact> = (0..n).map(|_| self.rational()).collect();
            if check_coordinates(&v, true).is_ok() {
                return v;
            }
        }
    }

    /// `m` parameters admissible among themselves and away from `±q`.
    pub fn parameters(&mut self, m: usize, q: &[Exact]) -> Vec<Exact> {
        loop {
            let mu = self.coordinates(m);
            let all: Vec<Exact> = q.iter().chain(&mu).cloned().collect();
            if check_coordinates(&all, true).is_ok() {
                return mu;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_admissible_and_reproducible() {
        let mut a = RationalSampler::new(7);
        let mut b = RationalSampler::new(7);
        for _ in 0..20 {
            let q = a.coordinates(4);
            let mu = a.parameters(2, &q);
            assert_eq!(q, b.coordinates(4));
            assert_eq!(mu, b.parameters(2, &q));
            let all: Vec<Exact> = q.iter().chain(&mu).cloned().collect();
            assert!(check_coordinates(&all, true).is_ok());
        }
    }
}
