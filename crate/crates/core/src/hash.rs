//! Hash and sign families over the Mersenne field `p = 2^61 - 1`.
//!
//! Every function here is a pure function of `(seed, x)`, so a sketch can be
//! rebuilt bit-for-bit from its stored seeds.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The field modulus `2^61 - 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Bits needed to describe one field element.
pub const FIELD_BITS: u64 = 61;

#[inline]
fn reduce(x: u128) -> u64 {
    let folded = (x & MERSENNE_61 as u128) + (x >> 61);
    let folded = (folded & MERSENNE_61 as u128) + (folded >> 61);
    let r = folded as u64;
    if r >= MERSENNE_61 {
        r - MERSENNE_61
    } else {
        r
    }
}

#[inline]
fn mul_add(a: u64, x: u64, b: u64) -> u64 {
    reduce(a as u128 * x as u128 + b as u128)
}

/// Deterministic stream of sub-seeds derived from one master seed.
#[derive(Debug, Clone)]
pub struct SeedStream(ChaCha8Rng);

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_seed(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// `x -> ((a x + b) mod p) mod range`, drawn from the Carter-Wegman family.
///
/// For uniformly random `(a, b)` the pair `(h(x), h(y))` with `x != y` is
/// uniform on `[range]^2` up to a bias of order `range / p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseHash {
    seed: u64,
    a: u64,
    b: u64,
    range: u64,
}

impl PairwiseHash {
    pub fn new(seed: u64, range: u64) -> Result<Self> {
        if range == 0 || range > MERSENNE_61 {
            return Err(Error::param(
                "range",
                format!("{range} not in [1, 2^61 - 1]"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            seed,
            a: rng.gen_range(1..MERSENNE_61),
            b: rng.gen_range(0..MERSENNE_61),
            range,
        })
    }

    /// A hash onto the whole field, useful for threshold sampling.
    pub fn full(seed: u64) -> Self {
        Self::new(seed, MERSENNE_61).expect("field range is valid")
    }

    /// `(a x + b) mod p`, before the range reduction.
    #[inline]
    pub fn field_value(&self, x: u64) -> u64 {
        debug_assert!(x < MERSENNE_61);
        mul_add(self.a, x, self.b)
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.field_value(x) % self.range
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    /// Bits of state describing this function: the two field coefficients.
    pub const fn description_bits() -> u64 {
        2 * FIELD_BITS
    }
}

/// A +-1 sign realized as one bit of a [`PairwiseHash`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseSign(PairwiseHash);

impl PairwiseSign {
    pub fn new(seed: u64) -> Self {
        Self(PairwiseHash::new(seed, 2).expect("range 2 is valid"))
    }

    #[inline]
    pub fn sign(&self, x: u64) -> i64 {
        1 - 2 * self.0.eval(x) as i64
    }

    pub fn seed(&self) -> u64 {
        self.0.seed()
    }
}

/// Degree-3 polynomial hash over the field: 4-wise independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourWiseHash {
    seed: u64,
    coeffs: [u64; 4],
}

impl FourWiseHash {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = [0; 4].map(|_| rng.gen_range(0..MERSENNE_61));
        Self { seed, coeffs }
    }

    #[inline]
    pub fn field_value(&self, x: u64) -> u64 {
        let x = x % MERSENNE_61;
        self.coeffs.iter().fold(0, |acc, &c| mul_add(acc, x, c))
    }

    #[inline]
    pub fn sign(&self, x: u64) -> i64 {
        1 - 2 * (self.field_value(x) & 1) as i64
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Rademacher signs `g(x)` keyed by a stored seed.
///
/// Values for distinct `x` behave as independent fair coins; the whole
/// function is reproducible from the seed alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignSource {
    seed: u64,
}

impl SignSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    #[inline]
    pub fn sign(&self, x: u64) -> i64 {
        let z = splitmix64(self.seed ^ splitmix64(x));
        if z >> 63 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[inline]
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn range_one_is_constant() {
        let h = PairwiseHash::new(17, 1).unwrap();
        assert!((0..1000).all(|x| h.eval(x) == 0));
    }

    #[test]
    fn invalid_ranges() {
        assert!(PairwiseHash::new(1, 0).is_err());
        assert!(PairwiseHash::new(1, MERSENNE_61 + 1).is_err());
    }

    #[test]
    fn reduce_matches_naive_mod() {
        let p = MERSENNE_61 as u128;
        for x in [
            0u128,
            1,
            p - 1,
            p,
            p + 1,
            2 * p,
            u64::MAX as u128,
            (p - 1) * (p - 1) + p - 1,
        ] {
            assert_eq!(reduce(x) as u128, x % p, "x = {x}");
        }
    }

    #[test]
    fn same_seed_same_function() {
        let h1 = PairwiseHash::new(99, 1000).unwrap();
        let h2 = PairwiseHash::new(99, 1000).unwrap();
        assert_eq!(h1, h2);
        assert!((0..100).all(|x| h1.eval(x) == h2.eval(x)));
    }

    #[test]
    fn signs_are_balanced() {
        let s = SignSource::new(5);
        let sum: i64 = (0..100_000).map(|x| s.sign(x)).sum();
        assert!(sum.abs() < 1500, "sum = {sum}");
        let f = FourWiseHash::new(5);
        let sum: i64 = (0..100_000).map(|x| f.sign(x)).sum();
        assert!(sum.abs() < 1500, "sum = {sum}");
        let p = PairwiseSign::new(5);
        let sum: i64 = (0..100_000).map(|x| p.sign(x)).sum();
        assert!(sum.abs() < 1500, "sum = {sum}");
    }

    /// Over many seeds a fixed pair collides at rate `1/range`.
    #[test]
    fn collision_rate_over_seeds() {
        let range = 16u64;
        let trials = 10_000u64;
        let collisions = (0..trials)
            .filter(|&seed| {
                let h = PairwiseHash::new(seed, range).unwrap();
                h.eval(12) == h.eval(345)
            })
            .count() as f64;
        let p = 1.0 / range as f64;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (collisions - trials as f64 * p).abs() <= 3.0 * sigma,
            "collisions = {collisions}"
        );
    }

    proptest! {
        #[test]
        fn eval_is_pure_and_in_range(seed in any::<u64>(), range in 1u64..1_000_000, x in 0u64..(1 << 40)) {
            let h = PairwiseHash::new(seed, range).unwrap();
            let v = h.eval(x);
            prop_assert!(v < range);
            prop_assert_eq!(v, h.eval(x));
        }

        #[test]
        fn four_wise_is_pure(seed in any::<u64>(), x in any::<u64>()) {
            let h = FourWiseHash::new(seed);
            prop_assert!(h.field_value(x) < MERSENNE_61);
            prop_assert_eq!(h.sign(x), FourWiseHash::new(seed).sign(x));
        }
    }
}
