//! Sampled, hashed-universe l1 heavy hitters.
//!
//! 1. Keep each stream position with probability `r / m`, where
//!    `r = ceil(C_s / eps^2)`, using a pairwise-independent hash of the
//!    position.
//! 2. Map every sampled id into a universe of size `U_h = ceil(C_u / eps^4)`.
//! 3. Run Misra-Gries with accuracy `eps / 2` over the hashed ids of the
//!    sampled stream.
//! 4. Remember true ids only for the `L = ceil(2 / phi)` hashed ids with the
//!    largest counts.
//!
//! Space is `O((1/phi) log n + (1/eps) log(1/eps))` bits instead of the
//! `O((1/eps) log n)` of running Misra-Gries on raw ids.

use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::hash::{PairwiseHash, SeedStream, MERSENNE_61};
use crate::mg::{MgUpdate, MisraGries};
use crate::params::{Fraction, HHReport};
use crate::space::{bits_for, ceil_log2};
use crate::stream::Item;

/// Sampling constant: four over it bounds the union-bound failure
/// probability of the sample frequencies.
pub const DEFAULT_SAMPLE_CONSTANT: u64 = 400;

/// Hashed-universe constant. With `U_h = C_u / eps^4 = 50 r^2` the expected
/// number of colliding pairs among at most `r` sampled ids is at most 1/100.
pub const DEFAULT_UNIVERSE_CONSTANT: u64 = 50 * DEFAULT_SAMPLE_CONSTANT * DEFAULT_SAMPLE_CONSTANT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Config {
    pub epsilon: f64,
    pub phi: f64,
    /// Stream length, which must be known up front.
    pub m_declared: u64,
    /// Universe size `n`, used for space accounting.
    pub universe: u32,
    pub sample_constant: u64,
    pub universe_constant: u64,
}

impl L1Config {
    pub fn new(epsilon: f64, phi: f64, m_declared: u64, universe: u32) -> Self {
        Self {
            epsilon,
            phi,
            m_declared,
            universe,
            sample_constant: DEFAULT_SAMPLE_CONSTANT,
            universe_constant: DEFAULT_UNIVERSE_CONSTANT,
        }
    }

    fn validate(&self) -> Result<Fraction> {
        if !(self.epsilon > 0.0 && self.epsilon < self.phi && self.phi < 1.0) {
            return Err(Error::param(
                "epsilon/phi",
                format!(
                    "need 0 < eps < phi < 1, got eps={} phi={}",
                    self.epsilon, self.phi
                ),
            ));
        }
        if self.m_declared == 0 {
            return Err(Error::param("m_declared", "must be at least 1"));
        }
        if self.universe == 0 {
            return Err(Error::param("universe", "must be at least 1"));
        }
        if self.sample_constant == 0 || self.universe_constant == 0 {
            return Err(Error::param("constants", "must be positive"));
        }
        Fraction::from_f64(self.epsilon)
    }

    /// `ceil(C_s / eps^2)`, computed exactly.
    pub fn sample_budget(&self) -> Result<u64> {
        let eps = self.validate()?;
        let (num, den) = (eps.num() as u128, eps.den() as u128);
        let r = (self.sample_constant as u128 * den * den).div_ceil(num * num);
        u64::try_from(r).map_err(|_| Error::param("epsilon", "sample budget overflows"))
    }

    /// `ceil(C_u / eps^4)`, computed exactly.
    pub fn hashed_universe(&self) -> Result<u64> {
        let eps = self.validate()?;
        let (num, den) = (eps.num() as u128, eps.den() as u128);
        let num4 = num.pow(4);
        let u = den
            .checked_pow(4)
            .and_then(|d| d.checked_mul(self.universe_constant as u128))
            .map(|x| x.div_ceil(num4))
            .filter(|&u| u <= MERSENNE_61 as u128)
            .ok_or_else(|| Error::param("epsilon", "hashed universe exceeds the hash field"))?;
        Ok(u as u64)
    }

    /// `ceil(2 / phi)`.
    pub fn top_capacity(&self) -> Result<usize> {
        self.validate()?;
        let phi = Fraction::from_f64(self.phi)?;
        Ok((2 * phi.den()).div_ceil(phi.num()) as usize)
    }
}

/// Position sampler: keeps position `t` iff `h(t) < floor(p * r / m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    hash: PairwiseHash,
    threshold: u64,
}

impl Sampler {
    pub fn new(seed: u64, budget: u64, m: u64) -> Self {
        let threshold = if budget >= m {
            MERSENNE_61
        } else {
            (MERSENNE_61 as u128 * budget as u128 / m as u128) as u64
        };
        Self {
            hash: PairwiseHash::full(seed),
            threshold,
        }
    }

    #[inline]
    pub fn keeps(&self, position: u64) -> bool {
        self.hash.field_value(position) < self.threshold
    }

    pub fn keeps_everything(&self) -> bool {
        self.threshold == MERSENNE_61
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TopEntry {
    item: Item,
    hashed: u64,
}

/// Streaming state of the sampled l1 algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledL1 {
    config: L1Config,
    epsilon: Fraction,
    budget: u64,
    hashed_universe: u64,
    sampler: Sampler,
    id_hash: PairwiseHash,
    inner: MisraGries<u64>,
    top: Vec<TopEntry>,
    top_capacity: usize,
    position: u64,
    sampled: u64,
}

impl SampledL1 {
    pub fn new(config: L1Config, seed: u64) -> Result<Self> {
        let epsilon = config.validate()?;
        let budget = config.sample_budget()?;
        let hashed_universe = config.hashed_universe()?;
        let top_capacity = config.top_capacity()?;
        let mut seeds = SeedStream::new(seed);
        let sampler = Sampler::new(seeds.next_seed(), budget, config.m_declared);
        let id_hash = PairwiseHash::new(seeds.next_seed(), hashed_universe)?;
        let inner = MisraGries::with_fraction(epsilon.div_int(2))?;
        Ok(Self {
            config,
            epsilon,
            budget,
            hashed_universe,
            sampler,
            id_hash,
            inner,
            top: Vec::with_capacity(top_capacity + 1),
            top_capacity,
            position: 0,
            sampled: 0,
        })
    }

    pub fn update(&mut self, item: Item) {
        let position = self.position;
        self.position += 1;
        if !self.sampler.keeps(position) {
            return;
        }
        self.sampled += 1;
        let hashed = self.id_hash.eval(item as u64);
        match self.inner.update(hashed) {
            MgUpdate::Decremented => {
                let inner = &self.inner;
                self.top.retain(|e| inner.contains(e.hashed));
            }
            MgUpdate::Incremented | MgUpdate::Inserted => self.promote(item, hashed),
        }
    }

    fn rank_key(&self, entry: &TopEntry) -> (u64, Reverse<Item>) {
        (self.inner.estimate(entry.hashed), Reverse(entry.item))
    }

    fn promote(&mut self, item: Item, hashed: u64) {
        if let Some(e) = self.top.iter_mut().find(|e| e.hashed == hashed) {
            // A different id here means an id-hash collision; keep the latest.
            e.item = item;
            return;
        }
        let candidate = TopEntry { item, hashed };
        if self.top.len() < self.top_capacity {
            self.top.push(candidate);
            return;
        }
        let (min_idx, min_key) = self
            .top
            .iter()
            .enumerate()
            .map(|(i, e)| (i, self.rank_key(e)))
            .min_by_key(|&(_, k)| k)
            .expect("top list is full, hence non-empty");
        if self.rank_key(&candidate) > min_key {
            self.top[min_idx] = candidate;
        }
    }

    /// Top-list items whose sampled share `c / s` reaches
    /// `phi - 3 eps / 4`, each estimated as `c * m / s`.
    pub fn report(&self, phi: f64) -> Result<HHReport> {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::param("phi", format!("{phi} not in (0, 1)")));
        }
        if self.sampled == 0 {
            return Ok(HHReport::default());
        }
        let phi = Fraction::from_f64(phi)?;
        let three_quarter_eps = Fraction::new(3 * self.epsilon.num(), 4 * self.epsilon.den())?;
        let threshold = phi
            .checked_sub(&three_quarter_eps)
            .unwrap_or(Fraction::new(0, 1)?);
        let scale = self.config.m_declared as f64 / self.sampled as f64;
        Ok(HHReport::new(self.top.iter().filter_map(|e| {
            let c = self.inner.estimate(e.hashed);
            threshold
                .reached_by(c as u128, self.sampled as u128)
                .then_some((e.item, c as f64 * scale))
        })))
    }

    /// Sampled count of the hashed id that `item` maps to.
    pub fn sampled_count(&self, item: Item) -> u64 {
        self.inner.estimate(self.id_hash.eval(item as u64))
    }

    /// `(item, hashed id, inner count)` for every remembered identity,
    /// largest count first.
    pub fn top(&self) -> Vec<(Item, u64, u64)> {
        let mut v: Vec<_> = self
            .top
            .iter()
            .map(|e| (e.item, e.hashed, self.inner.estimate(e.hashed)))
            .collect();
        v.sort_by_key(|&(item, _, c)| (Reverse(c), item));
        v
    }

    pub fn inner(&self) -> &MisraGries<u64> {
        &self.inner
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    pub fn id_hash(&self) -> &PairwiseHash {
        &self.id_hash
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn hashed_universe(&self) -> u64 {
        self.hashed_universe
    }

    pub fn top_capacity(&self) -> usize {
        self.top_capacity
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn sampled(&self) -> u64 {
        self.sampled
    }

    pub fn config(&self) -> &L1Config {
        &self.config
    }

    /// Idealized size: identities, the hashed-id summary and two hash seeds.
    pub fn space_bits(&self) -> u64 {
        Self::ideal_bits(
            self.top_capacity,
            self.inner.capacity(),
            self.config.universe,
            self.hashed_universe,
            self.budget,
        )
    }

    /// `L * ceil(log2 n) + (floor(2/eps) + 1) * (ceil(log2 U_h) + ceil(log2 r)) + seeds`.
    pub fn ideal_bits(
        top_capacity: usize,
        inner_capacity: usize,
        universe: u32,
        hashed_universe: u64,
        budget: u64,
    ) -> u64 {
        top_capacity as u64 * ceil_log2(universe as u64)
            + inner_capacity as u64 * (ceil_log2(hashed_universe) + ceil_log2(budget))
            + 2 * PairwiseHash::description_bits()
    }

    /// Bits occupied by this implementation's in-memory representation.
    pub fn actual_bits(&self) -> u64 {
        self.inner.capacity() as u64 * 128
            + self.top_capacity as u64 * (32 + 64)
            + 2 * 4 * 64
            + 3 * 64
            + bits_for(self.position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(eps: f64, phi: f64, m: u64) -> L1Config {
        L1Config::new(eps, phi, m, 1 << 20)
    }

    #[test]
    fn derived_sizes() {
        let c = config(0.1, 0.2, 1_000_000);
        assert_eq!(c.sample_budget().unwrap(), 40_000);
        assert_eq!(c.top_capacity().unwrap(), 10);
        assert_eq!(
            c.hashed_universe().unwrap(),
            DEFAULT_UNIVERSE_CONSTANT * 10_000
        );
        let sixteen = L1Config {
            universe_constant: 16,
            ..c
        };
        assert_eq!(sixteen.hashed_universe().unwrap(), 160_000);
        assert_eq!(config(0.05, 0.2, 1).sample_budget().unwrap(), 160_000);
        assert_eq!(config(0.1, 0.3, 1).top_capacity().unwrap(), 7);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SampledL1::new(config(0.2, 0.1, 10), 1).is_err());
        assert!(SampledL1::new(config(0.1, 0.2, 0), 1).is_err());
        assert!(SampledL1::new(config(0.0, 0.2, 10), 1).is_err());
    }

    #[test]
    fn nothing_sampled_leaves_state_alone() {
        let mut s = SampledL1::new(config(0.1, 0.2, 1000), 3).unwrap();
        s.sampler.threshold = 0;
        let before = s.clone();
        for i in 1..=500 {
            s.update(i);
        }
        assert_eq!(s.position(), 500);
        assert_eq!(s.sampled(), 0);
        assert_eq!(s.inner, before.inner);
        assert!(s.top.is_empty());
        assert!(s.report(0.2).unwrap().is_empty());
    }

    #[test]
    fn sample_all_when_budget_covers_stream() {
        let mut s = SampledL1::new(config(0.1, 0.2, 1000), 3).unwrap();
        assert!(s.sampler().keeps_everything());
        for k in 0..1000u32 {
            s.update(k % 7 + 1);
        }
        assert_eq!(s.sampled(), 1000);
    }

    #[test]
    fn single_item_stream() {
        let m = 10_000;
        let mut s = SampledL1::new(config(0.1, 0.5, m), 11).unwrap();
        for _ in 0..m {
            s.update(42);
        }
        let r = s.report(0.5).unwrap();
        assert_eq!(r.items().collect::<Vec<_>>(), vec![42]);
        assert!((r.estimate(42).unwrap() - m as f64).abs() <= 0.1 * m as f64);
    }

    #[test]
    fn empty_report_before_any_sample() {
        let s = SampledL1::new(config(0.1, 0.2, 100), 1).unwrap();
        assert!(s.report(0.2).unwrap().is_empty());
    }

    #[test]
    fn space_formula_plug_in() {
        let s = SampledL1::new(config(0.1, 0.2, 1 << 20), 0).unwrap();
        let u = s.hashed_universe();
        let expected = 10 * 20 + 21 * (ceil_log2(u) + ceil_log2(40_000)) + 244;
        assert_eq!(s.inner().capacity(), 21);
        assert_eq!(s.space_bits(), expected);
        let doubled = SampledL1::new(L1Config::new(0.1, 0.2, 1 << 20, 1 << 21), 0).unwrap();
        assert_eq!(doubled.space_bits() - s.space_bits(), 10);
    }
}
