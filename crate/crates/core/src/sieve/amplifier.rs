//! Counter pairs that amplify a single l2-heavy item.
//!
//! Pair `j` splits the universe in two with a pairwise-independent hash and
//! keeps one random-sign counter per side. A heavy item drags its side's
//! counter away from zero in most pairs, so "lands on the larger counter in
//! at least a theta fraction of pairs" filters the universe down to the
//! heavy item plus a small remainder.

use crate::hash::{PairwiseHash, SeedStream, SignSource};
use crate::params::Fraction;
use crate::stream::Item;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifierPair {
    split: PairwiseHash,
    sign: SignSource,
    counters: [i64; 2],
    larger: usize,
    sup_abs: u64,
    last_flip: u64,
}

impl AmplifierPair {
    fn new(split_seed: u64, sign_seed: u64) -> Self {
        Self {
            split: PairwiseHash::new(split_seed, 2).expect("range 2 is valid"),
            sign: SignSource::new(sign_seed),
            counters: [0, 0],
            larger: 0,
            sup_abs: 0,
            last_flip: 0,
        }
    }

    /// Side (0 or 1) that `item` routes to.
    #[inline]
    pub fn side(&self, item: Item) -> usize {
        self.split.eval(item as u64) as usize
    }

    #[inline]
    pub fn sign(&self, item: Item) -> i64 {
        self.sign.sign(item as u64)
    }

    /// Index of the larger-magnitude counter; ties go to side 0.
    #[inline]
    pub fn larger(&self) -> usize {
        self.larger
    }

    pub fn counters(&self) -> [i64; 2] {
        self.counters
    }

    /// Largest `|counter|` seen on either side so far.
    pub fn sup_abs(&self) -> u64 {
        self.sup_abs
    }

    /// Update index (1-based) at which `larger()` last changed; 0 if never.
    pub fn last_flip(&self) -> u64 {
        self.last_flip
    }

    pub fn split_seed(&self) -> u64 {
        self.split.seed()
    }

    pub fn sign_seed(&self) -> u64 {
        self.sign.seed()
    }

    fn update(&mut self, item: Item, time: u64) {
        let side = self.side(item);
        self.counters[side] += self.sign(item);
        self.sup_abs = self.sup_abs.max(self.counters[side].unsigned_abs());
        let larger = usize::from(self.counters[1].abs() > self.counters[0].abs());
        if larger != self.larger {
            self.larger = larger;
            self.last_flip = time;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amplifier {
    pairs: Vec<AmplifierPair>,
    updates: u64,
}

impl Amplifier {
    pub fn new(pairs: usize, seeds: &mut SeedStream) -> Self {
        let pairs = (0..pairs)
            .map(|_| {
                let split = seeds.next_seed();
                let sign = seeds.next_seed();
                AmplifierPair::new(split, sign)
            })
            .collect();
        Self { pairs, updates: 0 }
    }

    pub fn update(&mut self, item: Item) {
        self.updates += 1;
        for pair in &mut self.pairs {
            pair.update(item, self.updates);
        }
    }

    /// Number of pairs in which `item` routes to the larger counter.
    pub fn agreement(&self, item: Item) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.side(item) == p.larger())
            .count()
    }

    /// Whether `item` lands on the larger counter in at least `theta * J` pairs.
    pub fn admits(&self, item: Item, theta: Fraction) -> bool {
        theta.reached_by(self.agreement(item) as u128, self.pairs.len() as u128)
    }

    pub fn pairs(&self) -> &[AmplifierPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Latest update index at which any pair's larger side changed.
    pub fn last_flip(&self) -> u64 {
        self.pairs.iter().map(|p| p.last_flip).max().unwrap_or(0)
    }

    /// Largest `|counter|` observed over time across all pairs.
    pub fn sup_abs(&self) -> u64 {
        self.pairs.iter().map(|p| p.sup_abs).max().unwrap_or(0)
    }
}
