//! l2 heavy-hitter sieve: amplification followed by sequential bit learning.
//!
//! Each update feeds an [`F2Tracker`], the [`Amplifier`] pairs, and, when the
//! item lands on the larger counter in at least a `theta` fraction of pairs,
//! the active [`BitRound`]. A round keeps two random-sign counters over a
//! fresh random split of the universe and closes as soon as one of them
//! leaves the noise band; the side that escaped is one learned bit of the
//! heavy item's identity under that round's split. At the end, the item that
//! passes the amplifier filter and agrees with at least 2/3 of the most
//! recent rounds is reported.
//!
//! Seeds for every closed round are stored rather than regenerated, so
//! [`Sieve::space`] reports the extra bits that storing randomness costs.

mod amplifier;
mod f2;
mod isolate;

use std::collections::HashSet;

pub use amplifier::{Amplifier, AmplifierPair};
pub use f2::{F2Mode, F2Tracker};
pub use isolate::{IsolatedSieve, IsolationConfig};

use crate::error::{Error, Result};
use crate::hash::{PairwiseHash, SeedStream, SignSource};
use crate::params::Fraction;
use crate::space::{bits_for, ceil_log2};
use crate::stream::Item;

/// Bits kept per closed round: two 64-bit seeds and the learned bit.
pub const STORED_ROUND_BITS: u64 = 2 * 64 + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveConfig {
    /// Threshold constant `C`.
    pub threshold_constant: f64,
    /// `J = ceil(c_J * log2 log2 n)` amplifier pairs.
    pub pair_constant: f64,
    /// Fraction of pairs an item must agree with to join a round.
    pub membership: f64,
    /// Fraction of the most recent rounds used to identify the item.
    pub suffix_fraction: f64,
    /// Exponent `c` in the participating-noise scale `F2 / log2(n)^c`.
    pub dilution_exponent: f64,
    /// Closed rounds required before anything is reported.
    pub min_rounds: usize,
    pub f2_mode: F2Mode,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            threshold_constant: 4.0,
            pair_constant: 8.0,
            membership: 0.9,
            suffix_fraction: 0.5,
            dilution_exponent: 4.0,
            min_rounds: 8,
            f2_mode: F2Mode::Exact,
        }
    }
}

impl SieveConfig {
    pub fn with_f2_mode(self, f2_mode: F2Mode) -> Self {
        Self { f2_mode, ..self }
    }

    /// Number of amplifier pairs for a universe of size `n` (at least 1).
    pub fn pairs_for(&self, universe: u32) -> usize {
        let loglog = (universe.max(2) as f64).log2().log2();
        ((self.pair_constant * loglog).ceil() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be positive")))
            }
        };
        positive("threshold_constant", self.threshold_constant)?;
        positive("pair_constant", self.pair_constant)?;
        if self.dilution_exponent.is_nan() || self.dilution_exponent < 0.0 {
            return Err(Error::param("dilution_exponent", "must be non-negative"));
        }
        if !(self.membership > 0.5 && self.membership <= 1.0) {
            return Err(Error::param(
                "membership",
                format!("{} not in (1/2, 1]", self.membership),
            ));
        }
        if !(self.suffix_fraction > 0.0 && self.suffix_fraction <= 1.0) {
            return Err(Error::param(
                "suffix_fraction",
                format!("{} not in (0, 1]", self.suffix_fraction),
            ));
        }
        Ok(())
    }
}

/// One bit-learning round: a random split of the universe with a random-sign
/// counter per side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRound {
    split: PairwiseHash,
    sign: SignSource,
    counters: [i64; 2],
    start_f2: u64,
    resolved: Option<u8>,
}

impl BitRound {
    fn open(seeds: &mut SeedStream, start_f2: f64) -> Self {
        let split_seed = seeds.next_seed();
        let sign_seed = seeds.next_seed();
        Self {
            split: PairwiseHash::new(split_seed, 2).expect("range 2 is valid"),
            sign: SignSource::new(sign_seed),
            counters: [0, 0],
            start_f2: start_f2 as u64,
            resolved: None,
        }
    }

    /// Side (0 or 1) of `item` under this round's split.
    #[inline]
    pub fn side(&self, item: Item) -> u8 {
        self.split.eval(item as u64) as u8
    }

    pub fn counters(&self) -> [i64; 2] {
        self.counters
    }

    /// The side whose counter crossed the threshold, once the round closed.
    pub fn resolved(&self) -> Option<u8> {
        self.resolved
    }

    pub fn start_f2(&self) -> u64 {
        self.start_f2
    }

    pub fn split_seed(&self) -> u64 {
        self.split.seed()
    }

    pub fn sign_seed(&self) -> u64 {
        self.sign.seed()
    }

    fn add(&mut self, item: Item) {
        let side = self.side(item) as usize;
        self.counters[side] += self.sign.sign(item as u64);
    }

    fn peak(&self) -> u64 {
        self.counters[0]
            .unsigned_abs()
            .max(self.counters[1].unsigned_abs())
    }

    fn close(&mut self) -> u8 {
        let bit = u8::from(self.counters[1].abs() > self.counters[0].abs());
        self.resolved = Some(bit);
        bit
    }
}

/// Space accounting for one sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveSpace {
    /// Counters at `log2 m` bits, `J` pairs, one active round, and hash
    /// descriptions of `O(log n)` bits each.
    pub idealized: u64,
    /// `idealized` plus the stored seeds of every closed round.
    pub actual: u64,
}

impl SieveSpace {
    /// Extra bits spent storing randomness instead of regenerating it.
    pub fn derandomization_gap(&self) -> u64 {
        self.actual - self.idealized
    }

    pub fn idealized_bits(pairs: usize, universe: u32, m: u64) -> u64 {
        let functions = 2 * pairs as u64 + 2;
        let counter_bits = bits_for(m) + 1;
        let function_bits = 2 * ceil_log2(universe as u64).max(1);
        functions * (counter_bits + function_bits)
    }
}

#[derive(Debug, Clone)]
pub struct Sieve {
    config: SieveConfig,
    universe: u32,
    membership: Fraction,
    noise_scale: f64,
    amplifier: Amplifier,
    current: BitRound,
    rounds: Vec<BitRound>,
    f2: F2Tracker,
    seeds: SeedStream,
    seen: HashSet<Item>,
    updates: u64,
}

impl Sieve {
    pub fn new(universe: u32, seed: u64, config: SieveConfig) -> Result<Self> {
        if universe < 2 {
            return Err(Error::param("universe", "must be at least 2"));
        }
        config.validate()?;
        let mut seeds = SeedStream::new(seed);
        let amplifier = Amplifier::new(config.pairs_for(universe), &mut seeds);
        let f2 = F2Tracker::new(config.f2_mode, seeds.next_seed());
        let current = BitRound::open(&mut seeds, 0.0);
        let log_n = (universe as f64).log2();
        Ok(Self {
            config,
            universe,
            membership: Fraction::from_f64(config.membership)?,
            noise_scale: log_n.powf(config.dilution_exponent),
            amplifier,
            current,
            rounds: Vec::new(),
            f2,
            seeds,
            seen: HashSet::new(),
            updates: 0,
        })
    }

    /// Current stopping threshold `C * sqrt(F2 / log2(n)^c + 1)`.
    pub fn threshold(&self) -> f64 {
        self.config.threshold_constant * (self.f2.estimate() / self.noise_scale + 1.0).sqrt()
    }

    pub fn update(&mut self, item: Item) {
        self.updates += 1;
        self.seen.insert(item);
        self.f2.update(item);
        self.amplifier.update(item);
        if !self.amplifier.admits(item, self.membership) {
            return;
        }
        self.current.add(item);
        if self.current.peak() as f64 > self.threshold() {
            self.current.close();
            let next = BitRound::open(&mut self.seeds, self.f2.estimate());
            let done = std::mem::replace(&mut self.current, next);
            self.rounds.push(done);
        }
    }

    /// Whether `item` currently passes the amplifier filter.
    pub fn admits(&self, item: Item) -> bool {
        self.amplifier.admits(item, self.membership)
    }

    /// The rounds used for identification: the last `ceil(rho * #rounds)`.
    pub fn suffix(&self) -> &[BitRound] {
        let k = (self.config.suffix_fraction * self.rounds.len() as f64).ceil() as usize;
        &self.rounds[self.rounds.len() - k.min(self.rounds.len())..]
    }

    /// How many suffix rounds `item`'s split bits agree with.
    pub fn matches(&self, item: Item) -> usize {
        self.suffix()
            .iter()
            .filter(|r| r.resolved == Some(r.side(item)))
            .count()
    }

    /// Whether `item` agrees with at least 2/3 of the suffix rounds.
    pub fn matches_majority(&self, item: Item) -> bool {
        let suffix = self.suffix().len();
        suffix > 0 && 3 * self.matches(item) >= 2 * suffix
    }

    /// The unique observed id that passes the amplifier filter and matches at
    /// least 2/3 of the suffix bits; `None` if there are fewer than
    /// `min_rounds` closed rounds or no unique such id.
    pub fn report(&self) -> Option<Item> {
        if self.rounds.len() < self.config.min_rounds {
            return None;
        }
        let mut found = None;
        for &item in &self.seen {
            if self.admits(item) && self.matches_majority(item) {
                if found.is_some() {
                    return None;
                }
                found = Some(item);
            }
        }
        found
    }

    pub fn space(&self) -> SieveSpace {
        let idealized =
            SieveSpace::idealized_bits(self.amplifier.len(), self.universe, self.updates);
        SieveSpace {
            idealized,
            actual: idealized + self.rounds.len() as u64 * STORED_ROUND_BITS,
        }
    }

    pub fn amplifier(&self) -> &Amplifier {
        &self.amplifier
    }

    pub fn rounds(&self) -> &[BitRound] {
        &self.rounds
    }

    pub fn current_round(&self) -> &BitRound {
        &self.current
    }

    pub fn f2_estimate(&self) -> f64 {
        self.f2.estimate()
    }

    pub fn f2_tracker(&self) -> &F2Tracker {
        &self.f2
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn config(&self) -> &SieveConfig {
        &self.config
    }

    pub fn seen(&self) -> &HashSet<Item> {
        &self.seen
    }
}
