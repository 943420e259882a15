//! CountSketch: `R` rows of `B` signed counters.
//!
//! Row `r` adds `sigma_r(i) * delta` to bucket `h_r(i)`; the point estimate
//! of `f_i` is the median over rows of `sigma_r(i) * c[r][h_r(i)]`. The
//! sketch is linear, so deletions are subtractions and two sketches with the
//! same seed merge by adding counters.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::hash::{PairwiseHash, PairwiseSign, SeedStream};
use crate::params::{HHParams, HHReport};
use crate::space::{bits_for, ceil_log2};
use crate::stream::Item;

/// `ceil(log2 n) + 1`, the default number of rows.
pub fn default_rows(universe: u32) -> usize {
    ceil_log2(universe as u64) as usize + 1
}

/// Running top-K candidate ids keyed by their last median estimate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Candidates {
    capacity: usize,
    by_item: HashMap<Item, i64>,
    ordered: BTreeSet<(i64, Reverse<Item>)>,
}

impl Candidates {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            ..Default::default()
        }
    }

    fn offer(&mut self, item: Item, estimate: i64) {
        let key = (estimate, Reverse(item));
        if let Some(old) = self.by_item.get_mut(&item) {
            if *old != estimate {
                self.ordered.remove(&(*old, Reverse(item)));
                self.ordered.insert(key);
                *old = estimate;
            }
            return;
        }
        if self.by_item.len() < self.capacity {
            self.by_item.insert(item, estimate);
            self.ordered.insert(key);
            return;
        }
        // full: the newcomer only gets in by beating the current minimum
        let min = *self.ordered.first().expect("capacity is at least 1");
        if key > min {
            self.ordered.pop_first();
            self.by_item.remove(&min.1 .0);
            self.by_item.insert(item, estimate);
            self.ordered.insert(key);
        }
    }

    fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.by_item.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountSketch {
    buckets: usize,
    rows: usize,
    seed: u64,
    row_hash: Vec<PairwiseHash>,
    row_sign: Vec<PairwiseSign>,
    unit_signs: bool,
    counters: Vec<i64>,
    candidates: Candidates,
    updates_seen: u64,
    universe: u32,
}

impl CountSketch {
    /// `rows == 0` selects [`default_rows`] for the universe.
    pub fn new(buckets: usize, rows: usize, universe: u32, seed: u64) -> Result<Self> {
        if buckets == 0 {
            return Err(Error::param("buckets", "must be at least 1"));
        }
        if universe == 0 {
            return Err(Error::param("universe", "must be at least 1"));
        }
        let rows = if rows == 0 {
            default_rows(universe)
        } else {
            rows
        };
        let mut seeds = SeedStream::new(seed);
        let mut row_hash = Vec::with_capacity(rows);
        let mut row_sign = Vec::with_capacity(rows);
        for _ in 0..rows {
            row_hash.push(PairwiseHash::new(seeds.next_seed(), buckets as u64)?);
            row_sign.push(PairwiseSign::new(seeds.next_seed()));
        }
        Ok(Self {
            buckets,
            rows,
            seed,
            row_hash,
            row_sign,
            unit_signs: false,
            counters: vec![0; rows * buckets],
            candidates: Candidates::new(4 * buckets),
            updates_seen: 0,
            universe,
        })
    }

    /// Degenerate variant with every sign fixed to +1 (turns each row into a
    /// plain hashed counter). Only meaningful for testing.
    pub fn with_unit_signs(mut self) -> Self {
        self.unit_signs = true;
        self
    }

    #[inline]
    fn sign(&self, row: usize, item: Item) -> i64 {
        if self.unit_signs {
            1
        } else {
            self.row_sign[row].sign(item as u64)
        }
    }

    #[inline]
    fn slot(&self, row: usize, item: Item) -> usize {
        row * self.buckets + self.row_hash[row].eval(item as u64) as usize
    }

    /// Adds `delta` occurrences of `item` (negative for deletions).
    pub fn update(&mut self, item: Item, delta: i64) {
        for row in 0..self.rows {
            let slot = self.slot(row, item);
            self.counters[slot] += delta * self.sign(row, item);
        }
        self.updates_seen += delta.unsigned_abs();
        if delta > 0 {
            let est = self.estimate_int(item);
            self.candidates.offer(item, est);
        }
    }

    pub fn insert(&mut self, item: Item) {
        self.update(item, 1);
    }

    pub fn delete(&mut self, item: Item) {
        self.update(item, -1);
    }

    /// `sigma_r(i) * c[r][h_r(i)]` for one row.
    pub fn row_estimate(&self, row: usize, item: Item) -> i64 {
        self.sign(row, item) * self.counters[self.slot(row, item)]
    }

    /// Median of the per-row estimates; even row counts take the lower median.
    pub fn estimate_int(&self, item: Item) -> i64 {
        let mut per_row: Vec<i64> = (0..self.rows).map(|r| self.row_estimate(r, item)).collect();
        let mid = (per_row.len() - 1) / 2;
        *per_row.select_nth_unstable(mid).1
    }

    pub fn estimate(&self, item: Item) -> f64 {
        self.estimate_int(item) as f64
    }

    /// Candidates `i` with `estimate(i)^2 >= (phi - eps/2) * f2_hat`.
    pub fn l2_report(&self, params: &HHParams, f2_hat: f64) -> HHReport {
        if f2_hat.is_nan() || f2_hat <= 0.0 {
            return HHReport::default();
        }
        let bar = (params.phi() - params.epsilon() / 2.0) * f2_hat;
        HHReport::new(self.candidates.items().filter_map(|item| {
            let est = self.estimate(item);
            (est > 0.0 && est * est >= bar).then_some((item, est))
        }))
    }

    /// Counter-wise sum with a sketch built from the same seed and shape.
    pub fn merge(&mut self, other: &CountSketch) -> Result<()> {
        if self.seed != other.seed
            || self.rows != other.rows
            || self.buckets != other.buckets
            || self.unit_signs != other.unit_signs
        {
            return Err(Error::SeedMismatch);
        }
        for (a, b) in self.counters.iter_mut().zip(&other.counters) {
            *a += b;
        }
        self.updates_seen += other.updates_seen;
        let ids: Vec<Item> = self
            .candidates
            .items()
            .chain(other.candidates.items())
            .collect();
        let mut refreshed = Candidates::new(self.candidates.capacity);
        for item in ids {
            refreshed.offer(item, self.estimate_int(item));
        }
        self.candidates = refreshed;
        Ok(())
    }

    pub fn counters(&self) -> &[i64] {
        &self.counters
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.counters[row * self.buckets..(row + 1) * self.buckets]
    }

    pub fn is_zero(&self) -> bool {
        self.counters.iter().all(|&c| c == 0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn updates_seen(&self) -> u64 {
        self.updates_seen
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.by_item.len()
    }

    pub fn space_bits(&self) -> u64 {
        Self::ideal_bits(self.buckets, self.rows, self.universe, self.updates_seen)
    }

    /// `R * B` signed counters of `log2 m + 1` bits plus two
    /// `O(log n)`-bit hash descriptions per row.
    pub fn ideal_bits(buckets: usize, rows: usize, universe: u32, m: u64) -> u64 {
        let hash_bits = 2 * ceil_log2(universe as u64).max(1);
        rows as u64 * (buckets as u64 * (bits_for(m) + 1) + 2 * hash_bits)
    }

    pub fn actual_bits(&self) -> u64 {
        self.rows as u64 * (self.buckets as u64 * 64 + 2 * PairwiseHash::description_bits())
            + self.candidates.capacity as u64 * (32 + 64)
    }
}
