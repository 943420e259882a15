//! Exact frequency oracle and ground-truth heavy-hitter sets.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::params::HHParams;
use crate::stream::{Item, Stream};

/// Exact per-item counts of a stream together with `m = F1` and `F2`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyProfile {
    counts: HashMap<Item, u64>,
    m: u64,
    f2: u128,
}

impl FrequencyProfile {
    pub fn of(stream: &Stream) -> Self {
        let mut profile = Self::default();
        for item in stream {
            profile.push(item);
        }
        profile
    }

    /// Profile of raw ids, validating each against `[1, universe]`.
    pub fn from_items(items: &[Item], universe: u32) -> Result<Self> {
        let mut profile = Self::default();
        for &item in items {
            if item == 0 || item > universe {
                return Err(Error::ItemOutOfRange { item, universe });
            }
            profile.push(item);
        }
        Ok(profile)
    }

    fn push(&mut self, item: Item) {
        let f = self.counts.entry(item).or_insert(0);
        // (f + 1)^2 - f^2 = 2f + 1
        self.f2 += 2 * *f as u128 + 1;
        *f += 1;
        self.m += 1;
    }

    pub fn count(&self, item: Item) -> u64 {
        self.counts.get(&item).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &HashMap<Item, u64> {
        &self.counts
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn f2(&self) -> u128 {
        self.f2
    }

    /// `F2` with `item`'s own contribution removed.
    pub fn residual_f2(&self, item: Item) -> u128 {
        let f = self.count(item) as u128;
        self.f2 - f * f
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Items ordered by descending count, ties by ascending id.
    pub fn ranked(&self) -> Vec<(Item, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(&i, &f)| (i, f)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// Ground truth for the l1 guarantee: `must = {f_i >= phi m}`,
    /// `forbidden = {f_i <= (phi - eps) m}`.
    pub fn truth_l1(&self, params: &HHParams) -> TruthSets {
        let m = self.m as u128;
        self.threshold_sets(params, m, |f| f)
    }

    /// Ground truth for the l2 guarantee: `must = {f_i^2 >= phi F2}`,
    /// `forbidden = {f_i^2 <= (phi - eps) F2}`.
    pub fn truth_l2(&self, params: &HHParams) -> TruthSets {
        let f2 = self.f2;
        self.threshold_sets(params, f2, |f| f * f)
    }

    fn threshold_sets(
        &self,
        params: &HHParams,
        total: u128,
        weight: impl Fn(u128) -> u128,
    ) -> TruthSets {
        let mut sets = TruthSets::default();
        if total == 0 {
            return sets;
        }
        let phi = params.phi_fraction();
        let low = params.slack_fraction();
        for (&item, &f) in &self.counts {
            let w = weight(f as u128);
            if phi.reached_by(w, total) {
                sets.must.insert(item);
            }
            if low.bounds(w, total) {
                sets.forbidden.insert(item);
            } else if !sets.must.contains(&item) {
                sets.between.insert(item);
            }
        }
        sets.defined = true;
        sets
    }
}

/// Items that must / must not appear in a correct report.
///
/// `forbidden` lists only items present in the stream; every absent item
/// (frequency 0) is forbidden as well, which [`TruthSets::is_forbidden`]
/// accounts for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TruthSets {
    pub must: BTreeSet<Item>,
    pub forbidden: BTreeSet<Item>,
    /// Observed items strictly between the two thresholds.
    pub between: BTreeSet<Item>,
    defined: bool,
}

impl TruthSets {
    pub fn is_forbidden(&self, item: Item) -> bool {
        // unseen items have weight 0
        self.defined && !self.must.contains(&item) && !self.between.contains(&item)
    }

    /// Fraction of `must` contained in `reported` (1.0 when `must` is empty).
    pub fn recall(&self, reported: impl IntoIterator<Item = Item>) -> f64 {
        if self.must.is_empty() {
            return 1.0;
        }
        let reported: BTreeSet<Item> = reported.into_iter().collect();
        self.must.intersection(&reported).count() as f64 / self.must.len() as f64
    }

    pub fn forbidden_hits(&self, reported: impl IntoIterator<Item = Item>) -> usize {
        reported
            .into_iter()
            .filter(|&i| self.is_forbidden(i))
            .count()
    }
}
