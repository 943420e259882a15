//! Misra-Gries frequent-items summary.
//!
//! A table of at most `k = floor(1/eps) + 1` `(item, count)` pairs. On each
//! update the matching counter is incremented; otherwise a free slot takes the
//! item with count 1; otherwise every stored counter is decremented (and
//! zeroed entries evicted) while the incoming item is dropped. Every estimate
//! satisfies `f_i - eps * m < estimate <= f_i`.

use std::collections::BTreeMap;

use log::warn;

use crate::error::{Error, Result};
use crate::params::{Fraction, HHReport};
use crate::space::bits_for;
use crate::stream::Item;

/// Which branch of the update rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgUpdate {
    Incremented,
    Inserted,
    /// All counters dropped by one; entries reaching zero were evicted.
    Decremented,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisraGries<K: Ord + Copy = Item> {
    epsilon: Fraction,
    capacity: usize,
    table: BTreeMap<K, u64>,
    processed: u64,
}

impl<K: Ord + Copy> MisraGries<K> {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::param("epsilon", format!("{epsilon} not in (0, 1)")));
        }
        Self::with_fraction(Fraction::from_f64(epsilon)?)
    }

    /// Builds the summary for an exact accuracy fraction; `epsilon = 1` is
    /// allowed here and yields two slots.
    pub fn with_fraction(epsilon: Fraction) -> Result<Self> {
        if epsilon.num() == 0 || epsilon.num() > epsilon.den() {
            return Err(Error::param("epsilon", format!("{epsilon} not in (0, 1]")));
        }
        let capacity = (epsilon.den() / epsilon.num()) as usize + 1;
        Ok(Self {
            epsilon,
            capacity,
            table: BTreeMap::new(),
            processed: 0,
        })
    }

    pub fn update(&mut self, item: K) -> MgUpdate {
        self.processed += 1;
        if let Some(c) = self.table.get_mut(&item) {
            *c += 1;
            return MgUpdate::Incremented;
        }
        if self.table.len() < self.capacity {
            self.table.insert(item, 1);
            return MgUpdate::Inserted;
        }
        self.table.retain(|_, c| {
            *c -= 1;
            *c > 0
        });
        MgUpdate::Decremented
    }

    /// Stored count, or 0 for items not in the table.
    pub fn estimate(&self, item: K) -> u64 {
        self.table.get(&item).copied().unwrap_or(0)
    }

    pub fn contains(&self, item: K) -> bool {
        self.table.contains_key(&item)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn epsilon(&self) -> Fraction {
        self.epsilon
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (K, u64)> + '_ {
        self.table.iter().map(|(&k, &c)| (k, c))
    }

    /// Entries whose stored count lies strictly above `(phi - eps) * processed`.
    ///
    /// With the summary's undercount strictly below `eps * m`, every item
    /// with `f_i >= phi * m` clears this bar and no item with
    /// `f_i <= (phi - eps) * m` does.
    pub fn candidates(&self, phi: f64) -> Result<Vec<(K, u64)>> {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::param("phi", format!("{phi} not in (0, 1)")));
        }
        let phi_frac = Fraction::from_f64(phi)?;
        if phi < 2.0 * self.epsilon.as_f64() {
            warn!(
                "phi = {phi} is below 2 * epsilon = {}",
                2.0 * self.epsilon.as_f64()
            );
        }
        let slack = phi_frac
            .checked_sub(&self.epsilon)
            .unwrap_or(Fraction::new(0, 1)?);
        Ok(self
            .iter()
            .filter(|&(_, c)| slack.exceeded_by(c as u128, self.processed as u128))
            .collect())
    }

    /// Information-theoretic size: `k` pairs of (id, counter).
    pub fn space_bits(&self, id_bits: u64) -> u64 {
        Self::ideal_bits(self.capacity, id_bits, self.processed)
    }

    pub fn ideal_bits(capacity: usize, id_bits: u64, m: u64) -> u64 {
        capacity as u64 * (id_bits + bits_for(m))
    }

    /// Bits held by this implementation: one key and one `u64` per slot
    /// plus the exact epsilon and two counters.
    pub fn actual_bits(&self) -> u64 {
        self.capacity as u64 * (8 * std::mem::size_of::<K>() as u64 + 64) + 2 * 64 + 2 * 64
    }
}

impl MisraGries<Item> {
    pub fn report(&self, phi: f64) -> Result<HHReport> {
        Ok(HHReport::new(
            self.candidates(phi)?
                .into_iter()
                .map(|(i, c)| (i, c as f64)),
        ))
    }
}
