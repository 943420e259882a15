//! Running second-moment tracker used to scale the sieve's thresholds.

use std::collections::HashMap;

use crate::hash::{FourWiseHash, SeedStream};
use crate::stream::Item;

pub const SKETCH_GROUPS: usize = 6;
pub const SKETCH_PER_GROUP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum F2Mode {
    /// Exact running sum from a side tally (oracle plumbing).
    #[default]
    Exact,
    /// Median-of-means over a 6 x 16 grid of random-sign counters.
    Sketch,
}

impl std::str::FromStr for F2Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "sketch" => Ok(Self::Sketch),
            other => Err(crate::Error::param(
                "f2_mode",
                format!("unknown mode {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    Exact {
        counts: HashMap<Item, u64>,
        f2: u128,
    },
    Sketch {
        signs: Vec<FourWiseHash>,
        counters: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct F2Tracker {
    inner: Inner,
}

impl F2Tracker {
    pub fn new(mode: F2Mode, seed: u64) -> Self {
        let inner = match mode {
            F2Mode::Exact => Inner::Exact {
                counts: HashMap::new(),
                f2: 0,
            },
            F2Mode::Sketch => {
                let mut seeds = SeedStream::new(seed);
                let n = SKETCH_GROUPS * SKETCH_PER_GROUP;
                Inner::Sketch {
                    signs: (0..n)
                        .map(|_| FourWiseHash::new(seeds.next_seed()))
                        .collect(),
                    counters: vec![0; n],
                }
            }
        };
        Self { inner }
    }

    pub fn mode(&self) -> F2Mode {
        match self.inner {
            Inner::Exact { .. } => F2Mode::Exact,
            Inner::Sketch { .. } => F2Mode::Sketch,
        }
    }

    pub fn update(&mut self, item: Item) {
        match &mut self.inner {
            Inner::Exact { counts, f2 } => {
                let f = counts.entry(item).or_insert(0);
                *f2 += 2 * *f as u128 + 1;
                *f += 1;
            }
            Inner::Sketch { signs, counters } => {
                for (c, h) in counters.iter_mut().zip(signs.iter()) {
                    *c += h.sign(item as u64);
                }
            }
        }
    }

    pub fn estimate(&self) -> f64 {
        match &self.inner {
            Inner::Exact { f2, .. } => *f2 as f64,
            Inner::Sketch { counters, .. } => {
                let mut means: Vec<f64> = counters
                    .chunks(SKETCH_PER_GROUP)
                    .map(|g| g.iter().map(|&c| (c as f64).powi(2)).sum::<f64>() / g.len() as f64)
                    .collect();
                means.sort_by(f64::total_cmp);
                let mid = means.len() / 2;
                (means[mid - 1] + means[mid]) / 2.0
            }
        }
    }

    /// Counter bits held by the sketch mode; zero for the exact oracle.
    pub fn sketch_bits(&self, counter_bits: u64) -> u64 {
        match self.inner {
            Inner::Exact { .. } => 0,
            Inner::Sketch { .. } => (SKETCH_GROUPS * SKETCH_PER_GROUP) as u64 * counter_bits,
        }
    }
}
