//! Seeded workload generators.
//!
//! All generators are pure functions of their parameters and seed.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::stream::{Item, Stream};

/// Zipf workload: `m` i.i.d. draws with `Pr[i] ∝ i^-s` over `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfSpec {
    pub n: u32,
    pub m: u64,
    pub s: f64,
}

impl ZipfSpec {
    pub fn generate(&self, seed: u64) -> Result<Stream> {
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::param("s", format!("{} must be positive", self.s)));
        }
        let mut cumulative = Vec::with_capacity(self.n as usize);
        let mut total = 0.0f64;
        for i in 1..=self.n {
            total += (i as f64).powf(-self.s);
            cumulative.push(total);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let items = (0..self.m)
            .map(|_| {
                let u = rng.gen::<f64>() * total;
                let idx = cumulative.partition_point(|&c| c <= u);
                idx.min(self.n as usize - 1) as Item + 1
            })
            .collect();
        Ok(Stream::from_trusted(items, self.n))
    }
}

/// Where the planted occurrences go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpikeOrder {
    /// Whole stream shuffled uniformly.
    #[default]
    Interleaved,
    /// Shuffled noise first, then every occurrence of the heavy item.
    StarLast,
}

impl std::str::FromStr for SpikeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interleaved" => Ok(Self::Interleaved),
            "star_last" | "star-last" => Ok(Self::StarLast),
            other => Err(Error::param(
                "order",
                format!("unknown spike order {other:?}"),
            )),
        }
    }
}

/// One heavy item occurring `f_star` times plus `m - f_star` distinct
/// singletons drawn from the rest of the universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpikeSpec {
    pub n: u32,
    pub m: u64,
    pub star: Item,
    pub f_star: u64,
    pub order: SpikeOrder,
}

impl SpikeSpec {
    pub fn generate(&self, seed: u64) -> Result<Stream> {
        if self.f_star > self.m {
            return Err(Error::InfeasibleSpike(format!(
                "f_star = {} exceeds m = {}",
                self.f_star, self.m
            )));
        }
        let noise = self.m - self.f_star;
        let planted = Planted {
            n: self.n,
            heavy: vec![(self.star, self.f_star)],
            noise,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise_items = planted.noise_items(&mut rng)?;
        let items = match self.order {
            SpikeOrder::Interleaved => {
                let mut items = noise_items;
                items.extend(std::iter::repeat_n(self.star, self.f_star as usize));
                items.shuffle(&mut rng);
                items
            }
            SpikeOrder::StarLast => {
                let mut items = noise_items;
                items.shuffle(&mut rng);
                items.extend(std::iter::repeat_n(self.star, self.f_star as usize));
                items
            }
        };
        Ok(Stream::from_trusted(items, self.n))
    }
}

/// Several planted items with given counts plus `noise` distinct singletons,
/// shuffled together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planted {
    pub n: u32,
    pub heavy: Vec<(Item, u64)>,
    pub noise: u64,
}

impl Planted {
    pub fn generate(&self, seed: u64) -> Result<Stream> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut items = self.noise_items(&mut rng)?;
        for &(item, f) in &self.heavy {
            items.extend(std::iter::repeat_n(item, f as usize));
        }
        items.shuffle(&mut rng);
        Ok(Stream::from_trusted(items, self.n))
    }

    fn noise_items(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Item>> {
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        let mut heavy_ids: Vec<Item> = self.heavy.iter().map(|&(i, _)| i).collect();
        heavy_ids.sort_unstable();
        if heavy_ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InfeasibleSpike("planted items repeat".into()));
        }
        if let Some(&bad) = heavy_ids.iter().find(|&&i| i == 0 || i > self.n) {
            return Err(Error::ItemOutOfRange {
                item: bad,
                universe: self.n,
            });
        }
        let free = self.n as u64 - heavy_ids.len() as u64;
        if self.noise > free {
            return Err(Error::InfeasibleSpike(format!(
                "{} distinct noise items requested but only {free} ids are free",
                self.noise
            )));
        }
        // Sample ranks among the free ids, then map rank -> id by skipping
        // the planted ids.
        let mut ranks = index::sample(rng, free as usize, self.noise as usize).into_vec();
        ranks.sort_unstable();
        let mut out = Vec::with_capacity(ranks.len());
        let mut skip = 0usize;
        for r in ranks {
            let mut id = r as u64 + 1 + skip as u64;
            while skip < heavy_ids.len() && heavy_ids[skip] as u64 <= id {
                skip += 1;
                id += 1;
            }
            out.push(id as Item);
        }
        Ok(out)
    }
}

/// `m` i.i.d. uniform draws over `[1, n]`.
pub fn uniform(n: u32, m: u64, seed: u64) -> Result<Stream> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = (0..m).map(|_| rng.gen_range(1..=n)).collect();
    Ok(Stream::from_trusted(items, n))
}
