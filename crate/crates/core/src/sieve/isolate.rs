//! Isolation wrapper: hash the universe into `ceil(4 / phi^2)` groups so
//! each heavy item most likely sits alone in its group, run one sieve per
//! group, and confirm each group's candidate with a companion CountSketch.

use crate::countsketch::CountSketch;
use crate::error::Result;
use crate::hash::{PairwiseHash, SeedStream};
use crate::params::{HHParams, HHReport};
use crate::stream::Item;

use super::{F2Tracker, Sieve, SieveConfig, SieveSpace};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IsolationConfig {
    pub sieve: SieveConfig,
    /// Companion CountSketch width; defaults to `ceil(8 / eps^2)`.
    pub companion_buckets: Option<usize>,
    /// Companion CountSketch depth; 0 means `ceil(log2 n) + 1`.
    pub companion_rows: usize,
}

#[derive(Debug, Clone)]
pub struct IsolatedSieve {
    params: HHParams,
    partition: PairwiseHash,
    groups: Vec<Sieve>,
    companion: CountSketch,
    f2: F2Tracker,
}

impl IsolatedSieve {
    pub fn new(
        universe: u32,
        params: HHParams,
        seed: u64,
        config: IsolationConfig,
    ) -> Result<Self> {
        let phi = params.phi_fraction();
        let groups = (4 * phi.den() as u128 * phi.den() as u128)
            .div_ceil(phi.num() as u128 * phi.num() as u128) as u64;
        let mut seeds = SeedStream::new(seed);
        let partition = PairwiseHash::new(seeds.next_seed(), groups)?;
        let groups = (0..groups)
            .map(|_| Sieve::new(universe, seeds.next_seed(), config.sieve))
            .collect::<Result<Vec<_>>>()?;
        let buckets = config
            .companion_buckets
            .unwrap_or_else(|| (8.0 / (params.epsilon() * params.epsilon())).ceil() as usize);
        let companion =
            CountSketch::new(buckets, config.companion_rows, universe, seeds.next_seed())?;
        let f2 = F2Tracker::new(config.sieve.f2_mode, seeds.next_seed());
        Ok(Self {
            params,
            partition,
            groups,
            companion,
            f2,
        })
    }

    pub fn group_of(&self, item: Item) -> usize {
        self.partition.eval(item as u64) as usize
    }

    pub fn update(&mut self, item: Item) {
        let g = self.group_of(item);
        self.groups[g].update(item);
        self.companion.insert(item);
        self.f2.update(item);
    }

    /// Group candidates whose companion estimate satisfies
    /// `f~^2 >= (phi - eps) * F2_hat`.
    pub fn report(&self) -> HHReport {
        let f2_hat = self.f2.estimate();
        if f2_hat <= 0.0 {
            return HHReport::default();
        }
        let bar = (self.params.phi() - self.params.epsilon()) * f2_hat;
        HHReport::new(
            self.groups
                .iter()
                .filter_map(Sieve::report)
                .filter_map(|item| {
                    let est = self.companion.estimate(item);
                    (est > 0.0 && est * est >= bar).then_some((item, est))
                }),
        )
    }

    pub fn groups(&self) -> &[Sieve] {
        &self.groups
    }

    pub fn companion(&self) -> &CountSketch {
        &self.companion
    }

    pub fn f2_estimate(&self) -> f64 {
        self.f2.estimate()
    }

    /// Sum over groups plus the companion sketch.
    pub fn space(&self) -> SieveSpace {
        let companion = self.companion.space_bits();
        self.groups.iter().map(Sieve::space).fold(
            SieveSpace {
                idealized: companion,
                actual: companion,
            },
            |acc, s| SieveSpace {
                idealized: acc.idealized + s.idealized,
                actual: acc.actual + s.actual,
            },
        )
    }
}
