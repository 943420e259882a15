//! Single-pass heavy-hitter sketches over insertion streams of integer ids.
//!
//! The crate provides:
//!
//! * an exact frequency oracle ([`FrequencyProfile`]) and the ground-truth
//!   must/forbidden sets for the l1 and l2 heavy-hitter guarantees,
//! * the deterministic Misra-Gries summary ([`mg`]),
//! * a sampled, hashed-universe l1 algorithm that keeps true identities only
//!   for the top `O(1/phi)` counts ([`l1hh`]),
//! * CountSketch ([`countsketch`]),
//! * a sequential bit-learning l2 sieve driven by random-sign counter
//!   pairs ([`sieve`]),
//! * pairwise-independent hashing and workload generators shared by all of
//!   the above.

pub mod countsketch;
pub mod error;
pub mod gen;
pub mod hash;
pub mod io;
pub mod l1hh;
pub mod mg;
pub mod params;
pub mod profile;
pub mod sieve;
pub mod space;
pub mod stream;

pub use countsketch::CountSketch;
pub use error::{Error, Result};
pub use gen::{SpikeOrder, SpikeSpec, ZipfSpec};
pub use hash::{FourWiseHash, PairwiseHash, SignSource};
pub use l1hh::{L1Config, SampledL1};
pub use mg::MisraGries;
pub use params::{Fraction, HHParams, HHReport};
pub use profile::{FrequencyProfile, TruthSets};
pub use sieve::{
    F2Mode, F2Tracker, IsolatedSieve, IsolationConfig, Sieve, SieveConfig, SieveSpace,
};
pub use stream::{Item, Stream};
