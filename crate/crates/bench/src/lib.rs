//! Fixed workloads shared by the benchmarks.

use hh_core::{Item, SpikeOrder, SpikeSpec, ZipfSpec};

pub const N: u32 = 1 << 16;
pub const M: u64 = 200_000;

/// Zipf(1.1) items over `[1, N]`.
pub fn zipf_items() -> Vec<Item> {
    ZipfSpec { n: N, m: M, s: 1.1 }
        .generate(1)
        .expect("valid zipf parameters")
        .into_items()
}

/// One item at a quarter of the stream, the rest distinct singletons.
pub fn spike_items() -> Vec<Item> {
    let f_star = M / 4;
    SpikeSpec {
        n: 1 << 18,
        m: M,
        star: 1,
        f_star,
        order: SpikeOrder::Interleaved,
    }
    .generate(1)
    .expect("feasible spike")
    .into_items()
}
