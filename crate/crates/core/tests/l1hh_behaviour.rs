use std::collections::{BTreeSet, HashMap};

use hh_core::space::ceil_log2;
use hh_core::{
    Fraction, FrequencyProfile, HHParams, Item, L1Config, MisraGries, SampledL1, SpikeOrder,
    SpikeSpec, Stream, ZipfSpec,
};
use proptest::prelude::*;
use rayon::prelude::*;

fn run(config: &L1Config, seed: u64, stream: &Stream) -> SampledL1 {
    let mut state = SampledL1::new(*config, seed).unwrap();
    for x in stream {
        state.update(x);
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn top_list_tracks_largest_inner_counts(
        items in prop::collection::vec(1u32..=60, 1..600),
        seed in any::<u64>(),
        phi_idx in 0usize..3,
    ) {
        let phi = [0.3, 0.5, 0.7][phi_idx];
        // m_declared below the budget samples every position.
        let config = L1Config::new(0.2, phi, 1, 60);
        let mut state = SampledL1::new(config, seed).unwrap();
        let stream = Stream::new(items, 60).unwrap();
        for x in &stream {
            state.update(x);
            let top = state.top();
            let mut inner: Vec<u64> = state.inner().iter().map(|(_, c)| c).collect();
            inner.sort_unstable_by(|a, b| b.cmp(a));
            inner.truncate(state.top_capacity());
            let top_counts: Vec<u64> = top.iter().map(|&(_, _, c)| c).collect();
            prop_assert_eq!(top_counts, inner);
            for &(item, hashed, _) in &top {
                prop_assert_eq!(state.id_hash().eval(item as u64), hashed);
            }
        }
    }
}

#[test]
fn sample_all_matches_misra_gries_on_hashed_ids() {
    let stream = ZipfSpec {
        n: 2_000,
        m: 30_000,
        s: 1.2,
    }
    .generate(9)
    .unwrap();
    let config = L1Config::new(0.05, 0.1, 1, 2_000);
    let state = run(&config, 4, &stream);
    assert!(state.sampler().keeps_everything());
    let mut mg = MisraGries::<u64>::with_fraction(Fraction::new(1, 40).unwrap()).unwrap();
    for x in &stream {
        mg.update(state.id_hash().eval(x as u64));
    }
    assert_eq!(
        state.inner().iter().collect::<Vec<_>>(),
        mg.iter().collect::<Vec<_>>()
    );
    assert_eq!(state.sampled(), stream.len());
}

#[test]
fn same_seed_same_report() {
    let stream = ZipfSpec {
        n: 10_000,
        m: 100_000,
        s: 1.3,
    }
    .generate(1)
    .unwrap();
    let config = L1Config::new(0.05, 0.15, stream.len(), 10_000);
    let a = run(&config, 77, &stream).report(0.15).unwrap();
    let b = run(&config, 77, &stream).report(0.15).unwrap();
    assert_eq!(a, b);
}

#[test]
fn heavy_zipf_items_recovered() {
    // Zipf(1.5): the two largest items clear phi = 0.1 and the third is in
    // the gap, so both sides of the guarantee are exercised.
    let stream = ZipfSpec {
        n: 10_000,
        m: 200_000,
        s: 1.5,
    }
    .generate(5)
    .unwrap();
    let profile = FrequencyProfile::of(&stream);
    let params = HHParams::new(0.05, 0.1).unwrap();
    let truth = profile.truth_l1(&params);
    assert_eq!(truth.must.len(), 2);
    let config = L1Config::new(0.05, 0.1, stream.len(), 10_000);
    let good = (0..40u64)
        .into_par_iter()
        .filter(|&seed| {
            let report = run(&config, seed, &stream).report(0.1).unwrap();
            truth.recall(report.items()) == 1.0 && truth.forbidden_hits(report.items()) == 0
        })
        .count();
    assert!(good >= 38, "{good}/40");
}

#[test]
fn half_mass_spike_stays_on_top() {
    let n = 150_000;
    let present = (0..50u64)
        .into_par_iter()
        .filter(|&seed| {
            let stream = SpikeSpec {
                n,
                m: 200_000,
                star: 99,
                f_star: 100_000,
                order: SpikeOrder::Interleaved,
            }
            .generate(seed)
            .unwrap();
            let config = L1Config::new(0.1, 0.3, stream.len(), n);
            let state = run(&config, seed, &stream);
            state.top().iter().any(|&(i, _, _)| i == 99)
        })
        .count();
    assert_eq!(present, 50);
}

#[test]
fn sampled_ids_hash_perfectly() {
    let stream = ZipfSpec {
        n: 100_000,
        m: 1_000_000,
        s: 1.1,
    }
    .generate(2024)
    .unwrap();
    let config = L1Config::new(0.05, 0.2, stream.len(), 100_000);
    let perfect = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let state = SampledL1::new(config, seed).unwrap();
            let sampled: BTreeSet<Item> = stream
                .iter()
                .enumerate()
                .filter(|&(t, _)| state.sampler().keeps(t as u64))
                .map(|(_, x)| x)
                .collect();
            let mut owner = HashMap::new();
            sampled
                .iter()
                .all(|&x| *owner.entry(state.id_hash().eval(x as u64)).or_insert(x) == x)
        })
        .count();
    assert!(perfect >= 95, "{perfect}/100");
}

#[test]
fn doubling_n_moves_only_identity_term() {
    let config = L1Config::new(0.1, 0.2, 1_000_000, 1 << 20);
    let base = SampledL1::new(config, 0).unwrap();
    let doubled = SampledL1::new(
        L1Config {
            universe: 1 << 21,
            ..config
        },
        0,
    )
    .unwrap();
    let l = base.top_capacity() as u64;
    assert_eq!(doubled.space_bits() - base.space_bits(), l);
    assert_eq!(ceil_log2(1 << 21) - ceil_log2(1 << 20), 1);
}
