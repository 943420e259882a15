use hh_core::gen::SpikeOrder;
use hh_core::HHParams;
use hh_harness::{
    aggregate, read_rows, run_experiment, write_rows, Algo, ExperimentConfig, MetricsRow,
    OutputFormat, Workload,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn row(seed: u64, recall: f64, forbidden: u64) -> MetricsRow {
    MetricsRow {
        seed,
        recall_must: recall,
        false_forbidden: forbidden,
        max_abs_err: 12.5,
        space_bits_ideal: 640,
        space_bits_actual: 2048,
        wall_time_ms: 1.25,
    }
}

fn arb_row() -> impl Strategy<Value = MetricsRow> {
    (
        any::<u64>(),
        0.0..=1.0f64,
        0u64..1000,
        0.0..1e9f64,
        any::<u64>(),
        any::<u64>(),
        0.0..1e6f64,
    )
        .prop_map(
            |(
                seed,
                recall_must,
                false_forbidden,
                max_abs_err,
                space_bits_ideal,
                space_bits_actual,
                wall_time_ms,
            )| {
                MetricsRow {
                    seed,
                    recall_must,
                    false_forbidden,
                    max_abs_err,
                    space_bits_ideal,
                    space_bits_actual,
                    wall_time_ms,
                }
            },
        )
}

proptest! {
    #[test]
    fn outputs_round_trip(rows in prop::collection::vec(arb_row(), 0..20)) {
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let mut buf = Vec::new();
            write_rows(&rows, format, &mut buf).unwrap();
            prop_assert_eq!(&read_rows(format, buf.as_slice()).unwrap(), &rows);
        }
    }
}

#[test]
fn csv_columns_follow_field_order() {
    let mut buf = Vec::new();
    write_rows(&[row(3, 1.0, 0)], OutputFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,recall_must,false_forbidden,max_abs_err,space_bits_ideal,space_bits_actual,wall_time_ms"
    );
    assert_eq!(lines.next().unwrap(), "3,1.0,0,12.5,640,2048,1.25");
}

#[test]
fn json_is_one_object_per_line() {
    let mut buf = Vec::new();
    write_rows(
        &[row(1, 1.0, 0), row(2, 0.5, 1)],
        OutputFormat::Json,
        &mut buf,
    )
    .unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 2);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["seed"], 1);
    assert_eq!(first["space_bits_actual"], 2048);
}

#[test]
fn mg_rows_are_always_perfect() {
    let workloads = [
        Workload::Zipf { s: 1.2 },
        Workload::Uniform,
        Workload::Spike {
            star: 7,
            f_star: 900,
            order: SpikeOrder::StarLast,
        },
    ];
    for workload in workloads {
        let config = ExperimentConfig::new(
            Algo::Mg,
            HHParams::new(0.05, 0.1).unwrap(),
            5_000,
            3_000,
            workload,
            (0..20).collect(),
        );
        for r in run_experiment(&config).unwrap() {
            assert_eq!(r.recall_must, 1.0);
            assert_eq!(r.false_forbidden, 0);
        }
    }
}

#[test]
fn empty_stream_rows() {
    for algo in [Algo::Mg, Algo::L1, Algo::Cs, Algo::Sieve] {
        let config = ExperimentConfig::new(
            algo,
            HHParams::new(0.1, 0.2).unwrap(),
            1 << 10,
            0,
            Workload::Uniform,
            vec![0, 1],
        );
        let rows = run_experiment(&config).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert_eq!(r.max_abs_err, 0.0, "{algo}");
            assert_eq!(r.recall_must, 1.0);
            assert_eq!(r.false_forbidden, 0);
        }
    }
}

#[test]
fn rows_come_back_in_seed_order_and_repeat() {
    let seeds = vec![9, 2, 7, 4];
    let config = ExperimentConfig::new(
        Algo::L1,
        HHParams::new(0.1, 0.3).unwrap(),
        5_000,
        20_000,
        Workload::Zipf { s: 1.3 },
        seeds.clone(),
    );
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    assert_eq!(a.iter().map(|r| r.seed).collect::<Vec<_>>(), seeds);
    let strip = |rows: Vec<MetricsRow>| {
        rows.into_iter()
            .map(|r| MetricsRow {
                wall_time_ms: 0.0,
                ..r
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn countsketch_recovers_spike() {
    let mut config = ExperimentConfig::new(
        Algo::Cs,
        HHParams::new(0.1, 0.2).unwrap(),
        1 << 12,
        3_000,
        Workload::Spike {
            star: 77,
            f_star: 1_000,
            order: SpikeOrder::Interleaved,
        },
        (0..100).collect(),
    );
    config.cs_buckets = Some(256);
    config.cs_rows = 13;
    let summary = aggregate(&run_experiment(&config).unwrap()).unwrap();
    assert!(summary.mean_recall_must >= 0.95, "{summary:?}");
}

#[test]
fn aggregate_single_row() {
    let r = row(5, 0.5, 2);
    let s = aggregate(std::slice::from_ref(&r)).unwrap();
    assert_eq!(s.trials, 1);
    assert_eq!(s.mean_recall_must, r.recall_must);
    assert_eq!(s.mean_false_forbidden, r.false_forbidden as f64);
    assert_eq!(s.mean_max_abs_err, r.max_abs_err);
    assert_eq!(s.mean_space_bits_ideal, r.space_bits_ideal as f64);
    assert_eq!(s.mean_space_bits_actual, r.space_bits_actual as f64);
    assert_eq!(s.mean_wall_time_ms, r.wall_time_ms);
    assert_eq!(s.success_fraction, 0.0);
    assert_eq!(s.max_abs_err.min, s.max_abs_err.max);
}

#[test]
fn aggregate_identical_rows() {
    let rows = vec![row(0, 1.0, 0); 7];
    let s = aggregate(&rows).unwrap();
    assert_eq!(s.success_fraction, 1.0);
    let q = s.max_abs_err;
    assert_eq!((q.min, q.p50, q.p90, q.max), (12.5, 12.5, 12.5, 12.5));
}

#[test]
fn aggregate_rejects_empty() {
    assert!(aggregate(&[]).is_err());
}

#[test]
fn bernoulli_success_fraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let rows: Vec<MetricsRow> = (0..100)
        .map(|k| {
            if rng.gen_bool(0.9) {
                row(k, 1.0, 0)
            } else {
                row(k, 1.0, 1)
            }
        })
        .collect();
    let s = aggregate(&rows).unwrap();
    // 0.9 +- 2.576 * sqrt(0.9 * 0.1 / 100)
    let half = 2.576 * (0.09f64 / 100.0).sqrt();
    assert!(
        (s.success_fraction - 0.9).abs() <= half,
        "{}",
        s.success_fraction
    );
}
