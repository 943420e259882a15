use std::time::Instant;

use anyhow::{bail, Result};
use hh_core::hash::SeedStream;
use hh_core::space::ceil_log2;
use hh_core::{
    CountSketch, FrequencyProfile, HHReport, IsolatedSieve, IsolationConfig, L1Config, MisraGries,
    SampledL1, SieveConfig, Stream,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algo, ExperimentConfig};

/// Outcome of one seeded trial. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub seed: u64,
    pub recall_must: f64,
    pub false_forbidden: u64,
    pub max_abs_err: f64,
    pub space_bits_ideal: u64,
    pub space_bits_actual: u64,
    pub wall_time_ms: f64,
}

impl MetricsRow {
    /// Full recall of the must set and nothing forbidden.
    pub fn succeeded(&self) -> bool {
        self.recall_must == 1.0 && self.false_forbidden == 0
    }
}

struct Outcome {
    report: HHReport,
    ideal: u64,
    actual: u64,
}

fn run_sketch(
    config: &ExperimentConfig,
    stream: &Stream,
    profile: &FrequencyProfile,
    seed: u64,
) -> Result<Outcome> {
    let n = stream.universe();
    let params = config.params;
    Ok(match config.algo {
        Algo::Mg => {
            let mut mg = MisraGries::with_fraction(params.epsilon_fraction())?;
            for x in stream {
                mg.update(x);
            }
            Outcome {
                report: mg.report(params.phi())?,
                ideal: mg.space_bits(ceil_log2(n as u64).max(1)),
                actual: mg.actual_bits(),
            }
        }
        Algo::L1 => {
            let l1 = L1Config::new(params.epsilon(), params.phi(), stream.len().max(1), n);
            let mut state = SampledL1::new(l1, seed)?;
            for x in stream {
                state.update(x);
            }
            Outcome {
                report: state.report(params.phi())?,
                ideal: state.space_bits(),
                actual: state.actual_bits(),
            }
        }
        Algo::Cs => {
            let mut cs = CountSketch::new(config.buckets(), config.cs_rows, n, seed)?;
            for x in stream {
                cs.insert(x);
            }
            Outcome {
                report: cs.l2_report(&params, profile.f2() as f64),
                ideal: cs.space_bits(),
                actual: cs.actual_bits(),
            }
        }
        Algo::Sieve => {
            let isolation = IsolationConfig {
                sieve: SieveConfig::default().with_f2_mode(config.f2_mode),
                companion_buckets: config.cs_buckets,
                companion_rows: config.cs_rows,
            };
            let mut hh = IsolatedSieve::new(n, params, seed, isolation)?;
            for x in stream {
                hh.update(x);
            }
            let space = hh.space();
            Outcome {
                report: hh.report(),
                ideal: space.idealized,
                actual: space.actual,
            }
        }
    })
}

/// Runs one trial. The workload and the sketch draw independent seeds
/// derived from `seed`.
pub fn run_trial(config: &ExperimentConfig, seed: u64) -> Result<MetricsRow> {
    let mut seeds = SeedStream::new(seed);
    let stream_seed = seeds.next_seed();
    let sketch_seed = seeds.next_seed();
    let stream = config.workload.stream(config.n, config.m, stream_seed)?;
    let profile = FrequencyProfile::of(&stream);
    let truth = if config.algo.is_l2() {
        profile.truth_l2(&config.params)
    } else {
        profile.truth_l1(&config.params)
    };
    let start = Instant::now();
    let outcome = run_sketch(config, &stream, &profile, sketch_seed)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = &outcome.report;
    let max_abs_err = report
        .entries()
        .iter()
        .map(|&(i, est)| (est - profile.count(i) as f64).abs())
        .fold(0.0, f64::max);
    Ok(MetricsRow {
        seed,
        recall_must: truth.recall(report.items()),
        false_forbidden: truth.forbidden_hits(report.items()) as u64,
        max_abs_err,
        space_bits_ideal: outcome.ideal,
        space_bits_actual: outcome.actual,
        wall_time_ms,
    })
}

/// One row per seed, in the order the seeds were given.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    config.validate()?;
    config
        .seeds
        .par_iter()
        .map(|&seed| run_trial(config, seed))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles.
    fn of(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let rank =
            |q: f64| values[((q * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1];
        Self {
            min: values[0],
            p50: rank(0.5),
            p90: rank(0.9),
            max: values[values.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub success_fraction: f64,
    pub mean_recall_must: f64,
    pub mean_false_forbidden: f64,
    pub mean_max_abs_err: f64,
    pub mean_space_bits_ideal: f64,
    pub mean_space_bits_actual: f64,
    pub mean_wall_time_ms: f64,
    pub max_abs_err: Quantiles,
    pub wall_time_ms: Quantiles,
}

pub fn aggregate(rows: &[MetricsRow]) -> Result<Summary> {
    if rows.is_empty() {
        bail!("cannot aggregate zero rows");
    }
    let k = rows.len() as f64;
    let mean = |f: fn(&MetricsRow) -> f64| rows.iter().map(f).sum::<f64>() / k;
    Ok(Summary {
        trials: rows.len(),
        success_fraction: rows.iter().filter(|r| r.succeeded()).count() as f64 / k,
        mean_recall_must: mean(|r| r.recall_must),
        mean_false_forbidden: mean(|r| r.false_forbidden as f64),
        mean_max_abs_err: mean(|r| r.max_abs_err),
        mean_space_bits_ideal: mean(|r| r.space_bits_ideal as f64),
        mean_space_bits_actual: mean(|r| r.space_bits_actual as f64),
        mean_wall_time_ms: mean(|r| r.wall_time_ms),
        max_abs_err: Quantiles::of(rows.iter().map(|r| r.max_abs_err).collect()),
        wall_time_ms: Quantiles::of(rows.iter().map(|r| r.wall_time_ms).collect()),
    })
}
