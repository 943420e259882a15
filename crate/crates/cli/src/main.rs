use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use hh_core::io::{self as stream_io, StreamFormat};
use hh_core::space::ceil_log2;
use hh_core::{
    CountSketch, FrequencyProfile, HHParams, L1Config, MisraGries, SampledL1, SieveConfig,
    SieveSpace,
};
use hh_harness::config::{parse_seeds, Workload};
use hh_harness::{aggregate, run_experiment, write_rows, Algo, ExperimentConfig, OutputFormat};

#[derive(Parser)]
#[command(
    name = "hh",
    version,
    about = "Streaming heavy-hitter sketches and their test harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated workload to a stream file.
    Gen(GenArgs),
    /// Run an experiment and write one metrics row per seed.
    Run(RunArgs),
    /// Print the exact truth sets of a stream.
    Truth(TruthArgs),
    /// Print idealized space for n = 2^10, 2^12, ..., 2^20.
    Space(SpaceArgs),
}

#[derive(Args)]
struct WorkloadArgs {
    /// zipf (default), spike or uniform; ignored with --input.
    #[arg(long)]
    workload: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u64>,
    /// Zipf exponent.
    #[arg(long)]
    zipf_s: Option<f64>,
    /// Spike item id.
    #[arg(long)]
    star: Option<u32>,
    /// Spike frequency (default m / 2).
    #[arg(long)]
    f_star: Option<u64>,
    /// interleaved or star_last.
    #[arg(long)]
    order: Option<String>,
    /// Read the stream from a file instead of generating it.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl WorkloadArgs {
    fn given(&self) -> bool {
        self.workload.is_some()
            || self.input.is_some()
            || self.zipf_s.is_some()
            || self.star.is_some()
            || self.f_star.is_some()
            || self.order.is_some()
    }

    fn resolve(&self, m: u64) -> Result<Workload> {
        if let Some(path) = &self.input {
            return Ok(Workload::File(path.clone()));
        }
        let mut workload = Workload::named(self.workload.as_deref().unwrap_or("zipf"), m)?;
        match &mut workload {
            Workload::Zipf { s } => *s = self.zipf_s.unwrap_or(*s),
            Workload::Spike {
                star,
                f_star,
                order,
            } => {
                *star = self.star.unwrap_or(*star);
                *f_star = self.f_star.unwrap_or(*f_star);
                if let Some(o) = &self.order {
                    *order = o.parse()?;
                }
            }
            _ => {}
        }
        Ok(workload)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    workload: WorkloadArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination; `.hhs` or `.bin` selects the binary format.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// A single seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// `7`, `1,2,5` or `0..100`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    cs_buckets: Option<usize>,
    #[arg(long)]
    cs_rows: Option<usize>,
    /// exact or sketch.
    #[arg(long)]
    f2_mode: Option<String>,
    /// Print a summary of the rows to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct TruthArgs {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.2)]
    phi: f64,
    #[command(flatten)]
    workload: WorkloadArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.2)]
    phi: f64,
}

const DEFAULT_N: u32 = 1 << 16;
const DEFAULT_M: u64 = 100_000;

fn run(args: RunArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => {
            let algo = args.algo.context("--algo or --config is required")?;
            let m = args.workload.m.unwrap_or(DEFAULT_M);
            ExperimentConfig::new(
                algo,
                HHParams::new(args.epsilon.unwrap_or(0.1), args.phi.unwrap_or(0.2))?,
                args.workload.n.unwrap_or(DEFAULT_N),
                m,
                args.workload.resolve(m)?,
                vec![0],
            )
        }
    };
    if let Some(algo) = args.algo {
        config.algo = algo;
    }
    if args.epsilon.is_some() || args.phi.is_some() {
        config.params = HHParams::new(
            args.epsilon.unwrap_or(config.params.epsilon()),
            args.phi.unwrap_or(config.params.phi()),
        )?;
    }
    if let Some(n) = args.workload.n {
        config.n = n;
    }
    if let Some(m) = args.workload.m {
        config.m = m;
    }
    if args.config.is_some() && args.workload.given() {
        config.workload = args.workload.resolve(config.m)?;
    }
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    if let Some(spec) = &args.seeds {
        config.seeds = parse_seeds(spec)?;
    }
    if let Some(format) = args.format {
        config.format = format;
    }
    if args.output.is_some() {
        config.output = args.output.clone();
    }
    if args.cs_buckets.is_some() {
        config.cs_buckets = args.cs_buckets;
    }
    if let Some(rows) = args.cs_rows {
        config.cs_rows = rows;
    }
    if let Some(mode) = &args.f2_mode {
        config.f2_mode = mode.parse()?;
    }

    let rows = run_experiment(&config)?;
    match &config.output {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_rows(&rows, config.format, BufWriter::new(file))?;
        }
        None => write_rows(&rows, config.format, io::stdout().lock())?,
    }
    if args.summary {
        let summary = aggregate(&rows)?;
        eprintln!("{}", serde_json::to_string_pretty(&summary)?);
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let n = args.workload.n.unwrap_or(DEFAULT_N);
    let m = args.workload.m.unwrap_or(DEFAULT_M);
    let stream = args.workload.resolve(m)?.stream(n, m, args.seed)?;
    stream_io::write_path(&stream, &args.output, StreamFormat::from_path(&args.output))
        .with_context(|| format!("writing {}", args.output.display()))
}

fn truth(args: TruthArgs) -> Result<()> {
    let n = args.workload.n.unwrap_or(DEFAULT_N);
    let m = args.workload.m.unwrap_or(DEFAULT_M);
    let stream = args.workload.resolve(m)?.stream(n, m, args.seed)?;
    let params = HHParams::new(args.epsilon, args.phi)?;
    let profile = FrequencyProfile::of(&stream);
    let sets = |t: hh_core::TruthSets| {
        serde_json::json!({
            "must": t.must,
            "between": t.between,
            "forbidden_observed": t.forbidden.len(),
        })
    };
    let out = serde_json::json!({
        "m": profile.m(),
        "f2": profile.f2().to_string(),
        "distinct": profile.distinct(),
        "l1": sets(profile.truth_l1(&params)),
        "l2": sets(profile.truth_l2(&params)),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn space(args: SpaceArgs) -> Result<()> {
    let params = HHParams::new(args.epsilon, args.phi)?;
    let sieve = SieveConfig::default();
    let mut out = io::stdout().lock();
    writeln!(out, "n,mg,l1,countsketch,sieve")?;
    for e in (10..=20).step_by(2) {
        let n: u32 = 1 << e;
        let m = n as u64;
        let mg = MisraGries::<u32>::new(params.epsilon())?;
        let l1 = SampledL1::new(L1Config::new(params.epsilon(), params.phi(), m, n), 0)?;
        let buckets = (8.0 / (params.epsilon() * params.epsilon())).ceil() as usize;
        writeln!(
            out,
            "{n},{},{},{},{}",
            MisraGries::<u32>::ideal_bits(mg.capacity(), ceil_log2(m), m),
            l1.space_bits(),
            CountSketch::ideal_bits(buckets, ceil_log2(m) as usize + 1, n, m),
            SieveSpace::idealized_bits(sieve.pairs_for(n), n, m),
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Truth(a) => truth(a),
        Command::Space(a) => space(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
