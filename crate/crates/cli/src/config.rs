use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use hh_core::gen::{self, SpikeOrder};
use hh_core::{io, F2Mode, HHParams, SpikeSpec, Stream, ZipfSpec};
use serde::{Deserialize, Serialize};

use crate::output::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Mg,
    L1,
    Cs,
    Sieve,
}

impl Algo {
    /// Whether the algorithm is scored against the l2 truth sets.
    pub fn is_l2(self) -> bool {
        matches!(self, Algo::Cs | Algo::Sieve)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Mg => "mg",
            Algo::L1 => "l1",
            Algo::Cs => "cs",
            Algo::Sieve => "sieve",
        })
    }
}

impl FromStr for Algo {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        <Algo as ValueEnum>::from_str(s, true)
            .map_err(|_| anyhow!("unknown algo {s:?} (expected mg, l1, cs or sieve)"))
    }
}

/// Where a trial's stream comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Zipf {
        s: f64,
    },
    Spike {
        star: u32,
        f_star: u64,
        order: SpikeOrder,
    },
    Uniform,
    File(PathBuf),
}

impl Workload {
    /// Builds the named generator, filling spike defaults from `m`.
    pub fn named(name: &str, m: u64) -> Result<Self> {
        Ok(match name {
            "zipf" => Workload::Zipf { s: 1.1 },
            "spike" => Workload::Spike {
                star: 1,
                f_star: m / 2,
                order: SpikeOrder::Interleaved,
            },
            "uniform" => Workload::Uniform,
            other => bail!("unknown workload {other:?} (expected zipf, spike or uniform)"),
        })
    }

    /// The stream for one seed; file workloads ignore the seed.
    pub fn stream(&self, n: u32, m: u64, seed: u64) -> Result<Stream> {
        Ok(match self {
            Workload::Zipf { s } => ZipfSpec { n, m, s: *s }.generate(seed)?,
            Workload::Spike {
                star,
                f_star,
                order,
            } => SpikeSpec {
                n,
                m,
                star: *star,
                f_star: *f_star,
                order: *order,
            }
            .generate(seed)?,
            Workload::Uniform => gen::uniform(n, m, seed)?,
            Workload::File(path) => io::read_path(path, Some(n))
                .with_context(|| format!("reading {}", path.display()))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub params: HHParams,
    pub n: u32,
    pub m: u64,
    pub workload: Workload,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// CountSketch width; `None` means `ceil(8 / eps^2)`.
    pub cs_buckets: Option<usize>,
    /// CountSketch depth; 0 means `ceil(log2 n) + 1`.
    pub cs_rows: usize,
    pub f2_mode: F2Mode,
}

impl ExperimentConfig {
    pub fn new(
        algo: Algo,
        params: HHParams,
        n: u32,
        m: u64,
        workload: Workload,
        seeds: Vec<u64>,
    ) -> Self {
        Self {
            algo,
            params,
            n,
            m,
            workload,
            seeds,
            output: None,
            format: OutputFormat::Csv,
            cs_buckets: None,
            cs_rows: 0,
            f2_mode: F2Mode::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("at least one seed is required");
        }
        if self.n == 0 {
            bail!("n must be at least 1");
        }
        if self.algo == Algo::Sieve && self.n < 2 {
            bail!("the sieve needs n >= 2");
        }
        if self.cs_buckets == Some(0) {
            bail!("cs_buckets must be at least 1");
        }
        Ok(())
    }

    pub fn buckets(&self) -> usize {
        self.cs_buckets.unwrap_or_else(|| {
            (8.0 / (self.params.epsilon() * self.params.epsilon())).ceil() as usize
        })
    }

    /// Reads a flat `key = value` file. Blank lines and `#` comments are
    /// skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_pairs(&parse_pairs(&text)?)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| pairs.get(k).map(String::as_str);
        let parse = |k: &str| -> Result<Option<f64>> {
            get(k)
                .map(|v| v.parse().with_context(|| format!("{k} = {v:?}")))
                .transpose()
        };
        for key in pairs.keys() {
            if !KEYS.contains(&key.as_str()) {
                bail!("unknown config key {key:?}");
            }
        }
        let algo: Algo = get("algo")
            .ok_or_else(|| anyhow!("config needs algo"))?
            .parse()?;
        let params = HHParams::new(
            parse("epsilon")?.unwrap_or(0.1),
            parse("phi")?.unwrap_or(0.2),
        )?;
        let n = parse_int::<u32>(get("n"), "n")?.unwrap_or(1 << 16);
        let m = parse_int::<u64>(get("m"), "m")?.unwrap_or(100_000);
        let mut workload = match get("input") {
            Some(path) => Workload::File(path.into()),
            None => Workload::named(get("workload").unwrap_or("zipf"), m)?,
        };
        match &mut workload {
            Workload::Zipf { s } => {
                if let Some(v) = parse("zipf_s")? {
                    *s = v;
                }
            }
            Workload::Spike {
                star,
                f_star,
                order,
            } => {
                if let Some(v) = parse_int(get("star"), "star")? {
                    *star = v;
                }
                if let Some(v) = parse_int(get("f_star"), "f_star")? {
                    *f_star = v;
                }
                if let Some(v) = get("order") {
                    *order = v.parse()?;
                }
            }
            _ => {}
        }
        let seeds = parse_seeds(get("seeds").unwrap_or("0"))?;
        let mut config = Self::new(algo, params, n, m, workload, seeds);
        config.output = get("output").map(PathBuf::from);
        if let Some(v) = get("format") {
            config.format = v.parse()?;
        }
        config.cs_buckets = parse_int(get("cs_buckets"), "cs_buckets")?;
        config.cs_rows = parse_int(get("cs_rows"), "cs_rows")?.unwrap_or(0);
        if let Some(v) = get("f2_mode") {
            config.f2_mode = v.parse()?;
        }
        config.validate()?;
        Ok(config)
    }
}

const KEYS: &[&str] = &[
    "algo",
    "epsilon",
    "phi",
    "n",
    "m",
    "workload",
    "zipf_s",
    "star",
    "f_star",
    "order",
    "input",
    "seeds",
    "output",
    "format",
    "cs_buckets",
    "cs_rows",
    "f2_mode",
];

fn parse_int<T: FromStr>(value: Option<&str>, key: &str) -> Result<Option<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value
        .map(|v| {
            v.replace('_', "")
                .parse::<T>()
                .with_context(|| format!("{key} = {v:?}"))
        })
        .transpose()
}

pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
        pairs.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(pairs)
}

/// Accepts `7`, `1,2,5` or a half-open range `0..100`.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .with_context(|| format!("seed range {spec:?}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .with_context(|| format!("seed range {spec:?}"))?;
        if a >= b {
            bail!("empty seed range {spec:?}");
        }
        return Ok((a..b).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse().with_context(|| format!("seed {s:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("3").unwrap(), vec![3]);
        assert_eq!(parse_seeds("1, 4,9").unwrap(), vec![1, 4, 9]);
        assert_eq!(parse_seeds("2..5").unwrap(), vec![2, 3, 4]);
        assert!(parse_seeds("5..5").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn pairs_skip_comments() {
        let p = parse_pairs("# sweep\nalgo = cs\n\n n=1024 \n").unwrap();
        assert_eq!(p["algo"], "cs");
        assert_eq!(p["n"], "1024");
        assert!(parse_pairs("algo cs").is_err());
    }

    #[test]
    fn config_from_pairs() {
        let text = "algo = sieve\nepsilon = 0.05\nphi = 0.25\nn = 4096\nm = 3000\nworkload = spike\nf_star = 900\nseeds = 0..4\nf2_mode = sketch\n";
        let config = ExperimentConfig::from_pairs(&parse_pairs(text).unwrap()).unwrap();
        assert_eq!(config.algo, Algo::Sieve);
        assert_eq!(config.seeds, vec![0, 1, 2, 3]);
        assert_eq!(config.f2_mode, F2Mode::Sketch);
        assert_eq!(
            config.workload,
            Workload::Spike {
                star: 1,
                f_star: 900,
                order: SpikeOrder::Interleaved
            }
        );
        assert_eq!(config.buckets(), 3200);
    }

    #[test]
    fn bad_configs_rejected() {
        let bad = [
            "algo = heap",
            "algo = mg\nepsilon = 0.3\nphi = 0.2",
            "algo = mg\ncolour = red",
            "phi = 0.2",
        ];
        for text in bad {
            assert!(
                ExperimentConfig::from_pairs(&parse_pairs(text).unwrap()).is_err(),
                "{text}"
            );
        }
    }
}
