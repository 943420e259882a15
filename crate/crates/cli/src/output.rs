use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use crate::experiment::MetricsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    /// Header plus one line per row, columns in field order.
    #[default]
    Csv,
    /// One JSON object per line.
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" | "jsonl" => Ok(Self::Json),
            other => bail!("unknown output format {other:?} (expected csv or json)"),
        }
    }
}

pub fn write_rows<W: Write>(
    rows: &[MetricsRow],
    format: OutputFormat,
    mut writer: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            for row in rows {
                w.serialize(row)?;
            }
            if rows.is_empty() {
                w.write_record(CSV_HEADER)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            for row in rows {
                serde_json::to_writer(&mut writer, row)?;
                writer.write_all(b"\n")?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}

const CSV_HEADER: [&str; 7] = [
    "seed",
    "recall_must",
    "false_forbidden",
    "max_abs_err",
    "space_bits_ideal",
    "space_bits_actual",
    "wall_time_ms",
];

pub fn read_rows<R: Read>(format: OutputFormat, reader: R) -> Result<Vec<MetricsRow>> {
    match format {
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_reader(reader);
            if r.headers()? != CSV_HEADER.as_slice() {
                bail!("unexpected CSV header {:?}", r.headers()?);
            }
            r.deserialize().map(|row| Ok(row?)).collect()
        }
        OutputFormat::Json => BufReader::new(reader)
            .lines()
            .enumerate()
            .filter(|(_, line)| !matches!(line, Ok(l) if l.trim().is_empty()))
            .map(|(k, line)| {
                serde_json::from_str(&line?).with_context(|| format!("line {}", k + 1))
            })
            .collect(),
    }
}
