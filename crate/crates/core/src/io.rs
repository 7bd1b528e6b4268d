//! Artifact formats: sample CSV, grid CSV and JSON documents with a schema
//! version. Output is a pure function of the inputs (no timestamps, no
//! thread counts), so reruns can be compared byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{Record, SampleSet, Summary};
use crate::rng;
use crate::stats::PValueGrid;

pub const SCHEMA_VERSION: u32 = 1;

/// Samples as CSV with header `rep,n,L,D`.
pub fn write_samples_csv<W: Write>(samples: &SampleSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &samples.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(input: R) -> Result<Vec<Record>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["rep", "n", "L", "D"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header rep,n,L,D, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn samples_csv_string(samples: &SampleSet) -> Result<String> {
    let mut buf = Vec::new();
    write_samples_csv(samples, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummaryDoc {
    pub schema_version: u32,
    pub rng: String,
    pub master_seed: u64,
    pub config: crate::montecarlo::ExperimentConfig,
    pub summary_l: Summary,
    pub summary_d: Summary,
}

impl SampleSummaryDoc {
    pub fn new(samples: &SampleSet) -> Self {
        SampleSummaryDoc {
            schema_version: SCHEMA_VERSION,
            rng: rng::ALGORITHM.into(),
            master_seed: samples.config.master_seed,
            config: samples.config.clone(),
            summary_l: samples.summary_l,
            summary_d: samples.summary_d,
        }
    }
}

#[derive(Serialize)]
struct GridRow {
    sigma1: f64,
    sigma2: f64,
    #[serde(rename = "avg_p_L")]
    avg_p_l: Option<f64>,
    #[serde(rename = "neglog_L")]
    neglog_l: Option<f64>,
    #[serde(rename = "avg_p_D")]
    avg_p_d: Option<f64>,
    #[serde(rename = "neglog_D")]
    neglog_d: Option<f64>,
}

/// Grid as CSV, one row per cell, row-major in `sigma1`; invalid cells have
/// empty fields.
pub fn write_grid_csv<W: Write>(grid: &PValueGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in grid.cells.iter().flatten() {
        w.serialize(GridRow {
            sigma1: c.sigma1,
            sigma2: c.sigma2,
            avg_p_l: c.avg_p_l,
            neglog_l: c.neglog_l,
            avg_p_d: c.avg_p_d,
            neglog_d: c.neglog_d,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn grid_csv_string(grid: &PValueGrid) -> Result<String> {
    let mut buf = Vec::new();
    write_grid_csv(grid, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    pub schema_version: u32,
    pub rng: String,
    pub grid: PValueGrid,
}

impl GridDoc {
    pub fn new(grid: &PValueGrid) -> Self {
        GridDoc {
            schema_version: SCHEMA_VERSION,
            rng: rng::ALGORITHM.into(),
            grid: grid.clone(),
        }
    }
}

/// Record of one command invocation and the files it wrote.
///
/// `parameters` holds the fully resolved configuration as `key = value`
/// strings; feeding them back as a config file reproduces the outputs.
/// `wall_clock_seconds` is the only field that varies between reruns.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub master_seed: Option<u64>,
    pub rng: String,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            rng: rng::ALGORITHM.into(),
            ..RunManifest::default()
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}
