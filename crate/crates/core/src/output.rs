//! Result tables: CSV and JSON encodings of [`OutputRow`].
//!
//! The CSV header is exactly
//! `n,k,l,p,m,r,mean_cost,cost_stderr,mean_pairwise,pairwise_stderr,mean_dist_to_opt,censored,total_runs,master_seed`
//! with `\n` line endings. Floats use the shortest representation that reads
//! back to the same `f64`; undefined statistics are written as empty fields
//! (CSV) or `null` (JSON).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::{Census, EnsembleResult, EnsembleSpec};

pub const CSV_HEADER: &str = "n,k,l,p,m,r,mean_cost,cost_stderr,mean_pairwise,pairwise_stderr,mean_dist_to_opt,censored,total_runs,master_seed";

pub const CENSUS_HEADER: &str = "n,k,m,mean,min,max";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub p: f64,
    pub m: usize,
    pub r: usize,
    pub mean_cost: Option<f64>,
    pub cost_stderr: Option<f64>,
    pub mean_pairwise: Option<f64>,
    pub pairwise_stderr: Option<f64>,
    pub mean_dist_to_opt: Option<f64>,
    pub censored: usize,
    pub total_runs: usize,
    pub master_seed: u64,
}

fn defined(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

impl OutputRow {
    pub fn new(spec: &EnsembleSpec, result: &EnsembleResult) -> Self {
        OutputRow {
            n: spec.n,
            k: spec.k,
            l: spec.l,
            p: spec.p,
            m: spec.landscapes,
            r: spec.runs_per_landscape,
            mean_cost: defined(result.mean_cost),
            cost_stderr: defined(result.cost_stderr),
            mean_pairwise: defined(result.mean_pairwise),
            pairwise_stderr: defined(result.pairwise_stderr),
            mean_dist_to_opt: defined(result.mean_dist_to_opt),
            censored: result.censored,
            total_runs: result.total_runs,
            master_seed: spec.master_seed,
        }
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_csv<W: Write>(rows: &[OutputRow], w: W) -> Result<()> {
    let mut writer = csv_writer(w);
    if rows.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a table written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<OutputRow>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(r);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(crate::error::Error::parse(
            1,
            format!("unexpected header {header:?}"),
        ));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(Into::into))
        .collect()
}

pub fn write_json<W: Write>(rows: &[OutputRow], mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<OutputRow>> {
    Ok(serde_json::from_reader(r)?)
}

pub fn write_census_csv<W: Write>(n: usize, k: usize, census: &Census, w: W) -> Result<()> {
    let mut writer = csv_writer(w);
    writer.write_record(CENSUS_HEADER.split(','))?;
    writer.serialize((
        n,
        k,
        census.counts.len(),
        census.mean,
        census.min,
        census.max,
    ))?;
    writer.flush()?;
    Ok(())
}
