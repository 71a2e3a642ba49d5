//! Benchmark records and their CSV, JSON and plain-text renderings.

use std::fmt::{self, Write as _};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::scenario::Scenario;
use crate::workload::ARBITRARY_LENGTH_DISTRIBUTION;

/// Column order of the CSV report.
pub const CSV_HEADER: &str =
    "scenario,parameter,method,workers,group_size,median_ms,total_voxels,mvps";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sequential,
    Batch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Method::Sequential => "sequential",
            Method::Batch => "batch",
        })
    }
}

/// One measured cell: a parameter point run with one method and configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub scenario: String,
    pub parameter: u64,
    pub method: Method,
    pub workers: usize,
    pub group_size: usize,
    pub median_ms: f64,
    pub total_voxels: u64,
    pub mvps: f64,
}

/// Median per-phase times of the batch method at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub parameter: u64,
    pub workers: usize,
    pub group_size: usize,
    pub preprocess_ms: f64,
    pub kernel_ms: f64,
    pub assemble_ms: f64,
    pub emitted_voxels: u64,
}

/// Mega-voxels per second.
pub fn compute_mvps(total_voxels: u64, elapsed_ms: f64) -> Result<f64> {
    if !(elapsed_ms.is_finite() && elapsed_ms > 0.0) {
        return Err(BenchError::InvalidMeasurement(elapsed_ms));
    }
    Ok(total_voxels as f64 / (elapsed_ms / 1000.0) / 1e6)
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub scenario: Scenario,
    pub arbitrary_length_distribution: &'static str,
    pub hardware_threads: usize,
}

impl ReportMetadata {
    pub fn new(scenario: Scenario) -> Self {
        ReportMetadata {
            scenario,
            arbitrary_length_distribution: ARBITRARY_LENGTH_DISTRIBUTION,
            hardware_threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport<'a> {
    pub metadata: &'a ReportMetadata,
    pub records: &'a [BenchRecord],
    pub phases: &'a [PhaseRecord],
}

pub fn write_json<W: Write>(
    mut out: W,
    metadata: &ReportMetadata,
    records: &[BenchRecord],
    phases: &[PhaseRecord],
) -> Result<()> {
    serde_json::to_writer_pretty(
        &mut out,
        &JsonReport {
            metadata,
            records,
            phases,
        },
    )?;
    writeln!(out)?;
    Ok(())
}

/// Fixed-width table for terminals.
pub fn format_table(records: &[BenchRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:>12} {:<10} {:>7} {:>6} {:>12} {:>14} {:>10}",
        "scenario", "parameter", "method", "workers", "group", "median_ms", "total_voxels", "MVps"
    );
    for r in records {
        let _ = writeln!(
            s,
            "{:<12} {:>12} {:<10} {:>7} {:>6} {:>12.3} {:>14} {:>10.2}",
            r.scenario,
            r.parameter,
            r.method,
            r.workers,
            r.group_size,
            r.median_ms,
            r.total_voxels,
            r.mvps
        );
    }
    s
}
