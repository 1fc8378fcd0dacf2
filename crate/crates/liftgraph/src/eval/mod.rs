//! Benchmark records and comparison reports.
//!
//! A [`RunRecord`] captures what one end-to-end run produced: the method
//! used, the size of the graph it actually solved, wall-clock seconds,
//! an analytic memory estimate, the rounded labeling carried back to the
//! full pixel grid, and the energy of that labeling *on the full grid* —
//! so records for different graph constructions are directly comparable.
//! [`compare`] turns a (baseline, run) pair into one [`ReportRow`] of
//! relative figures, and [`Report`] serializes rows as CSV.

mod harness;
mod metrics;

pub use harness::{build_partition, execute_run, run_on_partition, MethodSpec};
pub use metrics::{dice, psnr, ssim};

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Which graph construction a run used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    /// Full pixel grid (the baseline).
    Full,
    /// Regular block subsampling.
    Grid,
    /// Color-and-position clustering.
    Slic,
    /// Piecewise-constant cut pursuit.
    L0cp,
}

impl MethodTag {
    /// Stable lower-case name used in reports and file names.
    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Full => "full",
            MethodTag::Grid => "grid",
            MethodTag::Slic => "slic",
            MethodTag::L0cp => "l0cp",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything one benchmark run produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Graph construction used.
    pub method: MethodTag,
    /// Number of nodes in the graph that was solved.
    pub nodes: usize,
    /// Wall-clock seconds spent constructing the graph plus solving it.
    pub seconds: f64,
    /// Analytic estimate of peak working-set bytes (major arrays only).
    pub memory_bytes: u64,
    /// Energy of the rounded labeling, evaluated on the full pixel grid.
    pub energy: f64,
    /// Rounded labeling carried back to the full grid, row-major.
    pub labels: Vec<u32>,
    /// Full-grid width in pixels.
    pub width: usize,
    /// Full-grid height in pixels.
    pub height: usize,
    /// Number of labels in the underlying problem.
    pub label_count: usize,
    /// Coupling weight the problem was solved with.
    pub lambda: f64,
}

impl RunRecord {
    fn check_comparable(&self, other: &RunRecord) -> Result<()> {
        if self.width != other.width
            || self.height != other.height
            || self.label_count != other.label_count
        {
            return Err(Error::dims(format!(
                "runs solve different problems: {}x{} with {} labels vs {}x{} with {} labels",
                self.width,
                self.height,
                self.label_count,
                other.width,
                other.height,
                other.label_count
            )));
        }
        if self.lambda != other.lambda {
            return Err(Error::invalid(format!(
                "runs use different coupling weights: {} vs {}",
                self.lambda, other.lambda
            )));
        }
        Ok(())
    }
}

/// One comparison row: a run measured against a baseline run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// Graph construction of the measured run.
    pub method: MethodTag,
    /// Nodes in the measured run's graph.
    pub nodes: usize,
    /// Node count relative to the baseline: `M_run / M_baseline`.
    pub reduction_rate: f64,
    /// Fraction of baseline wall-clock saved: `1 − t_run / t_baseline`.
    pub time_saved: f64,
    /// Memory estimate of the measured run.
    pub memory_bytes: u64,
    /// Full-grid energy of the measured run's rounded labeling.
    pub energy: f64,
    /// Signed relative energy change: `(E_run − E_baseline) / |E_baseline|`.
    pub energy_offset: f64,
}

/// Measure `run` against `baseline`.
///
/// Both records must describe the same problem (identical grid shape,
/// label count, and coupling weight). Comparing a record against itself
/// yields a reduction rate of 1, zero time saved, and zero offset.
pub fn compare(baseline: &RunRecord, run: &RunRecord) -> Result<ReportRow> {
    baseline.check_comparable(run)?;
    if baseline.nodes == 0 || baseline.seconds <= 0.0 || baseline.energy == 0.0 {
        return Err(Error::invalid(format!(
            "baseline is degenerate: {} nodes, {} s, energy {}",
            baseline.nodes, baseline.seconds, baseline.energy
        )));
    }
    Ok(ReportRow {
        method: run.method,
        nodes: run.nodes,
        reduction_rate: run.nodes as f64 / baseline.nodes as f64,
        time_saved: 1.0 - run.seconds / baseline.seconds,
        memory_bytes: run.memory_bytes,
        energy: run.energy,
        energy_offset: (run.energy - baseline.energy) / baseline.energy.abs(),
    })
}

/// A set of comparison rows serializable as CSV.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Rows in presentation order.
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Header line of [`Report::to_csv`].
    pub const CSV_HEADER: &'static str =
        "method,nodes,reduction_rate,time_saved,memory_bytes,energy,energy_offset";

    /// Render the rows as CSV, header first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.method,
                row.nodes,
                row.reduction_rate,
                row.time_saved,
                row.memory_bytes,
                row.energy,
                row.energy_offset
            ));
        }
        out
    }

    /// Write [`Report::to_csv`] to `path`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        file.write_all(self.to_csv().as_bytes())?;
        file.flush()?;
        Ok(())
    }
}
