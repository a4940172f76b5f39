//! Plot-ready CSV.
//!
//! Columns: `<axis>,strategy,metric,value,std_err,n_trials,seed`. The first
//! column is named after the swept parameter. `strategy` carries the series
//! label, e.g. `suboptimal|N=10`. Analytic curves have `std_err = 0` and
//! `n_trials = 0`. Floats use Rust's shortest round-trip formatting, so equal
//! values always print identically.

use std::io::Write;
use std::path::Path;

use crate::error::SimError;
use crate::montecarlo::PerformanceEstimate;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis_value: f64,
    pub series: String,
    pub metric: String,
    pub value: f64,
    pub std_err: f64,
    pub n_trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub axis: String,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(axis: impl Into<String>) -> Self {
        Self {
            axis: axis.into(),
            rows: Vec::new(),
        }
    }

    pub fn push_estimate(
        &mut self,
        axis_value: f64,
        series: impl Into<String>,
        e: &PerformanceEstimate,
    ) {
        self.rows.push(Row {
            axis_value,
            series: series.into(),
            metric: e.metric.name().to_string(),
            value: e.value,
            std_err: e.std_err,
            n_trials: e.n_trials,
            seed: e.master_seed,
        });
    }

    /// A Monte Carlo quantity that is not one of the two standard metrics.
    #[allow(clippy::too_many_arguments)]
    pub fn push_mean(
        &mut self,
        axis_value: f64,
        series: impl Into<String>,
        metric: &str,
        value: f64,
        std_err: f64,
        n_trials: u64,
        seed: u64,
    ) {
        self.rows.push(Row {
            axis_value,
            series: series.into(),
            metric: metric.to_string(),
            value,
            std_err,
            n_trials,
            seed,
        });
    }

    pub fn push_analytic(
        &mut self,
        axis_value: f64,
        series: impl Into<String>,
        metric: &str,
        value: f64,
    ) {
        self.push_mean(axis_value, series, metric, value, 0.0, 0, 0);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), SimError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            self.axis.as_str(),
            "strategy",
            "metric",
            "value",
            "std_err",
            "n_trials",
            "seed",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.axis_value.to_string(),
                r.series.clone(),
                r.metric.clone(),
                r.value.to_string(),
                r.std_err.to_string(),
                r.n_trials.to_string(),
                r.seed.to_string(),
            ])?;
        }
        w.flush().map_err(|e| SimError::Csv(e.into()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, SimError> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_file(&self, path: &Path) -> Result<(), SimError> {
        let io_err = |e| SimError::Io {
            path: path.display().to_string(),
            source: e,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        self.write(std::io::BufWriter::new(file))
    }

    /// Rows of one series and metric, in insertion order.
    pub fn series<'a>(
        &'a self,
        series: &'a str,
        metric: &'a str,
    ) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.series == series && r.metric == metric)
    }
}
