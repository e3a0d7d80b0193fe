//! CSV persistence for trajectories and sweep tables.

use std::io::{BufRead, Write};

use super::experiment::{Record, Trajectory};
use super::sweep::SweepResult;
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: &str = "step,distance,payoff";

const SIGNIFICANT_DIGITS: i32 = 15;

/// Plain decimal rendering with 15 significant digits. Values too large or
/// too small for a readable decimal fall back to exponent notation.
pub fn format_decimal(value: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    if value == 0.0 {
        return format!("{:.*}", (SIGNIFICANT_DIGITS - 1) as usize, 0.0);
    }
    let exponent = value.abs().log10().floor() as i32;
    if !(-30..=30).contains(&exponent) {
        return format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, value);
    }
    let decimals = (SIGNIFICANT_DIGITS - 1 - exponent).max(0) as usize;
    format!("{value:.decimals$}")
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{}",
                r.step,
                format_decimal(r.distance),
                format_decimal(r.payoff)
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses a trajectory CSV. Errors carry the 1-based line number. The
    /// digest of a parsed trajectory is `label`.
    pub fn read_csv<R: BufRead>(input: R, label: &str) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.ok_or(Error::MalformedCsv {
            row: 1,
            reason: "empty file".into(),
        })?;
        if header.trim() != TRAJECTORY_HEADER {
            return Err(Error::MalformedCsv {
                row: 1,
                reason: format!("expected header `{TRAJECTORY_HEADER}`"),
            });
        }
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = i + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| Error::MalformedCsv { row, reason };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            }
            let step = fields[0].parse::<usize>().map_err(|e| bad(format!("step: {e}")))?;
            let distance = fields[1].parse::<f64>().map_err(|e| bad(format!("distance: {e}")))?;
            let payoff = fields[2].parse::<f64>().map_err(|e| bad(format!("payoff: {e}")))?;
            if let Some(prev) = records.last().map(|r: &Record| r.step) {
                if step <= prev {
                    return Err(bad(format!("step {step} does not increase past {prev}")));
                }
            }
            records.push(Record { step, distance, payoff });
        }
        if records.is_empty() {
            return Err(Error::MalformedCsv {
                row: 2,
                reason: "no records".into(),
            });
        }
        let diverged = records
            .last()
            .is_some_and(|r| r.distance.is_nan() || r.distance > super::DIVERGENCE_THRESHOLD);
        Trajectory::from_records(records, label.to_string(), diverged)
    }
}

impl SweepResult {
    /// Header `axis,col1,col2,...`, then one row per swept value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let escape = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let header: Vec<String> = std::iter::once(&self.axis)
            .chain(&self.column_labels)
            .map(|s| escape(s))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let cells: Vec<String> = std::iter::once(escape(label))
                .chain(row.iter().map(|&v| format_decimal(v)))
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}
