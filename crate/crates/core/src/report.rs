//! Tabular summaries of certificate families.
//!
//! Decimal columns are annotations; the trend and grouping footer are
//! decided on exact values.

use std::fmt::Write as _;

use serde::Serialize;

use crate::certificate::{pigeonhole_groups, FamilyCertificate};
use crate::error::{Error, Result};
use crate::noncompact::strict_decrease_onset;
use crate::quad::QuadElem;
use crate::rational::rational_decimal;

pub const REPORT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown report format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Row {
    pub k: u32,
    pub target: String,
    pub ratio: String,
    pub distance_midpoint: Option<String>,
    pub systole_upper_bound: Option<String>,
    pub trace_ring_bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassSummary {
    pub bound: String,
    pub size: usize,
    pub ks: Vec<u32>,
}

/// Where the systole bounds start decreasing strictly, by exact comparison of `cosh²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Trend {
    /// Number of certificates carrying a distance interval.
    pub with_distance: usize,
    /// First `k` from which the bound decreases strictly to the end of the list.
    pub strictly_decreasing_from_k: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub ambient_group_key: String,
    pub rows: Vec<Row>,
    pub classes: Vec<ClassSummary>,
    pub single_class: bool,
    pub trend: Trend,
}

pub fn build_report(certs: &[FamilyCertificate]) -> Result<Report> {
    let first = certs.first().ok_or(Error::EmptyInput)?;
    let groups = pigeonhole_groups(certs)?;
    let rows = certs
        .iter()
        .map(|c| Row {
            k: c.k,
            target: c.target_string(),
            ratio: c.cosh_sq.decimal(REPORT_DIGITS),
            distance_midpoint: c.distance.as_ref().map(|d| rational_decimal(&d.midpoint(), REPORT_DIGITS)),
            systole_upper_bound: c.systole_upper_bound.as_ref().map(|d| rational_decimal(&d.hi, REPORT_DIGITS)),
            trace_ring_bound: c.trace_ring_bound.to_string(),
        })
        .collect();
    let classes: Vec<ClassSummary> = groups
        .iter()
        .map(|g| ClassSummary {
            bound: g.bound.to_string(),
            size: g.indices.len(),
            ks: g.indices.iter().map(|&i| certs[i].k).collect(),
        })
        .collect();
    let with: Vec<&FamilyCertificate> = certs.iter().filter(|c| c.distance.is_some()).collect();
    let values: Vec<QuadElem> = with.iter().map(|c| c.cosh_sq.clone()).collect();
    let trend = Trend {
        with_distance: with.len(),
        strictly_decreasing_from_k: strict_decrease_onset(&values).map(|i| with[i].k),
    };
    Ok(Report {
        ambient_group_key: first.ambient_group_key.clone(),
        single_class: classes.len() == 1,
        rows,
        classes,
        trend,
    })
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("-")
}

fn footer(r: &Report, out: &mut String) {
    let _ = writeln!(out, "ambient group: {}", r.ambient_group_key);
    for c in &r.classes {
        let _ = writeln!(out, "trace-ring class {}: {} certificate(s)", c.bound, c.size);
    }
    if r.single_class {
        let _ = writeln!(out, "pigeonhole: all {} certificates share one trace-ring bound", r.rows.len());
    } else {
        let _ = writeln!(out, "pigeonhole: {} classes", r.classes.len());
    }
    match r.trend.strictly_decreasing_from_k {
        Some(k) => {
            let _ = writeln!(out, "systole bound strictly decreasing from k={k} ({} with distance)", r.trend.with_distance);
        }
        None => {
            let _ = writeln!(out, "systole bound: no certificate carries a distance");
        }
    }
}

pub fn render(report: &Report, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
        }
        Format::Csv => {
            out.push_str("k,target,ratio,distance_midpoint,systole_upper_bound,trace_ring_bound\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},\"{}\"",
                    r.k,
                    r.target,
                    r.ratio,
                    r.distance_midpoint.as_deref().unwrap_or(""),
                    r.systole_upper_bound.as_deref().unwrap_or(""),
                    r.trace_ring_bound
                );
            }
        }
        Format::Table => {
            let header = ["k", "target", "ratio", "distance", "systole <=", "trace ring"];
            let cells: Vec<[String; 6]> = report
                .rows
                .iter()
                .map(|r| {
                    [
                        r.k.to_string(),
                        r.target.clone(),
                        r.ratio.clone(),
                        opt(&r.distance_midpoint).to_string(),
                        opt(&r.systole_upper_bound).to_string(),
                        r.trace_ring_bound.clone(),
                    ]
                })
                .collect();
            let mut widths = header.map(str::len);
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cols: Vec<&str>| {
                cols.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(header.to_vec()));
            for row in &cells {
                let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
            }
            out.push('\n');
            footer(report, &mut out);
        }
    }
    out
}

pub fn report(certs: &[FamilyCertificate], format: Format) -> Result<String> {
    Ok(render(&build_report(certs)?, format))
}
