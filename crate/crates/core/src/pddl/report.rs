//! Result tables with one "without design" and one "with design" row per run.

use std::fmt::Write;
use std::str::FromStr;

use crate::design::{ConfigEvaluation, SearchOutcome};

pub const REPORT_HEADER: [&str; 9] = [
    "config",
    "design_size",
    "inexplicability",
    "plan_cost",
    "total_cost",
    "pct_diff_inexp",
    "pct_diff_cost",
    "pct_diff_total",
    "time_secs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub config: String,
    pub design_size: usize,
    /// Longitudinal inexplicability, `f_T · E[IE]`.
    pub inexplicability: f64,
    /// Expected robot plan cost per task.
    pub plan_cost: f64,
    pub total_cost: f64,
    pub pct_diff_inexp: f64,
    pub pct_diff_cost: f64,
    pub pct_diff_total: f64,
    pub time_secs: f64,
}

/// Percentage change from `before` to `after`.
pub fn pct_diff(before: f64, after: f64) -> f64 {
    if before == after {
        0.0
    } else if before.is_infinite() {
        -100.0
    } else if before == 0.0 || after.is_infinite() {
        f64::INFINITY
    } else {
        100.0 * (after - before) / before
    }
}

fn row(config: String, e: &ConfigEvaluation, base: &ConfigEvaluation, time_secs: f64) -> ReportRow {
    ReportRow {
        config,
        design_size: e.design.len(),
        inexplicability: e.longitudinal_ie,
        plan_cost: e.expected_robot_cost,
        total_cost: e.objective,
        pct_diff_inexp: pct_diff(base.longitudinal_ie, e.longitudinal_ie),
        pct_diff_cost: pct_diff(base.expected_robot_cost, e.expected_robot_cost),
        pct_diff_total: pct_diff(base.objective, e.objective),
        time_secs,
    }
}

/// The `label:without` and `label:with` rows for one search.
pub fn report_rows(label: &str, outcome: &SearchOutcome) -> [ReportRow; 2] {
    let t = outcome.elapsed.as_secs_f64();
    [
        row(
            format!("{label}:without"),
            &outcome.baseline,
            &outcome.baseline,
            t,
        ),
        row(
            format!("{label}:with"),
            &outcome.evaluation,
            &outcome.baseline,
            t,
        ),
    ]
}

fn fields(r: &ReportRow, float: impl Fn(f64) -> String) -> [String; 9] {
    [
        r.config.clone(),
        r.design_size.to_string(),
        float(r.inexplicability),
        float(r.plan_cost),
        float(r.total_cost),
        float(r.pct_diff_inexp),
        float(r.pct_diff_cost),
        float(r.pct_diff_total),
        float(r.time_secs),
    ]
}

pub fn write_report(rows: &[ReportRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(REPORT_HEADER).expect("in-memory write");
            for r in rows {
                w.write_record(fields(r, |x| x.to_string()))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
        ReportFormat::Markdown => {
            let mut s = format!("| {} |\n", REPORT_HEADER.join(" | "));
            let _ = writeln!(s, "|{}", "---|".repeat(REPORT_HEADER.len()));
            for r in rows {
                let _ = writeln!(s, "| {} |", fields(r, |x| format!("{x:.4}")).join(" | "));
            }
            s
        }
    }
}

/// Reads rows written by [`write_report`] in CSV format.
pub fn read_report_csv(text: &str) -> Result<Vec<ReportRow>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if header != REPORT_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let f = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|e| format!("{}: {e}", REPORT_HEADER[i]))
        };
        out.push(ReportRow {
            config: rec[0].to_string(),
            design_size: rec[1].parse().map_err(|e| format!("design_size: {e}"))?,
            inexplicability: f(2)?,
            plan_cost: f(3)?,
            total_cost: f(4)?,
            pct_diff_inexp: f(5)?,
            pct_diff_cost: f(6)?,
            pct_diff_total: f(7)?,
            time_secs: f(8)?,
        });
    }
    Ok(out)
}
