use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use super::{io_error, Fixture, FixtureFiles, HarnessError};
use crate::design::{search, SearchOptions, SearchOutcome};
use crate::pddl::{report_rows, write_report, ReportFormat, ReportRow};

/// A sweep over `(alpha, horizon)` for every fixture. Unset weights and
/// `gamma` come from each fixture's design file.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub fixtures: Vec<FixtureFiles>,
    pub alphas: Vec<f64>,
    pub horizons: Vec<u32>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub options: SearchOptions,
    /// Sweep cells evaluated concurrently; 0 uses rayon's default.
    pub workers: usize,
    pub output_dir: Option<PathBuf>,
    pub format: ReportFormat,
}

impl ExperimentPlan {
    pub fn new(fixtures: Vec<FixtureFiles>, alphas: Vec<f64>, horizons: Vec<u32>) -> Self {
        ExperimentPlan {
            fixtures,
            alphas,
            horizons,
            beta: None,
            kappa: None,
            gamma: None,
            options: SearchOptions::default(),
            workers: 0,
            output_dir: None,
            format: ReportFormat::Csv,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let empty = [
            (self.fixtures.is_empty(), "fixtures"),
            (self.alphas.is_empty(), "alpha grid"),
            (self.horizons.is_empty(), "horizon grid"),
        ];
        if let Some((_, what)) = empty.iter().find(|(e, _)| *e) {
            return Err(HarnessError::InvalidPlan(format!("empty {what}")));
        }
        if self.alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(HarnessError::InvalidPlan(
                "alpha must be finite and non-negative".into(),
            ));
        }
        if self.horizons.contains(&0) {
            return Err(HarnessError::InvalidPlan(
                "horizon must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One `(fixture, alpha, horizon)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub fixture: String,
    pub alpha: f64,
    pub horizon: u32,
    pub design: Vec<String>,
    pub objective: f64,
    pub anytime: bool,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: [&str; 8] = [
    "fixture",
    "alpha",
    "horizon",
    "design_size",
    "design",
    "objective",
    "anytime",
    "error",
];

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub sweep: Vec<SweepEntry>,
    pub outcomes: Vec<(String, SearchOutcome)>,
}

impl ExperimentReport {
    pub fn sweep_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SWEEP_HEADER).expect("in-memory write");
        for e in &self.sweep {
            w.write_record([
                e.fixture.clone(),
                e.alpha.to_string(),
                e.horizon.to_string(),
                e.design.len().to_string(),
                e.design.join(";"),
                e.objective.to_string(),
                e.anytime.to_string(),
                e.error.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn cell(
    fixture: &Result<Fixture, String>,
    plan: &ExperimentPlan,
    alpha: f64,
    horizon: u32,
) -> Result<SearchOutcome, String> {
    let fixture = fixture.as_ref().map_err(Clone::clone)?;
    let mut dp = fixture.design_problem(plan.options);
    dp.weights.alpha = alpha;
    dp.params.horizon = horizon;
    if let Some(b) = plan.beta {
        dp.weights.beta = b;
    }
    if let Some(k) = plan.kappa {
        dp.weights.kappa = k;
    }
    if let Some(g) = plan.gamma {
        dp.params.gamma = g;
    }
    search(&dp).map_err(|e| e.to_string())
}

/// Runs every sweep cell. Failing cells are recorded in the sweep and the
/// run continues; report files are written when `output_dir` is set.
pub fn run(plan: &ExperimentPlan) -> Result<ExperimentReport, HarnessError> {
    plan.validate()?;
    let fixtures: Vec<(String, Result<Fixture, String>)> = plan
        .fixtures
        .iter()
        .map(|f| (f.name.clone(), f.load().map_err(|e| e.to_string())))
        .collect();
    let cells: Vec<(usize, f64, u32)> = (0..fixtures.len())
        .flat_map(|i| {
            plan.alphas
                .iter()
                .flat_map(move |&a| plan.horizons.iter().map(move |&t| (i, a, t)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| HarnessError::InvalidPlan(format!("thread pool: {e}")))?;
    let results: Vec<Result<SearchOutcome, String>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, a, t)| cell(&fixtures[i].1, plan, a, t))
            .collect()
    });

    let mut report = ExperimentReport {
        rows: Vec::new(),
        sweep: Vec::new(),
        outcomes: Vec::new(),
    };
    for (&(i, alpha, horizon), r) in cells.iter().zip(results) {
        let name = &fixtures[i].0;
        let label = format!("{name}@alpha={alpha},T={horizon}");
        match r {
            Ok(out) => {
                if let Some(f) = &out.evaluation.failure {
                    log::warn!("{label}: {f}");
                }
                report.rows.extend(report_rows(&label, &out));
                report.sweep.push(SweepEntry {
                    fixture: name.clone(),
                    alpha,
                    horizon,
                    design: out.design.clone(),
                    objective: out.evaluation.objective,
                    anytime: out.anytime,
                    error: out.evaluation.failure.clone(),
                });
                report.outcomes.push((label, out));
            }
            Err(e) => {
                log::error!("{label}: {e}");
                report.sweep.push(SweepEntry {
                    fixture: name.clone(),
                    alpha,
                    horizon,
                    design: Vec::new(),
                    objective: f64::NAN,
                    anytime: false,
                    error: Some(e),
                });
            }
        }
    }

    if let Some(dir) = &plan.output_dir {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        let report_name = match plan.format {
            ReportFormat::Csv => "report.csv",
            ReportFormat::Markdown => "report.md",
        };
        let path = dir.join(report_name);
        fs::write(&path, write_report(&report.rows, plan.format)).map_err(io_error(&path))?;
        let path = dir.join("sweep.csv");
        fs::write(&path, report.sweep_csv()).map_err(io_error(&path))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{demo_files, DemoSetting};

    #[test]
    fn empty_grids_are_rejected() {
        let plan = ExperimentPlan::new(vec![demo_files(DemoSetting::A)], vec![], vec![1]);
        assert!(matches!(run(&plan), Err(HarnessError::InvalidPlan(_))));
        let plan = ExperimentPlan::new(vec![demo_files(DemoSetting::A)], vec![1.0], vec![]);
        assert!(matches!(run(&plan), Err(HarnessError::InvalidPlan(_))));
    }

    #[test]
    fn broken_fixture_is_recorded_and_run_continues() {
        let mut bad = demo_files(DemoSetting::A);
        bad.name = "broken".into();
        bad.problem.push(')');
        let plan = ExperimentPlan::new(vec![bad, demo_files(DemoSetting::A)], vec![1.0], vec![1]);
        let r = run(&plan).unwrap();
        assert_eq!(r.sweep.len(), 2);
        assert!(r.sweep[0].error.is_some());
        assert!(r.sweep[1].error.is_none());
        assert_eq!(r.rows.len(), 2);
    }
}
