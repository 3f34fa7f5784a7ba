//! Built-in fixtures and experiment sweeps.

mod demo;
mod experiment;
mod ipc;
pub mod random;

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::design::{DesignError, DesignModification, DesignProblem, SearchOptions};
use crate::pddl::{parse_design_spec, parse_model_pair, DesignSpec, ParseError, ParsedModels};

pub use demo::{cell, demo_files, DemoSetting, BLOCKED, BOOTH_1, BOOTH_2, KITCHEN};
pub use experiment::{run, ExperimentPlan, ExperimentReport, SweepEntry, SWEEP_HEADER};
pub use ipc::{build_ipc_fixture, IpcDomain};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("{path}: {error}")]
    Io { path: String, error: io::Error },
    #[error("invalid experiment: {0}")]
    InvalidPlan(String),
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |error| HarnessError::Io {
        path: path.display().to_string(),
        error,
    }
}

/// The four texts that define one design problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureFiles {
    pub name: String,
    pub robot_domain: String,
    pub human_domain: String,
    pub problem: String,
    pub design: String,
}

pub const FIXTURE_FILE_NAMES: [&str; 4] =
    ["robot.pddl", "human.pddl", "problem.pddl", "design.txt"];

impl FixtureFiles {
    fn texts(&self) -> [&str; 4] {
        [
            &self.robot_domain,
            &self.human_domain,
            &self.problem,
            &self.design,
        ]
    }

    /// Writes the texts as `robot.pddl`, `human.pddl`, `problem.pddl` and
    /// `design.txt` under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        for (name, text) in FIXTURE_FILE_NAMES.iter().zip(self.texts()) {
            let path = dir.join(name);
            fs::write(&path, text).map_err(io_error(&path))?;
        }
        Ok(())
    }

    pub fn read_from(dir: &Path) -> Result<Self, HarnessError> {
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(io_error(&path))
        };
        Ok(FixtureFiles {
            name: dir.file_name().map_or_else(
                || dir.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            ),
            robot_domain: read(FIXTURE_FILE_NAMES[0])?,
            human_domain: read(FIXTURE_FILE_NAMES[1])?,
            problem: read(FIXTURE_FILE_NAMES[2])?,
            design: read(FIXTURE_FILE_NAMES[3])?,
        })
    }

    pub fn load(&self) -> Result<Fixture, HarnessError> {
        let models = parse_model_pair(&self.robot_domain, &self.human_domain, &self.problem)
            .map_err(|error| HarnessError::Parse {
                file: format!("{} models", self.name),
                error,
            })?;
        let spec = parse_design_spec(&self.design).map_err(|error| HarnessError::Parse {
            file: format!("{} design", self.name),
            error,
        })?;
        let space = spec.resolve(&models.pair)?;
        Ok(Fixture {
            name: self.name.clone(),
            models,
            spec,
            space,
        })
    }
}

/// A parsed fixture with its design space resolved.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub models: ParsedModels,
    pub spec: DesignSpec,
    pub space: Vec<DesignModification>,
}

impl Fixture {
    /// The design problem described by the fixture's design file. Time and
    /// size limits from the file override those in `options`.
    pub fn design_problem(&self, mut options: SearchOptions) -> DesignProblem {
        if self.spec.time_limit.is_some() {
            options.time_limit = self.spec.time_limit;
        }
        if self.spec.max_design_size.is_some() {
            options.max_design_size = self.spec.max_design_size;
        }
        DesignProblem {
            pair: self.models.pair.clone(),
            tasks: self.models.tasks.clone(),
            space: self.space.clone(),
            weights: self.spec.weights,
            params: self.spec.params,
            options,
        }
    }
}

pub fn build_demo_fixture(setting: DemoSetting) -> Result<Fixture, HarnessError> {
    demo_files(setting).load()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_fixture_shape() {
        let f = build_demo_fixture(DemoSetting::C).unwrap();
        assert_eq!(f.space.len(), 6);
        assert_eq!(f.models.tasks.len(), 2);
        assert_eq!(f.spec.params.horizon, 10);
        for m in &f.space {
            assert_eq!(m.targets.len(), 2, "{}", m.id);
            for t in &m.targets {
                let robot = f.models.pair.robot.action(t).unwrap();
                let human = f.models.pair.human.action(t).unwrap();
                assert_ne!(robot.pre, human.pre, "{t}");
            }
        }
        let a = build_demo_fixture(DemoSetting::A).unwrap();
        assert_eq!(a.models.tasks.len(), 1);
    }

    #[test]
    fn ipc_fixtures_load() {
        for d in IpcDomain::ALL {
            for seed in 0..5 {
                let f = build_ipc_fixture(d, seed).load().unwrap();
                assert!(f.space.len() <= 8, "{}", f.name);
                assert_eq!(f.models.tasks.len(), 3);
            }
        }
    }

    #[test]
    fn fixture_files_round_trip_through_disk() {
        let dir = std::env::temp_dir().join(format!("explicable-fixture-{}", std::process::id()));
        let f = build_ipc_fixture(IpcDomain::Grid, 7);
        f.write_to(&dir).unwrap();
        let back = FixtureFiles::read_from(&dir).unwrap();
        fs::remove_dir_all(&dir).unwrap();
        assert_eq!(back.texts(), f.texts());
    }
}
