use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use explicable_core::design::{search, ObjectiveWeights, SearchOptions, SearchOutcome};
use explicable_core::explicability::{
    most_explicable_plan, score_plan, ExplicabilityError, ExplicableProblem,
};
use explicable_core::harness::{
    build_ipc_fixture, demo_files, run, DemoSetting, ExperimentPlan, Fixture, FixtureFiles,
    IpcDomain,
};
use explicable_core::model::{cost_to_f64, PlanningProblem, Task};
use explicable_core::pddl::{
    parse_design_spec, parse_model_pair, parse_plan, report_rows, write_plan, write_report,
    ParsedModels, ReportFormat,
};
use explicable_core::planner::{solve_optimal, SearchLimits, SearchStatus};

#[derive(Parser, Debug)]
#[command(
    name = "explicable",
    version,
    about = "Explicable planning and environment design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal plan for each task in the robot or human model.
    Plan {
        #[command(flatten)]
        input: ModelArgs,
        #[arg(long, value_enum, default_value_t = Which::Robot)]
        model: Which,
        #[arg(long)]
        time_limit_secs: Option<f64>,
    },
    /// Inexplicability of a robot plan.
    Score {
        #[command(flatten)]
        input: ModelArgs,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        time_limit_secs: Option<f64>,
    },
    /// Most explicable plan for each task.
    Explicate {
        #[command(flatten)]
        input: ModelArgs,
        #[arg(long)]
        time_limit_secs: Option<f64>,
    },
    /// Search for the best set of environment modifications.
    Design {
        #[command(flatten)]
        input: ModelArgs,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep alpha and horizon over fixtures and write reports.
    Experiment {
        /// Fixture directories to include.
        #[arg(long = "fixture")]
        fixtures: Vec<PathBuf>,
        /// Built-in fixtures to include.
        #[arg(long = "builtin", value_enum)]
        builtins: Vec<Builtin>,
        /// Generated instances per built-in IPC-style domain.
        #[arg(long, default_value_t = 1)]
        instances: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        horizon: Vec<u32>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        limits: Limits,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a built-in fixture to a directory.
    Fixture {
        #[arg(long, value_enum)]
        kind: Builtin,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Directory holding robot.pddl, human.pddl, problem.pddl and design.txt.
    #[arg(long, conflicts_with_all = ["robot", "human", "problem"])]
    fixture: Option<PathBuf>,
    #[arg(long)]
    robot: Option<PathBuf>,
    /// Defaults to the robot domain.
    #[arg(long)]
    human: Option<PathBuf>,
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long)]
    design: Option<PathBuf>,
    /// Restrict to the named task.
    #[arg(long)]
    task: Option<String>,
}

#[derive(Args, Debug)]
struct Tuning {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    horizon: Option<u32>,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Args, Debug)]
struct Limits {
    #[arg(long)]
    time_limit_secs: Option<f64>,
    #[arg(long)]
    max_design_size: Option<usize>,
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    Robot,
    Human,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Builtin {
    DemoA,
    DemoB,
    DemoC,
    Blocksworld,
    Grid,
    Driverlog,
}

impl Builtin {
    fn files(self, seed: u64) -> FixtureFiles {
        match self {
            Builtin::DemoA => demo_files(DemoSetting::A),
            Builtin::DemoB => demo_files(DemoSetting::B),
            Builtin::DemoC => demo_files(DemoSetting::C),
            Builtin::Blocksworld => build_ipc_fixture(IpcDomain::Blocksworld, seed),
            Builtin::Grid => build_ipc_fixture(IpcDomain::Grid, seed),
            Builtin::Driverlog => build_ipc_fixture(IpcDomain::Driverlog, seed),
        }
    }

    fn is_demo(self) -> bool {
        matches!(self, Builtin::DemoA | Builtin::DemoB | Builtin::DemoC)
    }
}

enum Failure {
    Input(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

trait InputContext<T> {
    fn input(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
}

fn bad_input(msg: impl std::fmt::Display) -> Failure {
    Failure::Input(anyhow!("{msg}"))
}

enum Done {
    Ok,
    TimedOut,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .input()
}

fn duration(secs: Option<f64>) -> Result<Option<Duration>, Failure> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s).map_err(|e| bad_input(format!("--time-limit-secs: {e}")))
    })
    .transpose()
}

struct Loaded {
    models: ParsedModels,
    design: Option<String>,
    /// Task indices selected by `--task`, or all of them.
    selected: Vec<usize>,
}

impl ModelArgs {
    fn load(&self) -> Result<Loaded, Failure> {
        let (robot, human, problem, design) = match &self.fixture {
            Some(dir) => {
                let f = FixtureFiles::read_from(dir).input()?;
                let design = match &self.design {
                    Some(p) => read(p)?,
                    None => f.design,
                };
                (f.robot_domain, f.human_domain, f.problem, Some(design))
            }
            None => {
                let need = |p: &Option<PathBuf>, flag: &str| {
                    p.as_deref()
                        .ok_or_else(|| bad_input(format!("--{flag} is required without --fixture")))
                        .and_then(read)
                };
                let robot = need(&self.robot, "robot")?;
                let human = match &self.human {
                    Some(p) => read(p)?,
                    None => robot.clone(),
                };
                let problem = need(&self.problem, "problem")?;
                let design = self.design.as_deref().map(read).transpose()?;
                (robot, human, problem, design)
            }
        };
        let models = parse_model_pair(&robot, &human, &problem).input()?;
        let selected = match &self.task {
            Some(name) => {
                let i = models
                    .tasks
                    .tasks
                    .iter()
                    .position(|t| &t.name == name)
                    .ok_or_else(|| bad_input(format!("no task named `{name}`")))?;
                vec![i]
            }
            None => (0..models.tasks.len()).collect(),
        };
        Ok(Loaded {
            models,
            design,
            selected,
        })
    }
}

impl Loaded {
    fn tasks(&self) -> impl Iterator<Item = &Task> {
        self.selected.iter().map(|&i| &self.models.tasks.tasks[i])
    }
}

fn planner_limits(secs: Option<f64>) -> Result<SearchLimits, Failure> {
    Ok(SearchLimits {
        time_limit: duration(secs)?,
        ..SearchLimits::default()
    })
}

fn cmd_plan(input: &ModelArgs, model: Which, secs: Option<f64>) -> Result<Done, Failure> {
    let loaded = input.load()?;
    let limits = planner_limits(secs)?;
    for task in loaded.tasks() {
        let problem: PlanningProblem = match model {
            Which::Robot => loaded.models.pair.robot_problem(task),
            Which::Human => loaded.models.pair.human_problem(task),
        };
        let r = solve_optimal(&problem, &limits);
        println!("; task {}", task.name);
        match r.status {
            SearchStatus::Solved => {
                let cost = r.cost.expect("solved search carries a cost");
                print!(
                    "{}",
                    write_plan(r.plan.as_ref().expect("solved search carries a plan"))
                );
                println!("; cost {} ({} expanded)", cost_to_f64(cost), r.expanded);
            }
            SearchStatus::Unsolvable => println!("; unsolvable"),
            SearchStatus::Timeout { .. } => {
                return Err(anyhow!("planner limit reached on task {}", task.name).into())
            }
        }
    }
    Ok(Done::Ok)
}

fn cmd_score(input: &ModelArgs, plan: &Path, secs: Option<f64>) -> Result<Done, Failure> {
    let loaded = input.load()?;
    let plan = parse_plan(&read(plan)?);
    let limits = planner_limits(secs)?;
    let mut scored = 0;
    let mut last_error = None;
    for task in loaded.tasks() {
        let exp = ExplicableProblem::new(&loaded.models.pair, task);
        match score_plan(&exp, &plan, &limits) {
            Ok(score) => {
                scored += 1;
                println!(
                    "{}\tlog-ie {}\tie {}",
                    task.name,
                    score.log_value(),
                    score.value()
                );
            }
            Err(e @ ExplicabilityError::EvaluationFailed(_)) => {
                return Err(anyhow::Error::from(e).into())
            }
            Err(e) => {
                println!("{}\t{e}", task.name);
                last_error = Some(e);
            }
        }
    }
    match last_error {
        Some(e) if scored == 0 => Err(Failure::Input(e.into())),
        _ => Ok(Done::Ok),
    }
}

fn cmd_explicate(input: &ModelArgs, secs: Option<f64>) -> Result<Done, Failure> {
    let loaded = input.load()?;
    let limits = planner_limits(secs)?;
    for task in loaded.tasks() {
        let exp = ExplicableProblem::new(&loaded.models.pair, task);
        let r = most_explicable_plan(&exp, &limits).input()?;
        println!("; task {}", task.name);
        match &r.plan {
            Some(p) => print!("{}", write_plan(p)),
            None => println!("; no plan is valid in both models"),
        }
        let cost = r
            .robot_cost
            .map_or_else(|| "none".to_string(), |c| cost_to_f64(c).to_string());
        println!("; log-ie {} robot-cost {cost}", r.ie_min.log_value());
    }
    Ok(Done::Ok)
}

fn options(limits: &Limits) -> Result<SearchOptions, Failure> {
    Ok(SearchOptions {
        time_limit: duration(limits.time_limit_secs)?,
        max_design_size: limits.max_design_size,
        prune: !limits.no_prune,
        workers: limits.workers,
        ..SearchOptions::default()
    })
}

fn print_outcome(out: &SearchOutcome) {
    let ids = if out.design.is_empty() {
        "(none)".to_string()
    } else {
        out.design.join(" ")
    };
    println!("; design {ids}");
    println!(
        "; objective {} (without design {})",
        out.evaluation.objective, out.baseline.objective
    );
    println!(
        "; nodes evaluated {} in {:.3}s{}",
        out.log.len(),
        out.elapsed.as_secs_f64(),
        if out.anytime {
            ", time limit reached"
        } else {
            ""
        }
    );
}

fn cmd_design(
    input: &ModelArgs,
    tuning: &Tuning,
    format: Format,
    out: Option<&Path>,
) -> Result<Done, Failure> {
    let loaded = input.load()?;
    let text = loaded
        .design
        .as_deref()
        .ok_or_else(|| bad_input("a design file is required (--design or --fixture)"))?;
    let spec = parse_design_spec(text).input()?;
    let space = spec.resolve(&loaded.models.pair).input()?;
    let tasks = loaded.models.tasks.restrict(&loaded.selected).input()?;
    let fixture = Fixture {
        name: "input".into(),
        models: ParsedModels {
            tasks,
            ..loaded.models
        },
        spec,
        space,
    };
    let mut dp = fixture.design_problem(options(&tuning.limits)?);
    let w = &mut dp.weights;
    *w = ObjectiveWeights {
        alpha: tuning.alpha.unwrap_or(w.alpha),
        beta: tuning.beta.unwrap_or(w.beta),
        kappa: tuning.kappa.unwrap_or(w.kappa),
    };
    if let Some(g) = tuning.gamma {
        dp.params.gamma = g;
    }
    if let Some(t) = tuning.horizon {
        dp.params.horizon = t;
    }
    if tuning.limits.time_limit_secs.is_some() {
        dp.options.time_limit = duration(tuning.limits.time_limit_secs)?;
    }
    if tuning.limits.max_design_size.is_some() {
        dp.options.max_design_size = tuning.limits.max_design_size;
    }
    dp.validate().input()?;
    let outcome = search(&dp).map_err(anyhow::Error::from)?;
    print_outcome(&outcome);
    let report = write_report(&report_rows("input", &outcome), format.into());
    print!("{report}");
    if let Some(path) = out {
        fs::write(path, &report).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if outcome.anytime {
        Done::TimedOut
    } else {
        Done::Ok
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    fixtures: &[PathBuf],
    builtins: &[Builtin],
    instances: u64,
    alpha: &[f64],
    horizon: &[u32],
    overrides: (Option<f64>, Option<f64>, Option<f64>),
    limits: &Limits,
    seed: u64,
    format: Format,
    out: &Path,
) -> Result<Done, Failure> {
    let mut files = Vec::new();
    for dir in fixtures {
        files.push(FixtureFiles::read_from(dir).input()?);
    }
    for b in builtins {
        if b.is_demo() {
            files.push(b.files(seed));
        } else {
            files.extend((0..instances).map(|i| b.files(seed + i)));
        }
    }
    let (beta, kappa, gamma) = overrides;
    let plan = ExperimentPlan {
        beta,
        kappa,
        gamma,
        options: options(limits)?,
        workers: limits.workers,
        output_dir: Some(out.to_path_buf()),
        format: format.into(),
        ..ExperimentPlan::new(files, alpha.to_vec(), horizon.to_vec())
    };
    let report = run(&plan).input()?;
    let failed = report.sweep.iter().filter(|e| e.error.is_some()).count();
    for e in &report.sweep {
        println!(
            "{}\talpha={}\tT={}\t|design|={}\t{}",
            e.fixture,
            e.alpha,
            e.horizon,
            e.design.len(),
            e.error.as_deref().unwrap_or("ok")
        );
    }
    if failed > 0 {
        log::warn!("{failed} sweep cells failed");
    }
    let timed_out = report.sweep.iter().any(|e| e.anytime);
    Ok(if timed_out { Done::TimedOut } else { Done::Ok })
}

fn dispatch(cli: Cli) -> Result<Done, Failure> {
    match cli.command {
        Command::Plan {
            input,
            model,
            time_limit_secs,
        } => cmd_plan(&input, model, time_limit_secs),
        Command::Score {
            input,
            plan,
            time_limit_secs,
        } => cmd_score(&input, &plan, time_limit_secs),
        Command::Explicate {
            input,
            time_limit_secs,
        } => cmd_explicate(&input, time_limit_secs),
        Command::Design {
            input,
            tuning,
            format,
            out,
        } => cmd_design(&input, &tuning, format, out.as_deref()),
        Command::Experiment {
            fixtures,
            builtins,
            instances,
            alpha,
            horizon,
            beta,
            kappa,
            gamma,
            limits,
            seed,
            format,
            out,
        } => {
            if fixtures.is_empty() && builtins.is_empty() {
                return Err(bad_input("give at least one --fixture or --builtin"));
            }
            cmd_experiment(
                &fixtures,
                &builtins,
                instances,
                &alpha,
                &horizon,
                (beta, kappa, gamma),
                &limits,
                seed,
                format,
                &out,
            )
        }
        Command::Fixture { kind, seed, out } => {
            kind.files(seed)
                .write_to(&out)
                .map_err(anyhow::Error::from)?;
            println!("{}", out.display());
            Ok(Done::Ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(Done::Ok) => ExitCode::SUCCESS,
        Ok(Done::TimedOut) => ExitCode::from(3),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
