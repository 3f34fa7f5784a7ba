mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::Path;

use common::bfs_plan_length;
use explicable_core::design::{
    apply_designs, relevance_prune, search, Configuration, Evaluator, SearchOptions,
};
use explicable_core::explicability::{compile, most_explicable_plan, ExplicableProblem};
use explicable_core::harness::{
    build_demo_fixture, build_ipc_fixture, cell, demo_files, DemoSetting, FixtureFiles, IpcDomain,
    BLOCKED, BOOTH_1, KITCHEN,
};
use explicable_core::model::{Cost, Plan};
use explicable_core::planner::{enumerate_plans, EnumerateOptions, SearchLimits};

type Cell = (usize, usize);

/// Shortest 4-connected route on the 3x3 floor, optionally avoiding the
/// blocked passages.
fn route(from: Cell, to: Cell, avoid_blocked: bool) -> Vec<Cell> {
    let blocked = |a: Cell, b: Cell| {
        BLOCKED
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
    };
    let mut prev: HashMap<Cell, Cell> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        if c == to {
            break;
        }
        let (r, k) = (c.0 as i64, c.1 as i64);
        for (nr, nk) in [(r + 1, k), (r - 1, k), (r, k + 1), (r, k - 1)] {
            if !(0..3).contains(&nr) || !(0..3).contains(&nk) {
                continue;
            }
            let n = (nr as usize, nk as usize);
            if n == from || prev.contains_key(&n) || (avoid_blocked && blocked(c, n)) {
                continue;
            }
            prev.insert(n, c);
            queue.push_back(n);
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[path.last().unwrap()]);
    }
    path.reverse();
    path
}

fn delivery(path: &[Cell]) -> Plan {
    let mut steps = vec![format!("pick-up_{}", cell(path[0]))];
    steps.extend(
        path.windows(2)
            .map(|w| format!("move_{}_{}", cell(w[0]), cell(w[1]))),
    );
    steps.push(format!("put-down_{}", cell(*path.last().unwrap())));
    Plan { steps }
}

#[test]
fn demo_detour_is_a_robot_plan_and_the_shortcut_is_not() {
    let f = build_demo_fixture(DemoSetting::A).unwrap();
    let task = &f.models.tasks.tasks[0];
    let robot = f.models.pair.robot_problem(task);
    let human = f.models.pair.human_problem(task);

    let detour = delivery(&route(KITCHEN, BOOTH_1, true));
    let shortcut = delivery(&route(KITCHEN, BOOTH_1, false));
    assert!(detour.len() > shortcut.len());
    assert!(robot.is_valid_plan(&detour));
    assert!(human.is_valid_plan(&detour));
    assert!(!robot.is_valid_plan(&shortcut));
    assert!(human.is_valid_plan(&shortcut));
}

#[test]
fn demo_inexplicability_matches_enumeration() {
    let f = build_demo_fixture(DemoSetting::B).unwrap();
    for task in &f.models.tasks.tasks {
        let exp = ExplicableProblem::new(&f.models.pair, task);
        let r = most_explicable_plan(&exp, &SearchLimits::unlimited()).unwrap();
        let c_star = bfs_plan_length(&exp.human).unwrap();
        let bound = bfs_plan_length(&exp.robot).unwrap();
        let plans = enumerate_plans(
            &exp.robot,
            Cost::from_integer(bound as u64),
            &EnumerateOptions::default(),
        )
        .unwrap();
        let best_gap = plans
            .iter()
            .filter(|p| exp.human.is_valid_plan(p))
            .map(|p| p.len() - c_star)
            .min()
            .unwrap();
        assert!(best_gap > 0, "{}", task.name);
        assert_eq!(r.ie_min.log_value(), best_gap as f64, "{}", task.name);
        assert_eq!(r.robot_cost, Some(Cost::from_integer(bound as u64)));
    }
}

#[test]
fn blocked_move_can_never_fire_in_the_compiled_problem() {
    let f = build_demo_fixture(DemoSetting::A).unwrap();
    let task = &f.models.tasks.tasks[0];
    let exp = ExplicableProblem::new(&f.models.pair, task);
    let compiled = compile(&exp).unwrap();
    let produced: BTreeSet<_> = compiled
        .problem
        .domain
        .actions()
        .iter()
        .flat_map(|a| a.add.iter().collect::<Vec<_>>())
        .collect();
    for (a, b) in BLOCKED {
        for (x, y) in [(a, b), (b, a)] {
            let name = format!("move_{}_{}", cell(x), cell(y));
            assert!(exp.human.domain.action(&name).is_some(), "{name}");
            let robot_pre = &exp.robot.domain.action(&name).unwrap().pre;
            let Some(c) = compiled.problem.domain.action(&name) else {
                continue;
            };
            let dead = robot_pre
                .iter()
                .map(|f| compiled.robot_fluent(f))
                .find(|f| {
                    c.pre.contains(*f)
                        && !compiled.problem.init.contains(*f)
                        && !produced.contains(f)
                });
            assert!(dead.is_some(), "{name} is applicable somewhere");
        }
    }
}

#[test]
fn compiled_load_needs_the_driver_in_the_robot_copy_only() {
    let f = build_ipc_fixture(IpcDomain::Driverlog, 0).load().unwrap();
    let exp = ExplicableProblem::new(&f.models.pair, &f.models.tasks.tasks[0]);
    let compiled = compile(&exp).unwrap();
    let vocab = f.models.pair.robot.vocab();
    let driver_at = vocab.id("driver-at_d1_s0").unwrap();
    for name in ["load_pk1_t1_s0_d1", "unload_pk1_t1_s0_d1"] {
        let a = compiled.problem.domain.action(name).unwrap();
        assert!(a.pre.contains(compiled.robot_fluent(driver_at)), "{name}");
        assert!(!a.pre.contains(compiled.human_fluent(driver_at)), "{name}");
    }
}

#[test]
fn blocksworld_human_expects_shorter_plans() {
    for seed in 0..5 {
        let f = build_ipc_fixture(IpcDomain::Blocksworld, seed)
            .load()
            .unwrap();
        let rebuild = &f.models.tasks.tasks[0];
        let robot = bfs_plan_length(&f.models.pair.robot_problem(rebuild)).unwrap();
        let human = bfs_plan_length(&f.models.pair.human_problem(rebuild)).unwrap();
        assert!(human < robot, "seed {seed}: human {human}, robot {robot}");
    }
}

#[test]
fn table_first_design_orders_pickup_before_stack() {
    let f = build_ipc_fixture(IpcDomain::Blocksworld, 0).load().unwrap();
    let modified = apply_designs(&f.models.pair, &f.space).unwrap();
    for task in &f.models.tasks.tasks {
        let r = most_explicable_plan(
            &ExplicableProblem::new(&modified, task),
            &SearchLimits::unlimited(),
        )
        .unwrap();
        let plan = r.plan.expect("tasks stay solvable");
        for (i, step) in plan.steps.iter().enumerate() {
            let Some(rest) = step.strip_prefix("stack_") else {
                continue;
            };
            let block = rest.split('_').next().unwrap();
            let last_pick = plan.steps[..i]
                .iter()
                .rposition(|s| s == &format!("pick-up_{block}"));
            let last_unstack = plan.steps[..i]
                .iter()
                .rposition(|s| s.starts_with(&format!("unstack_{block}_")));
            assert!(last_pick > last_unstack, "{}: {:?}", task.name, plan.steps);
        }
    }
}

#[test]
fn grid_human_only_actions_are_the_diagonals() {
    let f = build_ipc_fixture(IpcDomain::Grid, 2).load().unwrap();
    let diagonals: BTreeSet<String> = f
        .models
        .pair
        .human
        .actions()
        .iter()
        .filter(|a| a.name.starts_with("move-diag_"))
        .map(|a| a.name.clone())
        .collect();
    // Two diagonals per adjacent column pair of the 2x4 grid, both directions.
    assert_eq!(diagonals.len(), 3 * 2 * 2);
    assert_eq!(f.models.human_only, diagonals);
}

#[test]
fn demo_root_pruning_keeps_crossed_passages() {
    let f = build_demo_fixture(DemoSetting::B).unwrap();
    let dp = f.design_problem(SearchOptions::default());
    let evaluator = Evaluator::new(&dp.tasks, dp.weights, dp.params, SearchLimits::unlimited());
    let root = Configuration::new(&dp.pair, &dp.space, &[]).unwrap();
    let all: Vec<usize> = (0..dp.space.len()).collect();
    let kept = relevance_prune(&dp.space, &all, &root, &evaluator);
    assert!(kept.len() <= 6);

    // Every passage crossed by some human-optimal route stays a candidate.
    for task in &dp.tasks.tasks {
        let human = dp.pair.human_problem(task);
        let plan = explicable_core::planner::solve_optimal(&human, &SearchLimits::unlimited())
            .plan
            .unwrap();
        for (i, m) in dp.space.iter().enumerate() {
            if m.targets.iter().any(|t| plan.steps.contains(t)) {
                assert!(
                    kept.contains(&i),
                    "{} crossed by {} but pruned",
                    m.id,
                    task.name
                );
            }
        }
    }
}

#[test]
fn demo_c_report_lists_two_barriers_and_lower_total() {
    let f = build_demo_fixture(DemoSetting::C).unwrap();
    let out = search(&f.design_problem(SearchOptions::default())).unwrap();
    let rows = explicable_core::pddl::report_rows("demo-c", &out);
    assert_eq!(rows[1].design_size, 2);
    assert!(rows[1].total_cost < rows[0].total_cost);
    assert!(rows[1].pct_diff_total < 0.0);
}

#[test]
fn generation_is_a_pure_function_of_the_seed() {
    for d in IpcDomain::ALL {
        let texts: Vec<FixtureFiles> = (0..6).map(|s| build_ipc_fixture(d, s)).collect();
        for (s, t) in texts.iter().enumerate() {
            assert_eq!(t, &build_ipc_fixture(d, s as u64));
        }
        let distinct: BTreeSet<&str> = texts.iter().map(|t| t.problem.as_str()).collect();
        assert!(
            distinct.len() > 1,
            "{d}: every seed gives the same instance"
        );
    }
}

#[test]
fn shipped_fixture_directories_match_the_generators() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut expected: Vec<FixtureFiles> = DemoSetting::ALL.iter().map(|&s| demo_files(s)).collect();
    for d in IpcDomain::ALL {
        expected.extend((0..5).map(|seed| build_ipc_fixture(d, seed)));
    }
    for f in expected {
        let on_disk = FixtureFiles::read_from(&root.join(&f.name)).unwrap();
        assert_eq!(
            on_disk, f,
            "{} is stale; regenerate with `explicable fixture`",
            f.name
        );
    }
}
