mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{bfs_plan_length, summed_factor};
use explicable_core::design::{
    apply_designs, longitudinal_factor, search, Configuration, LongitudinalParams, SearchOptions,
};
use explicable_core::explicability::{most_explicable_plan, score_plan, ExplicableProblem};
use explicable_core::harness::random::{random_model_pair, random_problem, RandomShape};
use explicable_core::harness::{build_ipc_fixture, IpcDomain};
use explicable_core::model::{Action, Cost, FluentId, FluentSet};
use explicable_core::planner::{
    enumerate_plans, h_max, solve_optimal, EnumerateOptions, SearchLimits,
};

fn fluent_set(max: u32) -> impl Strategy<Value = FluentSet> {
    prop::collection::btree_set(0..max, 0..5)
        .prop_map(|s| FluentSet::from_ids(s.into_iter().map(FluentId)))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn domain_of(seed: u64) -> IpcDomain {
    IpcDomain::ALL[(seed % 3) as usize]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_is_add_then_delete(s in fluent_set(10), pre in fluent_set(10), add in fluent_set(10), del in fluent_set(10)) {
        let mut del = del;
        del.difference_with(&add);
        let a = Action::new("a", pre.clone(), add.clone(), del.clone());
        match a.apply(&s) {
            Some(next) => {
                prop_assert!(pre.is_subset(&s));
                prop_assert!(add.is_subset(&next));
                prop_assert!(next.is_disjoint(&del));
                for f in s.iter() {
                    prop_assert_eq!(next.contains(f), !del.contains(f));
                }
            }
            None => prop_assert!(!pre.is_subset(&s)),
        }
    }

    #[test]
    fn astar_cost_matches_bfs_and_hmax_is_admissible(seed in any::<u64>()) {
        let p = random_problem(&mut rng(seed), RandomShape::default());
        let r = solve_optimal(&p, &SearchLimits::unlimited());
        let oracle = bfs_plan_length(&p);
        prop_assert_eq!(r.cost.map(|c| c.to_integer() as usize), oracle);
        prop_assert_eq!(r.plan.is_some(), r.cost.is_some());
        match (h_max(&p, &p.init), r.cost) {
            (Some(h), Some(c)) => prop_assert!(h <= c),
            (None, c) => prop_assert!(c.is_none()),
            (Some(_), None) => {}
        }
        if let (Some(plan), Some(c)) = (&r.plan, r.cost) {
            prop_assert!(p.is_valid_plan(plan));
            prop_assert_eq!(p.plan_cost(plan).unwrap(), c);
        }
    }

    #[test]
    fn enumeration_at_optimal_cost_contains_only_optimal_plans(seed in any::<u64>()) {
        let p = random_problem(&mut rng(seed), RandomShape { fluents: 6, actions: 5, human_only: 0 });
        let r = solve_optimal(&p, &SearchLimits::unlimited());
        if let (Some(plan), Some(c)) = (r.plan, r.cost) {
            if let Ok(all) = enumerate_plans(&p, c, &EnumerateOptions::default()) {
                prop_assert!(all.contains(&plan));
                for q in &all {
                    prop_assert!(p.is_valid_plan(q));
                    prop_assert_eq!(p.plan_cost(q).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn most_explicable_plan_is_sound_and_minimal(seed in any::<u64>()) {
        let (pair, task) = random_model_pair(&mut rng(seed), RandomShape::default());
        let exp = ExplicableProblem::new(&pair, &task);
        let limits = SearchLimits::unlimited();
        let r = most_explicable_plan(&exp, &limits).unwrap();
        match &r.plan {
            Some(plan) => {
                prop_assert!(r.ie_min.is_finite());
                prop_assert!(r.ie_min.log_value() >= 0.0);
                prop_assert!(exp.robot.is_valid_plan(plan) && exp.human.is_valid_plan(plan));
                prop_assert_eq!(r.robot_cost, Some(Cost::from_integer(plan.len() as u64)));
                prop_assert_eq!(score_plan(&exp, plan, &limits).unwrap(), r.ie_min);
            }
            None => prop_assert!(!r.ie_min.is_finite()),
        }
        // No robot-optimal plan beats it.
        if let Some(robot_plan) = solve_optimal(&exp.robot, &limits).plan {
            let s = score_plan(&exp, &robot_plan, &limits).unwrap();
            prop_assert!(r.ie_min.log_value() <= s.log_value());
        }
    }

    #[test]
    fn designs_are_idempotent_and_order_free(seed in any::<u64>(), mask in any::<u8>()) {
        let f = build_ipc_fixture(domain_of(seed), seed % 5).load().unwrap();
        let chosen: Vec<usize> = (0..f.space.len()).filter(|i| mask & (1 << i) != 0).collect();
        let once = apply_designs(&f.models.pair, chosen.iter().map(|&i| &f.space[i])).unwrap();
        let twice = apply_designs(&once, chosen.iter().map(|&i| &f.space[i])).unwrap();
        let reversed = apply_designs(&f.models.pair, chosen.iter().rev().map(|&i| &f.space[i])).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(&once, &reversed);
        let mut shuffled = chosen.clone();
        shuffled.reverse();
        let a = Configuration::new(&f.models.pair, &f.space, &chosen).unwrap();
        let b = Configuration::new(&f.models.pair, &f.space, &shuffled).unwrap();
        prop_assert_eq!(a.ids(&f.space), b.ids(&f.space));
        prop_assert_eq!(a.pair.as_ref(), &once);
    }

    #[test]
    fn longitudinal_factor_is_a_partial_geometric_sum(gamma in 0.0f64..=1.0, horizon in 1u32..200) {
        let f = longitudinal_factor(&LongitudinalParams { gamma, horizon });
        let next = longitudinal_factor(&LongitudinalParams { gamma, horizon: horizon + 1 });
        prop_assert!(f >= 1.0);
        prop_assert!(next >= f);
        prop_assert!((f - summed_factor(gamma, horizon)).abs() <= 1e-9 * f);
        if gamma < 1.0 {
            prop_assert!(f <= 1.0 / (1.0 - gamma) + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn search_is_deterministic_and_never_worse_than_baseline(
        seed in 0u64..5,
        domain in 0usize..3,
        alpha in 0.1f64..2.0,
        horizon in 1u32..30,
        workers in 1usize..4,
    ) {
        let f = build_ipc_fixture(IpcDomain::ALL[domain], seed).load().unwrap();
        let mut dp = f.design_problem(SearchOptions::default());
        dp.weights.alpha = alpha;
        dp.params.horizon = horizon;
        let a = search(&dp).unwrap();
        dp.options.workers = workers;
        let b = search(&dp).unwrap();
        prop_assert_eq!(&a.design, &b.design);
        prop_assert_eq!(&a.log, &b.log);
        prop_assert!(a.evaluation.objective <= a.baseline.objective);
        if !a.design.is_empty() && alpha > 0.0 {
            prop_assert!(a.evaluation.expected_ie <= a.baseline.expected_ie);
        }
        prop_assert!(a.evaluation.per_task.iter().all(|(_, r)| r.is_ok()));
    }
}
