//! Seeded generators for small Blocksworld, Grid and Driverlog style model
//! pairs. Each pairs a correct robot domain with a human domain holding one
//! systematic misconception, plus a matching design space.

use std::fmt::{self, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FixtureFiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IpcDomain {
    /// The human believes the robot can hold several blocks at once.
    Blocksworld,
    /// The human believes the robot can move diagonally.
    Grid,
    /// The human believes packages load and unload wherever the driver is.
    Driverlog,
}

impl IpcDomain {
    pub const ALL: [IpcDomain; 3] = [
        IpcDomain::Blocksworld,
        IpcDomain::Grid,
        IpcDomain::Driverlog,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IpcDomain::Blocksworld => "blocksworld",
            IpcDomain::Grid => "grid",
            IpcDomain::Driverlog => "driverlog",
        }
    }
}

impl fmt::Display for IpcDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IpcDomain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IpcDomain::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown fixture domain `{s}`"))
    }
}

const DEFAULT_SETTINGS: &str =
    "weights { alpha = 1, beta = 0.25, kappa = 0.25 }\ngamma = 0.9\nhorizon = 1\n";

/// A generated fixture; identical seeds give byte-identical files.
pub fn build_ipc_fixture(domain: IpcDomain, seed: u64) -> FixtureFiles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = format!("{domain}-{seed}");
    match domain {
        IpcDomain::Blocksworld => blocksworld(name, &mut rng),
        IpcDomain::Grid => grid(name, &mut rng),
        IpcDomain::Driverlog => driverlog(name, &mut rng),
    }
}

fn task(s: &mut String, name: &str, init: &[String], goal: &[String]) {
    let _ = writeln!(
        s,
        "  (:task {name} (:prob 1/3)\n    (:init {})\n    (:goal (and {})))",
        init.join(" "),
        goal.join(" ")
    );
}

fn blocksworld_domain(robot: bool) -> String {
    let hand = if robot { " (handempty)" } else { "" };
    format!(
        "(define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block) (picked-from-table ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x){hand})
    :effect (and (holding ?x) (picked-from-table ?x)
                 (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty)
                 (not (holding ?x)) (not (clear ?y)) (not (picked-from-table ?x))))
  (:action unstack
    :parameters (?x ?y - block)
    :precondition (and (on ?x ?y) (clear ?x){hand})
    :effect (and (holding ?x) (clear ?y)
                 (not (on ?x ?y)) (not (clear ?x)) (not (handempty)) (not (picked-from-table ?x)))))
"
    )
}

/// Towers listed bottom to top.
fn blocks_state(towers: &[Vec<&str>]) -> Vec<String> {
    let mut out = vec!["(handempty)".to_string()];
    for t in towers {
        out.push(format!("(ontable {})", t[0]));
        for w in t.windows(2) {
            out.push(format!("(on {} {})", w[1], w[0]));
        }
        out.push(format!("(clear {})", t[t.len() - 1]));
    }
    out
}

fn blocksworld(name: String, rng: &mut ChaCha8Rng) -> FixtureFiles {
    let n = rng.gen_range(3..=4);
    let blocks: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let mut order: Vec<&str> = blocks.iter().map(String::as_str).collect();
    order.shuffle(rng);
    let (x, y, z) = (order[0], order[1], order[2]);
    let spare: Vec<Vec<&str>> = order[3..].iter().map(|b| vec![*b]).collect();

    let mut p = format!(
        "(define (problem {name})\n  (:domain blocksworld)\n  (:objects {} - block)\n",
        blocks.join(" ")
    );
    // Rebuild a two-block tower on top of the third block: the robot must
    // set the top block aside, the human expects it to be carried along.
    let mut init: Vec<Vec<&str>> = vec![vec![y, x], vec![z]];
    init.extend(spare.iter().cloned());
    task(
        &mut p,
        "rebuild",
        &blocks_state(&init),
        &[format!("(on {y} {z})"), format!("(on {x} {y})")],
    );
    // Move the top block straight onto another tower.
    task(
        &mut p,
        "transfer",
        &blocks_state(&init),
        &[format!("(on {x} {z})")],
    );
    // Stack one table block on another.
    let flat: Vec<Vec<&str>> = order.iter().map(|b| vec![*b]).collect();
    task(
        &mut p,
        "build",
        &blocks_state(&flat),
        &[format!("(on {z} {x})")],
    );
    p.push_str(")\n");

    let mut d = String::from(DEFAULT_SETTINGS);
    for b in &blocks {
        let _ = writeln!(
            d,
            "modification {{ id = table-first-{b}, kind = add-precondition-both, action = stack_{b}_*, precondition = picked-from-table_{b}, cost = 1 }}"
        );
    }
    FixtureFiles {
        name,
        robot_domain: blocksworld_domain(true),
        human_domain: blocksworld_domain(false),
        problem: p,
        design: d,
    }
}

fn grid_domain(robot: bool) -> String {
    let diag = if robot {
        ""
    } else {
        "
  (:action move-diag
    :parameters (?from ?to - place)
    :precondition (and (at-robot ?from) (diag ?from ?to))
    :effect (and (at-robot ?to) (not (at-robot ?from))))"
    };
    format!(
        "(define (domain grid)
  (:requirements :strips :typing)
  (:types place)
  (:predicates (at-robot ?p - place) (conn ?a ?b - place) (diag ?a ?b - place))
  (:action move
    :parameters (?from ?to - place)
    :precondition (and (at-robot ?from) (conn ?from ?to))
    :effect (and (at-robot ?to) (not (at-robot ?from)))){diag})
"
    )
}

fn grid(name: String, rng: &mut ChaCha8Rng) -> FixtureFiles {
    const ROWS: usize = 2;
    const COLS: usize = 4;
    let place = |r: usize, c: usize| format!("p{r}{c}");
    let mut p = format!("(define (problem {name})\n  (:domain grid)\n  (:objects");
    for r in 0..ROWS {
        for c in 0..COLS {
            let _ = write!(p, " {}", place(r, c));
        }
    }
    p.push_str(" - place)\n  (:init");
    for r in 0..ROWS {
        for c in 0..COLS {
            for (dr, dc) in [
                (-1i64, 0i64),
                (1, 0),
                (0, -1),
                (0, 1),
                (-1, -1),
                (-1, 1),
                (1, -1),
                (1, 1),
            ] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr < 0 || nc < 0 || nr >= ROWS as i64 || nc >= COLS as i64 {
                    continue;
                }
                let rel = if dr != 0 && dc != 0 { "diag" } else { "conn" };
                let _ = write!(
                    p,
                    "\n    ({rel} {} {})",
                    place(r, c),
                    place(nr as usize, nc as usize)
                );
            }
        }
    }
    p.push_str(")\n");
    let cells: Vec<(usize, usize)> = (0..ROWS)
        .flat_map(|r| (0..COLS).map(move |c| (r, c)))
        .collect();
    for t in 0..3 {
        let (s, g) = loop {
            let s = *cells.choose(rng).expect("non-empty grid");
            let g = *cells.choose(rng).expect("non-empty grid");
            if s.0 != g.0 && s.1.abs_diff(g.1) >= 1 {
                break (s, g);
            }
        };
        task(
            &mut p,
            &format!("route-{}", t + 1),
            &[format!("(at-robot {})", place(s.0, s.1))],
            &[format!("(at-robot {})", place(g.0, g.1))],
        );
    }
    p.push_str(")\n");

    let mut d = String::from(DEFAULT_SETTINGS);
    for (r, c) in cells {
        let _ = writeln!(
            d,
            "modification {{ id = no-diag-{pl}, kind = prune-human-action, action = move-diag_{pl}_*, cost = 1 }}",
            pl = place(r, c)
        );
    }
    FixtureFiles {
        name,
        robot_domain: grid_domain(true),
        human_domain: grid_domain(false),
        problem: p,
        design: d,
    }
}

fn driverlog_domain(robot: bool) -> String {
    let with_driver = if robot { " (driver-at ?d ?l)" } else { "" };
    format!(
        "(define (domain driverlog)
  (:requirements :strips :typing)
  (:types location truck driver package)
  (:predicates (truck-at ?t - truck ?l - location) (driver-at ?d - driver ?l - location)
               (pkg-at ?p - package ?l - location) (in ?p - package ?t - truck)
               (driving ?d - driver ?t - truck) (empty ?t - truck) (unattended ?t - truck)
               (link ?a ?b - location) (path ?a ?b - location))
  (:action load
    :parameters (?p - package ?t - truck ?l - location ?d - driver)
    :precondition (and (pkg-at ?p ?l) (truck-at ?t ?l){with_driver})
    :effect (and (in ?p ?t) (not (pkg-at ?p ?l))))
  (:action unload
    :parameters (?p - package ?t - truck ?l - location ?d - driver)
    :precondition (and (in ?p ?t) (truck-at ?t ?l){with_driver})
    :effect (and (pkg-at ?p ?l) (not (in ?p ?t))))
  (:action board-truck
    :parameters (?d - driver ?t - truck ?l - location)
    :precondition (and (driver-at ?d ?l) (truck-at ?t ?l) (empty ?t))
    :effect (and (driving ?d ?t) (not (driver-at ?d ?l)) (not (empty ?t)) (not (unattended ?t))))
  (:action disembark-truck
    :parameters (?d - driver ?t - truck ?l - location)
    :precondition (and (driving ?d ?t) (truck-at ?t ?l))
    :effect (and (driver-at ?d ?l) (empty ?t) (unattended ?t) (not (driving ?d ?t))))
  (:action drive-truck
    :parameters (?t - truck ?from ?to - location ?d - driver)
    :precondition (and (truck-at ?t ?from) (driving ?d ?t) (link ?from ?to))
    :effect (and (truck-at ?t ?to) (not (truck-at ?t ?from))))
  (:action walk
    :parameters (?d - driver ?from ?to - location)
    :precondition (and (driver-at ?d ?from) (path ?from ?to))
    :effect (and (driver-at ?d ?to) (not (driver-at ?d ?from)))))
"
    )
}

fn driverlog(name: String, rng: &mut ChaCha8Rng) -> FixtureFiles {
    let n = rng.gen_range(3..=4);
    let locs: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let pick = |rng: &mut ChaCha8Rng| locs[rng.gen_range(0..n)].clone();
    let loading = rng.gen_bool(0.5);

    let mut p = format!(
        "(define (problem {name})\n  (:domain driverlog)\n  (:objects {} - location t1 - truck d1 - driver pk1 pk2 - package)\n  (:init",
        locs.join(" ")
    );
    for w in locs.windows(2) {
        let _ = write!(
            p,
            "\n    (link {a} {b}) (link {b} {a}) (path {a} {b}) (path {b} {a})",
            a = w[0],
            b = w[1]
        );
    }
    p.push_str(")\n");
    let cargo = |pkg: &str, at: &str| {
        if loading {
            (format!("(pkg-at {pkg} {at})"), format!("(in {pkg} t1)"))
        } else {
            (format!("(in {pkg} t1)"), format!("(pkg-at {pkg} {at})"))
        }
    };

    // The driver drives to the package and handles it without getting out.
    let (start, at) = (pick(rng), pick(rng));
    let (have, want) = cargo("pk1", &at);
    task(
        &mut p,
        "drive-and-handle",
        &[
            format!("(truck-at t1 {start})"),
            "(driving d1 t1)".into(),
            have,
        ],
        &[want],
    );
    // The driver already stands beside the parked truck.
    let at = pick(rng);
    let (have, want) = cargo("pk2", &at);
    task(
        &mut p,
        "handle-on-foot",
        &[
            format!("(truck-at t1 {at})"),
            format!("(driver-at d1 {at})"),
            "(empty t1)".into(),
            have,
        ],
        &[want],
    );
    // Relocate the truck.
    let (from, to) = (pick(rng), pick(rng));
    task(
        &mut p,
        "relocate",
        &[format!("(truck-at t1 {from})"), "(driving d1 t1)".into()],
        &[format!("(truck-at t1 {to})")],
    );
    p.push_str(")\n");

    let mut d = String::from(DEFAULT_SETTINGS);
    for act in ["load", "unload"] {
        let _ = writeln!(
            d,
            "modification {{ id = {act}-after-disembark, kind = add-precondition-both, action = {act}_*, precondition = unattended_t1, cost = 0.25 }}"
        );
    }
    FixtureFiles {
        name,
        robot_domain: driverlog_domain(true),
        human_domain: driverlog_domain(false),
        problem: p,
        design: d,
    }
}
