//! The restaurant demonstration: a 3x3 floor where the robot cannot pass six
//! passages around two cells, while the human believes every passage is
//! open. The robot carries orders from the kitchen to two booths.

use std::fmt::Write;

use super::FixtureFiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoSetting {
    /// One booth, one delivery.
    A,
    /// Either booth with equal probability, one delivery.
    B,
    /// Either booth with equal probability, ten deliveries.
    C,
}

impl DemoSetting {
    pub const ALL: [DemoSetting; 3] = [DemoSetting::A, DemoSetting::B, DemoSetting::C];

    pub fn label(self) -> &'static str {
        match self {
            DemoSetting::A => "demo-a",
            DemoSetting::B => "demo-b",
            DemoSetting::C => "demo-c",
        }
    }

    pub fn horizon(self) -> u32 {
        match self {
            DemoSetting::C => 10,
            _ => 1,
        }
    }
}

pub const KITCHEN: (usize, usize) = (0, 0);
pub const BOOTH_1: (usize, usize) = (1, 2);
pub const BOOTH_2: (usize, usize) = (0, 2);

/// Passages the robot cannot use, in design order `b1..b6`.
pub const BLOCKED: [((usize, usize), (usize, usize)); 6] = [
    ((0, 0), (0, 1)),
    ((0, 1), (0, 2)),
    ((0, 1), (1, 1)),
    ((1, 0), (1, 1)),
    ((1, 1), (1, 2)),
    ((1, 1), (2, 1)),
];

pub fn cell((r, c): (usize, usize)) -> String {
    format!("c{r}{c}")
}

fn domain(robot: bool) -> String {
    let (preds, move_pre) = if robot {
        (" (open ?a ?b - cell)", " (open ?from ?to)")
    } else {
        ("", "")
    };
    format!(
        "(define (domain restaurant)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (robot-at ?c - cell) (adj ?a ?b - cell){preds}
               (kitchen ?c - cell) (booth ?c - cell)
               (hand-empty) (holding-order) (served ?c - cell))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (robot-at ?from) (adj ?from ?to){move_pre})
    :effect (and (robot-at ?to) (not (robot-at ?from))))
  (:action pick-up
    :parameters (?c - cell)
    :precondition (and (robot-at ?c) (kitchen ?c) (hand-empty))
    :effect (and (holding-order) (not (hand-empty))))
  (:action put-down
    :parameters (?c - cell)
    :precondition (and (robot-at ?c) (booth ?c) (holding-order))
    :effect (and (served ?c) (hand-empty) (not (holding-order)))))
"
    )
}

fn is_blocked(a: (usize, usize), b: (usize, usize)) -> bool {
    BLOCKED
        .iter()
        .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
}

fn problem(setting: DemoSetting) -> String {
    let mut s =
        String::from("(define (problem restaurant-floor)\n  (:domain restaurant)\n  (:objects");
    for r in 0..3 {
        for c in 0..3 {
            let _ = write!(s, " {}", cell((r, c)));
        }
    }
    s.push_str(" - cell)\n  (:init");
    for r in 0..3usize {
        for c in 0..3usize {
            let here = (r, c);
            let nbrs = [
                (r + 1, c),
                (r, c + 1),
                (r.wrapping_sub(1), c),
                (r, c.wrapping_sub(1)),
            ];
            for n in nbrs.into_iter().filter(|n| n.0 < 3 && n.1 < 3) {
                let _ = write!(s, "\n    (adj {} {})", cell(here), cell(n));
                if !is_blocked(here, n) {
                    let _ = write!(s, " (open {} {})", cell(here), cell(n));
                }
            }
        }
    }
    let _ = write!(
        s,
        "\n    (kitchen {k}) (booth {g1}) (booth {g2})\n    (robot-at {k}) (hand-empty))\n",
        k = cell(KITCHEN),
        g1 = cell(BOOTH_1),
        g2 = cell(BOOTH_2)
    );
    let tasks: &[(&str, (usize, usize), &str)] = match setting {
        DemoSetting::A => &[("serve-g1", BOOTH_1, "1")],
        DemoSetting::B | DemoSetting::C => {
            &[("serve-g1", BOOTH_1, "0.5"), ("serve-g2", BOOTH_2, "0.5")]
        }
    };
    for (name, booth, p) in tasks {
        let _ = writeln!(
            s,
            "  (:task {name} (:prob {p}) (:goal (served {})))",
            cell(*booth)
        );
    }
    s.push_str(")\n");
    s
}

fn design(setting: DemoSetting) -> String {
    let mut s = format!(
        "# Barriers that show the human a passage the robot cannot use.\n\
         weights {{ alpha = 1, beta = 30, kappa = 0.25 }}\n\
         gamma = 0.9\n\
         horizon = {}\n",
        setting.horizon()
    );
    for (i, (a, b)) in BLOCKED.iter().enumerate() {
        let _ = writeln!(
            s,
            "modification {{ id = b{}, kind = block-transition, between = {} {}, cost = 1 }}",
            i + 1,
            cell(*a),
            cell(*b)
        );
    }
    s
}

pub fn demo_files(setting: DemoSetting) -> FixtureFiles {
    FixtureFiles {
        name: setting.label().to_string(),
        robot_domain: domain(true),
        human_domain: domain(false),
        problem: problem(setting),
        design: design(setting),
    }
}
