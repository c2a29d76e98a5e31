#![allow(dead_code)]

use proptest::prelude::*;
use ubootstrap::dynamics::{Boundary, GridConfig};
use ubootstrap::geometry::{Direction, UpdateFamily, UpdateRule};

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Every primitive direction with both coordinates in `[-n, n]`.
pub fn primitive_directions(n: i64) -> Vec<Direction> {
    let mut out = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            if gcd(x, y) == 1 {
                out.push(Direction::new(x, y).unwrap());
            }
        }
    }
    out
}

/// `d` is destabilized by `rule` iff every element has negative inner product with it.
pub fn destabilizes(rule: &UpdateRule, d: Direction) -> bool {
    rule.sites().iter().all(|&x| d.dot_site(x) < 0)
}

pub fn brute_stable(family: &UpdateFamily, d: Direction) -> bool {
    !family.rules().iter().any(|r| destabilizes(r, d))
}

pub fn family_of(rules: &[Vec<(i64, i64)>]) -> UpdateFamily {
    UpdateFamily::new(rules.iter().map(|r| UpdateRule::from_pairs(r).unwrap())).unwrap()
}

pub fn rule_strategy() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-3i64..=3, -3i64..=3).prop_filter("origin", |&p| p != (0, 0)), 1..=4)
}

pub fn family_strategy() -> impl Strategy<Value = UpdateFamily> {
    prop::collection::vec(rule_strategy(), 1..=4).prop_map(|rules| family_of(&rules))
}

/// Full-sweep iteration until nothing changes, with its own boundary handling.
pub fn naive_closure(family: &UpdateFamily, cfg: &GridConfig) -> GridConfig {
    let (w, h) = (cfg.width() as i64, cfg.height() as i64);
    let torus = cfg.boundary() == Boundary::Torus;
    let mut cells: Vec<bool> = (0..h).flat_map(|j| (0..w).map(move |i| (i, j))).map(|(i, j)| cfg.get(i as usize, j as usize)).collect();
    let infected = |cells: &[bool], i: i64, j: i64| -> bool {
        if torus {
            cells[(j.rem_euclid(h) * w + i.rem_euclid(w)) as usize]
        } else if i < 0 || j < 0 || i >= w || j >= h {
            false
        } else {
            cells[(j * w + i) as usize]
        }
    };
    loop {
        let mut changed = false;
        let snapshot = cells.clone();
        for j in 0..h {
            for i in 0..w {
                let k = (j * w + i) as usize;
                if snapshot[k] {
                    continue;
                }
                let fires = family
                    .rules()
                    .iter()
                    .any(|r| r.sites().iter().all(|s| infected(&snapshot, i + s.x, j + s.y)));
                if fires {
                    cells[k] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    GridConfig::from_fn(w as usize, h as usize, cfg.boundary(), |i, j| cells[j * w as usize + i]).with_origin(cfg.origin())
}

