//! Exact circle geometry of update families: stable sets, forbidden directions,
//! the supercritical / critical / subcritical trichotomy and witness triples.

mod arc;
mod direction;
mod family;

use std::f64::consts::{PI, TAU};
use std::fmt;

use thiserror::Error;

pub use arc::{Arc, ArcSet};
pub use direction::{normalize_angle, unit, Direction};
pub use family::{UpdateFamily, UpdateRule};

/// Angular slack used when validating floating-point override angles.
pub const OVERRIDE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("zero vector is not a direction")]
    ZeroVector,
    #[error("({x},{y}) is not a primitive vector")]
    NotPrimitive { x: i64, y: i64 },
    #[error("update rule is empty")]
    EmptyRule,
    #[error("update rule contains the origin")]
    OriginInRule,
    #[error("update family has no rules")]
    EmptyFamily,
    #[error("family is {0}, not subcritical")]
    NotSubcritical(Classification),
    #[error("no three strongly stable, non-forbidden directions surround the origin")]
    NoValidTriple,
    #[error("override angle {theta} rad rejected: {reason}")]
    InvalidOverride { theta: f64, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    Supercritical,
    Critical,
    Subcritical,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Supercritical => "supercritical",
            Classification::Critical => "critical",
            Classification::Subcritical => "subcritical",
        })
    }
}

/// Open arc of directions `u` with `<x, u> < 0` for every `x` in the rule.
pub fn destabilized_arc(rule: &UpdateRule) -> Arc {
    let set = rule.sites().iter().fold(ArcSet::full(), |acc, &x| {
        let d = Direction::of_site(x).expect("rules exclude the origin");
        acc.intersection(&ArcSet::from_arc(Arc::open(d.rot90(), d.rot270())))
    });
    match set.arcs().as_slice() {
        [] => Arc::Empty,
        [a] => *a,
        _ => unreachable!("an intersection of open semicircles is connected"),
    }
}

pub fn stable_set(family: &UpdateFamily) -> ArcSet {
    let unstable = ArcSet::from_arcs(family.rules().iter().map(destabilized_arc));
    unstable.complement()
}

/// Directions perpendicular to a side of the convex hull of some rule, sorted by angle.
pub fn forbidden_set(family: &UpdateFamily) -> Vec<Direction> {
    let mut out = Vec::new();
    for rule in family.rules() {
        let hull = rule.convex_hull();
        if hull.len() < 2 {
            continue;
        }
        let n = hull.len();
        let edges = if n == 2 { 1 } else { n };
        for i in 0..edges {
            let e = hull[(i + 1) % n] - hull[i];
            let d = Direction::of_site(e).expect("hull vertices are distinct");
            out.push(d.rot90());
            out.push(d.rot270());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The strongly stable directions that are not forbidden.
pub fn usable_directions(family: &UpdateFamily) -> ArcSet {
    stable_set(family).interior().difference(&ArcSet::from_points(forbidden_set(family)))
}

pub fn classify(family: &UpdateFamily) -> Classification {
    let s = stable_set(family);
    if s.fits_in_closed_semicircle() {
        Classification::Supercritical
    } else if s.interior().fits_in_closed_semicircle() {
        Classification::Critical
    } else {
        Classification::Subcritical
    }
}

/// A direction `u` with both `u` and `-u` strongly stable, if one exists.
pub fn is_symmetric(family: &UpdateFamily) -> Option<Direction> {
    let int = stable_set(family).interior();
    let both = int.intersection(&int.antipode());
    both.arcs().first().map(|a| midmost(a))
}

/// A rational direction close to the angular midpoint of a non-empty open arc.
fn midmost(arc: &Arc) -> Direction {
    match *arc {
        Arc::Empty => panic!("empty arc has no interior direction"),
        Arc::Full => Direction::EAST,
        Arc::Span { start, end, .. } => {
            let width = if start == end { TAU } else { start.ccw_angle_to(end) };
            let mid = start.angle() + width / 2.0;
            Direction::approximate(mid, 24, |d| {
                arc.contains(d) && d != start && d != end && Direction::angular_gap(d.angle(), mid) <= width / 8.0
            })
            .unwrap_or_else(|| start.strictly_between(end))
        }
    }
}

/// Three strongly stable, non-forbidden directions whose triangle strictly contains
/// the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessTriple {
    /// Angles in radians, sorted counterclockwise.
    pub thetas: [f64; 3],
    /// The rational directions, when the triple was found by search rather than supplied.
    pub exact: Option<[Direction; 3]>,
    /// Largest ε whose ε-neighbourhoods of all three directions avoid unusable directions.
    pub margin: f64,
}

impl WitnessTriple {
    pub fn unit(&self, t: usize) -> (f64, f64) {
        unit(self.thetas[t])
    }
}

/// Angular slack of `theta` inside the usable arc containing it, if any.
fn slack_in(usable: &ArcSet, theta: f64) -> Option<f64> {
    usable.arcs().iter().find_map(|a| match *a {
        Arc::Full => Some(PI),
        Arc::Empty => None,
        Arc::Span { start, end, .. } => {
            let width = if start == end { TAU } else { start.ccw_angle_to(end) };
            let off = normalize_angle(theta - start.angle());
            (off > OVERRIDE_TOLERANCE && off < width - OVERRIDE_TOLERANCE).then(|| off.min(width - off))
        }
    })
}

/// Smallest of the three consecutive counterclockwise gaps of sorted angles.
fn min_gap(sorted: &[f64; 3]) -> f64 {
    let g = [sorted[1] - sorted[0], sorted[2] - sorted[1], TAU - sorted[2] + sorted[0]];
    g.into_iter().fold(f64::INFINITY, f64::min)
}

fn surrounds_origin(mut dirs: [Direction; 3]) -> bool {
    dirs.sort();
    dirs[0].cross(dirs[1]) > 0 && dirs[1].cross(dirs[2]) > 0 && dirs[2].cross(dirs[0]) > 0
}

pub fn witness_triple(family: &UpdateFamily, overrides: Option<[f64; 3]>) -> Result<WitnessTriple, GeometryError> {
    let class = classify(family);
    if class != Classification::Subcritical {
        return Err(GeometryError::NotSubcritical(class));
    }
    let usable = usable_directions(family);
    match overrides {
        Some(thetas) => validate_override(&usable, thetas),
        None => search_triple(&usable),
    }
}

fn validate_override(usable: &ArcSet, thetas: [f64; 3]) -> Result<WitnessTriple, GeometryError> {
    let mut sorted = thetas.map(normalize_angle);
    sorted.sort_by(f64::total_cmp);
    let mut margin = f64::INFINITY;
    for &theta in &sorted {
        let s = slack_in(usable, theta).ok_or_else(|| GeometryError::InvalidOverride {
            theta,
            reason: "not a strongly stable, non-forbidden direction".into(),
        })?;
        margin = margin.min(s);
    }
    let gaps = [sorted[1] - sorted[0], sorted[2] - sorted[1], TAU - sorted[2] + sorted[0]];
    if let Some(g) = gaps.iter().find(|&&g| g >= PI - OVERRIDE_TOLERANCE) {
        return Err(GeometryError::InvalidOverride {
            theta: *g,
            reason: "the three directions leave a gap of at least a half turn".into(),
        });
    }
    Ok(WitnessTriple { thetas: sorted, exact: None, margin })
}

fn search_triple(usable: &ArcSet) -> Result<WitnessTriple, GeometryError> {
    let arcs = usable.arcs();
    let mut midmost_dirs = Vec::new();
    let mut others = Vec::new();
    for a in &arcs {
        midmost_dirs.push(midmost(a));
        if let Arc::Span { start, end, .. } = *a {
            let width = if start == end { TAU } else { start.ccw_angle_to(end) };
            for k in 1..6 {
                let theta = start.angle() + width * k as f64 / 6.0;
                if let Some(d) = Direction::approximate(theta, 24, |d| a.contains(d)) {
                    others.push(d);
                }
            }
        }
    }
    let mut pool = midmost_dirs.clone();
    pool.sort();
    pool.dedup();
    if let Some(t) = best_triple(usable, &pool) {
        return Ok(t);
    }
    pool.extend(others);
    pool.sort();
    pool.dedup();
    best_triple(usable, &pool).ok_or(GeometryError::NoValidTriple)
}

/// The valid triple with the largest minimum angular gap, ties broken by margin.
fn best_triple(usable: &ArcSet, pool: &[Direction]) -> Option<WitnessTriple> {
    let slack: Vec<f64> = pool.iter().map(|d| slack_in(usable, d.angle()).unwrap_or(0.0)).collect();
    let mut best: Option<(f64, f64, [usize; 3])> = None;
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            for k in j + 1..pool.len() {
                if !surrounds_origin([pool[i], pool[j], pool[k]]) {
                    continue;
                }
                let gap = min_gap(&[pool[i].angle(), pool[j].angle(), pool[k].angle()]);
                let margin = slack[i].min(slack[j]).min(slack[k]);
                if best.map_or(true, |(g, m, _)| (gap, margin) > (g, m)) {
                    best = Some((gap, margin, [i, j, k]));
                }
            }
        }
    }
    best.map(|(_, margin, idx)| {
        let dirs = idx.map(|i| pool[i]);
        WitnessTriple { thetas: dirs.map(Direction::angle), exact: Some(dirs), margin }
    })
}

/// Euclidean range of the family: the largest distance between two sites of one rule.
pub fn range(family: &UpdateFamily) -> f64 {
    family.range()
}
