//! Monotone U-bootstrap dynamics on finite regions.

mod grid;

use thiserror::Error;

pub use grid::{Boundary, GridConfig};

use crate::geometry::{Direction, UpdateFamily, UpdateRule};
use crate::lattice::Site;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("half width {half_width} is below the required {required}")]
    WindowTooSmall { half_width: i64, required: i64 },
    #[error("unknown family '{0}' (known: dtbp, osp, schonmann, neighbour-2)")]
    UnknownFamily(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub newly_infected: usize,
    /// Sites infected during this step.
    pub frontier: Vec<Site>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// Rule offsets compiled against one grid: flat index deltas for cells far enough from
/// the edge, plain offsets for the rest.
struct Compiled {
    rules: Vec<Vec<Site>>,
    deltas: Vec<Vec<isize>>,
    /// Offsets `-x` over all rules: the cells whose test may change when a cell is infected.
    dependents: Vec<Site>,
    dependent_deltas: Vec<isize>,
    reach: i64,
    width: i64,
    height: i64,
}

impl Compiled {
    fn new(family: &UpdateFamily, cfg: &GridConfig) -> Self {
        let width = cfg.width() as i64;
        let delta = |s: &Site| (s.y * width + s.x) as isize;
        let rules: Vec<Vec<Site>> = family.rules().iter().map(|r| r.sites().to_vec()).collect();
        let deltas = rules.iter().map(|r| r.iter().map(delta).collect()).collect();
        let mut dependents: Vec<Site> = rules.iter().flatten().map(|&s| -s).collect();
        dependents.sort();
        dependents.dedup();
        let dependent_deltas = dependents.iter().map(delta).collect();
        Compiled {
            rules,
            deltas,
            dependents,
            dependent_deltas,
            reach: family.reach(),
            width,
            height: cfg.height() as i64,
        }
    }

    #[inline]
    fn is_interior(&self, i: i64, j: i64) -> bool {
        i >= self.reach && j >= self.reach && i < self.width - self.reach && j < self.height - self.reach
    }

    #[inline]
    fn fires(&self, cfg: &GridConfig, idx: usize) -> bool {
        let (i, j) = ((idx as i64) % self.width, (idx as i64) / self.width);
        if self.is_interior(i, j) {
            self.deltas
                .iter()
                .any(|r| r.iter().all(|&d| cfg.get_index((idx as isize + d) as usize)))
        } else {
            self.rules.iter().any(|r| r.iter().all(|s| cfg.infected_at(i + s.x, j + s.y)))
        }
    }

    /// Calls `f` on every in-region cell whose rule translates contain `idx`.
    #[inline]
    fn for_each_dependent(&self, cfg: &GridConfig, idx: usize, mut f: impl FnMut(usize)) {
        let (i, j) = ((idx as i64) % self.width, (idx as i64) / self.width);
        if self.is_interior(i, j) {
            for &d in &self.dependent_deltas {
                f((idx as isize + d) as usize);
            }
            return;
        }
        let torus = cfg.boundary() == Boundary::Torus;
        for s in &self.dependents {
            let (mut a, mut b) = (i + s.x, j + s.y);
            if torus {
                a = a.rem_euclid(self.width);
                b = b.rem_euclid(self.height);
            } else if a < 0 || b < 0 || a >= self.width || b >= self.height {
                continue;
            }
            f((b * self.width + a) as usize);
        }
    }
}

/// One synchronous update: every healthy cell with a fully infected rule translate
/// becomes infected.
pub fn step(family: &UpdateFamily, config: &GridConfig) -> (GridConfig, StepReport) {
    let c = Compiled::new(family, config);
    let fired: Vec<usize> = (0..config.len()).filter(|&idx| !config.get_index(idx) && c.fires(config, idx)).collect();
    let mut next = config.clone();
    let w = config.width();
    let frontier = fired
        .iter()
        .map(|&idx| {
            next.set_index(idx);
            config.site_of(idx % w, idx / w)
        })
        .collect();
    (next, StepReport { newly_infected: fired.len(), frontier })
}

/// The closure `[A]`: the smallest superset of the configuration fixed by `step`.
///
/// Work-list algorithm: after a cell is infected only the cells whose rule translates
/// contain it are re-tested.
pub fn closure(family: &UpdateFamily, config: &GridConfig) -> GridConfig {
    let mut cfg = config.clone();
    closure_in_place(family, &mut cfg);
    cfg
}

pub fn closure_in_place(family: &UpdateFamily, cfg: &mut GridConfig) {
    let c = Compiled::new(family, cfg);
    let mut stack: Vec<usize> = Vec::new();
    for idx in 0..cfg.len() {
        if cfg.get_index(idx) || !c.fires(cfg, idx) {
            continue;
        }
        cfg.set_index(idx);
        c.for_each_dependent(cfg, idx, |w| stack.push(w));
        while let Some(v) = stack.pop() {
            if cfg.get_index(v) || !c.fires(cfg, v) {
                continue;
            }
            cfg.set_index(v);
            c.for_each_dependent(cfg, v, |w| stack.push(w));
        }
    }
}

pub fn percolates(family: &UpdateFamily, config: &GridConfig) -> bool {
    closure(family, config).is_full()
}

/// Smallest half width accepted by [`half_plane_probe`].
pub fn probe_min_half_width(family: &UpdateFamily) -> i64 {
    (8 * family.range().ceil() as i64).max(1)
}

/// Decides whether `d` is a stable direction by running the dynamics from the discrete
/// half plane `{x : <x, d> < 0}` in the box `[-half_width, half_width]²`.
pub fn half_plane_probe(family: &UpdateFamily, d: Direction, half_width: i64) -> Result<Stability, DynamicsError> {
    let required = probe_min_half_width(family);
    if half_width < required {
        return Err(DynamicsError::WindowTooSmall { half_width, required });
    }
    let mut cfg = GridConfig::centered(half_width, Boundary::HalfPlane(d));
    let side = cfg.width();
    for j in 0..side {
        for i in 0..side {
            if d.dot_site(cfg.site_of(i, j)) < 0 {
                cfg.set(i, j, true);
            }
        }
    }
    closure_in_place(family, &mut cfg);
    let inner = half_width / 2;
    for y in -inner..=inner {
        for x in -inner..=inner {
            let s = Site::new(x, y);
            if d.dot_site(s) >= 0 && cfg.is_infected(s) {
                return Ok(Stability::Unstable);
            }
        }
    }
    Ok(Stability::Stable)
}

pub const BUILTIN_NAMES: [&str; 4] = ["dtbp", "osp", "schonmann", "neighbour-2"];

pub fn builtin_family(name: &str) -> Result<UpdateFamily, DynamicsError> {
    let pairs: Vec<Vec<(i64, i64)>> = match name {
        "dtbp" => vec![vec![(1, 0), (0, 1)], vec![(-1, -1), (0, 1)], vec![(-1, -1), (1, 0)]],
        "osp" => vec![vec![(1, 0), (0, 1)]],
        "schonmann" => vec![vec![(1, 0), (0, 1)], vec![(-1, 0), (0, -1)]],
        "neighbour-2" => {
            let n = [(1, 0), (-1, 0), (0, 1), (0, -1)];
            let mut rules = Vec::new();
            for a in 0..4 {
                for b in a + 1..4 {
                    rules.push(vec![n[a], n[b]]);
                }
            }
            rules
        }
        _ => return Err(DynamicsError::UnknownFamily(name.to_string())),
    };
    let rules = pairs.iter().map(|r| UpdateRule::from_pairs(r).expect("builtin rules are valid"));
    Ok(UpdateFamily::new(rules).expect("builtin families are non-empty").with_name(name))
}
