use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::covers::{CoverError, RenormParams, TriangularCover};
use crate::dynamics::{Boundary, GridConfig};
use crate::lattice::Site;
use crate::montecarlo::uniform_field;

/// Index `(a, b)` of a square in one tiling; it holds the sites
/// `origin + [aΔ, (a+1)Δ) × [bΔ, (b+1)Δ)`.
pub type Square = (i64, i64);

#[derive(Clone, Debug)]
struct TilingLevel {
    delta: i64,
    bad: BTreeSet<Square>,
}

/// Nested tilings of Z² with good/bad labels, plus the registry of built covers.
///
/// Sites outside the stored configuration are healthy, so squares far from it are good.
/// Labels are exact for all of Z², not just for squares inside the region.
#[derive(Clone, Debug)]
pub struct TilingHierarchy {
    params: RenormParams,
    config: GridConfig,
    levels: Vec<TilingLevel>,
    covers: Vec<TriangularCover>,
    strict: bool,
}

/// Squared Euclidean distance between two axis-parallel boxes given by inclusive corners.
pub(crate) fn box_dist_sq(a: (Site, Site), b: (Site, Site)) -> i128 {
    let gx = (b.0.x - a.1.x).max(a.0.x - b.1.x).max(0) as i128;
    let gy = (b.0.y - a.1.y).max(a.0.y - b.1.y).max(0) as i128;
    gx * gx + gy * gy
}

fn within(dist_sq: i128, g: f64) -> bool {
    (dist_sq as f64) <= g * g
}

fn label_next(prev: &TilingLevel, next_delta: i64, g: f64, origin: Site) -> BTreeSet<Square> {
    let bounds = |d: i64, s: Square| {
        let m = origin + Site::new(s.0 * d, s.1 * d);
        (m, m + Site::new(d - 1, d - 1))
    };
    let bad: Vec<Square> = prev.bad.iter().copied().collect();
    let reach = g.ceil() as i64;
    (0..bad.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            let p = bad[i];
            let pb = bounds(prev.delta, p);
            for &q in &bad[i + 1..] {
                if (p.0 - q.0).abs() <= 1 && (p.1 - q.1).abs() <= 1 {
                    continue;
                }
                let qb = bounds(prev.delta, q);
                if !within(box_dist_sq(pb, qb), g) {
                    continue;
                }
                let lo = |v: i64, o: i64| (v - reach - o).div_euclid(next_delta);
                let hi = |v: i64, o: i64| (v + reach - o).div_euclid(next_delta);
                for a in lo(pb.0.x, origin.x)..=hi(pb.1.x, origin.x) {
                    for b in lo(pb.0.y, origin.y)..=hi(pb.1.y, origin.y) {
                        let sb = bounds(next_delta, (a, b));
                        if within(box_dist_sq(sb, pb), g) && within(box_dist_sq(sb, qb), g) {
                            out.push((a, b));
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Labels every square at levels `1..=max_level`.
pub fn build_hierarchy(config: &GridConfig, params: &RenormParams, max_level: usize) -> Result<TilingHierarchy, CoverError> {
    assert!(max_level >= 1, "need at least one level");
    let top = params.delta_i(max_level);
    if config.width() as u64 % top != 0 || config.height() as u64 % top != 0 {
        return Err(CoverError::RegionNotAligned { width: config.width(), height: config.height(), delta: top });
    }
    let mut healthy_outside = GridConfig::new(config.width(), config.height(), Boundary::FreeHealthy)
        .with_origin(config.origin());
    let d1 = params.delta1 as i64;
    let mut bad = BTreeSet::new();
    for s in config.infected_sites() {
        healthy_outside.set_site(s, true);
        let rel = s - config.origin();
        bad.insert((rel.x.div_euclid(d1), rel.y.div_euclid(d1)));
    }
    let mut levels = vec![TilingLevel { delta: d1, bad }];
    for i in 1..max_level {
        let next = label_next(&levels[i - 1], params.delta_i(i + 1) as i64, params.g(i), config.origin());
        levels.push(TilingLevel { delta: params.delta_i(i + 1) as i64, bad: next });
    }
    Ok(TilingHierarchy { params: params.clone(), config: healthy_outside, levels, covers: Vec::new(), strict: true })
}

impl TilingHierarchy {
    pub fn params(&self) -> &RenormParams {
        &self.params
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    /// Side length Δ of the given level.
    pub fn delta(&self, level: usize) -> i64 {
        self.levels[level - 1].delta
    }

    pub fn is_bad(&self, level: usize, square: Square) -> bool {
        self.levels[level - 1].bad.contains(&square)
    }

    /// Bad squares of a level in increasing order.
    pub fn bad_squares(&self, level: usize) -> impl Iterator<Item = Square> + '_ {
        self.levels[level - 1].bad.iter().copied()
    }

    pub fn bad_count(&self, level: usize) -> usize {
        self.levels[level - 1].bad.len()
    }

    pub fn square_of(&self, level: usize, s: Site) -> Square {
        let d = self.delta(level);
        let rel = s - self.config.origin();
        (rel.x.div_euclid(d), rel.y.div_euclid(d))
    }

    /// Inclusive lowest-left and highest-right sites of a square.
    pub fn square_bounds(&self, level: usize, square: Square) -> (Site, Site) {
        let d = self.delta(level);
        let m = self.config.origin() + Site::new(square.0 * d, square.1 * d);
        (m, m + Site::new(d - 1, d - 1))
    }

    /// Whether barrier and cover hypotheses on square goodness are enforced.
    pub fn strict(&self) -> bool {
        self.strict
    }

    /// Toy-mode override: `false` skips the goodness hypotheses of barrier construction.
    pub fn set_strict(&mut self, strict: bool) {
        self.strict = strict;
    }

    /// Registered covers in registration order.
    pub fn covers(&self) -> &[TriangularCover] {
        &self.covers
    }

    pub(crate) fn register(&mut self, cover: TriangularCover) -> Result<(), CoverError> {
        for other in &self.covers {
            if !cover.overlaps(other) {
                continue;
            }
            let nested = match cover.level().cmp(&other.level()) {
                std::cmp::Ordering::Greater => other.is_subset_of(&cover),
                std::cmp::Ordering::Less => cover.is_subset_of(other),
                std::cmp::Ordering::Equal => false,
            };
            if !nested {
                return Err(CoverError::NestingViolation { level: cover.level(), other: other.level() });
            }
        }
        self.covers.push(cover);
        Ok(())
    }

    /// A site is `(level)`-clean if its `(level)`-square is good and it lies at distance
    /// at least `g_j / 3` from every `(j)`-bad square for `j < level`.
    pub fn is_clean(&self, level: usize, s: Site) -> bool {
        if self.is_bad(level, self.square_of(level, s)) {
            return false;
        }
        (1..level).all(|j| {
            let g3 = self.params.g(j) / 3.0;
            self.levels[j - 1].bad.iter().all(|&b| {
                let d = box_dist_sq((s, s), self.square_bounds(j, b));
                (d as f64) >= g3 * g3
            })
        })
    }

    /// A clean site of a good square, searching first the ring around a lower bad square
    /// inside it, then the middle third, then the whole square, each from the centre out.
    pub fn find_clean_site(&self, level: usize, square: Square) -> Result<Site, CoverError> {
        if self.is_bad(level, square) {
            return Err(CoverError::HypothesisViolation(format!(
                "square ({}, {}) is ({level})-bad",
                square.0, square.1
            )));
        }
        let (lo, hi) = self.square_bounds(level, square);
        let d = self.delta(level);
        let centre2 = lo + hi;
        let mut sites: Vec<Site> = (lo.y..=hi.y).flat_map(|y| (lo.x..=hi.x).map(move |x| Site::new(x, y))).collect();
        sites.sort_by_key(|&s| ((s + s - centre2).norm_sq(), s));
        if level == 1 {
            return Ok(sites[0]);
        }
        let mut phases: Vec<Vec<Site>> = Vec::new();
        let lower = level - 1;
        let g = self.params.g(lower);
        if let Some(x) = self
            .bad_squares(lower)
            .map(|b| self.square_bounds(lower, b))
            .find(|&b| box_dist_sq(b, (lo, hi)) == 0)
        {
            let (r_lo, r_hi) = (2.0 * g / 5.0, 3.0 * g / 5.0);
            phases.push(
                sites
                    .iter()
                    .copied()
                    .filter(|&s| {
                        let dist = (box_dist_sq((s, s), x) as f64).sqrt();
                        dist >= r_lo && dist <= r_hi
                    })
                    .collect(),
            );
        }
        let third = d / 3;
        phases.push(
            sites
                .iter()
                .copied()
                .filter(|&s| {
                    let r = s - lo;
                    r.x >= third && r.x < d - third && r.y >= third && r.y < d - third
                })
                .collect(),
        );
        phases.push(sites);
        phases
            .into_iter()
            .flatten()
            .find(|&s| self.is_clean(level, s))
            .ok_or(CoverError::NoCleanSite { level, square })
    }
}

/// Monte Carlo frequencies of (1)-bad and (2)-bad squares.
#[derive(Clone, Debug, PartialEq)]
pub struct BadFractionReport {
    pub level1_fraction: f64,
    /// `Δ₁² p`.
    pub level1_bound: f64,
    pub level1_sigma: f64,
    /// Whether the observed fraction is at most the bound plus three standard errors.
    pub level1_ok: bool,
    pub level2_fraction: f64,
    pub q2: f64,
    pub level1_squares: usize,
    pub level2_squares: usize,
}

/// Samples `samples` independent `3Δ₂ × 3Δ₂` regions at density `p`.
///
/// Every (1)-square of each region counts towards the level-1 fraction; only the centre
/// (2)-square counts towards the level-2 fraction, so its label sees its full neighbourhood.
pub fn bad_fraction_check(params: &RenormParams, p: f64, samples: usize, seed: u64) -> BadFractionReport {
    let d1 = params.delta_i(1);
    let d2 = params.delta_i(2) as usize;
    let side = 3 * d2;
    let per_region = (side / d1 as usize).pow(2);
    let counts: Vec<(usize, bool)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let field = uniform_field(seed, k as u64, side * side);
            let cfg = GridConfig::from_fn(side, side, Boundary::FreeHealthy, |i, j| field[j * side + i] < p);
            let h = build_hierarchy(&cfg, params, 2).expect("region is aligned by construction");
            (h.bad_count(1), h.is_bad(2, (1, 1)))
        })
        .collect();
    let level1_squares = samples * per_region;
    let bad1: usize = counts.iter().map(|c| c.0).sum();
    let bad2 = counts.iter().filter(|c| c.1).count();
    let level1_fraction = if level1_squares == 0 { 0.0 } else { bad1 as f64 / level1_squares as f64 };
    let level1_bound = (d1 * d1) as f64 * p;
    let f = level1_bound.min(1.0);
    let level1_sigma = if level1_squares == 0 { 0.0 } else { (f * (1.0 - f) / level1_squares as f64).sqrt() };
    BadFractionReport {
        level1_fraction,
        level1_bound,
        level1_sigma,
        level1_ok: level1_fraction <= level1_bound + 3.0 * level1_sigma,
        level2_fraction: if samples == 0 { 0.0 } else { bad2 as f64 / samples as f64 },
        q2: params.q(2),
        level1_squares,
        level2_squares: samples,
    }
}
