use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::covers::{
    build_cover, build_hierarchy, stays_fixed, validate_barrier, verify_closed, CoverError, RenormParams, Square,
    TilingHierarchy, TriangularCover,
};
use crate::dynamics::{closure_in_place, Boundary, GridConfig};
use crate::geometry::{UpdateFamily, WitnessTriple};
use crate::lattice::Site;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverSummary {
    pub level: usize,
    pub anchors: [Vec<Site>; 3],
    pub size: usize,
    pub tight: bool,
    pub barriers_valid: bool,
    pub closed: bool,
    pub fixed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoReport {
    pub infected: usize,
    /// Bad-square counts, level 1 first.
    pub bad_counts: Vec<usize>,
    pub covers: Vec<CoverSummary>,
    /// Construction failures, one line each.
    pub failures: Vec<String>,
    /// Any two registered covers are disjoint or nested.
    pub laminar: bool,
    /// `closure(A) ⊆ ⋃ (T \ B)`; `None` when some cover could not be built.
    pub contained: Option<bool>,
}

impl DemoReport {
    /// Every cover was built and passed every check.
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
            && self.laminar
            && self.contained == Some(true)
            && self.covers.iter().all(|c| c.barriers_valid && c.closed && c.fixed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "infected sites: {}", self.infected);
        for (i, n) in self.bad_counts.iter().enumerate() {
            let _ = writeln!(s, "level {} bad squares: {n}", i + 1);
        }
        if self.infected == 0 {
            let _ = writeln!(s, "no covers needed");
        }
        for (i, c) in self.covers.iter().enumerate() {
            let _ = writeln!(
                s,
                "cover {i}: level={} sites={} tight={} barriers_valid={} closed={} fixed={}",
                c.level, c.size, c.tight, c.barriers_valid, c.closed, c.fixed
            );
            for (t, a) in c.anchors.iter().enumerate() {
                let pts: Vec<String> = a.iter().map(|p| format!("({p})")).collect();
                let _ = writeln!(s, "  side {}: {}", t + 1, pts.join(" "));
            }
        }
        for f in &self.failures {
            let _ = writeln!(s, "failure: {f}");
        }
        let _ = writeln!(s, "laminar: {}", self.laminar);
        match self.contained {
            Some(c) => {
                let _ = writeln!(s, "closure inside covers: {c}");
            }
            None => {
                let _ = writeln!(s, "closure inside covers: not checked");
            }
        }
        let _ = writeln!(s, "success: {}", self.succeeded());
        s
    }
}

/// 8-connected clusters of bad squares at one level.
fn clusters(h: &TilingHierarchy, level: usize) -> Vec<Vec<Square>> {
    let mut left: BTreeSet<Square> = h.bad_squares(level).collect();
    let mut out = Vec::new();
    while let Some(&first) = left.iter().next() {
        left.remove(&first);
        let mut comp = vec![first];
        let mut queue = VecDeque::from([first]);
        while let Some((a, b)) = queue.pop_front() {
            for da in -1..=1 {
                for db in -1..=1 {
                    if left.remove(&(a + da, b + db)) {
                        comp.push((a + da, b + db));
                        queue.push_back((a + da, b + db));
                    }
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// Builds the cover collection for `config` level by level.
///
/// At each level below the top, the clusters of bad squares that meet a good square of
/// the next level get a cover; at the top level every cluster does.
pub fn run_cover_demo(
    family: &UpdateFamily,
    witness: &WitnessTriple,
    config: &GridConfig,
    params: &RenormParams,
    max_level: usize,
    strict: bool,
) -> Result<(DemoReport, TilingHierarchy), CoverError> {
    let mut h = build_hierarchy(config, params, max_level)?;
    h.set_strict(strict);
    let mut failures = Vec::new();
    for k in 1..=max_level {
        for cluster in clusters(&h, k) {
            let meets_good = k == max_level
                || cluster.iter().any(|&sq| {
                    let (lo, _) = h.square_bounds(k, sq);
                    !h.is_bad(k + 1, h.square_of(k + 1, lo))
                });
            if !meets_good {
                continue;
            }
            let mut sites = Vec::new();
            for &sq in &cluster {
                let (lo, hi) = h.square_bounds(k, sq);
                for y in lo.y..=hi.y {
                    for x in lo.x..=hi.x {
                        sites.push(Site::new(x, y));
                    }
                }
            }
            if let Err(e) = build_cover(family, witness, &mut h, k, &sites) {
                failures.push(format!("level {k} cluster at ({}, {}): {e}", cluster[0].0, cluster[0].1));
            }
        }
    }
    let covers = h.covers();
    let summaries: Vec<CoverSummary> = covers
        .par_iter()
        .map(|c| CoverSummary {
            level: c.level(),
            anchors: [0, 1, 2].map(|t| c.barriers()[t].anchor.clone()),
            size: c.size(),
            tight: c.tight(),
            barriers_valid: c.barriers().iter().all(|b| validate_barrier(b, witness, params).is_ok()),
            closed: verify_closed(family, c),
            fixed: stays_fixed(family, c, 10),
        })
        .collect();
    let laminar = (0..covers.len()).all(|i| {
        (i + 1..covers.len()).all(|j| {
            let (a, b) = (&covers[i], &covers[j]);
            !a.overlaps(b) || a.is_subset_of(b) || b.is_subset_of(a)
        })
    });
    let contained = failures.is_empty().then(|| closure_inside(family, config, covers));
    let report = DemoReport {
        infected: config.count(),
        bad_counts: (1..=max_level).map(|k| h.bad_count(k)).collect(),
        covers: summaries,
        failures,
        laminar,
        contained,
    };
    Ok((report, h))
}

/// Bounding box of the region and every cover.
fn scene_bounds(config: &GridConfig, covers: &[TriangularCover]) -> (Site, Site) {
    let mut lo = config.origin();
    let mut hi = config.origin() + Site::new(config.width() as i64 - 1, config.height() as i64 - 1);
    for c in covers {
        let (a, b) = c.bbox();
        lo = Site::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Site::new(hi.x.max(b.x), hi.y.max(b.y));
    }
    (lo, hi)
}

fn closure_inside(family: &UpdateFamily, config: &GridConfig, covers: &[TriangularCover]) -> bool {
    let (lo, hi) = scene_bounds(config, covers);
    let pad = family.reach() + 1;
    let origin = lo - Site::new(pad, pad);
    let w = (hi.x - lo.x + 1 + 2 * pad) as usize;
    let h = (hi.y - lo.y + 1 + 2 * pad) as usize;
    let mut cfg = GridConfig::new(w, h, Boundary::FreeHealthy).with_origin(origin);
    for s in config.infected_sites() {
        cfg.set_site(s, true);
    }
    closure_in_place(family, &mut cfg);
    cfg.infected_sites().iter().all(|&v| covers.iter().any(|c| c.in_interior(v)))
}

/// Plain PPM (P3) of the region and the covers: infected sites black, barriers red,
/// cover interiors pale blue, everything else white. Top row first.
pub fn overlay_ppm(h: &TilingHierarchy) -> String {
    let config = h.config();
    let covers = h.covers();
    let (lo, hi) = scene_bounds(config, covers);
    let (w, ht) = (hi.x - lo.x + 1, hi.y - lo.y + 1);
    let mut s = format!("P3\n{w} {ht}\n255\n");
    for y in (lo.y..=hi.y).rev() {
        let row: Vec<&str> = (lo.x..=hi.x)
            .map(|x| {
                let v = Site::new(x, y);
                if config.contains_site(v) && config.is_infected(v) {
                    "0 0 0"
                } else if covers.iter().any(|c| c.in_barrier(v)) {
                    "200 30 30"
                } else if covers.iter().any(|c| c.in_interior(v)) {
                    "190 215 240"
                } else {
                    "255 255 255"
                }
            })
            .collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}
