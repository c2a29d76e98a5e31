use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::covers::{CoverError, RenormParams, TilingHierarchy, ANGLE_SLACK};
use crate::geometry::{UpdateFamily, WitnessTriple};
use crate::lattice::{segment_dist_sq, within_segment, Site};

/// `|(θ(y − x) − θ_t) mod 2π − π/2|`: how far the segment `x → y` is from running
/// counterclockwise-perpendicular to the side direction `θ_t`.
pub fn slope_deviation(x: Site, y: Site, theta_t: f64) -> f64 {
    let d = y - x;
    let theta = (d.y as f64).atan2(d.x as f64);
    ((theta - theta_t).rem_euclid(TAU) - FRAC_PI_2).abs()
}

/// An `(level, side)`-barrier: the sites within distance `range` of an anchor polyline.
///
/// At level 1 the anchor is a single segment. At higher levels consecutive anchor points
/// are joined by barriers one level down, stored in `parts`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barrier {
    pub level: usize,
    /// Index of the witness direction this barrier is perpendicular to.
    pub side: usize,
    pub anchor: Vec<Site>,
    pub parts: Vec<Barrier>,
    range_sq: i128,
}

impl Barrier {
    pub fn straight(side: usize, x: Site, y: Site, range_sq: i128) -> Barrier {
        Barrier { level: 1, side, anchor: vec![x, y], parts: Vec::new(), range_sq }
    }

    pub fn start(&self) -> Site {
        self.anchor[0]
    }

    pub fn end(&self) -> Site {
        *self.anchor.last().expect("anchors are non-empty")
    }

    pub fn range_sq(&self) -> i128 {
        self.range_sq
    }

    /// The level-1 segments making up the barrier, in order.
    pub fn leaf_segments(&self) -> Vec<(Site, Site)> {
        if self.parts.is_empty() {
            self.anchor.windows(2).map(|w| (w[0], w[1])).collect()
        } else {
            self.parts.iter().flat_map(Barrier::leaf_segments).collect()
        }
    }

    /// Vertices of the level-1 polyline from start to end.
    pub fn polyline(&self) -> Vec<Site> {
        let segs = self.leaf_segments();
        let mut pts = vec![segs[0].0];
        pts.extend(segs.iter().map(|s| s.1));
        pts
    }

    pub fn in_tube(&self, v: Site) -> bool {
        self.leaf_segments().iter().any(|&(p, q)| within_segment(v, p, q, self.range_sq))
    }

    /// Inclusive bounding box of the tube.
    pub fn bbox(&self) -> (Site, Site) {
        let r = radius_ceil(self.range_sq);
        let pts = self.polyline();
        let lo = Site::new(pts.iter().map(|p| p.x).min().unwrap() - r, pts.iter().map(|p| p.y).min().unwrap() - r);
        let hi = Site::new(pts.iter().map(|p| p.x).max().unwrap() + r, pts.iter().map(|p| p.y).max().unwrap() + r);
        (lo, hi)
    }

    /// All tube sites, sorted.
    pub fn tube(&self) -> Vec<Site> {
        let r = radius_ceil(self.range_sq);
        let mut out = BTreeSet::new();
        for (p, q) in self.leaf_segments() {
            for y in p.y.min(q.y) - r..=p.y.max(q.y) + r {
                for x in p.x.min(q.x) - r..=p.x.max(q.x) + r {
                    let v = Site::new(x, y);
                    if within_segment(v, p, q, self.range_sq) {
                        out.insert(v);
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

pub(crate) fn radius_ceil(range_sq: i128) -> i64 {
    let mut r = (range_sq as f64).sqrt() as i64;
    while (r as i128) * (r as i128) < range_sq {
        r += 1;
    }
    r
}

fn check_slope(x: Site, y: Site, theta: f64, bound: f64) -> Result<(), CoverError> {
    let deviation = slope_deviation(x, y, theta);
    if deviation < bound + ANGLE_SLACK {
        Ok(())
    } else {
        Err(CoverError::SlopeViolation { from: x, to: y, deviation, bound })
    }
}

/// Recomputes every barrier invariant from scratch: level structure, slope bounds and
/// the tube as the set of sites within range of the polyline.
pub fn validate_barrier(b: &Barrier, witness: &WitnessTriple, params: &RenormParams) -> Result<(), CoverError> {
    let theta = witness.thetas[b.side];
    let bad = |msg: String| Err(CoverError::HypothesisViolation(msg));
    if b.anchor.len() < 2 {
        return bad("anchor needs at least two points".into());
    }
    if b.level == 1 {
        if b.anchor.len() != 2 || !b.parts.is_empty() {
            return bad("level-1 barriers are single segments".into());
        }
        check_slope(b.anchor[0], b.anchor[1], theta, params.sigma(1))?;
    } else {
        check_slope(b.start(), b.end(), theta, params.sigma(b.level))?;
        if b.parts.len() + 1 != b.anchor.len() {
            return bad("one part per anchor segment".into());
        }
        for (w, part) in b.anchor.windows(2).zip(&b.parts) {
            check_slope(w[0], w[1], theta, params.sigma(b.level - 1))?;
            if part.level + 1 != b.level || part.side != b.side || part.range_sq != b.range_sq {
                return bad("part has the wrong level, side or radius".into());
            }
            if part.start() != w[0] || part.end() != w[1] {
                return bad("part does not join consecutive anchor points".into());
            }
            validate_barrier(part, witness, params)?;
        }
    }
    let segs = b.leaf_segments();
    let (lo, hi) = b.bbox();
    let mut brute = Vec::new();
    for y in lo.y - 1..=hi.y + 1 {
        for x in lo.x - 1..=hi.x + 1 {
            let v = Site::new(x, y);
            if segs.iter().any(|&(p, q)| {
                let (num, den) = segment_dist_sq(v, p, q);
                num <= b.range_sq * den
            }) {
                brute.push(v);
            }
        }
    }
    brute.sort();
    if brute != b.tube() {
        return bad("tube differs from the sites within range of the anchor".into());
    }
    Ok(())
}

/// Euclidean distance from segment `[p, q]` to the box `[lo, hi]`.
pub(crate) fn segment_box_dist(p: Site, q: Site, lo: Site, hi: Site) -> f64 {
    let (p, q) = (p.as_f64(), q.as_f64());
    let (lo, hi) = (lo.as_f64(), hi.as_f64());
    // Liang–Barsky clip: zero if the segment enters the box.
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let mut inside = true;
    for (den, num) in [(-dx, p.0 - lo.0), (dx, hi.0 - p.0), (-dy, p.1 - lo.1), (dy, hi.1 - p.1)] {
        if den == 0.0 {
            if num < 0.0 {
                inside = false;
            }
        } else {
            let t = num / den;
            if den < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if inside && t0 <= t1 {
        return 0.0;
    }
    let pt_seg = |v: (f64, f64)| {
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 { 0.0 } else { (((v.0 - p.0) * dx + (v.1 - p.1) * dy) / len2).clamp(0.0, 1.0) };
        (v.0 - p.0 - t * dx).hypot(v.1 - p.1 - t * dy)
    };
    let pt_box = |v: (f64, f64)| {
        let gx = (lo.0 - v.0).max(v.0 - hi.0).max(0.0);
        let gy = (lo.1 - v.1).max(v.1 - hi.1).max(0.0);
        gx.hypot(gy)
    };
    [pt_seg(lo), pt_seg(hi), pt_seg((lo.0, hi.1)), pt_seg((hi.0, lo.1)), pt_box(p), pt_box(q)]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

fn check_goodness(h: &TilingHierarchy, level: usize, x: Site, y: Site) -> Result<(), CoverError> {
    let d = h.delta(level) as f64;
    if let Some(b) = h
        .bad_squares(level)
        .find(|&b| {
            let (lo, hi) = h.square_bounds(level, b);
            segment_box_dist(x, y, lo, hi) <= d
        })
    {
        return Err(CoverError::HypothesisViolation(format!(
            "({level})-bad square ({}, {}) within distance {d} of segment {x} -> {y}",
            b.0, b.1
        )));
    }
    Ok(())
}

/// An obstacle's extent in the frame of the segment: along it (`s`) and across it (`n`).
#[derive(Clone, Copy, Debug)]
struct Extent {
    s: (f64, f64),
    n: (f64, f64),
}

/// Joins `x` to `y` by a `(level, t)`-barrier, detouring around bad squares and
/// registered covers of the level below.
///
/// Each cluster of nearby obstacles is passed by two waypoints displaced to the nearer
/// side; waypoints are clean sites close to their targets, chosen nearest to the straight
/// segment with ties broken by coordinates.
#[allow(clippy::too_many_arguments)]
pub fn build_barrier(
    family: &UpdateFamily,
    witness: &WitnessTriple,
    h: &TilingHierarchy,
    level: usize,
    t: usize,
    x: Site,
    y: Site,
) -> Result<Barrier, CoverError> {
    let params = h.params();
    let theta = witness.thetas[t];
    check_slope(x, y, theta, params.sigma(level))?;
    if h.strict() {
        check_goodness(h, level, x, y)?;
        if level >= 2 {
            for e in [x, y] {
                if !h.is_clean(level, e) {
                    return Err(CoverError::HypothesisViolation(format!("endpoint {e} is not ({level})-clean")));
                }
            }
        }
    }
    let range_sq = family.range_sq();
    if level == 1 {
        return Ok(Barrier::straight(t, x, y, range_sq));
    }
    let m = level - 1;
    let anchor = detour_anchor(family, h, m, x, y)?;
    for w in anchor.windows(2) {
        check_slope(w[0], w[1], theta, params.sigma(m))
            .map_err(|e| CoverError::WaypointNotFound(format!("detour too steep: {e}")))?;
    }
    let parts = anchor
        .windows(2)
        .map(|w| build_barrier(family, witness, h, m, t, w[0], w[1]))
        .collect::<Result<Vec<_>, _>>()?;
    let b = Barrier { level, side: t, anchor, parts, range_sq };
    let tube = b.tube();
    for c in h.covers().iter().filter(|c| c.level() < level) {
        if tube.iter().any(|&v| c.contains(v)) {
            return Err(CoverError::WaypointNotFound(format!(
                "tube of the level-{level} barrier meets a registered level-{} cover",
                c.level()
            )));
        }
    }
    Ok(b)
}

fn detour_anchor(family: &UpdateFamily, h: &TilingHierarchy, m: usize, x: Site, y: Site) -> Result<Vec<Site>, CoverError> {
    let dm = h.delta(m);
    let clear = (2 * dm + radius_ceil(family.range_sq()) + 1) as f64;
    let (px, py) = x.as_f64();
    let (qx, qy) = y.as_f64();
    let len = (qx - px).hypot(qy - py);
    let dir = ((qx - px) / len, (qy - py) / len);
    let nrm = (-dir.1, dir.0);
    let frame = |v: (f64, f64)| {
        let (a, b) = (v.0 - px, v.1 - py);
        (a * dir.0 + b * dir.1, a * nrm.0 + b * nrm.1)
    };
    let extent = |lo: Site, hi: Site| {
        let pts = [(lo.x, lo.y), (hi.x, lo.y), (lo.x, hi.y), (hi.x, hi.y)].map(|(a, b)| frame((a as f64, b as f64)));
        let s = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| (acc.0.min(p.0), acc.1.max(p.0)));
        let n = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| (acc.0.min(p.1), acc.1.max(p.1)));
        Extent { s, n }
    };
    let mut obstacles: Vec<Extent> = h.bad_squares(m).map(|b| h.square_bounds(m, b)).map(|(lo, hi)| extent(lo, hi)).collect();
    obstacles.extend(h.covers().iter().filter(|c| c.level() <= m).map(|c| {
        let (lo, hi) = c.bbox();
        extent(lo, hi)
    }));
    let mut near: Vec<Extent> = obstacles
        .into_iter()
        .filter(|e| e.s.1 >= -clear && e.s.0 <= len + clear && e.n.1 >= -clear && e.n.0 <= clear)
        .collect();
    near.sort_by(|a, b| a.s.0.total_cmp(&b.s.0));
    let mut clusters: Vec<Extent> = Vec::new();
    for e in near {
        match clusters.last_mut() {
            Some(c) if e.s.0 - clear <= c.s.1 + clear => {
                c.s.1 = c.s.1.max(e.s.1);
                c.n = (c.n.0.min(e.n.0), c.n.1.max(e.n.1));
            }
            _ => clusters.push(e),
        }
    }
    let mut anchor = vec![x];
    for c in clusters {
        let (up, down) = (c.n.1 + clear, c.n.0 - clear);
        let off = if up <= -down { up } else { down };
        let (s1, s2) = (c.s.0 - clear, c.s.1 + clear);
        if s1 < 0.0 || s2 > len {
            return Err(CoverError::WaypointNotFound(format!(
                "obstacle near the end of segment {x} -> {y} leaves no room to detour"
            )));
        }
        for s in [s1, s2] {
            let target = (px + s * dir.0 + off * nrm.0, py + s * dir.1 + off * nrm.1);
            anchor.push(snap_waypoint(h, m, target, dm, x, y)?);
        }
    }
    anchor.push(y);
    Ok(anchor)
}

/// The `(m)`-clean site within distance `Δ_m` of `target` closest to segment `[x, y]`,
/// ties broken by coordinates.
fn snap_waypoint(h: &TilingHierarchy, m: usize, target: (f64, f64), dm: i64, x: Site, y: Site) -> Result<Site, CoverError> {
    let (cx, cy) = (target.0.round() as i64, target.1.round() as i64);
    let mut best: Option<(Site, (i128, i128))> = None;
    for vy in cy - dm..=cy + dm {
        for vx in cx - dm..=cx + dm {
            let v = Site::new(vx, vy);
            let (fx, fy) = v.as_f64();
            if (fx - target.0).hypot(fy - target.1) > dm as f64 || !h.is_clean(m, v) {
                continue;
            }
            let d = segment_dist_sq(v, x, y);
            let better = match best {
                None => true,
                Some((b, bd)) => match (d.0 * bd.1).cmp(&(bd.0 * d.1)) {
                    Ordering::Less => true,
                    Ordering::Equal => v < b,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((v, d));
            }
        }
    }
    best.map(|b| b.0).ok_or_else(|| {
        CoverError::WaypointNotFound(format!("no ({m})-clean site near ({:.1}, {:.1})", target.0, target.1))
    })
}
