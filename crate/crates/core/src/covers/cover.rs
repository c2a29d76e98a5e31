use std::cmp::Ordering;

use crate::covers::barrier::radius_ceil;
use crate::covers::{build_barrier, cover_layout, Barrier, CoverError, TilingHierarchy};
use crate::dynamics::{closure_in_place, step, Boundary, GridConfig};
use crate::geometry::{UpdateFamily, WitnessTriple};
use crate::lattice::Site;

/// Three barriers joined end to end, together with the region they enclose.
///
/// `T` is the enclosed region plus the barrier tubes, `B` the union of the tubes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularCover {
    level: usize,
    barriers: [Barrier; 3],
    tight: bool,
    origin: Site,
    width: usize,
    height: usize,
    in_t: Vec<bool>,
    in_b: Vec<bool>,
    lo: Site,
    hi: Site,
}

/// `ceil(num / den)` for `den > 0`.
fn ceil_div(num: i128, den: i128) -> i128 {
    num.div_euclid(den) + i128::from(num.rem_euclid(den) != 0)
}

impl TriangularCover {
    /// Assembles a cover from three barriers whose endpoints chain into a closed loop.
    ///
    /// No slope or goodness checks happen here; [`build_cover`] is the checked path.
    pub fn from_barriers(level: usize, barriers: [Barrier; 3]) -> TriangularCover {
        for t in 0..3 {
            assert_eq!(barriers[t].end(), barriers[(t + 1) % 3].start(), "barriers must share endpoints");
        }
        let mut poly: Vec<Site> = Vec::new();
        for b in &barriers {
            let pts = b.polyline();
            poly.extend_from_slice(&pts[..pts.len() - 1]);
        }
        let r = radius_ceil(barriers[0].range_sq()) + 1;
        let lo = Site::new(poly.iter().map(|p| p.x).min().unwrap() - r, poly.iter().map(|p| p.y).min().unwrap() - r);
        let hi = Site::new(poly.iter().map(|p| p.x).max().unwrap() + r, poly.iter().map(|p| p.y).max().unwrap() + r);
        let width = (hi.x - lo.x + 1) as usize;
        let height = (hi.y - lo.y + 1) as usize;
        let mut in_t = vec![false; width * height];
        let mut in_b = vec![false; width * height];
        let n = poly.len();
        for y in lo.y..=hi.y {
            // Crossings of the row with each edge under the half-open rule, as fractions.
            let mut xs: Vec<(i128, i128)> = Vec::new();
            for i in 0..n {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                if (a.y <= y) == (b.y <= y) {
                    continue;
                }
                let den = (b.y - a.y) as i128;
                let num = a.x as i128 * den + (y - a.y) as i128 * (b.x - a.x) as i128;
                xs.push(if den < 0 { (-num, -den) } else { (num, den) });
            }
            xs.sort_by(|p, q| (p.0 * q.1).cmp(&(q.0 * p.1)));
            let row = ((y - lo.y) as usize) * width;
            for pair in xs.chunks(2) {
                if let [a, b] = pair {
                    let from = ceil_div(a.0, a.1) as i64;
                    let to = ceil_div(b.0, b.1) as i64 - 1;
                    for x in from.max(lo.x)..=to.min(hi.x) {
                        in_t[row + (x - lo.x) as usize] = true;
                    }
                }
            }
        }
        for b in &barriers {
            for v in b.tube() {
                let idx = ((v.y - lo.y) as usize) * width + (v.x - lo.x) as usize;
                in_t[idx] = true;
                in_b[idx] = true;
            }
        }
        let (mut tlo, mut thi) = (hi, lo);
        for j in 0..height {
            for i in 0..width {
                if in_t[j * width + i] {
                    let s = lo + Site::new(i as i64, j as i64);
                    tlo = Site::new(tlo.x.min(s.x), tlo.y.min(s.y));
                    thi = Site::new(thi.x.max(s.x), thi.y.max(s.y));
                }
            }
        }
        TriangularCover { level, barriers, tight: false, origin: lo, width, height, in_t, in_b, lo: tlo, hi: thi }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn barriers(&self) -> &[Barrier; 3] {
        &self.barriers
    }

    /// Whether the cover fits in the `cΔ × cΔ` square centred on the covered set's square.
    pub fn tight(&self) -> bool {
        self.tight
    }

    /// Corner sites `y_1, y_2, y_3`.
    pub fn corners(&self) -> [Site; 3] {
        [0, 1, 2].map(|t| self.barriers[t].start())
    }

    /// Inclusive bounding box of `T`.
    pub fn bbox(&self) -> (Site, Site) {
        (self.lo, self.hi)
    }

    fn index(&self, v: Site) -> Option<usize> {
        let d = v - self.origin;
        (d.x >= 0 && d.y >= 0 && (d.x as usize) < self.width && (d.y as usize) < self.height)
            .then(|| d.y as usize * self.width + d.x as usize)
    }

    /// Membership in `T`.
    pub fn contains(&self, v: Site) -> bool {
        self.index(v).is_some_and(|i| self.in_t[i])
    }

    pub fn in_barrier(&self, v: Site) -> bool {
        self.index(v).is_some_and(|i| self.in_b[i])
    }

    /// Membership in `T \ B`.
    pub fn in_interior(&self, v: Site) -> bool {
        self.index(v).is_some_and(|i| self.in_t[i] && !self.in_b[i])
    }

    fn sites_where(&self, f: impl Fn(usize) -> bool) -> Vec<Site> {
        let mut out = Vec::new();
        for j in 0..self.height {
            for i in 0..self.width {
                if f(j * self.width + i) {
                    out.push(self.origin + Site::new(i as i64, j as i64));
                }
            }
        }
        out
    }

    /// Sites of `T`.
    pub fn sites(&self) -> Vec<Site> {
        self.sites_where(|i| self.in_t[i])
    }

    /// Sites of `T \ B`.
    pub fn interior_sites(&self) -> Vec<Site> {
        self.sites_where(|i| self.in_t[i] && !self.in_b[i])
    }

    pub fn size(&self) -> usize {
        self.in_t.iter().filter(|&&b| b).count()
    }

    pub fn overlaps(&self, other: &TriangularCover) -> bool {
        let lo = Site::new(self.lo.x.max(other.lo.x), self.lo.y.max(other.lo.y));
        let hi = Site::new(self.hi.x.min(other.hi.x), self.hi.y.min(other.hi.y));
        (lo.y..=hi.y).any(|y| (lo.x..=hi.x).any(|x| {
            let v = Site::new(x, y);
            self.contains(v) && other.contains(v)
        }))
    }

    /// `T(self) ⊆ T(other)`.
    pub fn is_subset_of(&self, other: &TriangularCover) -> bool {
        (self.lo.y..=self.hi.y).all(|y| (self.lo.x..=self.hi.x).all(|x| {
            let v = Site::new(x, y);
            !self.contains(v) || other.contains(v)
        }))
    }

    /// All-healthy grid around `T` with room for one step of growth, seeded with `T \ B`.
    fn seeded_grid(&self, family: &UpdateFamily) -> GridConfig {
        let pad = family.reach() + 1;
        let origin = self.lo - Site::new(pad, pad);
        let w = (self.hi.x - self.lo.x + 1 + 2 * pad) as usize;
        let h = (self.hi.y - self.lo.y + 1 + 2 * pad) as usize;
        GridConfig::from_fn(w, h, Boundary::FreeHealthy, |i, j| {
            self.in_interior(origin + Site::new(i as i64, j as i64))
        })
        .with_origin(origin)
    }
}

/// Whether `T \ B` is closed under the dynamics: its closure adds no site.
pub fn verify_closed(family: &UpdateFamily, cover: &TriangularCover) -> bool {
    let seed = cover.seeded_grid(family);
    let mut cfg = seed.clone();
    closure_in_place(family, &mut cfg);
    cfg == seed
}

/// Whether `steps` synchronous updates from `T \ B` infect nothing new.
pub fn stays_fixed(family: &UpdateFamily, cover: &TriangularCover, steps: usize) -> bool {
    let mut cfg = cover.seeded_grid(family);
    for _ in 0..steps {
        let (next, report) = step(family, &cfg);
        if report.newly_infected > 0 {
            return false;
        }
        cfg = next;
    }
    true
}

/// Builds and registers a `(level)`-triangular cover of `k`.
///
/// The centre square of the layout is the smallest square with lowest-left corner at the
/// lowest-left corner of `k`'s bounding box, but no smaller than the family's range.
/// An empty `k` is treated as the square at the origin.
pub fn build_cover(
    family: &UpdateFamily,
    witness: &WitnessTriple,
    h: &mut TilingHierarchy,
    level: usize,
    k: &[Site],
) -> Result<TriangularCover, CoverError> {
    let params = h.params().clone();
    let range = family.range();
    if (params.delta1 as f64) < range {
        return Err(CoverError::ParameterOrderViolation(format!(
            "delta1 = {} is below the family range {range:.3}",
            params.delta1
        )));
    }
    let (kmin, kmax) = if k.is_empty() {
        (Site::ORIGIN, Site::ORIGIN)
    } else {
        (
            Site::new(k.iter().map(|s| s.x).min().unwrap(), k.iter().map(|s| s.y).min().unwrap()),
            Site::new(k.iter().map(|s| s.x).max().unwrap(), k.iter().map(|s| s.y).max().unwrap()),
        )
    };
    let side = (kmax.x - kmin.x + 1).max(kmax.y - kmin.y + 1);
    let delta = side.max(range.ceil() as i64).max(1);
    let layout = cover_layout(delta, witness, params.epsilon)?;
    let shift = kmin - Site::new(layout.ell0 * delta + 1, layout.ell0 * delta + 1);
    let mut ends = [Site::ORIGIN; 3];
    for t in 0..3 {
        let tile_lo = layout.tile_min(layout.tiles[t]) + shift;
        let centre2 = tile_lo + tile_lo + Site::new(delta - 1, delta - 1);
        let mut sites: Vec<Site> = (0..delta)
            .flat_map(|j| (0..delta).map(move |i| tile_lo + Site::new(i, j)))
            .collect();
        sites.sort_by(|a, b| match ((*a + *a - centre2).norm_sq()).cmp(&(*b + *b - centre2).norm_sq()) {
            Ordering::Equal => a.cmp(b),
            o => o,
        });
        ends[t] = match sites.iter().find(|&&v| h.is_clean(level, v)) {
            Some(&v) => v,
            None if h.strict() => return Err(CoverError::NoCleanSite { level, square: layout.tiles[t] }),
            None => sites[0],
        };
    }
    let mut built = Vec::with_capacity(3);
    for t in 0..3 {
        built.push(build_barrier(family, witness, h, level, t, ends[t], ends[(t + 1) % 3])?);
    }
    let barriers: [Barrier; 3] = built.try_into().expect("three barriers");
    let mut cover = TriangularCover::from_barriers(level, barriers);
    let all_inside = if k.is_empty() { !cover.interior_sites().is_empty() } else { k.iter().all(|&v| cover.in_interior(v)) };
    if !all_inside {
        return Err(CoverError::NotEnclosed);
    }
    let span = layout.c * delta;
    let (lo, hi) = cover.bbox();
    let (sq_lo, sq_hi) = (shift + Site::new(1, 1), shift + Site::new(span, span));
    cover.tight = lo.x >= sq_lo.x && lo.y >= sq_lo.y && hi.x <= sq_hi.x && hi.y <= sq_hi.y;
    h.register(cover.clone())?;
    Ok(cover)
}
