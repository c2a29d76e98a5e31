use std::fmt::Write as _;

use crate::geometry::Direction;
use crate::lattice::Site;

/// How sites outside the stored rectangle behave.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Coordinates wrap modulo the width and height.
    Torus,
    /// Everything outside is permanently healthy.
    FreeHealthy,
    /// Outside sites `x` with `<x, d> < 0` are permanently infected, all others healthy.
    HalfPlane(Direction),
}

/// A finite rectangle of Z² with packed infection state.
///
/// Cell `(i, j)` with `0 <= i < width`, `0 <= j < height` is the site `origin + (i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridConfig {
    width: usize,
    height: usize,
    boundary: Boundary,
    origin: Site,
    bits: Vec<u64>,
}

impl GridConfig {
    /// An all-healthy region.
    pub fn new(width: usize, height: usize, boundary: Boundary) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        let words = (width * height).div_ceil(64);
        GridConfig { width, height, boundary, origin: Site::ORIGIN, bits: vec![0; words] }
    }

    /// Square region `[-half, half]²`.
    pub fn centered(half: i64, boundary: Boundary) -> Self {
        let side = (2 * half + 1) as usize;
        Self::new(side, side, boundary).with_origin(Site::new(-half, -half))
    }

    pub fn from_fn(width: usize, height: usize, boundary: Boundary, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::new(width, height, boundary);
        for j in 0..height {
            for i in 0..width {
                if f(i, j) {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    pub fn with_origin(mut self, origin: Site) -> Self {
        self.origin = origin;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn origin(&self) -> Site {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub(crate) fn get_index(&self, idx: usize) -> bool {
        (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_index(&mut self, idx: usize) {
        self.bits[idx >> 6] |= 1 << (idx & 63);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.get_index(j * self.width + i)
    }

    pub fn set(&mut self, i: usize, j: usize, infected: bool) {
        let idx = j * self.width + i;
        if infected {
            self.set_index(idx);
        } else {
            self.bits[idx >> 6] &= !(1 << (idx & 63));
        }
    }

    /// Cell indices of a site, if it lies in the stored rectangle.
    pub fn cell_of(&self, s: Site) -> Option<(usize, usize)> {
        let d = s - self.origin;
        (d.x >= 0 && d.y >= 0 && (d.x as usize) < self.width && (d.y as usize) < self.height)
            .then_some((d.x as usize, d.y as usize))
    }

    pub fn site_of(&self, i: usize, j: usize) -> Site {
        self.origin + Site::new(i as i64, j as i64)
    }

    pub fn contains_site(&self, s: Site) -> bool {
        self.cell_of(s).is_some()
    }

    /// State of any site of Z², applying the boundary convention outside the rectangle.
    pub fn is_infected(&self, s: Site) -> bool {
        let d = s - self.origin;
        self.infected_at(d.x, d.y)
    }

    /// State at cell coordinates that may fall outside the rectangle.
    #[inline]
    pub(crate) fn infected_at(&self, i: i64, j: i64) -> bool {
        let (w, h) = (self.width as i64, self.height as i64);
        if i >= 0 && j >= 0 && i < w && j < h {
            return self.get_index((j * w + i) as usize);
        }
        match self.boundary {
            Boundary::Torus => self.get_index((j.rem_euclid(h) * w + i.rem_euclid(w)) as usize),
            Boundary::FreeHealthy => false,
            Boundary::HalfPlane(d) => d.dot_site(self.origin + Site::new(i, j)) < 0,
        }
    }

    pub fn set_site(&mut self, s: Site, infected: bool) {
        let (i, j) = self.cell_of(s).expect("site outside the region");
        self.set(i, j, infected);
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.len() as f64
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len()
    }

    pub fn infected_sites(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for j in 0..self.height {
            for i in 0..self.width {
                if self.get(i, j) {
                    out.push(self.site_of(i, j));
                }
            }
        }
        out
    }

    /// Whether every infected cell of `self` is infected in `other` (same shape).
    pub fn is_subset(&self, other: &GridConfig) -> bool {
        assert_eq!((self.width, self.height), (other.width, other.height));
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Cyclic shift by `(dx, dy)` cells.
    pub fn shifted(&self, dx: i64, dy: i64) -> GridConfig {
        let (w, h) = (self.width as i64, self.height as i64);
        let mut out = GridConfig { bits: vec![0; self.bits.len()], ..self.clone() };
        for j in 0..self.height {
            for i in 0..self.width {
                if self.get(i, j) {
                    out.set((i as i64 + dx).rem_euclid(w) as usize, (j as i64 + dy).rem_euclid(h) as usize, true);
                }
            }
        }
        out
    }

    /// Text rendering, top row first: '#' infected, '.' healthy.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for j in (0..self.height).rev() {
            for i in 0..self.width {
                s.push(if self.get(i, j) { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    /// Plain portable bitmap (P1), 1 = infected.
    pub fn to_pbm_ascii(&self) -> String {
        let mut s = format!("P1\n{} {}\n", self.width, self.height);
        for j in (0..self.height).rev() {
            let row: Vec<&str> = (0..self.width).map(|i| if self.get(i, j) { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    /// Raw portable bitmap (P4).
    pub fn to_pbm_binary(&self) -> Vec<u8> {
        let mut out = format!("P4\n{} {}\n", self.width, self.height).into_bytes();
        let row_bytes = self.width.div_ceil(8);
        for j in (0..self.height).rev() {
            let mut row = vec![0u8; row_bytes];
            for i in 0..self.width {
                if self.get(i, j) {
                    row[i / 8] |= 0x80 >> (i % 8);
                }
            }
            out.extend(row);
        }
        out
    }
}
