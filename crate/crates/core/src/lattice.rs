//! Integer lattice points and small exact-arithmetic helpers shared by every module.

use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A point of Z². Used both for lattice sites and for rule offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    pub fn dot(self, other: Site) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128
    }

    pub fn cross(self, other: Site) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }

    pub fn norm_sq(self) -> i128 {
        self.dot(self)
    }

    pub fn dist_sq(self, other: Site) -> i128 {
        (self - other).norm_sq()
    }

    /// Rotation by a quarter turn counterclockwise, (x, y) -> (-y, x).
    pub fn rot90(self) -> Site {
        Site::new(-self.y, self.x)
    }

    pub fn as_f64(self) -> (f64, f64) {
        (self.x as f64, self.y as f64)
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.x, -self.y)
    }
}

impl From<(i64, i64)> for Site {
    fn from((x, y): (i64, i64)) -> Self {
        Site::new(x, y)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Squared Euclidean distance from `v` to the closed segment `[p, q]`, as an exact
/// rational `num / den` with `den > 0`.
pub(crate) fn segment_dist_sq(v: Site, p: Site, q: Site) -> (i128, i128) {
    let d = q - p;
    let len_sq = d.norm_sq();
    let w = v - p;
    if len_sq == 0 {
        return (w.norm_sq(), 1);
    }
    let t = w.dot(d);
    if t <= 0 {
        (w.norm_sq(), 1)
    } else if t >= len_sq {
        ((v - q).norm_sq(), 1)
    } else {
        let c = d.cross(w);
        (c * c, len_sq)
    }
}

/// True iff `v` lies within Euclidean distance `sqrt(radius_sq)` of segment `[p, q]`.
pub(crate) fn within_segment(v: Site, p: Site, q: Site, radius_sq: i128) -> bool {
    let (num, den) = segment_dist_sq(v, p, q);
    num <= radius_sq * den
}
