use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use crate::geometry::GeometryError;
use crate::lattice::{gcd, Site};

/// A rational direction on the unit circle, stored as a primitive integer vector.
///
/// Circular order is exact: directions are compared by the half-plane they fall in
/// (angles in `[0, π)` versus `[π, 2π)`) and then by the sign of a cross product.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Direction {
    x: i64,
    y: i64,
}

impl Direction {
    pub const EAST: Direction = Direction { x: 1, y: 0 };
    pub const NORTH: Direction = Direction { x: 0, y: 1 };
    pub const WEST: Direction = Direction { x: -1, y: 0 };
    pub const SOUTH: Direction = Direction { x: 0, y: -1 };

    /// Builds a direction from an already primitive vector.
    pub fn new(x: i64, y: i64) -> Result<Self, GeometryError> {
        if x == 0 && y == 0 {
            return Err(GeometryError::ZeroVector);
        }
        if gcd(x, y) != 1 {
            return Err(GeometryError::NotPrimitive { x, y });
        }
        Ok(Direction { x, y })
    }

    /// Direction of an arbitrary non-zero vector (divides out the gcd).
    pub fn of_vector(x: i64, y: i64) -> Option<Self> {
        if x == 0 && y == 0 {
            return None;
        }
        let g = gcd(x, y);
        Some(Direction { x: x / g, y: y / g })
    }

    pub fn of_site(s: Site) -> Option<Self> {
        Self::of_vector(s.x, s.y)
    }

    pub fn x(self) -> i64 {
        self.x
    }

    pub fn y(self) -> i64 {
        self.y
    }

    pub fn as_site(self) -> Site {
        Site::new(self.x, self.y)
    }

    pub fn opposite(self) -> Self {
        Direction { x: -self.x, y: -self.y }
    }

    /// Quarter turn counterclockwise.
    pub fn rot90(self) -> Self {
        Direction { x: -self.y, y: self.x }
    }

    /// Quarter turn clockwise.
    pub fn rot270(self) -> Self {
        Direction { x: self.y, y: -self.x }
    }

    pub fn cross(self, other: Direction) -> i128 {
        self.as_site().cross(other.as_site())
    }

    pub fn dot(self, other: Direction) -> i128 {
        self.as_site().dot(other.as_site())
    }

    /// Inner product with a lattice vector.
    pub fn dot_site(self, s: Site) -> i128 {
        self.as_site().dot(s)
    }

    /// Angle in radians, in `[0, 2π)`. Display and float-side computations only.
    pub fn angle(self) -> f64 {
        let a = (self.y as f64).atan2(self.x as f64);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    pub fn degrees(self) -> f64 {
        self.angle().to_degrees()
    }

    /// 0 when `other` lies at ccw angle in `[0, π)` from `self`, 1 for `[π, 2π)`.
    fn half_from(self, other: Direction) -> u8 {
        let c = self.cross(other);
        if c > 0 || (c == 0 && self.dot(other) > 0) {
            0
        } else {
            1
        }
    }

    /// Compares `a` and `b` by their counterclockwise angle measured from `self`,
    /// with `self` itself at angle zero.
    pub fn ccw_cmp(self, a: Direction, b: Direction) -> Ordering {
        let (ha, hb) = (self.half_from(a), self.half_from(b));
        ha.cmp(&hb).then_with(|| 0.cmp(&a.cross(b)))
    }

    /// A direction strictly inside the open counterclockwise arc from `self` to `end`.
    /// When `end == self` the arc is the circle punctured at `self`.
    pub fn strictly_between(self, end: Direction) -> Direction {
        if self.cross(end) > 0 {
            Direction::of_vector(self.x + end.x, self.y + end.y)
                .expect("non-antipodal directions have a non-zero sum")
        } else {
            self.rot90()
        }
    }

    /// Counterclockwise angular distance from `self` to `other`, in `[0, 2π)`.
    pub fn ccw_angle_to(self, other: Direction) -> f64 {
        let a = (self.cross(other) as f64).atan2(self.dot(other) as f64);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    /// Closest rational direction found to angle `theta` among vectors of norm up to
    /// roughly `2^max_bits`, tried coarse to fine; `accept` filters candidates.
    pub fn approximate(theta: f64, max_bits: u32, mut accept: impl FnMut(Direction) -> bool) -> Option<Direction> {
        let (s, c) = theta.sin_cos();
        (0..=max_bits).find_map(|k| {
            let n = (1u64 << k) as f64;
            Direction::of_vector((n * c).round() as i64, (n * s).round() as i64).filter(|&d| accept(d))
        })
    }

    /// Smallest non-negative angular distance between two angles on the circle.
    pub fn angular_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }
}

impl Ord for Direction {
    fn cmp(&self, other: &Self) -> Ordering {
        Direction::EAST.ccw_cmp(*self, *other)
    }
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Unit vector at angle `theta`.
pub fn unit(theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: i64, y: i64) -> Direction {
        Direction::new(x, y).unwrap()
    }

    #[test]
    fn rejects_non_primitive() {
        assert_eq!(Direction::new(2, 4), Err(GeometryError::NotPrimitive { x: 2, y: 4 }));
        assert_eq!(Direction::new(0, 0), Err(GeometryError::ZeroVector));
        assert_eq!(Direction::of_vector(-6, 9), Some(d(-2, 3)));
    }

    #[test]
    fn exact_order_matches_float_angles() {
        let mut dirs = Vec::new();
        for x in -5..=5 {
            for y in -5..=5 {
                if let Ok(v) = Direction::new(x, y) {
                    dirs.push(v);
                }
            }
        }
        let mut by_exact = dirs.clone();
        by_exact.sort();
        let mut by_float = dirs;
        by_float.sort_by(|a, b| a.angle().partial_cmp(&b.angle()).unwrap());
        assert_eq!(by_exact, by_float);
    }

    #[test]
    fn ccw_compare_from_base() {
        let base = d(0, 1);
        assert_eq!(base.ccw_cmp(d(-1, 0), d(1, 0)), Ordering::Less);
        assert_eq!(base.ccw_cmp(base, d(-1, 1)), Ordering::Less);
        assert_eq!(base.ccw_cmp(d(1, 1), d(1, 1)), Ordering::Equal);
    }

    #[test]
    fn strictly_between_every_gap_kind() {
        let a = d(1, 0);
        for (end, lo, hi) in [(d(0, 1), 0.0, 90.0), (d(-1, 0), 0.0, 180.0), (d(0, -1), 0.0, 270.0), (a, 0.0, 360.0)] {
            let m = a.strictly_between(end);
            assert!(m.degrees() > lo && m.degrees() < hi, "{m} not in ({lo},{hi})");
        }
    }
}
