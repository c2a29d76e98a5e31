use std::f64::consts::TAU;
use std::fmt;

use crate::geometry::direction::Direction;

/// A connected subset of the circle, traversed counterclockwise from `start` to `end`.
///
/// `start == end` is either a single point (both ends closed) or the circle with
/// that one point removed (both ends open).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Arc {
    Empty,
    Full,
    Span {
        start: Direction,
        end: Direction,
        start_closed: bool,
        end_closed: bool,
    },
}

impl Arc {
    pub fn closed(start: Direction, end: Direction) -> Arc {
        Arc::Span { start, end, start_closed: true, end_closed: true }
    }

    pub fn open(start: Direction, end: Direction) -> Arc {
        Arc::Span { start, end, start_closed: false, end_closed: false }
    }

    pub fn point(d: Direction) -> Arc {
        Arc::closed(d, d)
    }

    pub fn contains(&self, d: Direction) -> bool {
        match *self {
            Arc::Empty => false,
            Arc::Full => true,
            Arc::Span { start, end, start_closed, end_closed } => {
                if start == end {
                    return if start_closed { d == start } else { d != start };
                }
                if d == start {
                    start_closed
                } else if d == end {
                    end_closed
                } else {
                    start.ccw_cmp(d, end).is_lt()
                }
            }
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(*self, Arc::Span { start, end, start_closed: true, .. } if start == end)
    }

    /// Angular length in radians.
    pub fn measure(&self) -> f64 {
        match *self {
            Arc::Empty => 0.0,
            Arc::Full => TAU,
            Arc::Span { start, end, start_closed, .. } => {
                if start == end {
                    if start_closed {
                        0.0
                    } else {
                        TAU
                    }
                } else {
                    start.ccw_angle_to(end)
                }
            }
        }
    }

    /// Same arc with endpoints shown in degrees.
    pub fn degrees(&self) -> String {
        self.render(|d| format!("{:.4}°", d.degrees()))
    }

    fn render(&self, show: impl Fn(Direction) -> String) -> String {
        match *self {
            Arc::Empty => "empty".to_string(),
            Arc::Full => "full".to_string(),
            Arc::Span { start, end, start_closed, end_closed } => {
                if start == end && start_closed {
                    return format!("{{{}}}", show(start));
                }
                format!(
                    "{}{}, {}{}",
                    if start_closed { '[' } else { '(' },
                    show(start),
                    show(end),
                    if end_closed { ']' } else { ')' }
                )
            }
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|d| format!("({d})")))
    }
}

/// One breakpoint of an [`ArcSet`]: whether the direction itself is in the set and
/// whether the open gap up to the next breakpoint is.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Breakpoint {
    at: Direction,
    point: bool,
    gap: bool,
}

/// A finite union of arcs in normal form.
///
/// Stored as the sorted partition of the circle induced by its arc endpoints. Every
/// breakpoint is essential (its point flag differs from one of its neighbouring gaps),
/// so two equal sets have identical representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArcSet {
    breaks: Vec<Breakpoint>,
    /// Membership of every direction when there are no breakpoints.
    all: bool,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { breaks: Vec::new(), all: false }
    }

    pub fn full() -> Self {
        ArcSet { breaks: Vec::new(), all: true }
    }

    pub fn from_arc(arc: Arc) -> Self {
        match arc {
            Arc::Empty => Self::empty(),
            Arc::Full => Self::full(),
            Arc::Span { start, end, start_closed, end_closed } => {
                if start == end {
                    assert_eq!(start_closed, end_closed, "degenerate arc with mixed closure flags");
                    let b = Breakpoint { at: start, point: start_closed, gap: !start_closed };
                    return Self::normalized(vec![b], false);
                }
                let mut breaks = vec![
                    Breakpoint { at: start, point: start_closed, gap: true },
                    Breakpoint { at: end, point: end_closed, gap: false },
                ];
                breaks.sort_by_key(|b| b.at);
                Self::normalized(breaks, false)
            }
        }
    }

    pub fn from_arcs(arcs: impl IntoIterator<Item = Arc>) -> Self {
        arcs.into_iter().fold(Self::empty(), |acc, a| acc.union(&Self::from_arc(a)))
    }

    pub fn from_points(points: impl IntoIterator<Item = Direction>) -> Self {
        Self::from_arcs(points.into_iter().map(Arc::point))
    }

    fn normalized(mut breaks: Vec<Breakpoint>, all: bool) -> Self {
        if breaks.is_empty() {
            return ArcSet { breaks, all };
        }
        let n = breaks.len();
        let keep: Vec<bool> = (0..n)
            .map(|i| {
                let before = breaks[(i + n - 1) % n].gap;
                let b = breaks[i];
                !(b.point == before && b.point == b.gap)
            })
            .collect();
        let fill = breaks[0].gap;
        let mut k = keep.iter();
        breaks.retain(|_| *k.next().unwrap());
        let all = if breaks.is_empty() { fill } else { false };
        ArcSet { breaks, all }
    }

    pub fn is_empty(&self) -> bool {
        self.breaks.is_empty() && !self.all
    }

    pub fn is_full(&self) -> bool {
        self.breaks.is_empty() && self.all
    }

    /// Membership of the open gap that starts just after `d`.
    fn gap_after(&self, d: Direction) -> bool {
        if self.breaks.is_empty() {
            return self.all;
        }
        let idx = self.breaks.partition_point(|b| b.at <= d);
        let prev = if idx == 0 { self.breaks.len() - 1 } else { idx - 1 };
        self.breaks[prev].gap
    }

    pub fn contains(&self, d: Direction) -> bool {
        match self.breaks.binary_search_by(|b| b.at.cmp(&d)) {
            Ok(i) => self.breaks[i].point,
            Err(_) => self.gap_after(d),
        }
    }

    fn combine(&self, other: &ArcSet, op: impl Fn(bool, bool) -> bool) -> ArcSet {
        let mut at: Vec<Direction> = self.breaks.iter().chain(&other.breaks).map(|b| b.at).collect();
        at.sort();
        at.dedup();
        let breaks = at
            .into_iter()
            .map(|d| Breakpoint {
                at: d,
                point: op(self.contains(d), other.contains(d)),
                gap: op(self.gap_after(d), other.gap_after(d)),
            })
            .collect();
        Self::normalized(breaks, op(self.all, other.all))
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> ArcSet {
        let breaks = self.breaks.iter().map(|b| Breakpoint { at: b.at, point: !b.point, gap: !b.gap }).collect();
        Self::normalized(breaks, !self.all)
    }

    fn map_points(&self, f: impl Fn(&Breakpoint, bool, bool) -> bool) -> ArcSet {
        let n = self.breaks.len();
        let breaks = (0..n)
            .map(|i| {
                let b = self.breaks[i];
                let before = self.breaks[(i + n - 1) % n].gap;
                Breakpoint { point: f(&b, before, b.gap), ..b }
            })
            .collect();
        Self::normalized(breaks, self.all)
    }

    /// Largest open subset: drops isolated points and opens every endpoint.
    pub fn interior(&self) -> ArcSet {
        self.map_points(|_, before, after| before && after)
    }

    pub fn closure(&self) -> ArcSet {
        self.map_points(|b, before, after| b.point || before || after)
    }

    fn map_directions(&self, f: impl Fn(Direction) -> Direction) -> ArcSet {
        // Rotations preserve cyclic order, so only the starting breakpoint moves.
        let mut breaks: Vec<Breakpoint> = self.breaks.iter().map(|b| Breakpoint { at: f(b.at), ..*b }).collect();
        breaks.sort_by_key(|b| b.at);
        ArcSet { breaks, all: self.all }
    }

    /// Image under u -> -u.
    pub fn antipode(&self) -> ArcSet {
        self.map_directions(Direction::opposite)
    }

    /// Image under the counterclockwise quarter turn.
    pub fn rotate90(&self) -> ArcSet {
        self.map_directions(Direction::rot90)
    }

    pub fn is_subset(&self, other: &ArcSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Endpoints of the maximal arcs, in counterclockwise order from (1,0).
    pub fn endpoints(&self) -> Vec<Direction> {
        self.breaks.iter().map(|b| b.at).collect()
    }

    /// Maximal connected components sorted by start.
    pub fn arcs(&self) -> Vec<Arc> {
        if self.breaks.is_empty() {
            return if self.all { vec![Arc::Full] } else { Vec::new() };
        }
        let n = self.breaks.len();
        let mut out = Vec::new();
        for i in 0..n {
            let b = self.breaks[i];
            let before = self.breaks[(i + n - 1) % n].gap;
            if b.gap {
                let next = self.breaks[(i + 1) % n];
                out.push(Arc::Span { start: b.at, end: next.at, start_closed: b.point, end_closed: next.point });
            } else if b.point && !before {
                out.push(Arc::point(b.at));
            }
        }
        out
    }

    /// Total angular measure in radians (display only).
    pub fn measure(&self) -> f64 {
        self.arcs().iter().map(Arc::measure).sum()
    }

    /// Whether the set lies inside some closed semicircle.
    ///
    /// If the closure of the set fits in `[s, s + π]`, it also fits in the closed
    /// semicircle starting at its first point after `s`, which is an arc endpoint.
    pub fn fits_in_closed_semicircle(&self) -> bool {
        let c = self.closure();
        if c.is_empty() {
            return true;
        }
        if c.is_full() {
            return false;
        }
        c.endpoints()
            .into_iter()
            .any(|b| c.is_subset(&ArcSet::from_arc(Arc::closed(b, b.opposite()))))
    }
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs = self.arcs();
        if arcs.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = arcs.iter().map(Arc::to_string).collect();
        f.write_str(&parts.join(" u "))
    }
}
