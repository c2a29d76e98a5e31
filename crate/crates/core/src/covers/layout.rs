use std::f64::consts::TAU;

use crate::covers::{slope_deviation, CoverError, ANGLE_SLACK};
use crate::geometry::WitnessTriple;
use crate::lattice::Site;

/// Gaps between consecutive sorted angles, largest first.
fn gaps_desc(thetas: &[f64; 3]) -> [f64; 3] {
    let mut g = [thetas[1] - thetas[0], thetas[2] - thetas[1], TAU - thetas[2] + thetas[0]];
    g.sort_by(|a, b| b.total_cmp(a));
    g
}

fn half_tan(x: f64) -> f64 {
    (x / 2.0).tan()
}

/// Largest ε for which barriers between corner regions stay clear of the centre square.
pub fn epsilon0(thetas: &[f64; 3]) -> f64 {
    let [a, b, _] = gaps_desc(thetas);
    (0.25 / (half_tan(a) + half_tan(b))).atan()
}

/// Smallest `r` for which any sites of consecutive corner regions satisfy the ε/2 slope bound.
pub fn r_epsilon(thetas: &[f64; 3], epsilon: f64) -> f64 {
    let [_, b, c] = gaps_desc(thetas);
    3.0 / half_tan(epsilon) / (half_tan(b) + half_tan(c))
}

pub fn ell0(thetas: &[f64; 3], r: f64) -> i64 {
    let [a, b, _] = gaps_desc(thetas);
    (2.0 * r * (half_tan(a) + half_tan(b)) + r / 2.0 + 1.0).ceil() as i64
}

/// Positions of the three corner squares in the tiling of `[cΔ]²` by Δ-squares.
///
/// Tile `(a, b)` holds the sites `{aΔ+1, …, (a+1)Δ} × {bΔ+1, …, (b+1)Δ}`; the centre
/// tile is `(ell0, ell0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverLayout {
    pub delta: i64,
    pub epsilon: f64,
    pub epsilon0: f64,
    pub r_eps: f64,
    pub r: f64,
    pub ell0: i64,
    pub c: i64,
    pub centre: (f64, f64),
    /// Corner points the squares were chosen around; `corners[t]` joins sides `t-1` and `t`.
    pub corners: [(f64, f64); 3],
    pub tiles: [(i64, i64); 3],
}

impl CoverLayout {
    /// Lowest-left site of tile `(a, b)`.
    pub fn tile_min(&self, tile: (i64, i64)) -> Site {
        Site::new(tile.0 * self.delta + 1, tile.1 * self.delta + 1)
    }

    pub fn tile_corners(&self, tile: (i64, i64)) -> [Site; 4] {
        let m = self.tile_min(tile);
        let d = self.delta - 1;
        [m, m + Site::new(d, 0), m + Site::new(0, d), m + Site::new(d, d)]
    }
}

pub fn cover_layout(delta: i64, witness: &WitnessTriple, epsilon: f64) -> Result<CoverLayout, CoverError> {
    assert!(delta >= 1, "side length must be positive");
    let thetas = &witness.thetas;
    let eps0 = epsilon0(thetas);
    if epsilon > eps0 + ANGLE_SLACK {
        return Err(CoverError::EpsilonTooLarge { epsilon, epsilon0: eps0 });
    }
    let r_eps = r_epsilon(thetas, epsilon);
    let r = r_eps.max(6.0);
    let ell = ell0(thetas, r);
    let c = 2 * ell + 1;
    let d = delta as f64;
    let mid = ell as f64 * d + (d + 1.0) / 2.0;
    let centre = (mid, mid);
    let u: Vec<(f64, f64)> = (0..3).map(|t| witness.unit(t)).collect();
    let rad = (r + 1.5) * d;
    let mut corners = [(0.0, 0.0); 3];
    let mut tiles = [(0, 0); 3];
    for t in 0..3 {
        let (a, b) = (u[(t + 2) % 3], u[t]);
        let k = rad / (1.0 + a.0 * b.0 + a.1 * b.1);
        let p = (mid + k * (a.0 + b.0), mid + k * (a.1 + b.1));
        corners[t] = p;
        tiles[t] = (((p.0 / d).ceil() as i64) - 1, ((p.1 / d).ceil() as i64) - 1);
    }
    let layout = CoverLayout { delta, epsilon, epsilon0: eps0, r_eps, r, ell0: ell, c, centre, corners, tiles };
    for t in 0..3 {
        let tile = tiles[t];
        if tile.0 < 0 || tile.1 < 0 || tile.0 >= c || tile.1 >= c || tile == (ell, ell) {
            return Err(CoverError::LayoutInvalid(format!("corner square {t} at {tile:?} is misplaced")));
        }
        for s in layout.tile_corners(tile) {
            let (x, y) = s.as_f64();
            let (px, py) = corners[t];
            if (x - px).hypot(y - py) > 1.5 * d {
                return Err(CoverError::LayoutInvalid(format!("corner square {t} leaves its disc")));
            }
        }
        for a in layout.tile_corners(tile) {
            for b in layout.tile_corners(tiles[(t + 1) % 3]) {
                let dev = slope_deviation(a, b, thetas[t]);
                if dev >= epsilon / 2.0 {
                    return Err(CoverError::LayoutInvalid(format!(
                        "side {t}: {a} -> {b} deviates {dev:.6} >= {:.6}",
                        epsilon / 2.0
                    )));
                }
            }
        }
    }
    Ok(layout)
}
