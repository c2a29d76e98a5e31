//! Reproducible Monte Carlo experiments on the torus.
//!
//! Every cell draw comes from a ChaCha stream keyed by `(seed, trial)`; cell `k` of a
//! trial always receives the `k`-th 64-bit word, so outcomes do not depend on thread
//! scheduling and the same field can be thresholded at several values of `p`.

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{closure_in_place, Boundary, GridConfig};
use crate::geometry::{is_symmetric, unit, usable_directions, Arc, ArcSet, UpdateFamily};

/// Default threshold for oriented site percolation (density of open sites).
pub const DEFAULT_OSP_THRESHOLD: f64 = 0.7055;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonteCarloError {
    #[error("tolerance {tol} is finer than 1/size = {min}")]
    ToleranceTooFine { tol: f64, min: f64 },
    #[error("at least 50 trials per probe are required, got {0}")]
    TooFewTrials(usize),
    #[error("family is not symmetric")]
    NotSymmetric,
    #[error("threshold {0} is not in (0, 1)")]
    InvalidThreshold(f64),
}

#[derive(Clone, Debug)]
pub struct TrialPlan {
    pub family: UpdateFamily,
    /// Side of the square torus.
    pub size: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub percolated: bool,
    pub origin_infected: bool,
    pub closure_density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
}

impl Probe {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateResult {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub probes: Vec<Probe>,
}

impl EstimateResult {
    /// CSV with one row per probe and a trailing `# p_hat=` line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,trials,successes,fraction,ci_low,ci_high\n");
        for pr in &self.probes {
            let (lo, hi) = wilson_interval(pr.successes, pr.trials);
            let _ = writeln!(s, "{},{},{},{},{},{}", pr.p, pr.trials, pr.successes, pr.fraction(), lo, hi);
        }
        let _ = writeln!(s, "# p_hat={}", self.p_hat);
        s
    }
}

/// Maps a 64-bit word to a uniform double in [0, 1).
#[inline]
pub fn to_unit(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The uniform field of one trial: `cells` draws in cell-index order.
pub fn uniform_field(seed: u64, trial: u64, cells: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..cells).map(|_| to_unit(rng.next_u64())).collect()
}

/// Initial configuration of a trial: cell `k` infected iff its draw is below `p`.
pub fn initial_config(size: usize, p: f64, seed: u64, trial: u64) -> GridConfig {
    threshold_field(size, &uniform_field(seed, trial, size * size), p)
}

pub fn threshold_field(size: usize, field: &[f64], p: f64) -> GridConfig {
    GridConfig::from_fn(size, size, Boundary::Torus, |i, j| field[j * size + i] < p)
}

/// Runs one trial. Cell index 0 is the site (0,0).
pub fn sample(plan: &TrialPlan, trial_index: usize) -> TrialOutcome {
    assert!(trial_index < plan.trials, "trial index out of range");
    let mut cfg = initial_config(plan.size, plan.p, plan.seed, trial_index as u64);
    closure_in_place(&plan.family, &mut cfg);
    TrialOutcome {
        percolated: cfg.is_full(),
        origin_infected: cfg.get(0, 0),
        closure_density: cfg.density(),
    }
}

/// All trials of a plan, in trial order.
pub fn run_trials(plan: &TrialPlan) -> Vec<TrialOutcome> {
    (0..plan.trials).into_par_iter().map(|t| sample(plan, t)).collect()
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo.min(phat), hi.max(phat))
}

/// Fraction of percolating trials at a single `p`.
pub fn estimate_theta(plan: &TrialPlan) -> EstimateResult {
    let successes = run_trials(plan).iter().filter(|o| o.percolated).count();
    let (ci_low, ci_high) = wilson_interval(successes, plan.trials);
    EstimateResult {
        p_hat: successes as f64 / plan.trials as f64,
        ci_low,
        ci_high,
        probes: vec![Probe { p: plan.p, trials: plan.trials, successes }],
    }
}

/// Bisection for the `p` at which the percolation fraction crosses 1/2.
///
/// All probes reuse the same random fields, so the per-trial outcome is monotone in `p`.
/// The reported interval is the final bisection bracket.
pub fn estimate_pc(
    family: &UpdateFamily,
    size: usize,
    trials_per_probe: usize,
    tol: f64,
    seed: u64,
) -> Result<EstimateResult, MonteCarloError> {
    let min = 1.0 / size as f64;
    if tol < min {
        return Err(MonteCarloError::ToleranceTooFine { tol, min });
    }
    if trials_per_probe < 50 {
        return Err(MonteCarloError::TooFewTrials(trials_per_probe));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes = Vec::new();
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        let plan = TrialPlan { family: family.clone(), size, p: mid, trials: trials_per_probe, seed };
        let successes = run_trials(&plan).iter().filter(|o| o.percolated).count();
        probes.push(Probe { p: mid, trials: trials_per_probe, successes });
        if 2 * successes >= trials_per_probe {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EstimateResult { p_hat: 0.5 * (lo + hi), ci_low: lo, ci_high: hi, probes })
}

/// Fraction of trials in which the site (0,0) ends up infected, with its standard error.
pub fn origin_occupation(plan: &TrialPlan) -> (f64, f64) {
    let hits = run_trials(plan).iter().filter(|o| o.origin_infected).count();
    let f = hits as f64 / plan.trials as f64;
    (f, (f * (1.0 - f) / plan.trials as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhombusBound {
    /// Angle of the symmetric witness direction.
    pub theta: f64,
    pub epsilon: f64,
    pub side: u64,
    pub area: u64,
    pub p: f64,
}

/// Lower bound on the critical probability of a symmetric family from a tiling by
/// rhombi that stay healthy forever once fully healthy.
///
/// The rhombus has sides perpendicular to the directions at angle `θ ± ε/2` (and their
/// opposites), where `θ` is the witness and `ε` half its margin. Its side is the
/// smallest integer giving an inradius of at least the range; `area` counts lattice
/// sites in it, and the bound is the largest `p` with `(1 - p)^area > threshold`.
pub fn symmetric_lower_bound(family: &UpdateFamily, osp_threshold: f64) -> Result<RhombusBound, MonteCarloError> {
    if !(osp_threshold > 0.0 && osp_threshold < 1.0) {
        return Err(MonteCarloError::InvalidThreshold(osp_threshold));
    }
    let u = is_symmetric(family).ok_or(MonteCarloError::NotSymmetric)?;
    let usable = usable_directions(family);
    let margin = slack(&usable, u.angle()).min(slack(&usable, u.opposite().angle()));
    if margin <= 0.0 {
        return Err(MonteCarloError::NotSymmetric);
    }
    let epsilon = margin / 2.0;
    let theta = u.angle();
    let side = (2.0 * family.range() / epsilon.sin()).ceil() as u64;
    let half_height = side as f64 * epsilon.sin() / 2.0;
    let normals = [unit(theta + epsilon / 2.0), unit(theta - epsilon / 2.0)];
    // The rhombus lies within distance `side` of its centre.
    let reach = side as i64 + 1;
    let mut area = 0u64;
    for y in -reach..=reach {
        for x in -reach..=reach {
            let inside = normals
                .iter()
                .all(|n| (x as f64 * n.0 + y as f64 * n.1).abs() <= half_height);
            area += inside as u64;
        }
    }
    let p = 1.0 - osp_threshold.powf(1.0 / area as f64);
    Ok(RhombusBound { theta, epsilon, side, area, p })
}

fn slack(set: &ArcSet, theta: f64) -> f64 {
    set.arcs()
        .iter()
        .filter_map(|a| match *a {
            Arc::Span { start, end, .. } => {
                let width = if start == end { std::f64::consts::TAU } else { start.ccw_angle_to(end) };
                let off = (theta - start.angle()).rem_euclid(std::f64::consts::TAU);
                (off > 0.0 && off < width).then(|| off.min(width - off))
            }
            Arc::Full => Some(std::f64::consts::PI),
            Arc::Empty => None,
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::builtin_family;

    fn plan(p: f64) -> TrialPlan {
        TrialPlan { family: builtin_family("dtbp").unwrap(), size: 32, p, trials: 8, seed: 11 }
    }

    #[test]
    fn extreme_probabilities() {
        let o = sample(&plan(0.0), 3);
        assert_eq!(o, TrialOutcome { percolated: false, origin_infected: false, closure_density: 0.0 });
        let o = sample(&plan(1.0), 3);
        assert_eq!(o, TrialOutcome { percolated: true, origin_infected: true, closure_density: 1.0 });
        assert_eq!(estimate_theta(&plan(1.0)).p_hat, 1.0);
        assert_eq!(estimate_theta(&plan(0.0)).p_hat, 0.0);
    }

    #[test]
    fn draws_are_keyed_by_trial() {
        let a = uniform_field(5, 2, 100);
        assert_eq!(a, uniform_field(5, 2, 100));
        assert_ne!(a, uniform_field(5, 3, 100));
        assert_eq!(uniform_field(5, 2, 40), a[..40].to_vec());
        assert!(a.iter().all(|&u| (0.0..1.0).contains(&u)));
    }

    #[test]
    fn wilson_bounds_contain_estimate() {
        for (s, n) in [(0, 10), (10, 10), (3, 10), (50, 100)] {
            let (lo, hi) = wilson_interval(s, n);
            let f = s as f64 / n as f64;
            assert!(lo <= f && f <= hi && lo >= 0.0 && hi <= 1.0);
        }
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn estimate_pc_preconditions() {
        let f = builtin_family("dtbp").unwrap();
        assert!(matches!(estimate_pc(&f, 64, 100, 0.001, 1), Err(MonteCarloError::ToleranceTooFine { .. })));
        assert_eq!(estimate_pc(&f, 64, 10, 0.05, 1), Err(MonteCarloError::TooFewTrials(10)));
    }

    #[test]
    fn csv_layout() {
        let r = EstimateResult {
            p_hat: 0.25,
            ci_low: 0.0,
            ci_high: 0.5,
            probes: vec![Probe { p: 0.5, trials: 4, successes: 4 }],
        };
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,trials,successes,fraction,ci_low,ci_high");
        assert!(lines[1].starts_with("0.5,4,4,1,"));
        assert_eq!(lines[2], "# p_hat=0.25");
    }

    #[test]
    fn symmetric_bound_for_schonmann() {
        let f = builtin_family("schonmann").unwrap();
        let b = symmetric_lower_bound(&f, DEFAULT_OSP_THRESHOLD).unwrap();
        assert!((b.epsilon - std::f64::consts::PI / 8.0).abs() < 1e-12);
        assert_eq!(b.side, 8);
        assert!(b.p > 0.0);
        let dtbp = builtin_family("dtbp").unwrap();
        assert_eq!(symmetric_lower_bound(&dtbp, 0.7), Err(MonteCarloError::NotSymmetric));
        let near_one = symmetric_lower_bound(&f, 1.0 - 1e-12).unwrap();
        assert!(near_one.p > 0.0 && near_one.p < 1e-13);
    }
}
