use ubootstrap::dynamics::{builtin_family, closure};
use ubootstrap::geometry::UpdateFamily;
use ubootstrap::montecarlo::*;

fn dtbp() -> UpdateFamily {
    builtin_family("dtbp").unwrap()
}

fn plan(family: UpdateFamily, size: usize, p: f64, trials: usize, seed: u64) -> TrialPlan {
    TrialPlan { family, size, p, trials, seed }
}

#[test]
fn replay_is_deterministic() {
    let pl = plan(dtbp(), 48, 0.12, 40, 9);
    let a = run_trials(&pl);
    assert_eq!(a, run_trials(&pl));
    for (t, o) in a.iter().enumerate() {
        assert_eq!(*o, sample(&pl, t));
    }
    assert_eq!(uniform_field(3, 5, 100), uniform_field(3, 5, 100));
    assert_ne!(uniform_field(3, 5, 100), uniform_field(3, 6, 100));
}

#[test]
fn extreme_densities() {
    for name in ["dtbp", "osp", "schonmann", "neighbour-2"] {
        let f = builtin_family(name).unwrap();
        let zero = plan(f.clone(), 16, 0.0, 50, 1);
        let one = plan(f, 16, 1.0, 50, 1);
        assert_eq!(sample(&zero, 0), TrialOutcome { percolated: false, origin_infected: false, closure_density: 0.0 });
        assert_eq!(sample(&one, 0), TrialOutcome { percolated: true, origin_infected: true, closure_density: 1.0 });
        assert_eq!(estimate_theta(&zero).p_hat, 0.0);
        assert_eq!(estimate_theta(&one).p_hat, 1.0);
    }
}

#[test]
fn sparse_dtbp_rarely_reaches_the_origin() {
    let outcomes = run_trials(&plan(dtbp(), 256, 0.05, 200, 11));
    assert!(outcomes.iter().all(|o| !o.percolated));
    let origin = outcomes.iter().filter(|o| o.origin_infected).count() as f64 / 200.0;
    assert!(origin < 0.15, "origin fraction {origin}");
}

#[test]
fn near_critical_window() {
    let r = estimate_theta(&plan(dtbp(), 512, 0.118, 400, 5));
    assert!(r.p_hat > 0.1 && r.p_hat < 0.9, "fraction {}", r.p_hat);
    assert!(r.ci_low <= r.p_hat && r.p_hat <= r.ci_high);
}

#[test]
fn osp_percolation_implies_dtbp_percolation() {
    let osp = builtin_family("osp").unwrap();
    for p in [0.2, 0.25, 0.3, 0.35] {
        let a = run_trials(&plan(osp.clone(), 64, p, 100, 21));
        let b = run_trials(&plan(dtbp(), 64, p, 100, 21));
        for (x, y) in a.iter().zip(&b) {
            assert!(!x.percolated || y.percolated);
            assert!(x.closure_density <= y.closure_density);
        }
    }
}

#[test]
fn outcomes_are_monotone_in_p() {
    let ps = [0.05, 0.08, 0.1, 0.12, 0.15, 0.2];
    let runs: Vec<Vec<TrialOutcome>> = ps.iter().map(|&p| run_trials(&plan(dtbp(), 64, p, 100, 33))).collect();
    for w in runs.windows(2) {
        for (lo, hi) in w[0].iter().zip(&w[1]) {
            assert!(!lo.percolated || hi.percolated);
            assert!(!lo.origin_infected || hi.origin_infected);
            assert!(lo.closure_density <= hi.closure_density);
        }
    }
    // The same holds cell by cell for the closures themselves.
    for t in 0..20 {
        let field = uniform_field(33, t, 64 * 64);
        let a = closure(&dtbp(), &threshold_field(64, &field, 0.1));
        let b = closure(&dtbp(), &threshold_field(64, &field, 0.12));
        assert!(a.is_subset(&b));
    }
}

#[test]
fn initial_config_thresholds_the_field() {
    let field = uniform_field(4, 2, 32 * 32);
    let g = initial_config(32, 0.3, 4, 2);
    for j in 0..32 {
        for i in 0..32 {
            assert_eq!(g.get(i, j), field[j * 32 + i] < 0.3);
        }
    }
    assert!(field.iter().all(|&u| (0.0..1.0).contains(&u)));
}

#[test]
fn estimate_pc_contract() {
    let r = estimate_pc(&dtbp(), 64, 50, 1.0 / 32.0, 2).unwrap();
    assert!(r.ci_low <= r.p_hat && r.p_hat <= r.ci_high);
    assert!(r.ci_high - r.ci_low < 1.0 / 32.0);
    assert!(r.probes.iter().all(|p| p.successes <= p.trials && p.trials == 50));
    assert_eq!(r, estimate_pc(&dtbp(), 64, 50, 1.0 / 32.0, 2).unwrap());
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,trials,successes,fraction,ci_low,ci_high");
    assert_eq!(lines.len(), r.probes.len() + 2);
    assert_eq!(*lines.last().unwrap(), format!("# p_hat={}", r.p_hat));
    assert_eq!(
        estimate_pc(&dtbp(), 64, 50, 0.001, 2),
        Err(MonteCarloError::ToleranceTooFine { tol: 0.001, min: 1.0 / 64.0 })
    );
    assert_eq!(estimate_pc(&dtbp(), 64, 10, 0.1, 2), Err(MonteCarloError::TooFewTrials(10)));
}

#[test]
fn wilson_interval_brackets_the_estimate() {
    for n in [1usize, 10, 57, 400] {
        for k in 0..=n {
            let (lo, hi) = wilson_interval(k, n);
            let f = k as f64 / n as f64;
            assert!(0.0 <= lo && lo <= f && f <= hi && hi <= 1.0);
        }
    }
    // Closed form at k = n/2.
    let (lo, hi) = wilson_interval(50, 100);
    let z: f64 = 1.959_963_984_540_054;
    let half = z * (0.25 / 100.0 + z * z / 40000.0).sqrt() / (1.0 + z * z / 100.0);
    assert!((lo - (0.5 - half)).abs() < 1e-12 && (hi - (0.5 + half)).abs() < 1e-12);
}

#[test]
fn symmetric_bound_examples() {
    let schonmann = builtin_family("schonmann").unwrap();
    let b = symmetric_lower_bound(&schonmann, DEFAULT_OSP_THRESHOLD).unwrap();
    assert!(b.p > 0.0);
    assert_eq!((b.side, b.area), (8, 25));
    assert!((b.p - 0.01385703534152738).abs() < 1e-15, "{}", b.p);
    assert!((b.p - (1.0 - DEFAULT_OSP_THRESHOLD.powf(1.0 / 25.0))).abs() < 1e-15);
    assert_eq!(symmetric_lower_bound(&dtbp(), DEFAULT_OSP_THRESHOLD), Err(MonteCarloError::NotSymmetric));
    let mut last = b.p;
    for t in [0.9, 0.99, 0.999, 0.999999] {
        let p = symmetric_lower_bound(&schonmann, t).unwrap().p;
        assert!(p < last && p > 0.0);
        last = p;
    }
    assert!(last < 1e-7);
    assert!(matches!(symmetric_lower_bound(&schonmann, 1.0), Err(MonteCarloError::InvalidThreshold(_))));
}

#[test]
fn origin_occupation_reports_standard_error() {
    let (f, se) = origin_occupation(&plan(dtbp(), 64, 0.1, 100, 8));
    assert!((0.0..=1.0).contains(&f));
    assert!((se - (f * (1.0 - f) / 100.0).sqrt()).abs() < 1e-15);
}
