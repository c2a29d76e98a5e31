use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use ubootstrap::covers::*;
use ubootstrap::dynamics::{builtin_family, closure, Boundary, GridConfig};
use ubootstrap::geometry::{witness_triple, Classification, GeometryError, UpdateFamily, WitnessTriple};
use ubootstrap::lattice::Site;
use ubootstrap::montecarlo::initial_config;

const OVERRIDES: [f64; 3] = [7.0 * PI / 24.0, 23.0 * PI / 24.0, 39.0 * PI / 24.0];

fn dtbp() -> UpdateFamily {
    builtin_family("dtbp").unwrap()
}

fn paper_witness() -> WitnessTriple {
    witness_triple(&dtbp(), Some(OVERRIDES)).unwrap()
}

fn toy_params(delta1: u64) -> RenormParams {
    RenormParams::new(1.5, 1.45, 0.01, delta1, 0.05).unwrap()
}

fn healthy(size: usize, origin: Site) -> GridConfig {
    GridConfig::new(size, size, Boundary::FreeHealthy).with_origin(origin)
}

fn with_sites(size: usize, origin: Site, sites: &[Site]) -> GridConfig {
    let mut g = healthy(size, origin);
    for &s in sites {
        g.set_site(s, true);
    }
    g
}

/// Site range `[lo, hi]` of square `a` on one axis.
fn span(delta: i64, origin: i64, a: i64) -> (i64, i64) {
    (origin + a * delta, origin + a * delta + delta - 1)
}

fn square_dist_sq(d1: i64, s1: Square, d2: i64, s2: Square, origin: Site) -> f64 {
    let gap = |(a0, a1): (i64, i64), (b0, b1): (i64, i64)| 0.max(b0 - a1).max(a0 - b1) as f64;
    let dx = gap(span(d1, origin.x, s1.0), span(d2, origin.x, s2.0));
    let dy = gap(span(d1, origin.y, s1.1), span(d2, origin.y, s2.1));
    dx * dx + dy * dy
}

/// Level-(i+1) bad squares straight from the definition, given the level-i bad squares.
fn next_level_oracle(bad: &BTreeSet<Square>, delta: i64, next: i64, g: f64, origin: Site) -> BTreeSet<Square> {
    let mut out = BTreeSet::new();
    let g2 = g * g;
    let reach = (g.ceil() as i64) / next + 2;
    for &a in bad {
        for &b in bad {
            if (a.0 - b.0).abs().max((a.1 - b.1).abs()) <= 1 || square_dist_sq(delta, a, delta, b, origin) > g2 {
                continue;
            }
            let base = ((a.0 * delta).div_euclid(next), (a.1 * delta).div_euclid(next));
            for x in base.0 - reach..=base.0 + reach {
                for y in base.1 - reach..=base.1 + reach {
                    let s = (x, y);
                    if square_dist_sq(next, s, delta, a, origin) <= g2 && square_dist_sq(next, s, delta, b, origin) <= g2 {
                        out.insert(s);
                    }
                }
            }
        }
    }
    out
}

fn level1_oracle(cfg: &GridConfig, delta: i64) -> BTreeSet<Square> {
    cfg.infected_sites()
        .into_iter()
        .map(|s| {
            let r = s - cfg.origin();
            (r.x.div_euclid(delta), r.y.div_euclid(delta))
        })
        .collect()
}

#[test]
fn all_healthy_hierarchy_has_no_bad_squares() {
    let p = toy_params(4);
    let h = build_hierarchy(&healthy(48, Site::ORIGIN), &p, 3).unwrap();
    for k in 1..=3 {
        assert_eq!(h.bad_count(k), 0);
    }
    assert_eq!((h.delta(1), h.delta(2), h.delta(3)), (4, 8, 24));
    assert!(matches!(
        build_hierarchy(&healthy(20, Site::ORIGIN), &p, 3),
        Err(CoverError::RegionNotAligned { delta: 24, .. })
    ));
}

#[test]
fn single_site_gives_one_bad_square() {
    let h = build_hierarchy(&with_sites(48, Site::ORIGIN, &[Site::new(13, 30)]), &toy_params(4), 2).unwrap();
    assert_eq!(h.bad_squares(1).collect::<Vec<_>>(), vec![(3, 7)]);
    assert_eq!(h.bad_count(2), 0);
}

#[test]
fn two_distant_sites_make_level_two_bad_squares() {
    let p = toy_params(4);
    let origin = Site::new(-16, -16);
    let cfg = with_sites(48, origin, &[Site::new(1, 1), Site::new(9, 1)]);
    let h = build_hierarchy(&cfg, &p, 2).unwrap();
    let l1 = level1_oracle(&cfg, 4);
    assert_eq!(h.bad_squares(1).collect::<BTreeSet<_>>(), l1);
    let expected = next_level_oracle(&l1, 4, 8, p.g(1), origin);
    assert!(!expected.is_empty());
    assert_eq!(h.bad_squares(2).collect::<BTreeSet<_>>(), expected);
    // Both bad squares are within g₁ of every listed square.
    for s in expected {
        for b in &l1 {
            assert!(square_dist_sq(8, s, 4, *b, origin) <= p.g(1) * p.g(1));
        }
    }
}

#[test]
fn adjacent_bad_squares_do_not_count() {
    let h = build_hierarchy(&with_sites(48, Site::ORIGIN, &[Site::new(3, 3), Site::new(4, 4)]), &toy_params(4), 2).unwrap();
    assert_eq!(h.bad_count(1), 2);
    assert_eq!(h.bad_count(2), 0);
}

fn sparse_strategy() -> impl Strategy<Value = GridConfig> {
    (0.0f64..0.03, any::<u64>()).prop_map(|(p, seed)| {
        let t = initial_config(72, p, seed, 0);
        GridConfig::from_fn(72, 72, Boundary::FreeHealthy, |i, j| t.get(i, j)).with_origin(Site::new(-20, 7))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hierarchy_matches_the_definition(cfg in sparse_strategy()) {
        let p = toy_params(4);
        let h = build_hierarchy(&cfg, &p, 3).unwrap();
        let mut bad = level1_oracle(&cfg, 4);
        prop_assert_eq!(h.bad_squares(1).collect::<BTreeSet<_>>(), bad.clone());
        for k in 1..3 {
            bad = next_level_oracle(&bad, h.delta(k), h.delta(k + 1), p.g(k), cfg.origin());
            prop_assert_eq!(h.bad_squares(k + 1).collect::<BTreeSet<_>>(), bad.clone());
        }
    }

    #[test]
    fn labels_depend_only_on_a_window(cfg in sparse_strategy(), level in 1usize..=3, a in 0i64..72, b in 0i64..72) {
        let p = toy_params(4);
        let h = build_hierarchy(&cfg, &p, 3).unwrap();
        let d = h.delta(level);
        let sq = (a / d, b / d);
        let radius: f64 = (1..level).map(|i| p.g(i)).sum::<f64>() + d as f64;
        let (lo, hi) = h.square_bounds(level, sq);
        let mut window = healthy(72, cfg.origin());
        for s in cfg.infected_sites() {
            let dx = 0.max(lo.x - s.x).max(s.x - hi.x) as f64;
            let dy = 0.max(lo.y - s.y).max(s.y - hi.y) as f64;
            if dx.hypot(dy) <= radius {
                window.set_site(s, true);
            }
        }
        let local = build_hierarchy(&window, &p, 3).unwrap();
        prop_assert_eq!(local.is_bad(level, sq), h.is_bad(level, sq));
    }
}

#[test]
fn clean_site_avoids_the_lower_bad_square() {
    let p = toy_params(4);
    let h = build_hierarchy(&with_sites(48, Site::ORIGIN, &[Site::new(21, 22)]), &p, 2).unwrap();
    let sq2 = h.square_of(2, Site::new(21, 22));
    assert!(!h.is_bad(2, sq2));
    let bad = h.bad_squares(1).next().unwrap();
    let (blo, bhi) = h.square_bounds(1, bad);
    let s = h.find_clean_site(2, sq2).unwrap();
    let (lo, hi) = h.square_bounds(2, sq2);
    assert!(s.x >= lo.x && s.x <= hi.x && s.y >= lo.y && s.y <= hi.y);
    let dist = |v: Site| {
        let dx = 0.max(blo.x - v.x).max(v.x - bhi.x) as f64;
        let dy = 0.max(blo.y - v.y).max(v.y - bhi.y) as f64;
        dx.hypot(dy)
    };
    assert!(dist(s) >= p.g(1) / 3.0);
    // Exhaustive scan agrees with is_clean.
    for y in lo.y..=hi.y {
        for x in lo.x..=hi.x {
            let v = Site::new(x, y);
            assert_eq!(h.is_clean(2, v), dist(v) >= p.g(1) / 3.0, "{v}");
        }
    }
    assert!(matches!(h.find_clean_site(1, bad), Err(CoverError::HypothesisViolation(_))));
}

#[test]
fn healthy_squares_return_their_centre() {
    let h = build_hierarchy(&healthy(48, Site::ORIGIN), &toy_params(4), 2).unwrap();
    for level in [1, 2] {
        let d = h.delta(level);
        for sq in [(0, 0), (1, 2), (-3, 5)] {
            let s = h.find_clean_site(level, sq).unwrap();
            let (lo, _) = h.square_bounds(level, sq);
            let off = s - lo;
            assert!((2 * off.x - (d - 1)).abs() <= 1 && (2 * off.y - (d - 1)).abs() <= 1, "{s} in {sq:?}");
        }
    }
}

#[test]
fn bad_fraction_examples() {
    let p8 = toy_params(8);
    let r = bad_fraction_check(&p8, 0.001, 2000, 3);
    let exact = 1.0 - 0.999f64.powi(64);
    let sigma = (exact * (1.0 - exact) / r.level1_squares as f64).sqrt();
    assert!((r.level1_fraction - exact).abs() < 4.0 * sigma, "{} vs {exact}", r.level1_fraction);
    assert!(r.level1_fraction < 0.064);
    assert!(r.level1_ok);
    assert!((r.level1_bound - 0.064).abs() < 1e-12);
    let zero = bad_fraction_check(&p8, 0.0, 20, 3);
    assert_eq!((zero.level1_fraction, zero.level2_fraction), (0.0, 0.0));
    assert_eq!(bad_fraction_check(&p8, 1.0, 5, 3).level1_fraction, 1.0);
}

fn segment_points(theta: f64, len: f64) -> (Site, Site) {
    let a = theta + PI / 2.0;
    (Site::ORIGIN, Site::new((len * a.cos()).round() as i64, (len * a.sin()).round() as i64))
}

#[test]
fn level_one_barrier_is_a_straight_tube() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let h = build_hierarchy(&healthy(16, Site::ORIGIN), &params, 2).unwrap();
    let (x, y) = segment_points(w.thetas[0], 60.0);
    let b = build_barrier(&f, &w, &h, 1, 0, x, y).unwrap();
    assert_eq!(b, Barrier::straight(0, x, y, f.range_sq()));
    assert!(validate_barrier(&b, &w, &params).is_ok());
    let (lo, hi) = b.bbox();
    for vy in lo.y - 3..=hi.y + 3 {
        for vx in lo.x - 3..=hi.x + 3 {
            let v = Site::new(vx, vy);
            assert_eq!(b.in_tube(v), within_sqrt5(v, x, y), "{v}");
        }
    }
}

/// Exact test of `dist(v, [x, y])² ≤ 5`.
fn within_sqrt5(v: Site, x: Site, y: Site) -> bool {
    let (d, e) = (y - x, v - x);
    let l2 = d.norm_sq();
    let t = e.dot(d);
    if t <= 0 {
        e.norm_sq() <= 5
    } else if t >= l2 {
        (v - y).norm_sq() <= 5
    } else {
        let c = e.cross(d);
        c * c <= 5 * l2
    }
}

#[test]
fn level_two_barrier_detours_around_a_bad_square() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let (x, y) = segment_points(w.thetas[0], 400.0);
    let mid = Site::new((x.x + y.x) / 2, (x.y + y.y) / 2);
    let origin = Site::new(mid.x.div_euclid(8) * 8 - 8, mid.y.div_euclid(8) * 8 - 8);
    let h = build_hierarchy(&with_sites(24, origin, &[mid]), &params, 2).unwrap();
    let b = build_barrier(&f, &w, &h, 2, 0, x, y).unwrap();
    assert!(b.anchor.len() >= 3, "anchor {:?}", b.anchor);
    for s in b.anchor.windows(2) {
        assert!(slope_deviation(s[0], s[1], w.thetas[0]) < params.sigma(1));
    }
    assert!(validate_barrier(&b, &w, &params).is_ok());
    let bad = h.bad_squares(1).next().unwrap();
    let (lo, hi) = h.square_bounds(1, bad);
    assert!(b.tube().iter().all(|v| !(v.x >= lo.x && v.x <= hi.x && v.y >= lo.y && v.y <= hi.y)));
}

#[test]
fn steep_barrier_is_rejected() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let h = build_hierarchy(&healthy(16, Site::ORIGIN), &params, 2).unwrap();
    let (x, y) = segment_points(w.thetas[0] + 0.3, 400.0);
    assert!(matches!(build_barrier(&f, &w, &h, 2, 0, x, y), Err(CoverError::SlopeViolation { .. })));
}

fn check_cover(f: &UpdateFamily, c: &TriangularCover, k: &[Site]) {
    for &s in k {
        assert!(c.in_interior(s), "{s} not inside");
        assert!(!c.in_barrier(s), "{s} on a barrier");
    }
    assert!(verify_closed(f, c));
    assert!(stays_fixed(f, c, 10));
}

#[test]
fn single_site_cover() {
    let f = dtbp();
    for w in [paper_witness(), witness_triple(&f, None).unwrap()] {
        let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
        let mut h = build_hierarchy(&healthy(16, Site::ORIGIN), &params, 1).unwrap();
        let k = [Site::new(5, 5)];
        let c = build_cover(&f, &w, &mut h, 1, &k).unwrap();
        check_cover(&f, &c, &k);
        assert!(c.tight());
        assert_eq!(h.covers().len(), 1);
        for b in c.barriers() {
            assert!(validate_barrier(b, &w, &params).is_ok());
        }
    }
}

#[test]
fn cover_of_a_straddling_set_contains_the_lower_cover() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let mut h = build_hierarchy(&healthy(64, Site::new(-32, -32)), &params, 2).unwrap();
    let lower = build_cover(&f, &w, &mut h, 1, &[Site::ORIGIN]).unwrap();
    let k = [Site::ORIGIN, Site::new(14, 14)];
    let upper = build_cover(&f, &w, &mut h, 2, &k).unwrap();
    check_cover(&f, &upper, &k);
    assert!(lower.is_subset_of(&upper));
    assert!(lower.sites().iter().all(|&v| upper.in_interior(v)));
    assert_eq!(h.covers().len(), 2);
}

#[test]
fn goodness_violation_is_an_error() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let infected = GridConfig::from_fn(400, 400, Boundary::FreeHealthy, |_, _| true).with_origin(Site::new(-200, -200));
    let mut h = build_hierarchy(&infected, &params, 1).unwrap();
    assert!(matches!(
        build_cover(&f, &w, &mut h, 1, &[Site::ORIGIN]),
        Err(CoverError::NoCleanSite { .. } | CoverError::HypothesisViolation(_))
    ));
    h.set_strict(false);
    assert!(build_cover(&f, &w, &mut h, 1, &[Site::ORIGIN]).is_ok());
}

#[test]
fn empty_set_cover_is_closed() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let mut h = build_hierarchy(&healthy(16, Site::ORIGIN), &params, 1).unwrap();
    let c = build_cover(&f, &w, &mut h, 1, &[]).unwrap();
    assert!(verify_closed(&f, &c));
}

/// Triangle with straight sides perpendicular to `normals`, at distance `radius`.
pub fn straight_cover(f: &UpdateFamily, normals_deg: [f64; 3], radius: f64) -> TriangularCover {
    let u: Vec<(f64, f64)> = normals_deg.iter().map(|d| (d.to_radians().cos(), d.to_radians().sin())).collect();
    let corner = |t: usize| {
        let (a, b) = (u[(t + 2) % 3], u[t]);
        let k = radius / (1.0 + a.0 * b.0 + a.1 * b.1);
        Site::new((k * (a.0 + b.0)).round() as i64, (k * (a.1 + b.1)).round() as i64)
    };
    let barriers = [0, 1, 2].map(|t| Barrier::straight(t, corner(t), corner((t + 1) % 3), f.range_sq()));
    TriangularCover::from_barriers(1, barriers)
}

#[test]
fn corrupted_cover_leaks() {
    let f = dtbp();
    let bad = straight_cover(&f, [60.0, 160.0, 250.0], 200.0);
    assert!(!verify_closed(&f, &bad));
    let good = straight_cover(&f, [52.5, 172.5, 292.5], 200.0);
    assert!(verify_closed(&f, &good));
}

#[test]
fn closure_of_cover_interior_is_itself() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let mut h = build_hierarchy(&healthy(16, Site::ORIGIN), &params, 1).unwrap();
    let c = build_cover(&f, &w, &mut h, 1, &[Site::new(2, 3), Site::new(4, 1)]).unwrap();
    // Independent check: seed T \ B in a padded box and close it.
    let (lo, hi) = c.bbox();
    let pad = 4;
    let origin = lo - Site::new(pad, pad);
    let (wd, ht) = ((hi.x - lo.x + 1 + 2 * pad) as usize, (hi.y - lo.y + 1 + 2 * pad) as usize);
    let mut g = GridConfig::new(wd, ht, Boundary::FreeHealthy).with_origin(origin);
    for v in c.interior_sites() {
        g.set_site(v, true);
    }
    assert_eq!(closure(&f, &g), g);
}

#[test]
fn layout_constants() {
    let w = paper_witness();
    let e0 = epsilon0(&w.thetas);
    assert!((e0 - (1.0 / (8.0 * 3f64.sqrt())).atan()).abs() < 1e-12);
    assert!(e0 > 0.02293 * PI);
    let r = r_epsilon(&w.thetas, e0);
    assert!(r > 23.9 && r < 24.04);
    assert_eq!(2 * ell0(&w.thetas, r) + 1, 361);
    let mut last = r;
    for eps in [0.01, 0.001, 1e-5] {
        let next = r_epsilon(&w.thetas, eps);
        assert!(next > last);
        last = next;
    }
    assert!(last > 1e5);
    assert!(matches!(cover_layout(4, &w, 0.1), Err(CoverError::EpsilonTooLarge { .. })));
    let l = cover_layout(8, &w, w.margin.min(e0)).unwrap();
    assert_eq!(l.c, 2 * l.ell0 + 1);
}

#[test]
fn certificate_values() {
    let c = certify(&dtbp(), 1.5, 1.45, 0.01, Some(OVERRIDES)).unwrap();
    assert_eq!(c.delta, 5.8);
    assert_eq!(delta_exponent(1.5, 1.45), 5.8);
    assert!(c.epsilon0 > 0.02293 * PI && c.epsilon0 < 0.0230 * PI);
    assert!(c.r_eps > 23.9 && c.r_eps < 24.04);
    assert_eq!(c.c_at_epsilon0, 361);
    assert!(c.epsilon_triple < c.epsilon0);
    assert_eq!(c.epsilon, c.epsilon_triple);
    assert_eq!(c.c, 367);
    assert!(c.delta1_min >= 1e12 && c.delta1_min <= 10f64.powf(13.5));
    assert_eq!(c.delta1, 1e13);
    assert!(c.p_bound >= 1e-102 && c.p_bound <= 1e-100);
    assert!((c.p_bound - c.delta1.powf(-c.delta - 2.0)).abs() <= 1e-12 * c.p_bound);
    assert!(c.final_check);
    let oracle = 5.0 * (c.c as f64).powi(2) * (c.p_bound.powf(1.0 / 3.0) + 2.0 * c.p_bound.powf(0.5)) < 1.0
        && c.p_bound < 2f64.powf(-3.0 / (1.5 * 1.5f64.ln()));
    assert_eq!(final_bound_holds(c.c, c.p_bound, 1.5), oracle);
    assert!(!final_bound_holds(361, 1e-3, 1.5));
    let text = c.to_string();
    assert!(text.contains("c = 367") && text.contains("final_check = true"));
}

#[test]
fn certificate_needs_subcritical() {
    assert_eq!(
        certify(&builtin_family("neighbour-2").unwrap(), 1.5, 1.45, 0.01, None),
        Err(CoverError::NotSubcritical(Classification::Critical))
    );
    assert!(matches!(
        certify(&dtbp(), 1.5, 1.6, 0.01, None),
        Err(CoverError::ParameterOrderViolation(_))
    ));
    assert!(matches!(
        witness_triple(&dtbp(), Some([0.0, 2.0, 4.0])),
        Err(GeometryError::InvalidOverride { .. })
    ));
}

#[test]
fn demo_outcomes() {
    let f = dtbp();
    let w = paper_witness();
    let params = RenormParams::for_witness(1.5, 1.45, 0.01, 4, &w).unwrap();
    let (r, _) = run_cover_demo(&f, &w, &healthy(64, Site::ORIGIN), &params, 2, true).unwrap();
    assert_eq!(r.infected, 0);
    assert!(r.covers.is_empty() && r.succeeded());
    assert!(r.to_text().contains("no covers needed"));

    let built = (0..40u64).find_map(|seed| {
        let t = initial_config(128, 2e-4, seed, 0);
        let cfg = GridConfig::from_fn(128, 128, Boundary::FreeHealthy, |i, j| t.get(i, j));
        let (r, h) = run_cover_demo(&f, &w, &cfg, &params, 2, true).unwrap();
        (r.succeeded() && !r.covers.is_empty()).then_some((r, h))
    });
    let (r, h) = built.expect("some sparse sample is coverable");
    assert!(r.covers.iter().all(|c| c.closed && c.fixed && c.barriers_valid));
    assert_eq!(r.contained, Some(true));
    assert!(overlay_ppm(&h).starts_with("P3\n"));

    let t = initial_config(128, 0.01, 1, 0);
    let dense = GridConfig::from_fn(128, 128, Boundary::FreeHealthy, |i, j| t.get(i, j));
    let (r, _) = run_cover_demo(&f, &w, &dense, &params, 2, true).unwrap();
    assert!(!r.failures.is_empty());
    assert_eq!(r.contained, None);
    assert!(!r.succeeded());
}
