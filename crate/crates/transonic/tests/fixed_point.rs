use proptest::prelude::*;
use transonic::config::RunConfig;
use transonic::fixed_point::{w_norm, x_norm, IterationOptions, IterationState, Problem};
use transonic::geometry::ShockSurface;
use transonic::runner;
use transonic::Error;

fn coarse(eps: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    let s = &mut cfg.solver;
    (s.n_r, s.n_theta, s.n_x3, s.modes_theta, s.modes_x3) = (16, 8, 8, 6, 6);
    s.eps = eps;
    cfg
}

fn problem(eps: f64) -> Problem {
    runner::setup(&coarse(eps)).unwrap().problem
}

fn max_state(z: &IterationState) -> f64 {
    z.v.iter().map(|f| f.max_abs()).fold(z.surface.v6.max_abs(), f64::max)
}

#[test]
fn zero_data_is_a_fixed_point() {
    let pr = problem(0.0);
    let zero = IterationState::zero(pr.grid());
    let (t, diag) = pr.apply(&zero).unwrap();
    assert!(max_state(&t) < 1e-12, "T(0) = {}", max_state(&t));
    assert!(diag.pi.max_abs() < 1e-12);
    let sol = pr.iterate(&IterationOptions::default(), |_| {}).unwrap();
    assert!(sol.converged);
    assert_eq!(sol.history.len(), 1);
}

#[test]
fn first_image_is_linear_in_eps() {
    let norm = |eps: f64| {
        let pr = problem(eps);
        let (t, _) = pr.apply(&IterationState::zero(pr.grid())).unwrap();
        x_norm(pr.grid(), &pr.scales, &t)
    };
    let (a, b) = (norm(1e-4), norm(2e-4));
    assert!(a > 0.0);
    assert!((b / a - 2.0).abs() < 1e-2, "ratio {}", b / a);
}

#[test]
fn iteration_contracts() {
    let pr = problem(1e-3);
    let sol = pr.iterate(&IterationOptions::default(), |_| {}).unwrap();
    assert!(sol.converged);
    assert!(sol.history.len() <= 10, "{} iterations", sol.history.len());
    for r in sol.history.iter().filter_map(|r| r.ratio) {
        assert!(r < 0.1, "ratio {r}");
    }
}

#[test]
fn relaxed_iteration_reaches_the_same_point() {
    let pr = problem(1e-3);
    let full = pr.iterate(&IterationOptions::default(), |_| {}).unwrap();
    let opts = IterationOptions { relax: 0.7, max_iters: 60, ..IterationOptions::default() };
    let relaxed = pr.iterate(&opts, |_| {}).unwrap();
    assert!(relaxed.converged);
    assert!(relaxed.history.len() > full.history.len());
    let gap = w_norm(pr.grid(), &pr.scales, &full.state.sub(&relaxed.state));
    assert!(gap < 1e-8, "gap {gap}");
}

#[test]
fn shock_bump_response_is_quadratic_at_zero_data() {
    let pr = problem(0.0);
    let g = *pr.grid();
    let t0 = g.theta0;
    let response = |delta: f64| {
        let v6 = g.field2(|y2, y3| {
            delta * (std::f64::consts::PI * (y2 + t0) / t0).cos() * (std::f64::consts::PI * (y3 + 1.0)).cos()
        });
        let mut hat = IterationState::zero(&g);
        hat.surface = ShockSurface::from_values(&pr.fd, v6);
        let (t, _) = pr.apply(&hat).unwrap();
        x_norm(&g, &pr.scales, &t)
    };
    let (a, b) = (response(1e-6), response(2e-6));
    assert!(a > 0.0);
    assert!((b / a - 4.0).abs() < 2e-2, "ratio {}", b / a);
}

#[test]
fn trust_radius_violation_is_reported() {
    let pr = problem(1e-3);
    let opts = IterationOptions { trust_factor: 1e-6, ..IterationOptions::default() };
    match pr.iterate(&opts, |_| {}) {
        Err(Error::TrustRadius { norm, radius }) => assert!(norm > radius),
        other => panic!("expected a trust radius error, got {other:?}"),
    }
}

#[test]
fn iteration_log_matches_history() {
    let pr = problem(1e-3);
    let mut seen = vec![];
    let sol = pr.iterate(&IterationOptions::default(), |r| seen.push(*r)).unwrap();
    assert_eq!(seen, sol.history);
    assert!(sol.history.last().unwrap().update < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn norms_are_seminorms(a in -3.0f64..3.0, c in proptest::array::uniform6(-1.0f64..1.0)) {
        let pr = problem(0.0);
        let g = *pr.grid();
        let mut z = IterationState::zero(&g);
        for (m, f) in z.v.iter_mut().enumerate() {
            *f = g.field3(|y1, y2, y3| c[m] * (y1 * y2 + (m as f64 + 1.0) * y3).sin());
        }
        z.surface = ShockSurface::from_values(&pr.fd, g.field2(|y2, y3| c[5] * (y2 * y3).cos()));
        let mut w = IterationState::zero(&g);
        w.v[0] = g.field3(|y1, _, _| y1 - g.r_s);
        for norm in [w_norm, x_norm] {
            let n = norm(&g, &pr.scales, &z);
            let scaled = norm(&g, &pr.scales, &z.combine(&z, a, 0.0));
            prop_assert!((scaled - a.abs() * n).abs() <= 1e-12 * (1.0 + n));
            let sum = norm(&g, &pr.scales, &z.combine(&w, 1.0, 1.0));
            prop_assert!(sum <= n + norm(&g, &pr.scales, &w) + 1e-12);
        }
    }
}
