use proptest::prelude::*;
use transonic::config::RunConfig;
use transonic::fixed_point::{IterationOptions, IterationState};
use transonic::runner;
use transonic::verify::{
    compatibility, fitted_exponent, kernel_scaling, physical_fields, solvability, verify_equivalence,
    verify_shock_conditions,
};

fn config(eps: f64, s: usize) -> RunConfig {
    let mut cfg = RunConfig::default();
    let v = &mut cfg.solver;
    (v.n_r, v.n_theta, v.n_x3, v.modes_theta, v.modes_x3) = (16 * s, 8 * s, 8 * s, 6 * s, 6 * s);
    v.eps = eps;
    cfg
}

#[test]
fn background_satisfies_every_residual() {
    let pr = runner::setup(&config(0.0, 1)).unwrap().problem;
    let z = IterationState::zero(pr.grid());
    let eq = verify_equivalence(&pr, &z).unwrap();
    assert!(eq.euler_max() < 1e-10, "{eq:?}");
    assert!(eq.decomposed_max() < 1e-10, "{eq:?}");
    let sh = verify_shock_conditions(&pr, &z).unwrap();
    assert!(sh.rh_max() < 1e-12, "{sh:?}");
    assert!(sh.f2.abs().max(sh.f3.abs()) < 1e-12);
}

#[test]
fn physical_fields_of_zero_iterate_are_the_background() {
    let pr = runner::setup(&config(0.0, 1)).unwrap().problem;
    let f = physical_fields(&pr, &IterationState::zero(pr.grid())).unwrap();
    for n in 0..pr.grid().len() {
        let bar = pr.bg.plus(f.d0.data[n]).unwrap();
        assert!((f.rho.data[n] - bar.rho).abs() < 1e-12);
        assert!((f.p.data[n] - bar.p).abs() < 1e-12);
        assert!((f.u[0].data[n] - bar.u).abs() < 1e-12);
        assert!(f.u[1].data[n] == 0.0 && f.u[2].data[n] == 0.0);
    }
}

#[test]
fn converged_solution_passes_the_checks() {
    let pr = runner::setup(&config(1e-3, 2)).unwrap().problem;
    let sol = pr.iterate(&IterationOptions::default(), |_| {}).unwrap();
    let eq = verify_equivalence(&pr, &sol.state).unwrap();
    assert!(eq.euler_max() < 1e-5 && eq.decomposed_max() < 1e-5, "{eq:?}");
    let sh = verify_shock_conditions(&pr, &sol.state).unwrap();
    assert!(sh.rh_max() < 1e-6, "{sh:?}");
    let comp = compatibility(&pr, &sol).unwrap();
    assert!(comp.worst() < 10.0, "{comp:?}");
    let solv = solvability(&pr, &sol);
    assert!(solv.q5_integral.abs() < solv.q5_tolerance, "{solv:?}");
    assert!(solv.m1_integral.abs() < 1e-12, "{solv:?}");
}

#[test]
fn kernels_vanish_quadratically_without_upstream_data() {
    let cfg = config(1e-3, 1);
    let st = runner::setup(&cfg).unwrap();
    let sol = st.problem.iterate(&IterationOptions::default(), |_| {}).unwrap();
    let ks = runner::kernel_report(&cfg, &st.problem, &sol, &[1e-2, 1e-3]).unwrap().unwrap();
    assert!(ks.g_exponent >= 1.9 && ks.r0_exponent >= 1.9, "{ks:?}");
    let zero = runner::setup(&config(0.0, 1)).unwrap().problem;
    let flat = kernel_scaling(&zero, &IterationState::zero(zero.grid()), &[1.0]).unwrap();
    assert!(flat.g[0] < 1e-14 && flat.r0[0] < 1e-14, "{flat:?}");
}

#[test]
fn refinement_improves_residuals() {
    let levels: Vec<_> = [1, 2]
        .iter()
        .map(|&s| {
            let pr = runner::setup(&config(1e-3, s)).unwrap().problem;
            let sol = pr.iterate(&IterationOptions::default(), |_| {}).unwrap();
            runner::verification(&pr, &sol).unwrap()
        })
        .collect();
    let order = runner::observed_order(levels[0].euler, levels[1].euler, 2.0);
    assert!(order >= 1.5, "euler order {order}");
    let order = runner::observed_order(levels[0].pi_max, levels[1].pi_max, 2.0);
    assert!(order >= 1.5, "pi order {order}");
}

#[test]
fn observed_order_oracle() {
    assert!((runner::observed_order(4e-4, 1e-4, 2.0) - 2.0).abs() < 1e-12);
    assert!((runner::observed_order(27.0, 1.0, 3.0) - 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fitted_exponent_recovers_powers(c in 0.1f64..10.0, p in -3.0f64..3.0, x0 in 1e-4f64..1e-1) {
        let x = [x0, 3.0 * x0, 10.0 * x0];
        let y: Vec<f64> = x.iter().map(|v| c * v.powf(p)).collect();
        prop_assert!((fitted_exponent(&x, &y) - p).abs() < 1e-9);
    }
}
