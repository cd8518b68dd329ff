use proptest::prelude::*;
use transonic::config::{RunConfig, RunMode};
use transonic::inflow::{Basis, CrossMode};
use transonic::runner;
use transonic::Error;

fn config_error(cfg: &RunConfig) -> String {
    match cfg.validate() {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn default_round_trips_through_toml() {
    let cfg = RunConfig::default();
    let back = RunConfig::parse(&cfg.to_toml()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn default_grid_matches_documented_sizes() {
    let s = RunConfig::default().solver;
    assert_eq!((s.n_r, s.n_theta, s.n_x3, s.modes_theta, s.modes_x3), (32, 16, 16, 12, 12));
    let t = RunConfig::default().scaled(2).solver;
    assert_eq!((t.n_r, t.n_theta, t.n_x3, t.modes_theta, t.modes_x3), (64, 32, 32, 24, 24));
}

#[test]
fn invalid_fields_name_their_path() {
    let base = RunConfig::default();
    let mut c = base.clone();
    c.gas.gamma = 1.0;
    assert_eq!(config_error(&c), "gas.gamma");
    let mut c = base.clone();
    c.geometry.r2 = 0.5;
    assert_eq!(config_error(&c), "geometry.r2");
    let mut c = base.clone();
    c.inlet.mach = 0.9;
    assert_eq!(config_error(&c), "inlet.mach");
    let mut c = base.clone();
    c.exit.shock_radius = Some(2.5);
    assert_eq!(config_error(&c), "exit.shock_radius");
    let mut c = base.clone();
    c.exit.pressure = Some(3.0);
    assert_eq!(config_error(&c), "exit");
    let mut c = base.clone();
    c.exit.modes = vec![CrossMode { theta: Basis::Sin, ..CrossMode::cos(1, 1, 1.0) }];
    assert_eq!(config_error(&c), "exit.modes");
    let mut c = base.clone();
    c.inlet.modes[0].mode.x3 = Basis::Sin;
    assert_eq!(config_error(&c), "inlet.modes");
    let mut c = base.clone();
    c.solver.fd_order = 3;
    assert_eq!(config_error(&c), "solver.fd_order");
    let mut c = base.clone();
    c.solver.relax = 0.0;
    assert_eq!(config_error(&c), "solver.relax");
    let mut c = base;
    c.solver.n_x3 = 4;
    assert_eq!(config_error(&c), "solver.n_x3");
}

#[test]
fn unknown_keys_are_rejected() {
    let text = RunConfig::default().to_toml().replace("[gas]\n", "[gas]\nviscosity = 1.0\n");
    assert!(matches!(RunConfig::parse(&text), Err(Error::Config { .. })));
}

#[test]
fn exit_pressure_and_shock_radius_agree() {
    let by_radius = RunConfig::default();
    let bg = runner::background(&by_radius).unwrap();
    let mut by_pressure = by_radius.clone();
    by_pressure.exit.shock_radius = None;
    by_pressure.exit.pressure = Some(bg.exit_pressure().unwrap());
    let back = runner::background(&by_pressure).unwrap();
    assert!((back.r_s - bg.r_s).abs() < 1e-10);
}

#[test]
fn sweep_rejects_pressures_outside_the_interval() {
    let mut cfg = RunConfig::default();
    cfg.exit.sweep = vec![3.0, 9.0];
    assert!(matches!(runner::sweep(&cfg), Err(Error::ExitPressureOutOfRange { .. })));
}

#[test]
fn sweep_table_decreases() {
    let mut cfg = RunConfig::default();
    cfg.exit.sweep = vec![4.5, 3.0, 5.2, 2.8, 3.7];
    let t = runner::sweep(&cfg).unwrap();
    let mut sorted = t.clone();
    sorted.sort_by(|a, b| a.exit_pressure.total_cmp(&b.exit_pressure));
    assert!(sorted.windows(2).all(|w| w[1].shock_radius < w[0].shock_radius));
}

#[test]
fn background_mode_reports_without_iterating() {
    let mut cfg = RunConfig::default();
    cfg.output.mode = RunMode::Background;
    let out = runner::run(&cfg).unwrap();
    assert!(out.report.converged && out.report.iteration.is_none());
    assert!(out.report.background.jump_residual < 1e-12);
    let text = out.report.to_toml();
    assert!(text.contains("[background]"));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn valid_configs_round_trip(
        eps in 0.0f64..1e-2,
        r_s in 1.05f64..1.95,
        mach in 1.2f64..3.0,
        n in 8usize..40,
        tol in 1e-14f64..1e-6,
    ) {
        let mut cfg = RunConfig::default();
        cfg.solver.eps = eps;
        cfg.exit.shock_radius = Some(r_s);
        cfg.inlet.mach = mach;
        cfg.solver.n_r = n;
        cfg.solver.tol_fixed_point = tol;
        cfg.validate().unwrap();
        prop_assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
