use proptest::prelude::*;
use transonic::background::{BackgroundSolution, Geometry, InletState};
use transonic::inflow::{
    frozen_supersonic, make_inlet, march_supersonic, Basis, CrossMode, InletField, InletMode,
};
use transonic::{Error, GasModel};

fn bg() -> BackgroundSolution {
    BackgroundSolution::new(GasModel::new(1.4).unwrap(), Geometry::default(), &InletState::default(), 1.5).unwrap()
}

fn pressure_mode() -> Vec<InletMode> {
    vec![InletMode { field: InletField::P, mode: CrossMode::cos(1, 1, 1.0) }]
}

fn rich_modes() -> Vec<InletMode> {
    vec![
        InletMode { field: InletField::P, mode: CrossMode::cos(1, 1, 1.0) },
        InletMode { field: InletField::U1, mode: CrossMode::cos(0, 1, 0.5) },
        InletMode { field: InletField::U2, mode: CrossMode { theta: Basis::Sin, x3: Basis::Cos, k: 2, l: 0, amp: 0.3 } },
        InletMode { field: InletField::U3, mode: CrossMode { theta: Basis::Cos, x3: Basis::Sin, k: 0, l: 2, amp: 0.3 } },
        InletMode { field: InletField::K, mode: CrossMode::cos(1, 0, 0.5) },
    ]
}

#[test]
fn zero_eps_reproduces_background() {
    let b = bg();
    let inlet = make_inlet(0.0, b.geometry.theta0, &rich_modes()).unwrap();
    let f = march_supersonic(&b, &inlet, 64, 16, 16, 4).unwrap();
    assert!(f.max_deviation() < 1e-10, "deviation {}", f.max_deviation());
    let s = f.eval_minus(1.37, 0.1, -0.3).unwrap();
    let m = b.minus(1.37).unwrap();
    assert!((s.u_r - m.u).abs() < 1e-12);
    assert!((s.density - m.rho).abs() < 1e-12);
}

#[test]
fn deviation_scales_linearly() {
    let b = bg();
    let mut dev = vec![];
    for eps in [1e-3, 5e-4] {
        let inlet = make_inlet(eps, b.geometry.theta0, &pressure_mode()).unwrap();
        let f = march_supersonic(&b, &inlet, 64, 16, 16, 4).unwrap();
        dev.push(f.max_deviation() / eps);
    }
    assert!(dev[0] > 0.5 && dev[0] < 10.0, "C = {}", dev[0]);
    assert!((dev[0] - dev[1]).abs() < 1e-2 * dev[0], "{dev:?}");
}

#[test]
fn wall_conditions_carried_by_march() {
    let b = bg();
    let inlet = make_inlet(1e-3, b.geometry.theta0, &rich_modes()).unwrap();
    let f = march_supersonic(&b, &inlet, 64, 16, 16, 4).unwrap();
    let c = f.compatibility();
    assert!(c.worst() < 10.0, "{c:?}");
    for k in 0..=16 {
        assert!(f.dprim[1].at(40, 0, k).abs() < 1e-15);
        assert!(f.dprim[2].at(40, k, 16).abs() < 1e-15);
    }
}

#[test]
fn bernoulli_and_entropy_follow_streamlines() {
    // With a K-only inlet perturbation and no velocity deflection at first
    // order, K at the shock radius stays close to its inlet value.
    let b = bg();
    let modes = vec![InletMode { field: InletField::K, mode: CrossMode::cos(1, 0, 1.0) }];
    let inlet = make_inlet(1e-3, b.geometry.theta0, &modes).unwrap();
    let f = march_supersonic(&b, &inlet, 64, 16, 16, 4).unwrap();
    let g = f.grid;
    let mut worst = 0.0f64;
    for j in 0..=g.n2 {
        let k0 = f.dprim[4].at(0, j, 8);
        let kn = f.dprim[4].at(g.n1, j, 8);
        worst = worst.max((kn - k0).abs());
    }
    assert!(worst < 1e-4, "K drift {worst}");
}

#[test]
fn frozen_field_is_constant_in_r() {
    let b = bg();
    let inlet = make_inlet(1e-3, b.geometry.theta0, &pressure_mode()).unwrap();
    let f = frozen_supersonic(&b, &inlet, 16, 8, 8).unwrap();
    assert!((f.dprim[3].at(0, 3, 2) - f.dprim[3].at(16, 3, 2)).abs() < 1e-15);
}

#[test]
fn incompatible_modes_rejected() {
    let t0 = Geometry::default().theta0;
    let bad = [
        InletMode { field: InletField::U2, mode: CrossMode::cos(1, 0, 1.0) },
        InletMode { field: InletField::P, mode: CrossMode { theta: Basis::Sin, x3: Basis::Cos, k: 1, l: 0, amp: 1.0 } },
        InletMode { field: InletField::U3, mode: CrossMode { theta: Basis::Cos, x3: Basis::Sin, k: 0, l: 0, amp: 1.0 } },
    ];
    for m in bad {
        assert!(matches!(make_inlet(1e-3, t0, &[m]), Err(Error::IncompatibleMode(_))));
    }
}

#[test]
fn eval_minus_out_of_domain() {
    let b = bg();
    let inlet = make_inlet(0.0, b.geometry.theta0, &[]).unwrap();
    let f = frozen_supersonic(&b, &inlet, 16, 8, 8).unwrap();
    assert!(matches!(f.eval_minus(2.5, 0.0, 0.0), Err(Error::OutOfDomain(_))));
}

#[test]
fn interpolation_is_fourth_order() {
    let b = bg();
    let inlet = make_inlet(1e-3, b.geometry.theta0, &pressure_mode()).unwrap();
    let mut err = vec![];
    for n in [8usize, 16] {
        let f = frozen_supersonic(&b, &inlet, 2 * n, n, n).unwrap();
        let mut e = 0.0f64;
        for (y2, y3) in [(0.13, 0.41), (-0.3, -0.77), (0.49, 0.05)] {
            let s = f.eval_minus(1.5, y2, y3).unwrap();
            let exact = b.minus(1.5).unwrap().p + inlet.value(InletField::P, y2, y3);
            let p = s.entropy_k * s.density.powf(1.4);
            e = e.max((p - exact).abs());
        }
        err.push(e);
    }
    let order = (err[0] / err[1]).log2();
    assert!(order > 3.5, "order {order} ({err:?})");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cosine_profiles_have_flat_walls(k in 0usize..5, l in 0usize..5) {
        let t0 = Geometry::default().theta0;
        let m = CrossMode::cos(k, l, 1.0);
        let h = 1e-6;
        for y3 in [-0.7, 0.2] {
            let d = (m.shape(t0, t0, y3) - m.shape(t0, t0 - h, y3)) / h;
            prop_assert!(d.abs() < 1e-4 * (1.0 + k as f64).powi(2));
        }
    }
}
