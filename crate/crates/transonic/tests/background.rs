use approx::assert_relative_eq;
use proptest::prelude::*;
use transonic::background::{
    admissible_interval, exit_pressure_of_shock, find_shock_radius, jump_downstream, BackgroundCoefficients,
    BackgroundSolution, Geometry, InletState,
};
use transonic::rh::point;
use transonic::{Error, FlowState, GasModel};

fn gas() -> GasModel {
    GasModel::new(1.4).unwrap()
}

fn bg(r_s: f64) -> BackgroundSolution {
    BackgroundSolution::new(gas(), Geometry::default(), &InletState::default(), r_s).unwrap()
}

#[test]
fn normal_shock_mach_two() {
    let g = gas();
    let minus = FlowState::new(2.0 * 1.4f64.sqrt(), 0.0, 0.0, 1.0, 1.0);
    let plus = jump_downstream(&g, &minus).unwrap();
    assert_relative_eq!(plus.density, 2.666_666_666_666_667, epsilon = 1e-6);
    assert_relative_eq!(g.pressure(&plus), 4.5, epsilon = 1e-6);
    assert_relative_eq!(g.mach(&plus), 0.577_350_269, epsilon = 1e-6);
    assert_relative_eq!(plus.entropy_k, 4.5 / (8.0f64 / 3.0).powf(1.4), epsilon = 1e-12);
}

#[test]
fn inlet_constants() {
    let b = bg(1.5);
    let m = b.minus(1.0).unwrap();
    assert_relative_eq!(m.u, 2.366_431_913_2, epsilon = 1e-9);
    assert_relative_eq!(b.bernoulli(), 6.3, epsilon = 1e-12);
}

#[test]
fn exit_pressure_table() {
    let table = [
        (1.1, 4.97723),
        (1.3, 4.26606),
        (1.5, 3.70082),
        (1.7, 3.23731),
        (1.9, 2.84536),
    ];
    let g = gas();
    for (r, p) in table {
        let pe = exit_pressure_of_shock(&g, &Geometry::default(), &InletState::default(), r).unwrap();
        assert_relative_eq!(pe, p, epsilon = 1e-5);
    }
    let (lo, hi) = admissible_interval(&g, &Geometry::default(), &InletState::default()).unwrap();
    assert_relative_eq!(lo, 2.66922, epsilon = 1e-5);
    assert_relative_eq!(hi, 5.40667, epsilon = 1e-5);
}

#[test]
fn states_at_default_shock() {
    let b = bg(1.5);
    let m = b.minus(1.5).unwrap();
    let p = b.plus(1.5).unwrap();
    assert_relative_eq!(m.rho, 0.601039, epsilon = 1e-6);
    assert_relative_eq!(m.u, 2.624823, epsilon = 1e-6);
    assert_relative_eq!(m.p, 0.490302, epsilon = 1e-6);
    assert_relative_eq!(p.rho, 1.971894, epsilon = 1e-6);
    assert_relative_eq!(p.u, 0.800054, epsilon = 1e-6);
    assert_relative_eq!(p.p, 3.369097, epsilon = 1e-6);
    assert_relative_eq!(b.k_plus(), 1.302197, epsilon = 1e-6);
    assert_relative_eq!(p.mach_sq().sqrt(), 0.517297, epsilon = 1e-6);
    for r in b.jump_residual().unwrap() {
        assert!(r.abs() < 1e-12);
    }
}

#[test]
fn coefficients_at_default_shock() {
    let b = bg(1.5);
    let c = BackgroundCoefficients::new(&b).unwrap();
    assert_relative_eq!(c.a0, 0.548014, epsilon = 1e-6);
    assert_relative_eq!(c.a1, 0.622264, epsilon = 1e-6);
    assert_relative_eq!(c.a2, 0.296717, epsilon = 1e-6);
    assert_relative_eq!(c.a3, 2.954979, epsilon = 1e-6);
    assert_relative_eq!(c.a4, 1.007676, epsilon = 1e-6);
    assert_relative_eq!(c.a1, c.a1_displayed(), epsilon = 1e-12);
    assert_relative_eq!(c.a2, c.a2_displayed(), epsilon = 1e-12);
    let b1 = [0.95181698, -0.32423152, 0.18267147];
    let b2 = [0.12369218, -0.15460482, 0.3048643];
    for i in 0..3 {
        assert_relative_eq!(c.b1[i], b1[i], epsilon = 1e-7);
        assert_relative_eq!(c.b2[i], b2[i], epsilon = 1e-7);
    }
    assert!(c.b_crosscheck < 1e-12);
    let rs = c.radial(&b, 1.5).unwrap();
    assert_relative_eq!(rs.d3, c.a3 - 1.0, epsilon = 1e-10);
    for (r, d4) in [(1.5, 3.7495), (1.75, 3.4852), (2.0, 3.3683)] {
        let rc = c.radial(&b, r).unwrap();
        assert_relative_eq!(rc.d4, d4, epsilon = 1e-4);
        assert_relative_eq!(rc.d4, c.d4_closed_form(rc.state), epsilon = 1e-10);
    }
}

#[test]
fn displayed_b2_is_off_by_one_density_factor() {
    let b = bg(1.5);
    let p = b.plus(1.5).unwrap();
    let (_, b2) = point::b_coefficients(1.4, p.rho, p.u, p.c2);
    let shown = point::b2_displayed(1.4, p.rho, p.u);
    for i in 0..3 {
        assert_relative_eq!(shown[i] / b2[i], p.rho, epsilon = 1e-12);
    }
}

#[test]
fn exit_pressure_outside_interval() {
    let g = gas();
    let e = find_shock_radius(&g, &Geometry::default(), &InletState::default(), 6.0).unwrap_err();
    assert!(matches!(e, Error::ExitPressureOutOfRange { .. }));
}

#[test]
fn generic_b_coefficients_in_f32() {
    let (b1, b2) = point::b_coefficients::<f32>(1.4, 1.971894, 0.800054, 2.3922);
    let (n1, n2) = point::b_coefficients_numeric::<f32>(1.4, 1.971894, 0.800054, 2.3922).unwrap();
    for i in 0..3 {
        assert!((b1[i] - n1[i]).abs() < 1e-4);
        assert!((b2[i] - n2[i]).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shock_radius_round_trip(r in 1.05f64..1.95) {
        let g = gas();
        let pe = exit_pressure_of_shock(&g, &Geometry::default(), &InletState::default(), r).unwrap();
        let back = find_shock_radius(&g, &Geometry::default(), &InletState::default(), pe).unwrap();
        prop_assert!((back - r).abs() < 1e-10);
    }

    #[test]
    fn exit_pressure_strictly_decreasing(r in 1.05f64..1.9, dr in 1e-3f64..0.05) {
        let g = gas();
        let a = exit_pressure_of_shock(&g, &Geometry::default(), &InletState::default(), r).unwrap();
        let b = exit_pressure_of_shock(&g, &Geometry::default(), &InletState::default(), r + dr).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn branch_invariants(r in 1.2f64..2.0) {
        let b = bg(1.5);
        let g = 1.4;
        for s in [b.minus(r).unwrap(), b.plus(r).unwrap()] {
            prop_assert!((s.rho * s.u * r - b.mass_flux()).abs() < 1e-12 * b.mass_flux());
            let bern = 0.5 * s.u * s.u + g / (g - 1.0) * s.p / s.rho;
            prop_assert!((bern - b.bernoulli()).abs() < 1e-12 * b.bernoulli());
        }
        prop_assert!(b.minus(r).unwrap().mach_sq() > 1.0);
        prop_assert!(b.plus(r).unwrap().mach_sq() < 1.0);
    }

    #[test]
    fn b_coefficients_match_inverse(rs in 1.1f64..1.9) {
        let b = bg(rs);
        let c = BackgroundCoefficients::new(&b).unwrap();
        prop_assert!(c.b_crosscheck < 1e-12);
        prop_assert!(c.a0 > 0.0 && c.a1 > 0.0 && c.a2 > 0.0 && c.a3 > 0.0 && c.a4 > 0.0);
    }
}
