#![allow(dead_code)]

use std::f64::consts::PI;
use transonic::background::{BackgroundCoefficients, BackgroundSolution, Geometry, InletState};
use transonic::elliptic::{DivCurl, Elliptic};
use transonic::grid::{BoxGrid, Field3};
use transonic::GasModel;

pub fn bg() -> BackgroundSolution {
    BackgroundSolution::new(GasModel::new(1.4).unwrap(), Geometry::default(), &InletState::default(), 1.5).unwrap()
}

pub fn solver(b: &BackgroundSolution, n1: usize, n: usize) -> Elliptic {
    let g = BoxGrid::new(b.r_s, b.geometry.r2, b.geometry.theta0, n1, n, n);
    let coef = BackgroundCoefficients::new(b).unwrap();
    Elliptic::new(g, (n, n), b, &coef).unwrap()
}

pub fn orders(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

pub fn cs(kap: f64, t0: f64, y2: f64) -> (f64, f64) {
    let x = kap * (y2 + t0);
    (x.cos(), x.sin())
}

pub fn deriv(f: impl Fn(f64) -> f64, y: f64) -> f64 {
    let h = 1e-3;
    (8.0 * (f(y + h) - f(y - h)) - (f(y + 2.0 * h) - f(y - 2.0 * h))) / (12.0 * h)
}

/// Sup error of the recovered potential of a gradient field, and the worst
/// relative gap of its reassembled gradient.
pub fn pi_case(b: &BackgroundSolution, n1: usize) -> (f64, f64) {
    let e = solver(b, n1, 8);
    let g = *e.grid();
    let (rs, r2, t0) = (g.r_s, g.r2, g.theta0);
    let (k1, l1) = (e.basis.kappa(2), e.basis.lambda(1));
    let (k2, l2) = (e.basis.kappa(3), e.basis.lambda(2));
    let rad = move |y: f64| y * (PI * (y - rs) / (r2 - rs)).sin();
    let rad2 = move |y: f64| (y - rs) * (r2 - y);
    let pi = move |y1: f64, y2: f64, y3: f64| {
        rad(y1) * cs(k1, t0, y2).1 * cs(l1, 1.0, y3).1 + 0.5 * rad2(y1) * cs(k2, t0, y2).1 * cs(l2, 1.0, y3).1
    };
    let g1 = g.field3(|y1, y2, y3| {
        deriv(rad, y1) * cs(k1, t0, y2).1 * cs(l1, 1.0, y3).1
            + 0.5 * deriv(rad2, y1) * cs(k2, t0, y2).1 * cs(l2, 1.0, y3).1
    });
    let g2 = g.field3(|y1, y2, y3| {
        (k1 * rad(y1) * cs(k1, t0, y2).0 * cs(l1, 1.0, y3).1
            + 0.5 * k2 * rad2(y1) * cs(k2, t0, y2).0 * cs(l2, 1.0, y3).1)
            / y1
    });
    let g3 = g.field3(|y1, y2, y3| {
        l1 * rad(y1) * cs(k1, t0, y2).1 * cs(l1, 1.0, y3).0
            + 0.5 * l2 * rad2(y1) * cs(k2, t0, y2).1 * cs(l2, 1.0, y3).0
    });
    let s = e.solve_pi([&g1, &g2, &g3]).unwrap();
    let given = [&g1, &g2, &g3];
    let gap = (0..3).map(|c| s.grad[c].sub(given[c]).max_abs() / given[c].max_abs()).fold(0.0, f64::max);
    (s.pi.sub(&g.field3(pi)).max_abs(), gap)
}

// Divergence-free field with vanishing normal components and its curl, one
// radial profile per mode.
pub struct Manufactured {
    pub v: [Field3; 3],
    pub curl: [Field3; 3],
}

pub fn manufactured(e: &Elliptic) -> Manufactured {
    let g = *e.grid();
    let (rs, r2, t0) = (g.r_s, g.r2, g.theta0);
    let modes = [(1usize, 1usize, 1.0), (2, 1, 0.4), (1, 2, -0.3), (0, 1, 0.2)];
    let mut v = [g.zeros3(), g.zeros3(), g.zeros3()];
    let mut curl = [g.zeros3(), g.zeros3(), g.zeros3()];
    for (k, l, amp) in modes {
        let (kap, lam) = (e.basis.kappa(k), e.basis.lambda(l));
        let p = move |y: f64| amp * (y - rs) * (r2 - y) * (3.0 * y).exp();
        let dp = move |y: f64| amp * (3.0 * y).exp() * ((rs + r2 - 2.0 * y) + 3.0 * (y - rs) * (r2 - y));
        let g1 = move |y: f64| amp * (0.5 + (2.0 * y).sin());
        let ll = move |y: f64| kap * kap + lam * lam * y * y;
        let a = move |y: f64| p(y) / y;
        let bb = move |y: f64| (lam * y * y * g1(y) - kap * dp(y)) / ll(y);
        let cc = move |y: f64| -y * (kap * g1(y) + lam * dp(y)) / ll(y);
        let cur2 = move |y: f64| -lam * a(y) - deriv(cc, y);
        let cur3 = move |y: f64| deriv(bb, y) + bb(y) / y + kap * a(y) / y;
        let add = |f: &mut Field3, prof: &dyn Fn(f64) -> f64, p2: usize, p3: usize| {
            let h = g.field3(|y1, y2, y3| {
                let (c2, s2) = cs(kap, t0, y2);
                let (c3, s3) = cs(lam, 1.0, y3);
                prof(y1) * [c2, s2][p2] * [c3, s3][p3]
            });
            *f = f.add(&h);
        };
        add(&mut v[0], &a, 0, 0);
        add(&mut v[1], &bb, 1, 0);
        add(&mut v[2], &cc, 0, 1);
        add(&mut curl[0], &g1, 1, 1);
        add(&mut curl[1], &cur2, 0, 1);
        add(&mut curl[2], &cur3, 1, 0);
    }
    Manufactured { v, curl }
}

/// Sup error of the div-curl solve against the manufactured field.
pub fn div_curl_case(b: &BackgroundSolution, n1: usize) -> f64 {
    let e = solver(b, n1, 8);
    let m = manufactured(&e);
    let s: DivCurl = e.solve_div_curl([&m.curl[0], &m.curl[1], &m.curl[2]], 1.0).unwrap();
    (0..3).map(|c| s.v[c].sub(&m.v[c]).max_abs()).fold(0.0, f64::max)
}

/// Sup error of one potential mode and its radial derivative.
pub fn potential_case(b: &BackgroundSolution, n1: usize, k: usize, l: usize) -> f64 {
    let e = solver(b, n1, 4);
    let g = *e.grid();
    let (kap, lam) = (e.basis.kappa(k), e.basis.lambda(l));
    let x = |y: f64| (1.3 * y).cos() + 0.2 * y * y;
    let dx = |y: f64| -1.3 * (1.3 * y).sin() + 0.4 * y;
    let ddx = |y: f64| -1.69 * (1.3 * y).cos() + 0.4;
    let x0 = x(g.r_s);
    let src: Vec<f64> = (0..=n1)
        .map(|i| {
            let y = g.y1(i);
            let rc = &e.radial[i];
            rc.d1 * ddx(y) + (1.0 / y + rc.d2) * dx(y) - (kap * kap / (y * y) + lam * lam) * x(y) - e.a0a1 * rc.d4 * x0
        })
        .collect();
    let m1 = dx(g.r_s) - e.a4 * x0;
    let m2 = dx(g.r2);
    let (xs, dxs) = e.potential_mode(k, l, kap, lam, &src, m1, m2).unwrap();
    let ex = (0..=n1).map(|i| (xs[i] - x(g.y1(i))).abs()).fold(0.0, f64::max);
    let ed = (0..=n1).map(|i| (dxs[i] - dx(g.y1(i))).abs()).fold(0.0, f64::max);
    ex.max(ed)
}
