//! Transport along the streamlines of the previous iterate: the Bernoulli
//! deviation `V5`, the entropy deviation `V4` and the first vorticity
//! component.
//!
//! Footpoints are traced backward from every node, one radial level at a
//! time: a node on level `i+1` is integrated back to level `i` with RK4 and
//! the footpoint offset there is read off by bicubic interpolation.

use rayon::prelude::*;

use crate::background::BackgroundCoefficients;
use crate::error::{Error, Result};
use crate::geometry::{BackgroundOnMetric, DOp, Metric, ShockSurface};
use crate::grid::{sample2, BoxGrid, Fd, Field2, Field3, Point3, EE, EO, OE, OO};
use crate::inflow::SupersonicField;

/// Landing points farther than this outside the cross-section are errors.
pub const ESCAPE_TOL: f64 = 1e-12;

/// Right-hand sides of the streamline ODE in `y1` and of the vorticity
/// transport: `dy2/dy1 = K2`, `dy3/dy1 = K3`, `d omega/dy1 = h - m omega`.
pub trait Drift: Sync {
    fn eval(&self, y1: f64, y2: f64, y3: f64) -> [f64; 4];
}

/// Node tables of the characteristic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicField {
    pub grid: BoxGrid,
    /// `U(D0) + V1`.
    pub w: Field3,
    pub k2: Field3,
    pub k3: Field3,
    /// `mu` and `H0` divided by the `d/dy1` coefficient of the transport operator.
    pub m: Field3,
    pub h: Field3,
}

impl Drift for CharacteristicField {
    fn eval(&self, y1: f64, y2: f64, y3: f64) -> [f64; 4] {
        let g = &self.grid;
        [
            Point3::new(g, OE, y1, y2, y3).sample(g, &self.k2),
            Point3::new(g, EO, y1, y2, y3).sample(g, &self.k3),
            Point3::new(g, EE, y1, y2, y3).sample(g, &self.m),
            Point3::new(g, OO, y1, y2, y3).sample(g, &self.h),
        ]
    }
}

/// Builds `K2, K3` and the vorticity coefficients from the iterate `v`
/// (`V1..V5`) on the metric of its shock surface.
pub fn build_characteristics(
    metric: &Metric,
    bgm: &BackgroundOnMetric,
    coef: &BackgroundCoefficients,
    surface: &ShockSurface,
    v: [&Field3; 5],
) -> Result<CharacteristicField> {
    let g = *metric.grid();
    let (rs, r2) = (g.r_s, g.r2);
    let fl = g.face_len();
    let w = bgm.u.add(v[0]);
    let floor = 0.5 * bgm.u.data.iter().cloned().fold(f64::INFINITY, f64::min);
    if let Some(&low) = w.data.iter().find(|&&x| !(x >= floor)) {
        return Err(Error::StagnationFloor { value: low, floor });
    }
    let mut k2 = g.zeros3();
    let mut k3 = g.zeros3();
    let mut c1 = g.zeros3();
    for n in 0..g.len() {
        let (i, _, _) = g.ijk(n);
        let f = n % fl;
        let d0 = metric.d0.data[n];
        let a = metric.a.data[f];
        let (v2, v3) = (v[1].data[n], v[2].data[n]);
        let den = d0 * w.data[n]
            + (g.y1(i) - r2) / (r2 - rs) * (v2 * surface.dv6[0].data[f] + d0 * v3 * surface.dv6[1].data[f]);
        k2.data[n] = v2 / (a * den);
        k3.data[n] = d0 * v3 / (a * den);
        c1.data[n] = a * den / (d0 * w.data[n]);
    }
    let inv_w = w.map(|x| 1.0 / x);
    let gam = coef.gamma;
    let mut q = g.zeros3();
    for n in 0..g.len() {
        let (wn, v2, v3) = (w.data[n], v[1].data[n], v[2].data[n]);
        q.data[n] = (coef.b_bar + v[4].data[n] - 0.5 * wn * wn - 0.5 * (v2 * v2 + v3 * v3))
            / (gam * (coef.k_plus + v[3].data[n]) * wn);
    }
    let mu = metric
        .apply(DOp::D2, &v[1].zip(&inv_w, |a, b| a * b), OE)
        .add(&metric.apply(DOp::D3, &v[2].zip(&inv_w, |a, b| a * b), EO))
        .add(&metric.d0.map(|r| 1.0 / r));
    let [_, dw2, dw3] = metric.grad(&inv_w, EE);
    let [_, dq2, dq3] = metric.grad(&q, EE);
    let [_, d4_2, d4_3] = metric.grad(v[3], EE);
    let [_, d5_2, d5_3] = metric.grad(v[4], EE);
    let mut m = g.zeros3();
    let mut h = g.zeros3();
    for n in 0..g.len() {
        let h0 = dw3.data[n] * d5_2.data[n] - dw2.data[n] * d5_3.data[n] + dq2.data[n] * d4_3.data[n]
            - dq3.data[n] * d4_2.data[n];
        m.data[n] = mu.data[n] / c1.data[n];
        h.data[n] = h0 / c1.data[n];
    }
    Ok(CharacteristicField { grid: g, w, k2, k3, m, h })
}

/// Footpoints on the shock face and the transported vorticity.
#[derive(Debug, Clone, PartialEq)]
pub struct Traced {
    pub beta: [Field3; 2],
    pub omega: Field3,
}

impl Traced {
    /// `max |beta_j - y_j|`.
    pub fn max_displacement(&self, grid: &BoxGrid) -> f64 {
        let mut out = 0.0f64;
        for n in 0..grid.len() {
            let (_, j, k) = grid.ijk(n);
            out = out.max((self.beta[0].data[n] - grid.y2(j)).abs());
            out = out.max((self.beta[1].data[n] - grid.y3(k)).abs());
        }
        out
    }
}

fn clamp_cross(grid: &BoxGrid, y2: f64, y3: f64) -> (f64, f64, f64) {
    let t0 = grid.theta0;
    let ex = (y2.abs() - t0).max(y3.abs() - 1.0).max(0.0);
    (y2.clamp(-t0, t0), y3.clamp(-1.0, 1.0), ex)
}

// One RK4 step of (y2, y3, a, sigma) in s = y1_start - y1 with step ds.
fn rk4_step(grid: &BoxGrid, drift: &impl Drift, top: f64, s: f64, st: [f64; 4], ds: f64) -> [f64; 4] {
    let rhs = |s: f64, x: [f64; 4]| {
        let (y2, y3, _) = clamp_cross(grid, x[0], x[1]);
        let [k2, k3, m, h] = drift.eval(top - s, y2, y3);
        [-k2, -k3, m, h * (-x[2]).exp()]
    };
    let add = |x: [f64; 4], k: [f64; 4], c: f64| [x[0] + c * k[0], x[1] + c * k[1], x[2] + c * k[2], x[3] + c * k[3]];
    let k1 = rhs(s, st);
    let k2 = rhs(s + 0.5 * ds, add(st, k1, 0.5 * ds));
    let k3 = rhs(s + 0.5 * ds, add(st, k2, 0.5 * ds));
    let k4 = rhs(s + ds, add(st, k3, ds));
    let mut out = st;
    for c in 0..4 {
        out[c] += ds / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    out
}

/// Traces every node back to the shock face. `omega_rs` is the vorticity on
/// the face.
pub fn trace(grid: &BoxGrid, drift: &impl Drift, omega_rs: &Field2) -> Result<Traced> {
    let g = *grid;
    let fl = g.face_len();
    let mut b2 = g.zeros3();
    let mut b3 = g.zeros3();
    let mut om = g.zeros3();
    for n in 0..fl {
        let (j, k) = (n / (g.n3 + 1), n % (g.n3 + 1));
        b2.data[n] = g.y2(j);
        b3.data[n] = g.y3(k);
        om.data[n] = omega_rs.data[n];
    }
    let mut db2 = g.zeros2();
    let mut db3 = g.zeros2();
    let mut om_lvl = omega_rs.clone();
    for i in 0..g.n1 {
        let top = g.y1(i + 1);
        let ds = 0.5 * (top - g.y1(i));
        let rows: Vec<Result<[f64; 3]>> = (0..fl)
            .into_par_iter()
            .map(|n| {
                let (j, k) = (n / (g.n3 + 1), n % (g.n3 + 1));
                let mut st = [g.y2(j), g.y3(k), 0.0, 0.0];
                st = rk4_step(&g, drift, top, 0.0, st, ds);
                st = rk4_step(&g, drift, top, ds, st, ds);
                let (mut p2, mut p3, ex) = clamp_cross(&g, st[0], st[1]);
                if ex > ESCAPE_TOL {
                    return Err(Error::CharacteristicEscape { excess: ex });
                }
                if j == 0 || j == g.n2 {
                    p2 = g.y2(j);
                }
                if k == 0 || k == g.n3 {
                    p3 = g.y3(k);
                }
                let mut beta2 = p2 + sample2(&g, &db2, OE, p2, p3);
                let mut beta3 = p3 + sample2(&g, &db3, EO, p2, p3);
                if j == 0 || j == g.n2 {
                    beta2 = g.y2(j);
                }
                if k == 0 || k == g.n3 {
                    beta3 = g.y3(k);
                }
                let w = sample2(&g, &om_lvl, OO, p2, p3) * (-st[2]).exp() + st[3];
                Ok([beta2, beta3, w])
            })
            .collect();
        let base = (i + 1) * fl;
        for (n, r) in rows.into_iter().enumerate() {
            let [x2, x3, w] = r?;
            b2.data[base + n] = x2;
            b3.data[base + n] = x3;
            om.data[base + n] = w;
        }
        for n in 0..fl {
            let (j, k) = (n / (g.n3 + 1), n % (g.n3 + 1));
            db2.data[n] = b2.data[base + n] - g.y2(j);
            db3.data[n] = b3.data[base + n] - g.y3(k);
        }
        om_lvl = om.face(i + 1);
    }
    Ok(Traced { beta: [b2, b3], omega: om })
}

/// Traces a single point straight back to `y1 = r_s` with steps of `h1/2`.
/// Returns `[beta2, beta3, int m, Duhamel integral of h]`. With `clamp`
/// the trajectory is held inside the cross-section instead of failing.
pub fn trace_point(grid: &BoxGrid, drift: &impl Drift, y: [f64; 3], clamp: bool) -> Result<[f64; 4]> {
    let steps = ((y[0] - grid.r_s) / (0.5 * grid.h1()) - 1e-9).ceil().max(0.0) as usize;
    let mut st = [y[1], y[2], 0.0, 0.0];
    if steps == 0 {
        return Ok(st);
    }
    let ds = (y[0] - grid.r_s) / steps as f64;
    for n in 0..steps {
        st = rk4_step(grid, drift, y[0], n as f64 * ds, st, ds);
        let (p2, p3, ex) = clamp_cross(grid, st[0], st[1]);
        if ex > ESCAPE_TOL && !clamp {
            return Err(Error::CharacteristicEscape { excess: ex });
        }
        st[0] = p2;
        st[1] = p3;
    }
    Ok(st)
}

/// `V5(y) = B^-(r_s + V6(beta), beta) - B_bar`.
pub fn transport_bernoulli(grid: &BoxGrid, traced: &Traced, minus: &SupersonicField, surface: &ShockSurface) -> Result<Field3> {
    let out: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|n| {
            let (b2, b3) = (traced.beta[0].data[n], traced.beta[1].data[n]);
            let xi = grid.r_s + sample2(grid, &surface.v6, EE, b2, b3);
            minus.bernoulli_deviation(xi, b2, b3)
        })
        .collect();
    let mut v5 = grid.zeros3();
    for (d, r) in v5.data.iter_mut().zip(out) {
        *d = r?;
    }
    Ok(v5)
}

/// `R4(y) = a2 (V6(beta) - V6(y')) + (a2/a1)(R1(beta) - R1(y')) + R3(beta)`.
///
/// `R1` carries the upstream perturbation at first order, so its variation
/// between the footpoint and `y'` is kept.
pub fn entropy_remainder(grid: &BoxGrid, traced: &Traced, surface: &ShockSurface, r1: &Field2, r3: &Field2, a: (f64, f64)) -> Field3 {
    let (a1, a2) = a;
    let fl = grid.face_len();
    let mut out = grid.zeros3();
    for n in 0..grid.len() {
        let (b2, b3) = (traced.beta[0].data[n], traced.beta[1].data[n]);
        let v6b = sample2(grid, &surface.v6, EE, b2, b3);
        let r1b = sample2(grid, r1, EE, b2, b3);
        out.data[n] = a2 * (v6b - surface.v6.data[n % fl]) + a2 / a1 * (r1b - r1.data[n % fl]) + sample2(grid, r3, EE, b2, b3);
    }
    out
}

/// `V4 = (a2/a1) V1(r_s, y') + R4`.
pub fn transport_entropy(coef: &BackgroundCoefficients, v1_rs: &Field2, r4: &Field3) -> Field3 {
    let fl = v1_rs.data.len();
    let ratio = coef.a2 / coef.a1;
    let mut out = r4.clone();
    for (n, x) in out.data.iter_mut().enumerate() {
        *x += ratio * v1_rs.data[n % fl];
    }
    out
}

/// Vorticity on the shock face: `(1/a0)(d3 g2 - (1/r_s) d2 g3) - H1(r_s)`.
pub fn vorticity_boundary(fd: &Fd, coef: &BackgroundCoefficients, g2: &Field2, g3: &Field2, h1_rs: &Field2) -> Field2 {
    let curl = fd.d3f(g2, OE).sub(&fd.d2f(g3, EO).scale(1.0 / coef.r_s));
    curl.scale(1.0 / coef.a0).sub(h1_rs)
}
