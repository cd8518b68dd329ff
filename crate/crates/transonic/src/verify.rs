//! Residuals of the converged solution in the original variables.
//!
//! Background parts are differentiated analytically and only the
//! perturbations by finite differences, so the unperturbed flow has
//! residuals at rounding level on any grid.

use crate::error::Result;
use crate::fixed_point::{IterationState, Problem, Solution, V_SYM};
use crate::geometry::Metric;
use crate::grid::{wall_ratio, Field2, Field3, EE, EO, OE};
use crate::rh::point::{rh_residual, Side};

/// Physical fields on the grid nodes with their transformed gradients.
pub struct PhysicalFields {
    pub d0: Field3,
    pub u: [Field3; 3],
    pub du: [[Field3; 3]; 3],
    pub rho: Field3,
    pub drho: [Field3; 3],
    pub p: Field3,
    pub dp: [Field3; 3],
    pub b: Field3,
    pub db: [Field3; 3],
    pub k: Field3,
    pub dk: [Field3; 3],
}

pub fn physical_fields(pr: &Problem, z: &IterationState) -> Result<PhysicalFields> {
    let g = *pr.grid();
    let c = &pr.coef;
    let gas = pr.bg.gas;
    let metric = Metric::new(pr.fd, &z.surface, pr.bg.geometry.r1)?;
    let bgm = metric.background(&pr.bg)?;
    let v = &z.v;
    let u1 = bgm.u.add(&v[0]);
    let mut rho = g.zeros3();
    let mut p = g.zeros3();
    for n in 0..g.len() {
        let q2 = u1.data[n].powi(2) + v[1].data[n].powi(2) + v[2].data[n].powi(2);
        let kk = c.k_plus + v[3].data[n];
        rho.data[n] = gas.density_from_bernoulli(c.b_bar + v[4].data[n], kk, q2)?;
        p.data[n] = kk * rho.data[n].powf(c.gamma);
    }
    let mut rho_p = g.zeros3();
    for n in 0..g.len() {
        rho_p.data[n] = -bgm.rho.data[n] * (bgm.du.data[n] / bgm.u.data[n] + 1.0 / metric.d0.data[n]);
    }
    let with_bar = |mut d: [Field3; 3], bar: &Field3| {
        d[0] = d[0].add(bar);
        d
    };
    let drho = with_bar(metric.grad(&rho.sub(&bgm.rho), EE), &rho_p);
    let dp = with_bar(metric.grad(&p.sub(&bgm.p), EE), &rho_p.zip(&bgm.c2, |a, b| a * b));
    let du = [with_bar(metric.grad(&v[0], EE), &bgm.du), metric.grad(&v[1], OE), metric.grad(&v[2], EO)];
    Ok(PhysicalFields {
        d0: metric.d0.clone(),
        u: [u1, v[1].clone(), v[2].clone()],
        du,
        rho,
        drho,
        p,
        dp,
        b: v[4].map(|x| x + c.b_bar),
        db: metric.grad(&v[4], EE),
        k: v[3].map(|x| x + c.k_plus),
        dk: metric.grad(&v[3], EE),
    })
}

/// Scaled sup-norms of the five Euler equations and of the decomposed set
/// (Bernoulli and entropy transport, the two vorticity relations and the
/// density equation).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EquivalenceResiduals {
    pub euler: [f64; 5],
    pub decomposed: [f64; 5],
}

impl EquivalenceResiduals {
    pub fn euler_max(&self) -> f64 {
        self.euler.iter().cloned().fold(0.0, f64::max)
    }

    pub fn decomposed_max(&self) -> f64 {
        self.decomposed.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn verify_equivalence(pr: &Problem, z: &IterationState) -> Result<EquivalenceResiduals> {
    let f = physical_fields(pr, z)?;
    let c = &pr.coef;
    let s = &c.plus_rs;
    let (rs, us) = (c.r_s, s.u);
    let scale_e = [s.rho * us / rs, us * us / rs, us * us / rs, us * us / rs, c.k_plus * us / rs];
    let scale_d = [c.b_bar / rs, c.k_plus / rs, us / rs, us / rs, s.c2 * us / rs];
    let mut out = EquivalenceResiduals::default();
    for n in 0..f.d0.data.len() {
        let u = [f.u[0].data[n], f.u[1].data[n], f.u[2].data[n]];
        let du = |a: usize, b: usize| f.du[a][b].data[n];
        let conv = |d: [&Field3; 3]| u[0] * d[0].data[n] + u[1] * d[1].data[n] + u[2] * d[2].data[n];
        let (r, rho) = (f.d0.data[n], f.rho.data[n]);
        let conv_u = |a: usize| u[0] * du(a, 0) + u[1] * du(a, 1) + u[2] * du(a, 2);
        let dp = |b: usize| f.dp[b].data[n];
        let e = [
            (0..3).map(|a| u[a] * f.drho[a].data[n] + rho * du(a, a)).sum::<f64>() + rho * u[0] / r,
            conv_u(0) + dp(0) / rho - u[1] * u[1] / r,
            conv_u(1) + dp(1) / rho + u[0] * u[1] / r,
            conv_u(2) + dp(2) / rho,
            conv([&f.dk[0], &f.dk[1], &f.dk[2]]),
        ];
        let (b, k) = (f.b.data[n], f.k.data[n]);
        let q2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        let coupling = (b - 0.5 * q2) / (c.gamma * k * u[0]);
        let om = [du(2, 1) - du(1, 2), du(0, 2) - du(2, 0), du(1, 0) - du(0, 1) + u[1] / r];
        let c2 = (c.gamma - 1.0) * (b - 0.5 * q2);
        let mut den = c2 * u[0] / r;
        for a in 0..3 {
            den += (c2 - u[a] * u[a]) * du(a, a);
            for bb in 0..3 {
                if a != bb {
                    den -= u[a] * u[bb] * du(bb, a);
                }
            }
        }
        let d = [
            conv([&f.db[0], &f.db[1], &f.db[2]]) / u[0],
            conv([&f.dk[0], &f.dk[1], &f.dk[2]]) / u[0],
            om[1] - ((u[1] * om[0] + f.db[2].data[n]) / u[0] - coupling * f.dk[2].data[n]),
            om[2] - ((u[2] * om[0] - f.db[1].data[n]) / u[0] + coupling * f.dk[1].data[n]),
            den,
        ];
        for m in 0..5 {
            out.euler[m] = out.euler[m].max(e[m].abs() / scale_e[m]);
            out.decomposed[m] = out.decomposed[m].max(d[m].abs() / scale_d[m]);
        }
    }
    Ok(out)
}

/// Shock-face residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShockResiduals {
    /// Mass, three momentum components and Bernoulli jump, scaled by
    /// `rho U`, `P` and `B` of the downstream state at `r_s`.
    pub rh: [f64; 5],
    /// The same residuals unscaled.
    pub rh_raw: [f64; 5],
    /// `F2, F3` with the shock gradient differenced from `V6`, over `a0 U`.
    pub f2: f64,
    pub f3: f64,
    /// Curl, divergence and wall values of `(F2, F3)`.
    pub system: f64,
    /// Gap between the stored gradient tables and differences of `V6`, over `r_s`.
    pub gradient_tables: f64,
}

impl ShockResiduals {
    pub fn rh_max(&self) -> f64 {
        self.rh.iter().cloned().fold(0.0, f64::max)
    }

    pub fn rh_raw_max(&self) -> f64 {
        self.rh_raw.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn verify_shock_conditions(pr: &Problem, z: &IterationState) -> Result<ShockResiduals> {
    let g = *pr.grid();
    let c = &pr.coef;
    let gas = pr.bg.gas;
    let s = &c.plus_rs;
    let rs = g.r_s;
    let minus = pr.minus_on_shock(&z.surface.v6)?;
    let k = pr.kernels(z)?;
    let v6 = &z.surface.v6;
    let mut out = ShockResiduals::default();
    let scale = [s.rho * s.u, s.p, s.p, s.p, c.b_bar];
    for n in 0..g.face_len() {
        let xi = rs + v6.data[n];
        let bar = pr.bg.plus(xi)?;
        let u = [bar.u + z.v[0].data[n], z.v[1].data[n], z.v[2].data[n]];
        let kk = c.k_plus + z.v[3].data[n];
        let q2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        let rho = gas.density_from_bernoulli(c.b_bar + z.v[4].data[n], kk, q2)?;
        let plus = Side { rho, u, p: kk * rho.powf(c.gamma) };
        let m = Side::from_state(&gas, &minus[n]);
        let r = rh_residual(c.gamma, &m, &plus, xi, z.surface.dv6[0].data[n], z.surface.dv6[1].data[n]);
        for q in 0..5 {
            out.rh[q] = out.rh[q].max(r[q].abs() / scale[q]);
            out.rh_raw[q] = out.rh_raw[q].max(r[q].abs());
        }
    }
    let fd = &pr.fd;
    let d2 = fd.d2f(v6, EE);
    let d3 = fd.d3f(v6, EE);
    let v2 = z.v[1].face(0);
    let v3 = z.v[2].face(0);
    let f2 = d2.scale(1.0 / rs).sub(&v2.scale(c.a0)).sub(&k.g2);
    let f3 = d3.sub(&v3.scale(c.a0)).sub(&k.g3);
    let us = c.a0 * s.u;
    out.f2 = f2.max_abs() / us;
    out.f3 = f3.max_abs() / us;
    let curl = fd.d2f(&f3, EO).scale(1.0 / rs).sub(&fd.d3f(&f2, OE));
    let div = fd.d2f(&f2, OE).scale(1.0 / rs).add(&fd.d3f(&f3, EO));
    let mut walls = 0.0f64;
    for kk in 0..=g.n3 {
        walls = walls.max(f2.at(0, kk).abs()).max(f2.at(g.n2, kk).abs());
    }
    for j in 0..=g.n2 {
        walls = walls.max(f3.at(j, 0).abs()).max(f3.at(j, g.n3).abs());
    }
    out.system = curl.max_abs().max(div.max_abs()).max(walls) / us;
    out.gradient_tables = d2.sub(&z.surface.dv6[0]).max_abs().max(d3.sub(&z.surface.dv6[1]).max_abs()) / rs;
    Ok(out)
}

/// Wall conditions at convergence as ratios to the truncation estimate of
/// the one-sided probes; every entry should stay below 10.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompatibilityReport {
    /// Upstream flow.
    pub inflow: f64,
    /// `V1..V6` of the iterate.
    pub iterate: f64,
    /// Shock displacement and its gradient tables.
    pub shock: f64,
    /// Downstream physical state.
    pub physical: f64,
    /// Bernoulli deviation.
    pub bernoulli: f64,
    /// First vorticity component.
    pub vorticity: f64,
}

impl CompatibilityReport {
    pub fn worst(&self) -> f64 {
        [self.inflow, self.iterate, self.shock, self.physical, self.bernoulli, self.vorticity].into_iter().fold(0.0, f64::max)
    }
}

fn face_ratio(f: &Field3, levels: usize, deriv: usize, y2: bool, y3: bool, noise: f64, g: &crate::grid::BoxGrid) -> f64 {
    (0..=levels).map(|i| wall_ratio(g, &f.face(i), deriv, y2, y3, noise)).fold(0.0, f64::max)
}

fn shock_ratio(g: &crate::grid::BoxGrid, v6: &Field2, dv6: &[Field2; 2], noise: f64) -> f64 {
    let mut out = 0.0f64;
    for deriv in [1, 3] {
        out = out.max(wall_ratio(g, v6, deriv, true, true, noise));
    }
    out.max(wall_ratio(g, &dv6[0], 0, true, false, noise)).max(wall_ratio(g, &dv6[1], 0, false, true, noise))
}

pub fn compatibility(pr: &Problem, sol: &Solution) -> Result<CompatibilityReport> {
    let g = *pr.grid();
    let n1 = g.n1;
    let z = &sol.state;
    let sc = &pr.scales;
    let eps = f64::EPSILON;
    let noise = |c: usize| 16.0 * eps * sc.v[c];
    let mut it = 0.0f64;
    for c in 0..5 {
        let (y2_even, y3_even) = (V_SYM[c].0 == crate::grid::Parity::Even, V_SYM[c].1 == crate::grid::Parity::Even);
        let f = &z.v[c];
        if y2_even {
            it = it.max(face_ratio(f, n1, 1, true, false, noise(c), &g));
        } else {
            it = it.max(face_ratio(f, n1, 0, true, false, noise(c), &g)).max(face_ratio(f, n1, 2, true, false, noise(c), &g));
        }
        if y3_even {
            it = it.max(face_ratio(f, n1, 1, false, true, noise(c), &g));
        } else {
            it = it.max(face_ratio(f, n1, 0, false, true, noise(c), &g)).max(face_ratio(f, n1, 2, false, true, noise(c), &g));
        }
    }
    let shock = shock_ratio(&g, &z.surface.v6, &z.surface.dv6, 16.0 * eps * sc.v6);
    let f = physical_fields(pr, z)?;
    let s = &pr.coef.plus_rs;
    let mut phys = 0.0f64;
    for (field, nz) in [(&f.u[0], s.u), (&f.p, s.p), (&f.k, pr.coef.k_plus)] {
        phys = phys.max(face_ratio(field, n1, 1, true, true, 16.0 * eps * nz, &g));
    }
    let nu = 16.0 * eps * s.u;
    for (field, y2, y3) in [(&f.u[1], true, false), (&f.u[2], false, true)] {
        phys = phys
            .max(face_ratio(field, n1, 0, y2, y3, nu, &g))
            .max(face_ratio(field, n1, 2, y2, y3, nu, &g))
            .max(face_ratio(field, n1, 1, y3, y2, nu, &g));
    }
    let omega_noise = 16.0 * eps * s.u / g.r_s;
    Ok(CompatibilityReport {
        inflow: pr.minus.compatibility().worst(),
        iterate: it.max(shock),
        shock,
        physical: phys.max(shock),
        bernoulli: face_ratio(&z.v[4], n1, 1, true, true, noise(4), &g),
        vorticity: face_ratio(&sol.diag.omega, n1, 0, true, true, omega_noise, &g),
    })
}

/// Trapezoidal integrals of `q5` and `m1` over the face, with the
/// quadrature tolerance for the former.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Solvability {
    pub q5_integral: f64,
    pub q5_tolerance: f64,
    pub m1_integral: f64,
}

pub fn solvability(pr: &Problem, sol: &Solution) -> Solvability {
    let g = pr.grid();
    let q5 = &sol.diag.q5;
    let area = 4.0 * g.theta0;
    let h = g.h2().max(g.h3());
    let d2 = pr.fd.dd2f(q5, EE).max_abs();
    let d3 = pr.fd.dd3f(q5, EE).max_abs();
    let noise = 16.0 * f64::EPSILON * area * pr.coef.plus_rs.u;
    Solvability {
        q5_integral: sol.diag.q5_integral,
        q5_tolerance: area * h * h / 12.0 * (d2 + d3) + noise,
        m1_integral: g.integrate2(&sol.diag.m1),
    }
}

/// Kernel sizes along the ray `s z`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelScaling {
    pub scales: Vec<f64>,
    /// `max(|g2|, |g3|)` per scale.
    pub g: Vec<f64>,
    /// `max_i |R0i|` per scale.
    pub r0: Vec<f64>,
    pub g_exponent: f64,
    pub r0_exponent: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_exponent(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Evaluates the jump kernels at `s z` for every scale. `pr` should carry
/// the unperturbed upstream flow, so that what remains is the nonlinear part.
pub fn kernel_scaling(pr: &Problem, z: &IterationState, scales: &[f64]) -> Result<KernelScaling> {
    let zero = IterationState::zero(pr.grid());
    let (mut g, mut r0) = (vec![], vec![]);
    for &s in scales {
        let k = pr.kernels(&z.combine(&zero, s, 0.0))?;
        g.push(k.g2.max_abs().max(k.g3.max_abs()));
        r0.push(k.r0.iter().map(|f| f.max_abs()).fold(0.0, f64::max));
    }
    Ok(KernelScaling { scales: scales.to_vec(), g_exponent: fitted_exponent(scales, &g), r0_exponent: fitted_exponent(scales, &r0), g, r0 })
}
