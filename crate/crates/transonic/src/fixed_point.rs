//! The iteration map on `(V1..V5, V6)` and the Picard loop around it.

use crate::background::{BackgroundCoefficients, BackgroundSolution};
use crate::elliptic::Elliptic;
use crate::error::{Error, Result, StageExt};
use crate::geometry::{BackgroundOnMetric, Metric, ShockSurface};
use crate::grid::{BoxGrid, Fd, Field2, Field3, Sym, EE, EO, OE};
use crate::inflow::SupersonicField;
use crate::rh::{self, JumpKernels};
use crate::transport::{
    build_characteristics, entropy_remainder, trace, transport_bernoulli, transport_entropy, vorticity_boundary,
};
use crate::FlowState;

/// Wall parities of `V1..V5`.
pub const V_SYM: [Sym; 5] = [EE, OE, EO, EE, EE];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Stop when the w-norm of the update falls below this.
    pub tol: f64,
    pub max_iters: usize,
    /// `V <- relax T(V) + (1 - relax) V`.
    pub relax: f64,
    /// Trust radius is `trust_factor * sqrt(eps)` in the X-norm.
    pub trust_factor: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { tol: 1e-10, max_iters: 20, relax: 1.0, trust_factor: 10.0 }
    }
}

/// One iterate `(V1..V5, V6)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub v: [Field3; 5],
    pub surface: ShockSurface,
}

impl IterationState {
    pub fn zero(grid: &BoxGrid) -> Self {
        IterationState { v: std::array::from_fn(|_| grid.zeros3()), surface: ShockSurface::flat(grid) }
    }

    pub fn combine(&self, other: &IterationState, a: f64, b: f64) -> IterationState {
        let mix3 = |x: &Field3, y: &Field3| x.zip(y, |p, q| a * p + b * q);
        let mix2 = |x: &Field2, y: &Field2| x.zip(y, |p, q| a * p + b * q);
        IterationState {
            v: std::array::from_fn(|c| mix3(&self.v[c], &other.v[c])),
            surface: ShockSurface {
                v6: mix2(&self.surface.v6, &other.surface.v6),
                dv6: [mix2(&self.surface.dv6[0], &other.surface.dv6[0]), mix2(&self.surface.dv6[1], &other.surface.dv6[1])],
            },
        }
    }

    pub fn sub(&self, other: &IterationState) -> IterationState {
        self.combine(other, 1.0, -1.0)
    }
}

/// Value scales `(U, U, U, K, B)` and `r_s` used by the norm surrogates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormScales {
    pub v: [f64; 5],
    pub v6: f64,
}

impl NormScales {
    pub fn new(coef: &BackgroundCoefficients) -> Self {
        let u = coef.plus_rs.u;
        NormScales { v: [u, u, u, coef.k_plus, coef.b_bar], v6: coef.r_s }
    }
}

fn diff_sup3(g: &BoxGrid, f: &Field3, order: usize) -> f64 {
    let mut best = 0.0f64;
    let dims = [(g.n1, g.face_len(), g.h1()), (g.n2, g.n3 + 1, g.h2()), (g.n3, 1, g.h3())];
    for n in 0..g.len() {
        let (i, j, k) = g.ijk(n);
        let pos = [i, j, k];
        for (d, &(len, stride, h)) in dims.iter().enumerate() {
            if pos[d] + order > len {
                continue;
            }
            let v = match order {
                1 => (f.data[n + stride] - f.data[n]) / h,
                _ => (f.data[n + 2 * stride] - 2.0 * f.data[n + stride] + f.data[n]) / (h * h),
            };
            best = best.max(v.abs());
        }
    }
    best
}

fn diff_sup2(g: &BoxGrid, f: &Field2, order: usize) -> f64 {
    let mut best = 0.0f64;
    let dims = [(g.n2, g.n3 + 1, g.h2()), (g.n3, 1, g.h3())];
    let coef: &[f64] = match order {
        1 => &[-1.0, 1.0],
        2 => &[1.0, -2.0, 1.0],
        _ => &[-1.0, 3.0, -3.0, 1.0],
    };
    for n in 0..f.data.len() {
        let pos = [n / (g.n3 + 1), n % (g.n3 + 1)];
        for (d, &(len, stride, h)) in dims.iter().enumerate() {
            if pos[d] + order > len {
                continue;
            }
            let v: f64 = coef.iter().enumerate().map(|(m, c)| c * f.data[n + m * stride]).sum();
            best = best.max((v / h.powi(order as i32)).abs());
        }
    }
    best
}

/// Sup of values and first differences of `V1..V5`, and of `V6` up to
/// second differences, each divided by its scale.
pub fn w_norm(g: &BoxGrid, s: &NormScales, z: &IterationState) -> f64 {
    let mut out = 0.0;
    for c in 0..5 {
        out += (z.v[c].max_abs() + diff_sup3(g, &z.v[c], 1)) / s.v[c];
    }
    let v6 = &z.surface.v6;
    out + (v6.max_abs() + diff_sup2(g, v6, 1) + diff_sup2(g, v6, 2)) / s.v6
}

/// The w-norm plus second differences of `V1..V5` and third of `V6`.
pub fn x_norm(g: &BoxGrid, s: &NormScales, z: &IterationState) -> f64 {
    let mut out = w_norm(g, s, z);
    for c in 0..5 {
        out += diff_sup3(g, &z.v[c], 2) / s.v[c];
    }
    out + diff_sup2(g, &z.surface.v6, 3) / s.v6
}

/// Everything fixed across iterations.
pub struct Problem {
    pub bg: BackgroundSolution,
    pub coef: BackgroundCoefficients,
    pub minus: SupersonicField,
    pub fd: Fd,
    pub ell: Elliptic,
    pub eps: f64,
    /// `eps * P_ex` on the exit face.
    pub p_exit: Field2,
    pub scales: NormScales,
}

/// Intermediate products of one application of the map.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub kernels: JumpKernels,
    pub omega: Field3,
    pub pi: Field3,
    pub g: [Field3; 4],
    pub source_divergence: f64,
    pub pi_truncation: f64,
    pub q5: Field2,
    pub q5_integral: f64,
    pub m1: Field2,
    pub m2: Field2,
    pub footpoint_displacement: f64,
}

impl Problem {
    pub fn new(
        bg: BackgroundSolution,
        minus: SupersonicField,
        grid: BoxGrid,
        modes: (usize, usize),
        eps: f64,
        p_exit: Field2,
        fd_order: usize,
    ) -> Result<Self> {
        let coef = BackgroundCoefficients::new(&bg)?;
        let ell = Elliptic::new(grid, modes, &bg, &coef)?;
        let scales = NormScales::new(&coef);
        Ok(Problem { bg, coef, minus, fd: Fd::new(grid, fd_order), ell, eps, p_exit, scales })
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.fd.grid
    }

    fn level(&self, f: impl Fn(usize) -> f64) -> Field3 {
        let g = self.grid();
        let fl = g.face_len();
        let mut out = g.zeros3();
        for (n, x) in out.data.iter_mut().enumerate() {
            *x = f(n / fl);
        }
        out
    }

    /// Upstream states at `r_s + V6` on the face nodes.
    pub fn minus_on_shock(&self, v6: &Field2) -> Result<Vec<FlowState>> {
        let g = self.grid();
        let mut out = Vec::with_capacity(g.face_len());
        for j in 0..=g.n2 {
            for k in 0..=g.n3 {
                out.push(self.minus.eval_minus(g.r_s + v6.at(j, k), g.y2(j), g.y3(k))?);
            }
        }
        Ok(out)
    }

    pub fn kernels(&self, hat: &IterationState) -> Result<JumpKernels> {
        let g = self.grid();
        let minus = self.minus_on_shock(&hat.surface.v6)?;
        let faces: [Field2; 5] = std::array::from_fn(|c| hat.v[c].face(0));
        rh::jump_kernels(
            &self.bg,
            &self.coef,
            g,
            [&faces[0], &faces[1], &faces[2], &faces[3], &faces[4]],
            &hat.surface.v6,
            &minus,
        )
    }

    /// `H1, H2, H3` of the iterate: the gap between box-coordinate and
    /// transformed curls plus the entropy coupling.
    fn h_terms(&self, metric: &Metric, bgm: &BackgroundOnMetric, v: &[Field3; 5]) -> [Field3; 3] {
        let fd = &self.fd;
        let g = *self.grid();
        let y = g.field3(|y1, _, _| y1);
        let e4 = self.level(|i| self.ell.radial[i].e4);
        let q = self.q_factor(bgm, v);
        let d = |f: &Field3, s: Sym| metric.grad(f, s);
        let [_, d2v1, d3v1] = d(&v[0], EE);
        let [d1v2, _, d3v2] = d(&v[1], OE);
        let [d1v3, d2v3, _] = d(&v[2], EO);
        let [_, d2v4, d3v4] = d(&v[3], EE);
        let p2v3 = fd.d2(&v[2], EO);
        let p3v2 = fd.d3(&v[1], OE);
        let p3v1 = fd.d3(&v[0], EE);
        let p2v1 = fd.d2(&v[0], EE);
        let p1v3 = fd.d1(&v[2]);
        let p1v2 = fd.d1(&v[1]);
        let p2v4 = fd.d2(&v[3], EE);
        let p3v4 = fd.d3(&v[3], EE);
        let mut h = [g.zeros3(), g.zeros3(), g.zeros3()];
        for n in 0..g.len() {
            let (yy, d0) = (y.data[n], metric.d0.data[n]);
            h[0].data[n] = (p2v3.data[n] / yy - d2v3.data[n]) - (p3v2.data[n] - d3v2.data[n]);
            h[1].data[n] = (p3v1.data[n] - d3v1.data[n]) + (d1v3.data[n] - p1v3.data[n]) + e4.data[n] * p3v4.data[n]
                - q.data[n] * d3v4.data[n];
            h[2].data[n] = (p1v2.data[n] - d1v2.data[n]) + (v[1].data[n] / yy - v[1].data[n] / d0)
                - (p2v1.data[n] / yy - d2v1.data[n])
                - e4.data[n] / yy * p2v4.data[n]
                + q.data[n] * d2v4.data[n];
        }
        h
    }

    /// `(B + V5 - |U|^2/2) / (gamma (K + V4) U1)`.
    fn q_factor(&self, bgm: &BackgroundOnMetric, v: &[Field3; 5]) -> Field3 {
        let c = &self.coef;
        let mut q = self.grid().zeros3();
        for n in 0..q.data.len() {
            let w = bgm.u.data[n] + v[0].data[n];
            let (v2, v3) = (v[1].data[n], v[2].data[n]);
            q.data[n] = (c.b_bar + v[4].data[n] - 0.5 * (w * w + v2 * v2 + v3 * v3)) / (c.gamma * (c.k_plus + v[3].data[n]) * w);
        }
        q
    }

    /// Linear part of the divergence equation minus the full nonlinear
    /// continuity equation divided by `c^2(D0)`.
    fn g0(&self, metric: &Metric, bgm: &BackgroundOnMetric, v: &[Field3; 5]) -> Field3 {
        let fd = &self.fd;
        let g = *self.grid();
        let c = &self.coef;
        let mut du1 = metric.grad(&v[0], EE);
        du1[0] = du1[0].add(&bgm.du);
        let du2 = metric.grad(&v[1], OE);
        let du3 = metric.grad(&v[2], EO);
        let p1v1 = fd.d1(&v[0]);
        let p2v2 = fd.d2(&v[1], OE);
        let p3v3 = fd.d3(&v[2], EO);
        let fl = g.face_len();
        let mut out = g.zeros3();
        for n in 0..g.len() {
            let i = n / fl;
            let rc = &self.ell.radial[i];
            let y = g.y1(i);
            let lin = rc.d1 * p1v1.data[n] + p2v2.data[n] / y + p3v3.data[n] + (1.0 / y + rc.d2) * v[0].data[n]
                + rc.e5 * v[4].data[n];
            let u = [bgm.u.data[n] + v[0].data[n], v[1].data[n], v[2].data[n]];
            let q2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
            let c2 = (c.gamma - 1.0) * (c.b_bar + v[4].data[n] - 0.5 * q2);
            let du = [
                [du1[0].data[n], du1[1].data[n], du1[2].data[n]],
                [du2[0].data[n], du2[1].data[n], du2[2].data[n]],
                [du3[0].data[n], du3[1].data[n], du3[2].data[n]],
            ];
            let mut nl = c2 * u[0] / metric.d0.data[n];
            for a in 0..3 {
                nl += (c2 - u[a] * u[a]) * du[a][a];
                for b in 0..3 {
                    if a != b {
                        nl -= u[a] * u[b] * du[b][a];
                    }
                }
            }
            out.data[n] = lin - nl / bgm.c2.data[n];
        }
        out
    }

    /// Exit data `q4` for `d1 phi(r2)`.
    fn q4(&self, v: &[Field3; 5], v5: &Field3, r4: &Field3) -> Field2 {
        let g = self.grid();
        let c = &self.coef;
        let top = g.n1;
        let rc = &self.ell.radial[top];
        let (rho, u, p) = (rc.state.rho, rc.state.u, rc.state.p);
        let mut out = g.zeros2();
        for m in 0..g.face_len() {
            let n = top * g.face_len() + m;
            let pe = self.p_exit.data[m];
            let e = rh::point::exit_error(c.gamma, c.b_bar, c.k_plus, rho, u, p, v[3].data[n], p + pe);
            let sq: f64 = (0..3).map(|j| v[j].data[n] * v[j].data[n]).sum();
            out.data[m] = -rc.e4 * r4.data[n] + v5.data[n] / u - pe / (rho * u) - sq / (2.0 * u) - e / u;
        }
        out
    }

    /// One application of the map.
    pub fn apply(&self, hat: &IterationState) -> Result<(IterationState, StepDiagnostics)> {
        let g = *self.grid();
        let c = &self.coef;
        let ell = &self.ell;
        let v = &hat.v;
        let metric = Metric::new(self.fd, &hat.surface, self.bg.geometry.r1).stage("geometry")?;
        let bgm = metric.background(&self.bg).stage("geometry")?;
        let chars = build_characteristics(&metric, &bgm, c, &hat.surface, [&v[0], &v[1], &v[2], &v[3], &v[4]])
            .stage("characteristics")?;
        let kernels = self.kernels(hat).stage("shock kernels")?;
        let h = self.h_terms(&metric, &bgm, v);
        let omega_rs = vorticity_boundary(&self.fd, c, &kernels.g2, &kernels.g3, &h[0].face(0));
        let traced = trace(&g, &chars, &omega_rs).stage("streamlines")?;
        let v5 = transport_bernoulli(&g, &traced, &self.minus, &hat.surface).stage("bernoulli")?;
        let r4 = entropy_remainder(&g, &traced, &hat.surface, &kernels.r1, &kernels.r3, (c.a1, c.a2));

        let y = g.field3(|y1, _, _| y1);
        let e4 = self.level(|i| ell.radial[i].e4);
        let w = bgm.u.add(&v[0]);
        let [_, d2v5, d3v5] = metric.grad(&v5, EE);
        let p2r4 = self.fd.d2(&r4, EE);
        let p3r4 = self.fd.d3(&r4, EE);
        let om = &traced.omega;
        let mut g1 = g.zeros3();
        let mut g2 = g.zeros3();
        let mut g3 = g.zeros3();
        for n in 0..g.len() {
            g1.data[n] = om.data[n] + h[0].data[n];
            g2.data[n] = (v[1].data[n] * om.data[n] + d3v5.data[n]) / w.data[n] + h[1].data[n] - e4.data[n] * p3r4.data[n];
            g3.data[n] = (v[2].data[n] * om.data[n] - d2v5.data[n]) / w.data[n] + h[2].data[n]
                + e4.data[n] / y.data[n] * p2r4.data[n];
        }
        let g0 = self.g0(&metric, &bgm, v);

        let pi = ell.solve_pi([&g1, &g2, &g3]).stage("pi")?;
        let gt = [g1.sub(&pi.grad[0]), g2.sub(&pi.grad[1]), g3.sub(&pi.grad[2])];
        let dc = ell.solve_div_curl([&gt[0], &gt[1], &gt[2]], pi.truncation + 1e-14).stage("div-curl")?;

        let basis = &ell.basis;
        let mut face = g.zeros2();
        let (k2m, k3m) = basis.kmax();
        for k in 0..=k2m {
            for l in 0..=k3m {
                let m = g.fidx(k, l);
                face.data[m] = basis.kappa(k) * dc.modes[1].data[m] / g.r_s + basis.lambda(l) * dc.modes[2].data[m];
            }
        }
        let q5 = rh::q1(&self.fd, c, &kernels).add(&basis.inverse(&face, EE).scale(c.a0 * c.a1));
        let m1 = ell.solve_m1(&q5);

        let dvd1 = ell.radial_derivative_ee(&self.fd, &dc.modes[0]);
        let fl = g.face_len();
        let mut g5 = g.zeros3();
        for n in 0..g.len() {
            let rc = &ell.radial[n / fl];
            let g4 = -rc.e5 * v5.data[n] + g0.data[n] + rc.state.mach_sq() * dvd1.data[n] - rc.d2 * dc.v[0].data[n];
            g5.data[n] = g4 + rc.d4 / c.a3 * m1.m1.data[n % fl];
        }
        let m2 = self.q4(v, &v5, &r4);
        let phi = ell.solve_potential(&g5, &m1.modes, &m2).stage("potential")?;
        let vel = ell.assemble_velocity(&phi, &dc);

        let v1_rs = vel[0].face(0);
        let v4 = transport_entropy(c, &v1_rs, &r4);
        let upd = rh::update_shock(c, [&v1_rs, &vel[1].face(0), &vel[2].face(0)], &kernels);
        let [v1, v2, v3] = vel;
        let next = IterationState { v: [v1, v2, v3, v4, v5], surface: ShockSurface { v6: upd.v6, dv6: upd.dv6 } };
        let diag = StepDiagnostics {
            footpoint_displacement: traced.max_displacement(&g),
            kernels,
            omega: traced.omega,
            pi_truncation: pi.truncation,
            pi: pi.pi,
            g: [g0, g1, g2, g3],
            source_divergence: dc.source_divergence,
            q5_integral: m1.q5_integral,
            q5,
            m1: m1.m1,
            m2,
        };
        Ok((next, diag))
    }

    pub fn trust_radius(&self, factor: f64) -> f64 {
        factor * self.eps.sqrt().max(f64::EPSILON.sqrt())
    }

    /// Picard iteration from the zero iterate.
    pub fn iterate(&self, opts: &IterationOptions, mut log: impl FnMut(&IterationRecord)) -> Result<Solution> {
        let g = *self.grid();
        let radius = self.trust_radius(opts.trust_factor);
        let mut state = IterationState::zero(&g);
        let mut history = Vec::new();
        let mut prev: Option<f64> = None;
        let mut growing = 0;
        let mut last = None;
        let mut converged = false;
        for it in 1..=opts.max_iters {
            let (t, diag) = self.apply(&state)?;
            let next = if opts.relax == 1.0 { t } else { t.combine(&state, opts.relax, 1.0 - opts.relax) };
            let update = w_norm(&g, &self.scales, &next.sub(&state));
            let size = x_norm(&g, &self.scales, &next);
            let ratio = prev.map(|p| if p > 0.0 { update / p } else { 0.0 });
            let rec = IterationRecord { iter: it, update, x_norm: size, ratio, pi_max: diag.pi.max_abs() };
            log(&rec);
            history.push(rec);
            if size > radius {
                return Err(Error::TrustRadius { norm: size, radius });
            }
            state = next;
            last = Some(diag);
            if update < opts.tol {
                converged = true;
                break;
            }
            if let Some(r) = ratio {
                growing = if r > 1.0 { growing + 1 } else { 0 };
                if growing >= 3 {
                    return Err(Error::NoContraction { ratio: r });
                }
            }
            prev = Some(update);
        }
        let diag = last.expect("at least one iteration");
        Ok(Solution { state, diag, history, converged })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// w-norm of `V_{n} - V_{n-1}`.
    pub update: f64,
    pub x_norm: f64,
    /// Update over the previous update.
    pub ratio: Option<f64>,
    pub pi_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub state: IterationState,
    /// Products of the last application of the map.
    pub diag: StepDiagnostics,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
}

/// `eps * P_ex` on the exit face.
pub fn exit_face(grid: &BoxGrid, eps: f64, profile: impl Fn(f64, f64) -> f64) -> Field2 {
    grid.field2(|y2, y3| eps * profile(y2, y3))
}
