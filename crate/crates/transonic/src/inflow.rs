//! Perturbed supersonic flow upstream of the shock, by marching in `r`.
//!
//! The Euler system is written in the conservative form
//! `d/dr (r F) = -d/dtheta G - d/dx3 (r H) + S` and advanced by Heun's method
//! on the deviation from the background branch, so `eps = 0` reproduces the
//! background exactly.

use serde::{Deserialize, Serialize};

use crate::background::BackgroundSolution;
use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::grid::{wall_ratio, BoxGrid, Fd, Field2, Field3, Point3, Sym, EE, EO, OE, OO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InletField {
    U1,
    U2,
    U3,
    P,
    K,
}

impl InletField {
    pub const ALL: [InletField; 5] = [InletField::U1, InletField::U2, InletField::U3, InletField::P, InletField::K];

    fn required(self) -> (Basis, Basis) {
        match self {
            InletField::U2 => (Basis::Sin, Basis::Cos),
            InletField::U3 => (Basis::Cos, Basis::Sin),
            _ => (Basis::Cos, Basis::Cos),
        }
    }
}

/// One tensor mode `b2(k pi (y2 + theta0) / (2 theta0)) b3(l pi (y3 + 1) / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossMode {
    pub theta: Basis,
    pub x3: Basis,
    pub k: usize,
    pub l: usize,
    pub amp: f64,
}

impl CrossMode {
    pub fn cos(k: usize, l: usize, amp: f64) -> Self {
        CrossMode { theta: Basis::Cos, x3: Basis::Cos, k, l, amp }
    }

    fn factor(b: Basis, x: f64) -> f64 {
        match b {
            Basis::Cos => x.cos(),
            Basis::Sin => x.sin(),
        }
    }

    /// Unscaled basis function at `(y2, y3)`.
    pub fn shape(&self, theta0: f64, y2: f64, y3: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let a = self.k as f64 * pi * (y2 + theta0) / (2.0 * theta0);
        let b = self.l as f64 * pi * (y3 + 1.0) / 2.0;
        Self::factor(self.theta, a) * Self::factor(self.x3, b)
    }

    fn check(&self, what: &str) -> Result<()> {
        if !self.amp.is_finite() {
            return Err(Error::IncompatibleMode(format!("{what}: amplitude {} is not finite", self.amp)));
        }
        if (self.theta == Basis::Sin && self.k == 0) || (self.x3 == Basis::Sin && self.l == 0) {
            return Err(Error::IncompatibleMode(format!("{what}: sine mode with index 0 vanishes identically")));
        }
        Ok(())
    }
}

/// Exit pressure modes must be cosine in both directions.
pub fn check_exit_modes(modes: &[CrossMode]) -> Result<()> {
    for m in modes {
        m.check("exit pressure")?;
        if m.theta != Basis::Cos || m.x3 != Basis::Cos {
            return Err(Error::IncompatibleMode(format!(
                "exit pressure mode ({}, {}) must be cos-cos to keep zero wall derivatives",
                m.k, m.l
            )));
        }
    }
    Ok(())
}

pub fn exit_profile(modes: &[CrossMode], theta0: f64, y2: f64, y3: f64) -> f64 {
    modes.iter().map(|m| m.amp * m.shape(theta0, y2, y3)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InletMode {
    pub field: InletField,
    #[serde(flatten)]
    pub mode: CrossMode,
}

/// Inlet perturbation `eps * (U10, U20, U30, P0, K0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InletPerturbation {
    pub eps: f64,
    pub theta0: f64,
    pub modes: Vec<InletMode>,
    norm: f64,
}

/// Validates the mode list against the wall conditions and normalizes the
/// amplitudes so the largest is 1.
pub fn make_inlet(eps: f64, theta0: f64, modes: &[InletMode]) -> Result<InletPerturbation> {
    if !(eps >= 0.0) {
        return Err(Error::IncompatibleMode(format!("eps must be >= 0, got {eps}")));
    }
    for m in modes {
        let what = format!("{:?} mode ({}, {})", m.field, m.mode.k, m.mode.l);
        m.mode.check(&what)?;
        if (m.mode.theta, m.mode.x3) != m.field.required() {
            return Err(Error::IncompatibleMode(format!(
                "{what}: basis ({:?}, {:?}) breaks the wall conditions, expected {:?}",
                m.mode.theta,
                m.mode.x3,
                m.field.required()
            )));
        }
    }
    let norm = modes.iter().fold(0.0f64, |a, m| a.max(m.mode.amp.abs()));
    Ok(InletPerturbation { eps, theta0, modes: modes.to_vec(), norm })
}

impl InletPerturbation {
    /// Normalized profile of one field (without `eps`).
    pub fn profile(&self, field: InletField, y2: f64, y3: f64) -> f64 {
        if self.norm == 0.0 {
            return 0.0;
        }
        self.modes
            .iter()
            .filter(|m| m.field == field)
            .map(|m| m.mode.amp / self.norm * m.mode.shape(self.theta0, y2, y3))
            .sum()
    }

    pub fn value(&self, field: InletField, y2: f64, y3: f64) -> f64 {
        self.eps * self.profile(field, y2, y3)
    }
}

const PRIM_SYM: [Sym; 5] = [EE, OE, EO, EE, EE];
const G_SYM: [Sym; 5] = [OE, OE, EE, OO, OE];
const H_SYM: [Sym; 5] = [EO, EO, OO, EE, EO];

/// Deviation of `(U1, U2, U3, P, K)` and of `B` from the background branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SupersonicField {
    pub grid: BoxGrid,
    pub bg: BackgroundSolution,
    pub dprim: [Field3; 5],
    pub db: Field3,
    pub frozen: bool,
}

#[derive(Debug, Clone, Copy)]
struct Prim {
    u: [f64; 3],
    p: f64,
    rho: f64,
    b: f64,
}

struct Bar {
    u: f64,
    p: f64,
    rho: f64,
}

fn bar_at(bg: &BackgroundSolution, r: f64) -> Result<Bar> {
    let s = bg.minus(r)?;
    Ok(Bar { u: s.u, p: s.p, rho: s.rho })
}

fn flux_r(r: f64, s: &Prim) -> [f64; 5] {
    let m = s.rho * s.u[0];
    [r * m, r * (m * s.u[0] + s.p), r * m * s.u[1], r * m * s.u[2], r * m * s.b]
}

fn qbar(r: f64, bar: &Bar, b_bar: f64) -> [f64; 5] {
    let m = bar.rho * bar.u;
    [r * m, r * (m * bar.u + bar.p), 0.0, 0.0, r * m * b_bar]
}

struct March<'a> {
    gas: GasModel<f64>,
    bg: &'a BackgroundSolution,
    grid: BoxGrid,
    fd: Fd,
}

impl March<'_> {
    fn decode(&self, r: f64, dq: &[Field2; 5]) -> Result<Vec<Prim>> {
        let g = self.gas.gamma;
        let bar = bar_at(self.bg, r)?;
        let qb = qbar(r, &bar, self.bg.bernoulli());
        let n = self.grid.face_len();
        let mut out = Vec::with_capacity(n);
        for idx in 0..n {
            let q: Vec<f64> = (0..5).map(|c| (qb[c] + dq[c].data[idx]) / r).collect();
            let (m, f2) = (q[0], q[1]);
            let (u2, u3, b) = (q[2] / m, q[3] / m, q[4] / m);
            let t = 0.5 * (u2 * u2 + u3 * u3);
            let a = (g + 1.0) / (2.0 * g);
            let bq = f2 / m;
            let cq = (g - 1.0) / g * (b - t);
            let disc = bq * bq - 4.0 * a * cq;
            let (j, k) = (idx / (self.grid.n3 + 1), idx % (self.grid.n3 + 1));
            if !(disc >= 0.0) || !(m > 0.0) {
                return Err(Error::MarchBreakdown { r, theta: self.grid.y2(j), x3: self.grid.y3(k), mach: f64::NAN });
            }
            let u1 = (bq + disc.sqrt()) / (2.0 * a);
            let rho = m / u1;
            let p = f2 - m * u1;
            let s = Prim { u: [u1, u2, u3], p, rho, b };
            let mach = ((u1 * u1 + 2.0 * t) * rho / (g * p)).sqrt();
            if !(mach >= 1.2) {
                return Err(Error::MarchBreakdown { r, theta: self.grid.y2(j), x3: self.grid.y3(k), mach });
            }
            out.push(s);
        }
        Ok(out)
    }

    fn rhs(&self, r: f64, dq: &[Field2; 5]) -> Result<([Field2; 5], Vec<Prim>)> {
        let prims = self.decode(r, dq)?;
        let bar = bar_at(self.bg, r)?;
        let z = self.grid.zeros2();
        let mut gf: [Field2; 5] = std::array::from_fn(|_| z.clone());
        let mut hf: [Field2; 5] = std::array::from_fn(|_| z.clone());
        let mut src: [Field2; 5] = std::array::from_fn(|_| z.clone());
        for (idx, s) in prims.iter().enumerate() {
            let [u1, u2, u3] = s.u;
            let rho = s.rho;
            let dp = s.p - bar.p;
            let gv = [rho * u2, rho * u1 * u2, rho * u2 * u2 + dp, rho * u2 * u3, rho * u2 * s.b];
            let hv = [rho * u3, rho * u1 * u3, rho * u2 * u3, rho * u3 * u3 + dp, rho * u3 * s.b];
            for c in 0..5 {
                gf[c].data[idx] = gv[c];
                hf[c].data[idx] = r * hv[c];
            }
            src[1].data[idx] = rho * u2 * u2 + dp;
            src[2].data[idx] = -rho * u1 * u2;
        }
        let out = std::array::from_fn(|c| {
            let dg = self.fd.d2f(&gf[c], G_SYM[c]);
            let dh = self.fd.d3f(&hf[c], H_SYM[c]);
            src[c].sub(&dg).sub(&dh)
        });
        Ok((out, prims))
    }
}

fn store(field: &mut SupersonicField, i: usize, r: f64, prims: &[Prim]) -> Result<()> {
    let bar = bar_at(&field.bg, r)?;
    let k_bar = field.bg.k_minus();
    let b_bar = field.bg.bernoulli();
    let g = field.bg.gas.gamma;
    let fl = field.grid.face_len();
    for (idx, s) in prims.iter().enumerate() {
        let n = i * fl + idx;
        field.dprim[0].data[n] = s.u[0] - bar.u;
        field.dprim[1].data[n] = s.u[1];
        field.dprim[2].data[n] = s.u[2];
        field.dprim[3].data[n] = s.p - bar.p;
        field.dprim[4].data[n] = s.p / s.rho.powf(g) - k_bar;
        field.db.data[n] = s.b - b_bar;
    }
    Ok(())
}

fn inlet_prims(bg: &BackgroundSolution, grid: &BoxGrid, inlet: &InletPerturbation, r: f64) -> Result<Vec<Prim>> {
    let gas = bg.gas;
    let bar = bar_at(bg, r)?;
    let k_bar = bg.k_minus();
    let mut out = Vec::with_capacity(grid.face_len());
    for j in 0..=grid.n2 {
        for k in 0..=grid.n3 {
            let (y2, y3) = (grid.y2(j), grid.y3(k));
            let v = |f| inlet.value(f, y2, y3);
            let u = [bar.u + v(InletField::U1), v(InletField::U2), v(InletField::U3)];
            let p = bar.p + v(InletField::P);
            let kk = k_bar + v(InletField::K);
            if !(p > 0.0 && kk > 0.0) {
                return Err(Error::IncompatibleMode(format!("inlet state has P = {p}, K = {kk}")));
            }
            let rho = (p / kk).powf(1.0 / gas.gamma);
            let s = FlowState::new(u[0], u[1], u[2], rho, kk);
            out.push(Prim { u, p, rho, b: gas.bernoulli(&s) });
        }
    }
    Ok(out)
}

fn empty_field(bg: &BackgroundSolution, grid: BoxGrid, frozen: bool) -> SupersonicField {
    let z = grid.zeros3();
    SupersonicField { grid, bg: bg.clone(), dprim: std::array::from_fn(|_| z.clone()), db: z, frozen }
}

/// Marches from `r1` to `r2` on `n_r` radial intervals and the given
/// cross-section grid.
pub fn march_supersonic(
    bg: &BackgroundSolution,
    inlet: &InletPerturbation,
    n_r: usize,
    n2: usize,
    n3: usize,
    order: usize,
) -> Result<SupersonicField> {
    let geo = bg.geometry;
    let grid = BoxGrid::new(geo.r1, geo.r2, geo.theta0, n_r, n2, n3);
    let mut field = empty_field(bg, grid, false);
    let mach = March { gas: bg.gas, bg, grid, fd: Fd::new(grid, order) };
    let r1 = geo.r1;
    let prims = inlet_prims(bg, &grid, inlet, r1)?;
    let qb = qbar(r1, &bar_at(bg, r1)?, bg.bernoulli());
    let mut dq: [Field2; 5] = std::array::from_fn(|_| grid.zeros2());
    for (idx, s) in prims.iter().enumerate() {
        let f = flux_r(r1, s);
        for c in 0..5 {
            dq[c].data[idx] = f[c] - qb[c];
        }
    }
    store(&mut field, 0, r1, &prims)?;
    for i in 0..grid.n1 {
        let r = grid.y1(i);
        let rn = grid.y1(i + 1);
        let (l0, _) = mach.rhs(r, &dq)?;
        let pred: [Field2; 5] = std::array::from_fn(|c| dq[c].add(&l0[c].scale(rn - r)));
        let (l1, _) = mach.rhs(rn, &pred)?;
        for c in 0..5 {
            dq[c] = dq[c].add(&l0[c].add(&l1[c]).scale(0.5 * (rn - r)));
        }
        let prims = mach.decode(rn, &dq)?;
        store(&mut field, i + 1, rn, &prims)?;
    }
    Ok(field)
}

/// Background plus the inlet perturbation held constant in `r`.
pub fn frozen_supersonic(
    bg: &BackgroundSolution,
    inlet: &InletPerturbation,
    n_r: usize,
    n2: usize,
    n3: usize,
) -> Result<SupersonicField> {
    let geo = bg.geometry;
    let grid = BoxGrid::new(geo.r1, geo.r2, geo.theta0, n_r, n2, n3);
    let mut field = empty_field(bg, grid, true);
    let gas = bg.gas;
    let k_bar = bg.k_minus();
    for i in 0..=grid.n1 {
        let r = grid.y1(i);
        let bar = bar_at(bg, r)?;
        let mut prims = Vec::with_capacity(grid.face_len());
        for j in 0..=grid.n2 {
            for k in 0..=grid.n3 {
                let (y2, y3) = (grid.y2(j), grid.y3(k));
                let v = |f| inlet.value(f, y2, y3);
                let u = [bar.u + v(InletField::U1), v(InletField::U2), v(InletField::U3)];
                let p = bar.p + v(InletField::P);
                let kk = k_bar + v(InletField::K);
                let rho = (p / kk).powf(1.0 / gas.gamma);
                let s = FlowState::new(u[0], u[1], u[2], rho, kk);
                prims.push(Prim { u, p, rho, b: gas.bernoulli(&s) });
            }
        }
        store(&mut field, i, r, &prims)?;
    }
    Ok(field)
}

/// Wall-condition ratios (value over truncation estimate) of the marched field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InflowCompatibility {
    /// Normal derivatives of `U1, P, K, B` and tangential velocity derivatives.
    pub normal_derivatives: f64,
    /// `U2` at the `theta` walls and `U3` at the `x3` walls.
    pub slip: f64,
    /// `d^2 U2 / d theta^2` and `d^2 U3 / d x3^2` at their walls.
    pub second_derivatives: f64,
}

impl InflowCompatibility {
    pub fn worst(&self) -> f64 {
        self.normal_derivatives.max(self.slip).max(self.second_derivatives)
    }
}

impl SupersonicField {
    fn check_r(&self, r: f64) -> Result<()> {
        let g = &self.grid;
        let tol = 1e-12 * (g.r2 - g.r_s);
        if !(r >= g.r_s - tol && r <= g.r2 + tol) {
            return Err(Error::OutOfDomain(format!("r = {r} outside [{}, {}]", g.r_s, g.r2)));
        }
        Ok(())
    }

    /// Upstream state at `(r, theta, x3)`.
    pub fn eval_minus(&self, r: f64, y2: f64, y3: f64) -> Result<FlowState<f64>> {
        self.check_r(r)?;
        let bar = self.bg.minus(r)?;
        let k_bar = self.bg.k_minus();
        let mut d = [0.0; 5];
        let mut cache: Vec<(Sym, Point3)> = Vec::with_capacity(3);
        for c in 0..5 {
            let sym = PRIM_SYM[c];
            let p = match cache.iter().find(|(s, _)| *s == sym) {
                Some((_, p)) => *p,
                None => {
                    let p = Point3::new(&self.grid, sym, r, y2, y3);
                    cache.push((sym, p));
                    p
                }
            };
            d[c] = p.sample(&self.grid, &self.dprim[c]);
        }
        let p = bar.p + d[3];
        let k = k_bar + d[4];
        let rho = (p / k).powf(1.0 / self.bg.gas.gamma);
        Ok(FlowState::new(bar.u + d[0], d[1], d[2], rho, k))
    }

    /// `B - B_bar` at `(r, theta, x3)`.
    pub fn bernoulli_deviation(&self, r: f64, y2: f64, y3: f64) -> Result<f64> {
        self.check_r(r)?;
        Ok(Point3::new(&self.grid, EE, r, y2, y3).sample(&self.grid, &self.db))
    }

    /// Largest deviation of `(U1, U2, U3, P, K)` from the background.
    pub fn max_deviation(&self) -> f64 {
        self.dprim.iter().fold(0.0f64, |a, f| a.max(f.max_abs()))
    }

    /// Wall conditions at every radial station.
    pub fn compatibility(&self) -> InflowCompatibility {
        let g = &self.grid;
        let mut out = InflowCompatibility::default();
        let noise = f64::EPSILON * (self.bg.bernoulli() + self.bg.k_minus());
        for i in 0..=g.n1 {
            for c in [0, 3, 4] {
                let f = self.dprim[c].face(i);
                out.normal_derivatives = out.normal_derivatives.max(wall_ratio(g, &f, 1, true, true, noise));
            }
            let fb = self.db.face(i);
            out.normal_derivatives = out.normal_derivatives.max(wall_ratio(g, &fb, 1, true, true, noise));
            let u2 = self.dprim[1].face(i);
            let u3 = self.dprim[2].face(i);
            out.slip = out.slip.max(wall_ratio(g, &u2, 0, true, false, noise)).max(wall_ratio(g, &u3, 0, false, true, noise));
            out.second_derivatives = out
                .second_derivatives
                .max(wall_ratio(g, &u2, 2, true, false, noise))
                .max(wall_ratio(g, &u3, 2, false, true, noise));
            out.normal_derivatives = out
                .normal_derivatives
                .max(wall_ratio(g, &u2, 1, false, true, noise))
                .max(wall_ratio(g, &u3, 1, true, false, noise));
        }
        out
    }

    /// Comma-separated dump `(r, theta, x3, U1, U2, U3, P, K)`.
    pub fn table(&self) -> Result<String> {
        let g = &self.grid;
        let mut out = String::from("r,theta_rad,x3,U1,U2,U3,P,K\n");
        for i in 0..=g.n1 {
            let r = g.y1(i);
            let bar = self.bg.minus(r)?;
            for j in 0..=g.n2 {
                for k in 0..=g.n3 {
                    let n = g.idx(i, j, k);
                    let d: Vec<f64> = self.dprim.iter().map(|f| f.data[n]).collect();
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        r,
                        g.y2(j),
                        g.y3(k),
                        bar.u + d[0],
                        d[1],
                        d[2],
                        bar.p + d[3],
                        self.bg.k_minus() + d[4]
                    ));
                }
            }
        }
        Ok(out)
    }
}
