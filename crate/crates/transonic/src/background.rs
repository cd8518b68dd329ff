//! The cylindrically symmetric transonic shock: a supersonic radial branch on
//! `(r1, r_s)`, a normal-shock jump at `r_s`, and a subsonic branch on `(r_s, r2)`.
//!
//! On each branch `rho U r`, `B` and `K` are exact invariants, so states are
//! found pointwise from the algebraic branch equation rather than by ODE
//! integration.

use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::rh::point as rhp;

const SONIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Supersonic,
    Subsonic,
}

impl Branch {
    fn name(self) -> &'static str {
        match self {
            Branch::Supersonic => "supersonic",
            Branch::Subsonic => "subsonic",
        }
    }
}

/// Nozzle sector `(r1, r2) x (-theta0, theta0) x (-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub r1: f64,
    pub r2: f64,
    pub theta0: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { r1: 1.0, r2: 2.0, theta0: std::f64::consts::PI / 6.0 }
    }
}

/// Radial inlet state at `r1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InletState {
    pub density: f64,
    pub entropy_k: f64,
    pub mach: f64,
}

impl Default for InletState {
    fn default() -> Self {
        InletState { density: 1.0, entropy_k: 1.0, mach: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBranch {
    pub mass_flux_m: f64,
    pub b: f64,
    pub k: f64,
    pub branch: Branch,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Background state at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub r: f64,
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub c2: f64,
}

impl BranchPoint {
    pub fn mach_sq(&self) -> f64 {
        self.u * self.u / self.c2
    }

    /// `U'` from `(c^2 - U^2) U' + c^2 U / r = 0`.
    pub fn u_prime(&self) -> f64 {
        -self.c2 * self.u / (self.r * (self.c2 - self.u * self.u))
    }
}

fn mass_density(gas: &GasModel<f64>, b: f64, k: f64, u: f64) -> f64 {
    let g = gas.gamma;
    let br = b - 0.5 * u * u;
    if br <= 0.0 {
        return 0.0;
    }
    ((g - 1.0) / (g * k) * br).powf(1.0 / (g - 1.0)) * u
}

/// Root of `rho(U) U r = m` on the requested branch, returned as `(rho, U)`.
pub fn solve_branch(
    gas: &GasModel<f64>,
    m: f64,
    b: f64,
    k: f64,
    r: f64,
    branch: Branch,
) -> Result<(f64, f64)> {
    let g = gas.gamma;
    if !(r > 0.0) || !(m >= 0.0) || !(b > 0.0) || !(k > 0.0) {
        return Err(Error::NoBranchRoot { branch: branch.name(), r });
    }
    let u_max = (2.0 * b).sqrt();
    let u_star = (2.0 * (g - 1.0) / (g + 1.0) * b).sqrt();
    let target = m / r;
    let f_star = mass_density(gas, b, k, u_star);
    if target > f_star * (1.0 + 1e-14) {
        return Err(Error::NoBranchRoot { branch: branch.name(), r });
    }
    if m == 0.0 {
        return match branch {
            Branch::Subsonic => Ok((gas.density_from_bernoulli(b, k, 0.0)?, 0.0)),
            Branch::Supersonic => Err(Error::NoBranchRoot { branch: branch.name(), r }),
        };
    }
    let (mut lo, mut hi) = match branch {
        Branch::Subsonic => (0.0, u_star),
        Branch::Supersonic => (u_star, u_max),
    };
    // f(U) = rho(U) U - m/r; increasing on the subsonic side, decreasing on the other
    let sgn = if branch == Branch::Subsonic { 1.0 } else { -1.0 };
    let f = |u: f64| sgn * (mass_density(gas, b, k, u) - target);
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fu = f(u);
        if fu > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        // d(rho U)/dU = rho (1 - M^2)
        let rho = mass_density(gas, b, k, u) / u;
        let c2 = (g - 1.0) * (b - 0.5 * u * u);
        let df = sgn * rho * (1.0 - u * u / c2);
        let mut next = if df != 0.0 { u - fu / df } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - u).abs() <= 1e-15 * u.max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * u;
        u = next;
        if done {
            break;
        }
    }
    let c2 = (g - 1.0) * (b - 0.5 * u * u);
    let gap = (u * u / c2).sqrt() - 1.0;
    if gap.abs() < SONIC_TOL {
        return Err(Error::SonicDegeneracy { r, gap: gap.abs() });
    }
    Ok((m / (u * r), u))
}

impl RadialBranch {
    pub fn at(&self, gas: &GasModel<f64>, r: f64) -> Result<BranchPoint> {
        let (rho, u) = solve_branch(gas, self.mass_flux_m, self.b, self.k, r, self.branch)?;
        let p = self.k * rho.powf(gas.gamma);
        let c2 = gas.gamma * self.k * rho.powf(gas.gamma - 1.0);
        Ok(BranchPoint { r, rho, u, p, c2 })
    }
}

/// Downstream state of a normal shock for radial flow.
pub fn jump_downstream(gas: &GasModel<f64>, minus: &FlowState<f64>) -> Result<FlowState<f64>> {
    let g = gas.gamma;
    let mach = gas.mach(minus);
    if !(mach > 1.0) {
        return Err(Error::NotSupersonic { mach });
    }
    let m2 = mach * mach;
    let p = gas.pressure(minus);
    let rho = minus.density * (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
    let u = minus.density * minus.u_r / rho;
    let pp = p * (2.0 * g * m2 - (g - 1.0)) / (g + 1.0);
    Ok(FlowState::new(u, 0.0, 0.0, rho, pp / rho.powf(g)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundSolution {
    pub gas: GasModel<f64>,
    pub geometry: Geometry,
    pub supersonic: RadialBranch,
    pub subsonic: RadialBranch,
    pub r_s: f64,
}

fn inlet_branch(gas: &GasModel<f64>, geo: &Geometry, inlet: &InletState) -> Result<RadialBranch> {
    if !(inlet.mach > 1.0) {
        return Err(Error::NotSupersonic { mach: inlet.mach });
    }
    let s0 = FlowState::new(0.0, 0.0, 0.0, inlet.density, inlet.entropy_k);
    let c = gas.sound_speed_sq(&s0).sqrt();
    let u = inlet.mach * c;
    let s = FlowState::new(u, 0.0, 0.0, inlet.density, inlet.entropy_k);
    Ok(RadialBranch {
        mass_flux_m: inlet.density * u * geo.r1,
        b: gas.bernoulli(&s),
        k: inlet.entropy_k,
        branch: Branch::Supersonic,
        r_lo: geo.r1,
        r_hi: geo.r2,
    })
}

impl BackgroundSolution {
    pub fn new(gas: GasModel<f64>, geometry: Geometry, inlet: &InletState, r_s: f64) -> Result<Self> {
        if !(r_s > geometry.r1 && r_s < geometry.r2) {
            return Err(Error::OutOfDomain(format!(
                "shock radius {r_s} outside ({}, {})",
                geometry.r1, geometry.r2
            )));
        }
        let mut supersonic = inlet_branch(&gas, &geometry, inlet)?;
        let pm = supersonic.at(&gas, r_s)?;
        let minus = FlowState::new(pm.u, 0.0, 0.0, pm.rho, supersonic.k);
        let plus = jump_downstream(&gas, &minus)?;
        supersonic.r_hi = r_s;
        let subsonic = RadialBranch {
            mass_flux_m: supersonic.mass_flux_m,
            b: supersonic.b,
            k: plus.entropy_k,
            branch: Branch::Subsonic,
            r_lo: r_s,
            r_hi: geometry.r2,
        };
        Ok(BackgroundSolution { gas, geometry, supersonic, subsonic, r_s })
    }

    /// Background with the shock placed to match the exit pressure `p_e`.
    pub fn from_exit_pressure(
        gas: GasModel<f64>,
        geometry: Geometry,
        inlet: &InletState,
        p_e: f64,
    ) -> Result<Self> {
        let r_s = find_shock_radius(&gas, &geometry, inlet, p_e)?;
        Self::new(gas, geometry, inlet, r_s)
    }

    pub fn minus(&self, r: f64) -> Result<BranchPoint> {
        self.supersonic.at(&self.gas, r)
    }

    pub fn plus(&self, r: f64) -> Result<BranchPoint> {
        self.subsonic.at(&self.gas, r)
    }

    pub fn bernoulli(&self) -> f64 {
        self.supersonic.b
    }

    pub fn k_minus(&self) -> f64 {
        self.supersonic.k
    }

    pub fn k_plus(&self) -> f64 {
        self.subsonic.k
    }

    pub fn mass_flux(&self) -> f64 {
        self.supersonic.mass_flux_m
    }

    pub fn exit_pressure(&self) -> Result<f64> {
        Ok(self.plus(self.geometry.r2)?.p)
    }

    /// The 1D jump residual `([rho U], [rho U^2 + P], [B])` at `r_s`.
    pub fn jump_residual(&self) -> Result<[f64; 3]> {
        let m = self.minus(self.r_s)?;
        let p = self.plus(self.r_s)?;
        let g = self.gas.gamma;
        let bm = 0.5 * m.u * m.u + g / (g - 1.0) * m.p / m.rho;
        let bp = 0.5 * p.u * p.u + g / (g - 1.0) * p.p / p.rho;
        Ok([
            p.rho * p.u - m.rho * m.u,
            p.rho * p.u * p.u + p.p - (m.rho * m.u * m.u + m.p),
            bp - bm,
        ])
    }

    /// Comma-separated table `(r, rho, U, P, M)` for one branch.
    pub fn branch_table(&self, branch: Branch, n: usize) -> Result<String> {
        let (br, lo, hi) = match branch {
            Branch::Supersonic => (&self.supersonic, self.geometry.r1, self.r_s),
            Branch::Subsonic => (&self.subsonic, self.r_s, self.geometry.r2),
        };
        let mut out = String::from("r,rho,U,P,M\n");
        for i in 0..=n {
            let r = lo + (hi - lo) * i as f64 / n as f64;
            let s = br.at(&self.gas, r)?;
            out.push_str(&format!("{},{},{},{},{}\n", r, s.rho, s.u, s.p, s.mach_sq().sqrt()));
        }
        Ok(out)
    }
}

pub fn exit_pressure_of_shock(
    gas: &GasModel<f64>,
    geometry: &Geometry,
    inlet: &InletState,
    r_s: f64,
) -> Result<f64> {
    BackgroundSolution::new(*gas, *geometry, inlet, r_s)?.exit_pressure()
}

/// Exit pressures `(P1, P2)` of a shock sitting at the exit and at the inlet.
pub fn admissible_interval(gas: &GasModel<f64>, geometry: &Geometry, inlet: &InletState) -> Result<(f64, f64)> {
    let span = geometry.r2 - geometry.r1;
    let lo = exit_pressure_of_shock(gas, geometry, inlet, geometry.r2 - 1e-12 * span)?;
    let hi = exit_pressure_of_shock(gas, geometry, inlet, geometry.r1 + 1e-12 * span)?;
    Ok((lo, hi))
}

/// Inverts the exit pressure map by bisection; the map is strictly decreasing.
pub fn find_shock_radius(gas: &GasModel<f64>, geometry: &Geometry, inlet: &InletState, p_e: f64) -> Result<f64> {
    let (p_lo, p_hi) = admissible_interval(gas, geometry, inlet)?;
    if !(p_e > p_lo && p_e < p_hi) {
        return Err(Error::ExitPressureOutOfRange { p_e, p_lo, p_hi });
    }
    let span = geometry.r2 - geometry.r1;
    let (mut a, mut b) = (geometry.r1 + 1e-12 * span, geometry.r2 - 1e-12 * span);
    while b - a > 1e-14 {
        let mid = 0.5 * (a + b);
        if exit_pressure_of_shock(gas, geometry, inlet, mid)? > p_e {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Constant and radial coefficients of the linearized shock problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// Rows of the inverse of the linearized jump matrix giving `W1` and `W4`.
    pub b1: [f64; 3],
    pub b2: [f64; 3],
    /// Largest disagreement between symbolic and numeric `b` coefficients.
    pub b_crosscheck: f64,
    /// Pressure jump `[P](r_s)`.
    pub p_jump: f64,
    /// Downstream state at the shock.
    pub plus_rs: BranchPoint,
    pub minus_rs: BranchPoint,
    pub gamma: f64,
    pub b_bar: f64,
    pub k_plus: f64,
    pub r_s: f64,
    pub r2: f64,
}

/// Radial coefficient values at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoefficients {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    /// `(gamma-1)(U' + U/r)/c^2`, the `V5` coefficient of the divergence equation.
    pub e5: f64,
    /// `(B - U^2/2)/(gamma K U)`, the `V4` coefficient of the curl equations.
    pub e4: f64,
    pub state: BranchPoint,
    pub u_prime: f64,
}

impl BackgroundCoefficients {
    pub fn new(bg: &BackgroundSolution) -> Result<Self> {
        let g = bg.gas.gamma;
        let r_s = bg.r_s;
        let p = bg.plus(r_s)?;
        let m = bg.minus(r_s)?;
        let p_jump = p.p - m.p;
        let (b1, b2) = rhp::b_coefficients(g, p.rho, p.u, p.c2);
        let (n1, n2) = rhp::b_coefficients_numeric(g, p.rho, p.u, p.c2)
            .ok_or_else(|| Error::LinearSolveFailure("linearized jump matrix is singular".into()))?;
        let mut cross = 0.0f64;
        for i in 0..3 {
            cross = cross.max((b1[i] - n1[i]).abs()).max((b2[i] - n2[i]).abs());
        }
        let a0 = p.rho * p.u / p_jump;
        let a1 = -b1[1] * p_jump / r_s;
        let a2 = -b2[1] * p_jump / r_s;
        let m2 = p.mach_sq();
        let a3 = ((g - 1.0) * m2 + 1.0) / (g * m2);
        let c = BackgroundCoefficients {
            a0,
            a1,
            a2,
            a3,
            a4: a0 * a1 * a3,
            b1,
            b2,
            b_crosscheck: cross,
            p_jump,
            plus_rs: p,
            minus_rs: m,
            gamma: g,
            b_bar: bg.bernoulli(),
            k_plus: bg.k_plus(),
            r_s,
            r2: bg.geometry.r2,
        };
        assert!(
            c.a0 > 0.0 && c.a1 > 0.0 && c.a2 > 0.0 && c.a3 > 0.0 && c.a4 > 0.0,
            "background coefficients lost positivity: {c:?}"
        );
        Ok(c)
    }

    /// `a1` as displayed: `gamma U [P] / (r_s rho (c^2 - U^2))`.
    pub fn a1_displayed(&self) -> f64 {
        let p = &self.plus_rs;
        self.gamma * p.u * self.p_jump / (self.r_s * p.rho * (p.c2 - p.u * p.u))
    }

    /// `a2` as displayed: `(gamma-1) [P] / (r_s rho^gamma)`.
    pub fn a2_displayed(&self) -> f64 {
        let p = &self.plus_rs;
        (self.gamma - 1.0) * self.p_jump / (self.r_s * p.rho.powf(self.gamma))
    }

    /// The `d` coefficients at radius `r` on the subsonic branch (extended
    /// analytically slightly below `r_s` when the shock moves upstream).
    pub fn radial(&self, bg: &BackgroundSolution, r: f64) -> Result<RadialCoefficients> {
        let s = bg.plus(r)?;
        Ok(self.radial_from_state(s))
    }

    pub fn radial_from_state(&self, s: BranchPoint) -> RadialCoefficients {
        let g = self.gamma;
        let r = s.r;
        let up = s.u_prime();
        let m2 = s.mach_sq();
        let d1 = 1.0 - m2;
        let d2 = m2 * (2.0 + (g - 1.0) * m2) / (r * (1.0 - m2));
        let kk = self.a2 / self.a1 / (g * self.k_plus);
        let d3 = kk * (self.b_bar - 0.5 * s.u * s.u) / s.u;
        let d3p = -kk * up * (self.b_bar + 0.5 * s.u * s.u) / (s.u * s.u);
        // (M^2)' = U U' (2 c^2 + (gamma-1) U^2) / c^4
        let dm2 = s.u * up * (2.0 * s.c2 + (g - 1.0) * s.u * s.u) / (s.c2 * s.c2);
        let d1p = -dm2;
        let d4 = d1 * d3p + (1.0 / r + d2) * d3;
        let d5 = 1.0 / r + d2 - d1p;
        RadialCoefficients {
            d1,
            d2,
            d3,
            d4,
            d5,
            e5: (g - 1.0) * (up + s.u / r) / s.c2,
            e4: (self.b_bar - 0.5 * s.u * s.u) / (g * self.k_plus * s.u),
            state: s,
            u_prime: up,
        }
    }

    /// Closed form of `d4` as the last line of its displayed derivation.
    pub fn d4_closed_form(&self, s: BranchPoint) -> f64 {
        let g = self.gamma;
        let m2 = s.mach_sq();
        self.a2 / (g * self.a1 * self.k_plus * s.r * s.u)
            * (2.0 * self.b_bar + s.u * s.u * (2.0 + (g - 1.0) * m2) / ((g - 1.0) * (1.0 - m2)))
    }

    /// Comma-separated coefficient table `(r, d1..d5)` followed by the scalars.
    pub fn table(&self, bg: &BackgroundSolution, n: usize) -> Result<String> {
        let mut out = String::from("r,d1,d2,d3,d4,d5\n");
        for i in 0..=n {
            let r = self.r_s + (self.r2 - self.r_s) * i as f64 / n as f64;
            let c = self.radial(bg, r)?;
            out.push_str(&format!("{},{},{},{},{},{}\n", r, c.d1, c.d2, c.d3, c.d4, c.d5));
        }
        out.push_str(&format!(
            "# a0={} a1={} a2={} a3={} a4={}\n",
            self.a0, self.a1, self.a2, self.a3, self.a4
        ));
        Ok(out)
    }
}
