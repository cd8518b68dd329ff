//! Run configuration: a TOML document with `gas`, `geometry`, `inlet`,
//! `exit`, `solver` and `output` sections.

use serde::{Deserialize, Serialize};

use crate::background::{Geometry, InletState};
use crate::error::{Error, Result};
use crate::inflow::{check_exit_modes, make_inlet, Basis, CrossMode, InletField, InletMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Background,
    Inflow,
    Full,
    Sweep,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub r1: f64,
    pub r2: f64,
    pub theta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InletSection {
    pub density: f64,
    pub entropy_k: f64,
    pub mach: f64,
    #[serde(default)]
    pub modes: Vec<InletMode>,
}

/// The exit pressure fixes the background shock; `shock_radius` may be
/// given instead. `sweep` lists exit pressures for the sweep mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shock_radius: Option<f64>,
    #[serde(default)]
    pub modes: Vec<CrossMode>,
    #[serde(default)]
    pub sweep: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub eps: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_x3: usize,
    pub modes_theta: usize,
    pub modes_x3: usize,
    /// Radial steps of the supersonic march per subsonic radial interval.
    pub march_factor: usize,
    pub fd_order: usize,
    pub tol_fixed_point: f64,
    pub tol_linear: f64,
    pub tol_rh: f64,
    pub max_iters: usize,
    pub relax: f64,
    pub trust_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub mode: RunMode,
    pub dir: String,
    #[serde(default)]
    pub dump_kernels: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gas: GasSection,
    pub geometry: GeometrySection,
    pub inlet: InletSection,
    pub exit: ExitSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let geo = Geometry::default();
        let inlet = InletState::default();
        RunConfig {
            gas: GasSection { gamma: 1.4 },
            geometry: GeometrySection { r1: geo.r1, r2: geo.r2, theta0: geo.theta0 },
            inlet: InletSection {
                density: inlet.density,
                entropy_k: inlet.entropy_k,
                mach: inlet.mach,
                modes: vec![
                    InletMode { field: InletField::P, mode: CrossMode::cos(1, 1, 1.0) },
                    InletMode { field: InletField::K, mode: CrossMode::cos(2, 1, 0.5) },
                ],
            },
            exit: ExitSection { pressure: None, shock_radius: Some(1.5), modes: vec![CrossMode::cos(1, 1, 0.5)], sweep: vec![3.0, 3.5, 4.0, 4.5, 5.0] },
            solver: SolverSection {
                eps: 1e-3,
                n_r: 32,
                n_theta: 16,
                n_x3: 16,
                modes_theta: 12,
                modes_x3: 12,
                march_factor: 2,
                fd_order: 4,
                tol_fixed_point: 1e-10,
                tol_linear: 1e-10,
                tol_rh: 1e-6,
                max_iters: 20,
                relax: 1.0,
                trust_factor: 10.0,
            },
            output: OutputSection { mode: RunMode::Full, dir: "out".into(), dump_kernels: false },
        }
    }
}

fn bad(path: &str, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| format!("byte {}..{}", s.start, s.end)).unwrap_or_default();
            bad(&path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn geometry(&self) -> Geometry {
        Geometry { r1: self.geometry.r1, r2: self.geometry.r2, theta0: self.geometry.theta0 }
    }

    pub fn inlet_state(&self) -> InletState {
        InletState { density: self.inlet.density, entropy_k: self.inlet.entropy_k, mach: self.inlet.mach }
    }

    /// Multiplies every grid size and mode count by `s`.
    pub fn scaled(&self, s: usize) -> RunConfig {
        let mut out = self.clone();
        let v = &mut out.solver;
        v.n_r *= s;
        v.n_theta *= s;
        v.n_x3 *= s;
        v.modes_theta *= s;
        v.modes_x3 *= s;
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gas.gamma > 1.0 && self.gas.gamma.is_finite()) {
            return Err(bad("gas.gamma", format!("must exceed 1, got {}", self.gas.gamma)));
        }
        let g = &self.geometry;
        positive("geometry.r1", g.r1)?;
        if !(g.r2 > g.r1) {
            return Err(bad("geometry.r2", format!("must exceed r1 = {}, got {}", g.r1, g.r2)));
        }
        if !(g.theta0 > 0.0 && g.theta0 < std::f64::consts::FRAC_PI_2) {
            return Err(bad("geometry.theta0", format!("must lie in (0, pi/2), got {}", g.theta0)));
        }
        positive("inlet.density", self.inlet.density)?;
        positive("inlet.entropy_k", self.inlet.entropy_k)?;
        if !(self.inlet.mach > 1.0) {
            return Err(bad("inlet.mach", format!("must exceed 1, got {}", self.inlet.mach)));
        }
        make_inlet(0.0, g.theta0, &self.inlet.modes).map_err(|e| bad("inlet.modes", e.to_string()))?;
        match (self.exit.pressure, self.exit.shock_radius) {
            (Some(p), None) => positive("exit.pressure", p)?,
            (None, Some(r)) => {
                if !(r > g.r1 && r < g.r2) {
                    return Err(bad("exit.shock_radius", format!("must lie in ({}, {}), got {r}", g.r1, g.r2)));
                }
            }
            _ => return Err(bad("exit", "give exactly one of `pressure` and `shock_radius`")),
        }
        if self.exit.modes.iter().any(|m| (m.theta, m.x3) != (Basis::Cos, Basis::Cos)) {
            return Err(bad("exit.modes", "exit pressure modes must be cosine in both directions"));
        }
        check_exit_modes(&self.exit.modes).map_err(|e| bad("exit.modes", e.to_string()))?;
        for (i, p) in self.exit.sweep.iter().enumerate() {
            positive(&format!("exit.sweep[{i}]"), *p)?;
        }
        let s = &self.solver;
        if !(s.eps >= 0.0 && s.eps.is_finite()) {
            return Err(bad("solver.eps", format!("must be >= 0, got {}", s.eps)));
        }
        for (path, n) in [("solver.n_r", s.n_r), ("solver.n_theta", s.n_theta), ("solver.n_x3", s.n_x3)] {
            if n < 8 {
                return Err(bad(path, format!("need at least 8 intervals, got {n}")));
            }
        }
        if s.modes_theta > s.n_theta || s.modes_x3 > s.n_x3 {
            return Err(bad("solver.modes_theta", "mode counts cannot exceed the grid sizes"));
        }
        if s.march_factor == 0 {
            return Err(bad("solver.march_factor", "must be at least 1"));
        }
        if s.fd_order != 2 && s.fd_order != 4 {
            return Err(bad("solver.fd_order", format!("must be 2 or 4, got {}", s.fd_order)));
        }
        positive("solver.tol_fixed_point", s.tol_fixed_point)?;
        positive("solver.tol_linear", s.tol_linear)?;
        positive("solver.tol_rh", s.tol_rh)?;
        if s.max_iters == 0 {
            return Err(bad("solver.max_iters", "must be at least 1"));
        }
        if !(s.relax > 0.0 && s.relax <= 1.0) {
            return Err(bad("solver.relax", format!("must lie in (0, 1], got {}", s.relax)));
        }
        positive("solver.trust_factor", s.trust_factor)?;
        Ok(())
    }
}
