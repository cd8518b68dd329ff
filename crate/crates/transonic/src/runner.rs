//! Drives one configured run and collects its report and CSV outputs.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::background::{admissible_interval, find_shock_radius, BackgroundSolution, Branch};
use crate::config::{RunConfig, RunMode};
use crate::error::{Error, Result};
use crate::fixed_point::{exit_face, IterationOptions, IterationRecord, Problem, Solution};
use crate::grid::BoxGrid;
use crate::inflow::{exit_profile, frozen_supersonic, make_inlet, march_supersonic, SupersonicField};
use crate::verify;
use crate::GasModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackgroundReport {
    pub shock_radius: f64,
    pub exit_pressure: f64,
    pub admissible_low: f64,
    pub admissible_high: f64,
    pub jump_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflowReport {
    pub normal_derivatives: f64,
    pub slip: f64,
    pub second_derivatives: f64,
    pub bernoulli_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub iterations: usize,
    pub final_update: f64,
    pub last_ratio: f64,
    pub x_norm: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub euler: f64,
    pub decomposed: f64,
    pub rh: f64,
    pub rh_raw: f64,
    pub f2: f64,
    pub f3: f64,
    pub shock_system: f64,
    pub gradient_tables: f64,
    pub pi_max: f64,
    pub pi_truncation: f64,
    pub compatibility: f64,
    pub q5_integral: f64,
    pub q5_tolerance: f64,
    pub m1_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub scales: Vec<f64>,
    pub g: Vec<f64>,
    pub r0: Vec<f64>,
    pub g_exponent: f64,
    pub r0_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport {
    pub radial_sizes: Vec<usize>,
    pub euler: Vec<f64>,
    pub decomposed: Vec<f64>,
    pub pi: Vec<f64>,
    pub euler_order: f64,
    pub decomposed_order: f64,
    pub pi_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub exit_pressure: f64,
    pub shock_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: RunMode,
    pub converged: bool,
    pub eps: f64,
    pub grid: [usize; 3],
    pub modes: [usize; 2],
    pub background: BackgroundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inflow: Option<InflowReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration: Option<IterationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernels: Option<KernelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
}

impl RunReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }
}

/// Report plus named CSV files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: RunReport,
    pub files: Vec<(String, String)>,
}

impl RunOutput {
    /// Writes `report.toml` and every CSV into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join("report.toml"), self.report.to_toml()).map_err(io)?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body).map_err(io)?;
        }
        Ok(())
    }
}

/// Background, upstream field and problem for one configuration.
pub struct Setup {
    pub bg: BackgroundSolution,
    pub problem: Problem,
}

pub fn background(cfg: &RunConfig) -> Result<BackgroundSolution> {
    let gas = GasModel::new(cfg.gas.gamma)?;
    let (geo, inlet) = (cfg.geometry(), cfg.inlet_state());
    match (cfg.exit.pressure, cfg.exit.shock_radius) {
        (Some(p), _) => BackgroundSolution::from_exit_pressure(gas, geo, &inlet, p),
        (None, Some(r)) => BackgroundSolution::new(gas, geo, &inlet, r),
        (None, None) => Err(Error::Config { path: "exit".into(), msg: "no exit pressure or shock radius".into() }),
    }
}

fn subsonic_grid(cfg: &RunConfig, bg: &BackgroundSolution) -> BoxGrid {
    let s = &cfg.solver;
    BoxGrid::new(bg.r_s, bg.geometry.r2, bg.geometry.theta0, s.n_r, s.n_theta, s.n_x3)
}

pub fn upstream(cfg: &RunConfig, bg: &BackgroundSolution) -> Result<SupersonicField> {
    let s = &cfg.solver;
    let inlet = make_inlet(s.eps, bg.geometry.theta0, &cfg.inlet.modes)?;
    march_supersonic(bg, &inlet, s.march_factor * s.n_r, s.n_theta, s.n_x3, s.fd_order)
}

pub fn setup(cfg: &RunConfig) -> Result<Setup> {
    let bg = background(cfg)?;
    let minus = upstream(cfg, &bg)?;
    let problem = build_problem(cfg, &bg, minus, cfg.solver.eps)?;
    Ok(Setup { bg, problem })
}

fn build_problem(cfg: &RunConfig, bg: &BackgroundSolution, minus: SupersonicField, eps: f64) -> Result<Problem> {
    let s = &cfg.solver;
    let grid = subsonic_grid(cfg, bg);
    let theta0 = bg.geometry.theta0;
    let p_exit = exit_face(&grid, eps, |y2, y3| exit_profile(&cfg.exit.modes, theta0, y2, y3));
    let mut pr = Problem::new(bg.clone(), minus, grid, (s.modes_theta, s.modes_x3), eps, p_exit, s.fd_order)?;
    pr.ell.linear_tol = s.tol_linear;
    Ok(pr)
}

pub fn options(cfg: &RunConfig) -> IterationOptions {
    let s = &cfg.solver;
    IterationOptions { tol: s.tol_fixed_point, max_iters: s.max_iters, relax: s.relax, trust_factor: s.trust_factor }
}

fn background_report(cfg: &RunConfig, bg: &BackgroundSolution) -> Result<BackgroundReport> {
    let (lo, hi) = admissible_interval(&bg.gas, &cfg.geometry(), &cfg.inlet_state())?;
    let jump = bg.jump_residual()?;
    Ok(BackgroundReport {
        shock_radius: bg.r_s,
        exit_pressure: bg.exit_pressure()?,
        admissible_low: lo,
        admissible_high: hi,
        jump_residual: jump.iter().fold(0.0f64, |a, x| a.max(x.abs())),
    })
}

fn inflow_report(minus: &SupersonicField) -> InflowReport {
    let c = minus.compatibility();
    InflowReport {
        normal_derivatives: c.normal_derivatives,
        slip: c.slip,
        second_derivatives: c.second_derivatives,
        bernoulli_deviation: minus.max_deviation(),
    }
}

fn iteration_report(sol: &Solution, seconds: f64) -> IterationReport {
    let last = sol.history.last();
    IterationReport {
        iterations: sol.history.len(),
        final_update: last.map_or(0.0, |r| r.update),
        last_ratio: last.and_then(|r| r.ratio).unwrap_or(0.0),
        x_norm: last.map_or(0.0, |r| r.x_norm),
        seconds,
    }
}

pub fn verification(pr: &Problem, sol: &Solution) -> Result<VerificationReport> {
    let eq = verify::verify_equivalence(pr, &sol.state)?;
    let sh = verify::verify_shock_conditions(pr, &sol.state)?;
    let comp = verify::compatibility(pr, sol)?;
    let solv = verify::solvability(pr, sol);
    Ok(VerificationReport {
        euler: eq.euler_max(),
        decomposed: eq.decomposed_max(),
        rh: sh.rh_max(),
        rh_raw: sh.rh_raw_max(),
        f2: sh.f2,
        f3: sh.f3,
        shock_system: sh.system,
        gradient_tables: sh.gradient_tables,
        pi_max: sol.diag.pi.max_abs(),
        pi_truncation: sol.diag.pi_truncation,
        compatibility: comp.worst(),
        q5_integral: solv.q5_integral,
        q5_tolerance: solv.q5_tolerance,
        m1_integral: solv.m1_integral,
    })
}

/// Kernel sizes along `s * sol / eps` with the upstream state frozen at
/// the background, so only the nonlinear part of the jump remains.
pub fn kernel_report(cfg: &RunConfig, pr: &Problem, sol: &Solution, scales: &[f64]) -> Result<Option<KernelReport>> {
    if pr.eps == 0.0 {
        return Ok(None);
    }
    let s = &cfg.solver;
    let inlet = make_inlet(0.0, pr.bg.geometry.theta0, &cfg.inlet.modes)?;
    let frozen = frozen_supersonic(&pr.bg, &inlet, s.march_factor * s.n_r, s.n_theta, s.n_x3)?;
    let p0 = build_problem(cfg, &pr.bg, frozen, 0.0)?;
    let z = sol.state.combine(&sol.state, 1.0 / pr.eps, 0.0);
    let k = verify::kernel_scaling(&p0, &z, scales)?;
    Ok(Some(KernelReport { scales: k.scales, g: k.g, r0: k.r0, g_exponent: k.g_exponent, r0_exponent: k.r0_exponent }))
}

/// Observed order between consecutive levels refined by `ratio`.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

fn refinement(cfg: &RunConfig, fine: &VerificationReport) -> Result<RefinementReport> {
    let s = &cfg.solver;
    let halvable = [s.n_r, s.n_theta, s.n_x3, s.modes_theta, s.modes_x3].iter().all(|n| n % 2 == 0)
        && s.n_r.min(s.n_theta).min(s.n_x3) >= 16;
    let (coarse_cfg, fine_cfg) = if halvable {
        let mut c = cfg.clone();
        for n in [&mut c.solver.n_r, &mut c.solver.n_theta, &mut c.solver.n_x3, &mut c.solver.modes_theta, &mut c.solver.modes_x3] {
            *n /= 2;
        }
        (c, None)
    } else {
        (cfg.clone(), Some(cfg.scaled(2)))
    };
    let level = |c: &RunConfig| -> Result<VerificationReport> {
        let st = setup(c)?;
        let sol = st.problem.iterate(&options(c), |_| {})?;
        verification(&st.problem, &sol)
    };
    let coarse = level(&coarse_cfg)?;
    let fine = match fine_cfg {
        Some(f) => level(&f)?,
        None => fine.clone(),
    };
    Ok(RefinementReport {
        radial_sizes: vec![coarse_cfg.solver.n_r, 2 * coarse_cfg.solver.n_r],
        euler: vec![coarse.euler, fine.euler],
        decomposed: vec![coarse.decomposed, fine.decomposed],
        pi: vec![coarse.pi_max, fine.pi_max],
        euler_order: observed_order(coarse.euler, fine.euler, 2.0),
        decomposed_order: observed_order(coarse.decomposed, fine.decomposed, 2.0),
        pi_order: observed_order(coarse.pi_max, fine.pi_max, 2.0),
    })
}

/// Exit pressure to shock radius for every sweep entry, checked for strict
/// decrease.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepEntry>> {
    let gas = GasModel::new(cfg.gas.gamma)?;
    let (geo, inlet) = (cfg.geometry(), cfg.inlet_state());
    let mut out: Vec<SweepEntry> = Vec::with_capacity(cfg.exit.sweep.len());
    for &p in &cfg.exit.sweep {
        out.push(SweepEntry { exit_pressure: p, shock_radius: find_shock_radius(&gas, &geo, &inlet, p)? });
    }
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by(|&a, &b| out[a].exit_pressure.total_cmp(&out[b].exit_pressure));
    for w in order.windows(2) {
        let (a, b) = (&out[w[0]], &out[w[1]]);
        if !(b.exit_pressure > a.exit_pressure && b.shock_radius < a.shock_radius) {
            return Err(Error::NotMonotone { index: w[1], p_e: b.exit_pressure, r_s: b.shock_radius });
        }
    }
    Ok(out)
}

fn history_csv(h: &[IterationRecord]) -> String {
    let mut out = String::from("iter,update_w,x_norm,ratio,pi_max\n");
    for r in h {
        let ratio = r.ratio.map_or(String::new(), |x| x.to_string());
        out.push_str(&format!("{},{},{},{},{}\n", r.iter, r.update, r.x_norm, ratio, r.pi_max));
    }
    out
}

fn fields_csv(pr: &Problem, sol: &Solution) -> Result<String> {
    let f = verify::physical_fields(pr, &sol.state)?;
    let g = pr.grid();
    let mut out = String::from("r,theta_rad,x3,U1,U2,U3,rho,P,K,B\n");
    for n in 0..g.len() {
        let (_, j, k) = g.ijk(n);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            f.d0.data[n],
            g.y2(j),
            g.y3(k),
            f.u[0].data[n],
            f.u[1].data[n],
            f.u[2].data[n],
            f.rho.data[n],
            f.p.data[n],
            f.k.data[n],
            f.b.data[n]
        ));
    }
    Ok(out)
}

fn kernels_csv(pr: &Problem, sol: &Solution) -> String {
    let g = pr.grid();
    let k = &sol.diag.kernels;
    let mut out = String::from("theta_rad,x3,J,J2,J3,R01,R02,R03,R1,R2,R3,g2,g3,rho_tilde,P_tilde\n");
    for j in 0..=g.n2 {
        for l in 0..=g.n3 {
            let row = [&k.j, &k.j2, &k.j3, &k.r0[0], &k.r0[1], &k.r0[2], &k.r1, &k.r2, &k.r3, &k.g2, &k.g3, &k.rho_tilde, &k.p_tilde]
                .map(|f| f.at(j, l).to_string())
                .join(",");
            out.push_str(&format!("{},{},{row}\n", g.y2(j), g.y3(l)));
        }
    }
    out
}

/// Runs the configured mode. `converged` is false when the fixed point
/// iteration stops at `max_iters` above tolerance or the jump residual of
/// the result exceeds `tol_rh`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let bg = background(cfg)?;
    let s = &cfg.solver;
    let mut report = RunReport {
        mode: cfg.output.mode,
        converged: true,
        eps: s.eps,
        grid: [s.n_r, s.n_theta, s.n_x3],
        modes: [s.modes_theta, s.modes_x3],
        background: background_report(cfg, &bg)?,
        inflow: None,
        iteration: None,
        verification: None,
        kernels: None,
        refinement: None,
        sweep: vec![],
    };
    let mut files = vec![];
    match cfg.output.mode {
        RunMode::Background => {
            files.push(("supersonic.csv".into(), bg.branch_table(Branch::Supersonic, s.n_r)?));
            files.push(("subsonic.csv".into(), bg.branch_table(Branch::Subsonic, s.n_r)?));
        }
        RunMode::Sweep => {
            report.sweep = sweep(cfg)?;
            let mut csv = String::from("exit_pressure,shock_radius\n");
            for e in &report.sweep {
                csv.push_str(&format!("{},{}\n", e.exit_pressure, e.shock_radius));
            }
            files.push(("sweep.csv".into(), csv));
        }
        RunMode::Inflow => {
            let minus = upstream(cfg, &bg)?;
            report.inflow = Some(inflow_report(&minus));
            files.push(("inflow.csv".into(), minus.table()?));
        }
        RunMode::Full | RunMode::Verify => {
            let minus = upstream(cfg, &bg)?;
            report.inflow = Some(inflow_report(&minus));
            let pr = build_problem(cfg, &bg, minus, s.eps)?;
            let t0 = Instant::now();
            let sol = pr.iterate(&options(cfg), |_| {})?;
            report.converged = sol.converged;
            report.iteration = Some(iteration_report(&sol, t0.elapsed().as_secs_f64()));
            let ver = verification(&pr, &sol)?;
            report.converged &= ver.rh_raw < s.tol_rh;
            if cfg.output.mode == RunMode::Verify {
                report.kernels = kernel_report(cfg, &pr, &sol, &[1e-2, 1e-3])?;
                report.refinement = Some(refinement(cfg, &ver)?);
            }
            report.verification = Some(ver);
            files.push(("history.csv".into(), history_csv(&sol.history)));
            files.push(("shock.csv".into(), sol.state.surface.table(pr.grid())));
            files.push(("fields.csv".into(), fields_csv(&pr, &sol)?));
            if cfg.output.dump_kernels {
                files.push(("kernels.csv".into(), kernels_csv(&pr, &sol)));
            }
        }
    }
    Ok(RunOutput { report, files })
}
