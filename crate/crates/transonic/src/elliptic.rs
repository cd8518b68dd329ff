//! Elliptic solves on the subsonic box: the Dirichlet problem for `Pi`, the
//! div-curl system for `Vdot`, the shock-face Neumann problem for `m1` and
//! the nonlocal oblique problem for the potential.
//!
//! All four are diagonal in the cross-section eigenfunctions, so each
//! becomes a family of radial two-point problems on the grid levels.
//! Modal coefficient tables reuse the `Field3` layout with `(j, k)` read as
//! the mode index `(k, l)`.

use crate::background::{BackgroundCoefficients, BackgroundSolution, RadialCoefficients};
use crate::error::{Error, Result};
use crate::grid::{radial_d1_stencil, radial_d2_stencil, BoxGrid, Fd, Field2, Field3, EE, EO, OE, OO};
use nalgebra::{DMatrix, DVector, Dyn, LU};
use crate::modal::ModalBasis;

/// Degeneracy threshold of the scalar closure for the shock trace.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Default backward-error bound of the radial solves.
pub const LINEAR_TOL: f64 = 1e-10;

pub struct Elliptic {
    pub basis: ModalBasis,
    pub radial: Vec<RadialCoefficients>,
    pub a0a1: f64,
    pub a3: f64,
    pub a4: f64,
    /// Backward-error bound accepted from each radial solve.
    pub linear_tol: f64,
}

/// `Pi` and its gradient `(d1 Pi, (1/y1) d2 Pi, d3 Pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiSolution {
    pub pi: Field3,
    pub grad: [Field3; 3],
    /// Largest gap between the second radial difference of `Pi` and the
    /// composed first differences at interior levels, which is what the
    /// divergence of `G - grad Pi` reduces to there.
    pub truncation: f64,
}

/// Div-curl solution on the grid and in modal form (`a` cos-cos, `b`
/// sin-cos, `c` cos-sin).
#[derive(Debug, Clone, PartialEq)]
pub struct DivCurl {
    pub v: [Field3; 3],
    pub modes: [Field3; 3],
    /// Largest divergence of the sources at interior levels.
    pub source_divergence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct M1Solution {
    pub m1: Field2,
    pub modes: Field2,
    /// Integral of `q5` over the face, removed before the solve.
    pub q5_integral: f64,
}

/// Cos-cos coefficients of the potential and of its radial derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub x: Field3,
    pub dx: Field3,
}

fn line(f: &Field3, n: usize) -> Vec<f64> {
    let fl = (f.n2 + 1) * (f.n3 + 1);
    (0..=f.n1).map(|i| f.data[i * fl + n]).collect()
}

fn put_line(f: &mut Field3, n: usize, v: &[f64]) {
    let fl = (f.n2 + 1) * (f.n3 + 1);
    for (i, x) in v.iter().enumerate() {
        f.data[i * fl + n] = *x;
    }
}

/// Fourth-order radial derivative of a line of nodal values.
pub fn radial_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    (0..=n)
        .map(|i| {
            let (b, w) = radial_d1_stencil(i, n);
            w.iter().enumerate().map(|(a, c)| c * v[b + a]).sum::<f64>() / (12.0 * h)
        })
        .collect()
}

fn radial_second(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    (0..=n)
        .map(|i| {
            let (b, w) = radial_d2_stencil(i, n);
            w.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(a, c)| c * v[b + a]).sum::<f64>() / (12.0 * h * h)
        })
        .collect()
}

/// Boundary row: `slope p' + value p = rhs`.
#[derive(Debug, Clone, Copy)]
struct Bc {
    slope: f64,
    value: f64,
}

const DIRICHLET: Bc = Bc { slope: 0.0, value: 1.0 };

/// Collocation of `a2 p'' + a1 p' + a0 p` at interior nodes with boundary
/// rows in place of the equation at both ends.
fn collocate(a2: &[f64], a1: &[f64], a0: &[f64], h: f64, ends: [Bc; 2]) -> Option<Radial> {
    let n = a0.len() - 1;
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let (b1, w1) = radial_d1_stencil(i, n);
        if i == 0 || i == n {
            let bc = ends[(i == n) as usize];
            for (a, c) in w1.iter().enumerate() {
                m[(i, b1 + a)] += bc.slope * c / (12.0 * h);
            }
            m[(i, i)] += bc.value;
            continue;
        }
        let (b2, w2) = radial_d2_stencil(i, n);
        for (a, c) in w2.iter().enumerate().filter(|(_, c)| **c != 0.0) {
            m[(i, b2 + a)] += a2[i] * c / (12.0 * h * h);
        }
        for (a, c) in w1.iter().enumerate() {
            m[(i, b1 + a)] += a1[i] * c / (12.0 * h);
        }
        m[(i, i)] += a0[i];
    }
    let lu = m.clone().lu();
    lu.is_invertible().then_some(Radial { m, lu })
}

struct Radial {
    m: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

impl Radial {
    /// Solution whose backward error is within `tol`.
    fn solve(&self, rhs: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
        let b = DVector::from_vec(rhs);
        let x = self.lu.solve(&b)?;
        let r = (&self.m * &x - &b).amax();
        let bound = tol * (self.m.amax() * x.amax() + b.amax());
        (x.iter().all(|v| v.is_finite()) && r <= bound).then(|| x.data.into())
    }
}

/// Dirichlet problem with zero end values.
fn dirichlet(a2: &[f64], a1: &[f64], a0: &[f64], f: &[f64], h: f64, tol: f64) -> Option<Vec<f64>> {
    let op = collocate(a2, a1, a0, h, [DIRICHLET, DIRICHLET])?;
    let mut rhs = f.to_vec();
    let n = rhs.len() - 1;
    rhs[0] = 0.0;
    rhs[n] = 0.0;
    op.solve(rhs, tol)
}

impl Elliptic {
    pub fn new(grid: BoxGrid, kmax: (usize, usize), bg: &BackgroundSolution, coef: &BackgroundCoefficients) -> Result<Self> {
        let radial = (0..=grid.n1).map(|i| coef.radial(bg, grid.y1(i))).collect::<Result<Vec<_>>>()?;
        Ok(Elliptic {
            basis: ModalBasis::new(grid, kmax.0, kmax.1),
            radial,
            a0a1: coef.a0 * coef.a1,
            a3: coef.a3,
            a4: coef.a4,
            linear_tol: LINEAR_TOL,
        })
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.basis.grid
    }

    /// Level-by-level projection of a 3D field.
    pub fn forward3(&self, f: &Field3, sym: crate::grid::Sym) -> Field3 {
        let g = self.grid();
        let fl = g.face_len();
        let mut out = g.zeros3();
        for i in 0..=g.n1 {
            let c = self.basis.forward(&f.face(i), sym);
            out.data[i * fl..(i + 1) * fl].copy_from_slice(&c.data);
        }
        out
    }

    pub fn inverse3(&self, c: &Field3, sym: crate::grid::Sym) -> Field3 {
        let g = self.grid();
        let fl = g.face_len();
        let mut out = g.zeros3();
        for i in 0..=g.n1 {
            let f = self.basis.inverse(&c.face(i), sym);
            out.data[i * fl..(i + 1) * fl].copy_from_slice(&f.data);
        }
        out
    }

    fn modes(&self) -> impl Iterator<Item = (usize, usize, usize, f64, f64)> + '_ {
        let g = *self.grid();
        let (k2, k3) = self.basis.kmax();
        (0..=k2).flat_map(move |k| (0..=k3).map(move |l| (k, l))).map(move |(k, l)| {
            (k, l, g.fidx(k, l), self.basis.kappa(k), self.basis.lambda(l))
        })
    }

    /// `Pi'' + Pi'/y - (1/y^2) d2^2 Pi - d3^2 Pi = d1 G1 + G1/y + (1/y) d2 G2 + d3 G3`
    /// with `Pi = 0` on the boundary.
    pub fn solve_pi(&self, g: [&Field3; 3]) -> Result<PiSolution> {
        let grid = *self.grid();
        let h = grid.h1();
        let y: Vec<f64> = (0..=grid.n1).map(|i| grid.y1(i)).collect();
        let c1 = self.forward3(g[0], OO);
        let c2 = self.forward3(g[1], EO);
        let c3 = self.forward3(g[2], OE);
        let mut pi_hat = grid.zeros3();
        let mut d1_hat = grid.zeros3();
        let mut truncation = 0.0f64;
        let ones = vec![1.0; y.len()];
        for (k, l, n, kap, lam) in self.modes() {
            if !self.basis.active(OO, k, l) {
                continue;
            }
            let g1 = line(&c1, n);
            let g2 = line(&c2, n);
            let g3 = line(&c3, n);
            let dg1 = radial_derivative(&g1, h);
            let f: Vec<f64> = (0..=grid.n1)
                .map(|i| (dg1[i] + g1[i] / y[i] - kap / y[i] * g2[i] - lam * g3[i]) * y[i])
                .collect();
            // multiplied through by y: y Pi'' + Pi' - (kap^2/y + lam^2 y) Pi = y f
            let kk: Vec<f64> = y.iter().map(|&yy| -(kap * kap / yy + lam * lam * yy)).collect();
            let p = dirichlet(&y, &ones, &kk, &f, h, self.linear_tol).ok_or_else(|| {
                Error::LinearSolveFailure(format!("Pi mode ({k}, {l})"))
            })?;
            let dp = radial_derivative(&p, h);
            let ddp = radial_derivative(&dp, h);
            let d2p = radial_second(&p, h);
            for i in 1..grid.n1 {
                truncation = truncation.max((d2p[i] - ddp[i]).abs());
            }
            put_line(&mut pi_hat, n, &p);
            put_line(&mut d1_hat, n, &dp);
        }
        let mut g2_hat = grid.zeros3();
        let mut g3_hat = grid.zeros3();
        for (_, _, n, kap, lam) in self.modes() {
            for i in 0..=grid.n1 {
                let m = i * grid.face_len() + n;
                g2_hat.data[m] = kap * pi_hat.data[m] / y[i];
                g3_hat.data[m] = lam * pi_hat.data[m];
            }
        }
        Ok(PiSolution {
            pi: self.inverse3(&pi_hat, OO),
            grad: [self.inverse3(&d1_hat, OO), self.inverse3(&g2_hat, EO), self.inverse3(&g3_hat, OE)],
            truncation,
        })
    }

    /// Divergence-free `Vdot` with the given curl (`G~`) and vanishing normal
    /// components. Fails when the divergence of `G~` at interior levels
    /// exceeds ten times `tol`.
    pub fn solve_div_curl(&self, gt: [&Field3; 3], tol: f64) -> Result<DivCurl> {
        let grid = *self.grid();
        let h = grid.h1();
        let y: Vec<f64> = (0..=grid.n1).map(|i| grid.y1(i)).collect();
        let c1 = self.forward3(gt[0], OO);
        let c2 = self.forward3(gt[1], EO);
        let c3 = self.forward3(gt[2], OE);
        let mut a_hat = grid.zeros3();
        let mut b_hat = grid.zeros3();
        let mut c_hat = grid.zeros3();
        let mut div = 0.0f64;
        for (k, l, n, kap, lam) in self.modes() {
            let g1 = line(&c1, n);
            let g2 = line(&c2, n);
            let g3 = line(&c3, n);
            let dg1 = radial_derivative(&g1, h);
            for i in 1..grid.n1 {
                div = div.max((dg1[i] + g1[i] / y[i] - kap / y[i] * g2[i] - lam * g3[i]).abs());
            }
            if k == 0 && l == 0 {
                continue;
            }
            let ll = |yy: f64| kap * kap + lam * lam * yy * yy;
            // (c p')' - p/y = f with c = y/L(y)
            let c: Vec<f64> = y.iter().map(|&yy| yy / ll(yy)).collect();
            let dc: Vec<f64> = y.iter().map(|&yy| (kap * kap - lam * lam * yy * yy) / ll(yy).powi(2)).collect();
            let kk: Vec<f64> = y.iter().map(|&yy| -1.0 / yy).collect();
            let f: Vec<f64> = (0..=grid.n1)
                .map(|i| {
                    let (yy, l2) = (y[i], ll(y[i]));
                    yy * yy / l2 * (lam * g2[i] - kap / yy * g3[i] + 2.0 * lam * kap * g1[i] / l2)
                })
                .collect();
            let p = dirichlet(&c, &dc, &kk, &f, h, self.linear_tol).ok_or_else(|| {
                Error::LinearSolveFailure(format!("div-curl mode ({k}, {l})"))
            })?;
            let dp = radial_derivative(&p, h);
            let (mut a, mut b, mut c) = (vec![0.0; y.len()], vec![0.0; y.len()], vec![0.0; y.len()]);
            for i in 0..=grid.n1 {
                let (yy, l2) = (y[i], ll(y[i]));
                a[i] = p[i] / yy;
                b[i] = (lam * yy * yy * g1[i] - kap * dp[i]) / l2;
                c[i] = -yy * (kap * g1[i] + lam * dp[i]) / l2;
            }
            put_line(&mut a_hat, n, &a);
            put_line(&mut b_hat, n, &b);
            put_line(&mut c_hat, n, &c);
        }
        let limit = 10.0 * tol;
        if div > limit {
            return Err(Error::SolvabilityViolation { residual: div, limit });
        }
        Ok(DivCurl {
            v: [self.inverse3(&a_hat, EE), self.inverse3(&b_hat, OE), self.inverse3(&c_hat, EO)],
            modes: [a_hat, b_hat, c_hat],
            source_divergence: div,
        })
    }

    /// Largest modal divergence `d1 G1 + G1/y + (1/y) d2 G2 + d3 G3` at
    /// interior levels.
    pub fn divergence(&self, g: [&Field3; 3]) -> f64 {
        let grid = *self.grid();
        let h = grid.h1();
        let c1 = self.forward3(g[0], OO);
        let c2 = self.forward3(g[1], EO);
        let c3 = self.forward3(g[2], OE);
        let mut div = 0.0f64;
        for (_, _, n, kap, lam) in self.modes() {
            let g1 = line(&c1, n);
            let dg1 = radial_derivative(&g1, h);
            for i in 1..grid.n1 {
                let y = grid.y1(i);
                let v = dg1[i] + g1[i] / y - kap / y * c2.data[i * grid.face_len() + n] - lam * c3.data[i * grid.face_len() + n];
                div = div.max(v.abs());
            }
        }
        div
    }

    /// `(1/r_s^2 d2^2 + d3^2) m1 = a3 q5`, Neumann walls, zero mean.
    pub fn solve_m1(&self, q5: &Field2) -> M1Solution {
        let grid = *self.grid();
        let rs = grid.r_s;
        let q = self.basis.forward(q5, EE);
        let mut m = grid.zeros2();
        for (k, l, n, kap, lam) in self.modes() {
            if k == 0 && l == 0 {
                continue;
            }
            m.data[n] = -self.a3 * q.data[n] / (kap * kap / (rs * rs) + lam * lam);
        }
        M1Solution { m1: self.basis.inverse(&m, EE), modes: m, q5_integral: grid.integrate2(q5) }
    }

    /// One cos-cos mode of the potential problem. Returns `(X, X')`.
    #[allow(clippy::too_many_arguments)]
    pub fn potential_mode(&self, k: usize, l: usize, kap: f64, lam: f64, g: &[f64], m1: f64, m2: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let grid = self.grid();
        let n = grid.n1;
        let h = grid.h1();
        let (mut a2, mut a1, mut a0) = (vec![0.0; n + 1], vec![0.0; n + 1], vec![0.0; n + 1]);
        let mut rhs_g = g.to_vec();
        let mut rhs_d = vec![0.0; n + 1];
        for i in 0..=n {
            let rc = &self.radial[i];
            let y = grid.y1(i);
            a2[i] = rc.d1;
            a1[i] = 1.0 / y + rc.d2;
            a0[i] = -(kap * kap / (y * y) + lam * lam);
            rhs_d[i] = self.a0a1 * rc.d4;
        }
        let fail = |what: &str| Error::ModalSolveFailure { k, l, reason: format!("singular {what} system") };
        let op = collocate(&a2, &a1, &a0, h, [Bc { slope: 1.0, value: -self.a4 }, Bc { slope: 1.0, value: 0.0 }])
            .ok_or_else(|| fail("radial"))?;
        rhs_g[0] = m1;
        rhs_g[n] = m2;
        rhs_d[0] = 0.0;
        rhs_d[n] = 0.0;
        let rhs_g = op.solve(rhs_g, self.linear_tol).ok_or_else(|| fail("data"))?;
        let rhs_d = op.solve(rhs_d, self.linear_tol).ok_or_else(|| fail("trace"))?;
        let coef = 1.0 - rhs_d[0];
        if coef.abs() < CLOSURE_TOL {
            return Err(Error::SuperpositionDegenerate { k, l, coef });
        }
        let x0 = rhs_g[0] / coef;
        let x: Vec<f64> = (0..=n).map(|i| rhs_g[i] + x0 * rhs_d[i]).collect();
        let mut dx = radial_derivative(&x, h);
        dx[0] = self.a4 * x[0] + m1;
        dx[n] = m2;
        Ok((x, dx))
    }

    /// Potential from the cos-cos sources `G5`, `m1` and `m2`.
    pub fn solve_potential(&self, g5: &Field3, m1_modes: &Field2, m2: &Field2) -> Result<Potential> {
        let grid = *self.grid();
        let gh = self.forward3(g5, EE);
        let m2h = self.basis.forward(m2, EE);
        let mut x = grid.zeros3();
        let mut dx = grid.zeros3();
        for (k, l, n, kap, lam) in self.modes() {
            let (xx, dd) = self.potential_mode(k, l, kap, lam, &line(&gh, n), m1_modes.data[n], m2h.data[n])?;
            put_line(&mut x, n, &xx);
            put_line(&mut dx, n, &dd);
        }
        Ok(Potential { x, dx })
    }

    /// `V1 = Vdot1 + d1 phi - (d3/a3) d1 phi(r_s)`, `V2 = Vdot2 + (1/y1) d2 phi`,
    /// `V3 = Vdot3 + d3 phi`.
    pub fn assemble_velocity(&self, phi: &Potential, vdot: &DivCurl) -> [Field3; 3] {
        let grid = *self.grid();
        let fl = grid.face_len();
        let mut c1 = vdot.modes[0].clone();
        let mut c2 = vdot.modes[1].clone();
        let mut c3 = vdot.modes[2].clone();
        for (_, _, n, kap, lam) in self.modes() {
            let dx0 = phi.dx.data[n];
            for i in 0..=grid.n1 {
                let m = i * fl + n;
                let y = grid.y1(i);
                c1.data[m] += phi.dx.data[m] - self.radial[i].d3 / self.a3 * dx0;
                c2.data[m] += -kap * phi.x.data[m] / y;
                c3.data[m] += -lam * phi.x.data[m];
            }
        }
        [self.inverse3(&c1, EE), self.inverse3(&c2, OE), self.inverse3(&c3, EO)]
    }

    /// Grid values of the potential.
    pub fn potential_values(&self, phi: &Potential) -> Field3 {
        self.inverse3(&phi.x, EE)
    }

    /// `d1` of a cos-cos coefficient table, back on the grid.
    pub fn radial_derivative_ee(&self, fd: &Fd, c: &Field3) -> Field3 {
        self.inverse3(&fd.d1(c), EE)
    }
}
