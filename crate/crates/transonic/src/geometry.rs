//! Shock-fitted coordinates.
//!
//! The subsonic region `r_s + V6(y') < r < r2` maps onto the box
//! `r_s < y1 < r2` by a radial stretch; `D0` is the physical radius and
//! `D1..D3` are `d/dr`, `(1/r) d/dtheta` and `d/dx3` written in box
//! coordinates.

use crate::background::BackgroundSolution;
use crate::error::{Error, Result};
use crate::grid::{BoxGrid, Fd, Field2, Field3, Sym, EE, EO, OE};

/// Symmetry of the shock displacement and of its two gradient tables.
pub const V6_SYM: Sym = EE;
pub const DV6_SYM: [Sym; 2] = [OE, EO];

/// Shock displacement `V6 = xi - r_s` with gradient tables kept beside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockSurface {
    pub v6: Field2,
    pub dv6: [Field2; 2],
}

impl ShockSurface {
    pub fn flat(grid: &BoxGrid) -> Self {
        ShockSurface { v6: grid.zeros2(), dv6: [grid.zeros2(), grid.zeros2()] }
    }

    /// Gradient tables by finite differences of `v6`.
    pub fn from_values(fd: &Fd, v6: Field2) -> Self {
        let dv6 = [fd.d2f(&v6, V6_SYM), fd.d3f(&v6, V6_SYM)];
        ShockSurface { v6, dv6 }
    }

    /// `theta, x3, xi` rows.
    pub fn table(&self, grid: &BoxGrid) -> String {
        let mut out = String::from("theta_rad,x3,xi\n");
        for j in 0..=grid.n2 {
            for k in 0..=grid.n3 {
                out.push_str(&format!("{},{},{}\n", grid.y2(j), grid.y3(k), grid.r_s + self.v6.at(j, k)));
            }
        }
        out
    }
}

/// Physical radius of the box point `y1` above a shock displaced by `v6`.
pub fn to_physical(y1: f64, v6: f64, r_s: f64, r2: f64) -> f64 {
    y1 + (r2 - y1) / (r2 - r_s) * v6
}

/// Box coordinate of the physical radius `r`.
pub fn to_fixed(r: f64, v6: f64, r_s: f64, r2: f64) -> Result<f64> {
    let span = r2 - r_s - v6;
    if !(span > 0.0) {
        return Err(Error::OutOfDomain(format!("shock at {} reaches the exit {r2}", r_s + v6)));
    }
    let tol = 1e-12 * r2;
    if r < r_s + v6 - tol || r > r2 + tol {
        return Err(Error::OutOfDomain(format!("r = {r} outside ({}, {r2})", r_s + v6)));
    }
    Ok((r - r_s - v6) / span * (r2 - r_s) + r_s)
}

/// One of the transformed derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DOp {
    D1,
    D2,
    D3,
}

/// Node tables of the transform for one shock surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub fd: Fd,
    /// Physical radius `D0` at every node.
    pub d0: Field3,
    /// `(r2 - r_s)/(r2 - r_s - V6)`.
    pub a: Field2,
    /// `(y1 - r2) d2 V6 / (r2 - r_s - V6)` and the `y3` analogue.
    pub s2: Field3,
    pub s3: Field3,
}

impl Metric {
    /// Fails when the shock leaves `(r1, r2)`.
    pub fn new(fd: Fd, surface: &ShockSurface, r1: f64) -> Result<Self> {
        let g = fd.grid;
        let (rs, r2) = (g.r_s, g.r2);
        let mut a = g.zeros2();
        for (n, &v6) in surface.v6.data.iter().enumerate() {
            let xi = rs + v6;
            if !(xi > r1 && xi < r2) {
                let (j, k) = (n / (g.n3 + 1), n % (g.n3 + 1));
                return Err(Error::OutOfDomain(format!(
                    "shock radius {xi} at ({}, {}) outside ({r1}, {r2})",
                    g.y2(j),
                    g.y3(k)
                )));
            }
            a.data[n] = (r2 - rs) / (r2 - xi);
        }
        let fl = g.face_len();
        let mut d0 = g.zeros3();
        let mut s2 = g.zeros3();
        let mut s3 = g.zeros3();
        for i in 0..=g.n1 {
            let y1 = g.y1(i);
            for n in 0..fl {
                let v6 = surface.v6.data[n];
                let span = r2 - rs - v6;
                let m = i * fl + n;
                d0.data[m] = to_physical(y1, v6, rs, r2);
                s2.data[m] = (y1 - r2) * surface.dv6[0].data[n] / span;
                s3.data[m] = (y1 - r2) * surface.dv6[1].data[n] / span;
            }
        }
        Ok(Metric { fd, d0, a, s2, s3 })
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.fd.grid
    }

    /// `D_op f` for a field of symmetry `sym`.
    pub fn apply(&self, op: DOp, f: &Field3, sym: Sym) -> Field3 {
        let d1 = self.fd.d1(f);
        match op {
            DOp::D1 => self.d1_from(&d1),
            DOp::D2 => self.d2_from(&self.fd.d2(f, sym), &d1),
            DOp::D3 => self.d3_from(&self.fd.d3(f, sym), &d1),
        }
    }

    /// `[D1 f, D2 f, D3 f]` sharing one radial difference.
    pub fn grad(&self, f: &Field3, sym: Sym) -> [Field3; 3] {
        let d1 = self.fd.d1(f);
        [self.d1_from(&d1), self.d2_from(&self.fd.d2(f, sym), &d1), self.d3_from(&self.fd.d3(f, sym), &d1)]
    }

    fn d1_from(&self, d1: &Field3) -> Field3 {
        let fl = self.fd.grid.face_len();
        let mut out = d1.clone();
        for (m, v) in out.data.iter_mut().enumerate() {
            *v *= self.a.data[m % fl];
        }
        out
    }

    fn d2_from(&self, d2: &Field3, d1: &Field3) -> Field3 {
        let mut out = d2.clone();
        for (m, v) in out.data.iter_mut().enumerate() {
            *v = (*v + self.s2.data[m] * d1.data[m]) / self.d0.data[m];
        }
        out
    }

    fn d3_from(&self, d3: &Field3, d1: &Field3) -> Field3 {
        let mut out = d3.clone();
        for (m, v) in out.data.iter_mut().enumerate() {
            *v += self.s3.data[m] * d1.data[m];
        }
        out
    }
}

/// Subsonic background evaluated at the physical radius `D0` of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundOnMetric {
    pub u: Field3,
    pub du: Field3,
    pub c2: Field3,
    pub rho: Field3,
    pub p: Field3,
}

impl Metric {
    pub fn background(&self, bg: &BackgroundSolution) -> Result<BackgroundOnMetric> {
        let g = self.grid();
        let mut out = BackgroundOnMetric { u: g.zeros3(), du: g.zeros3(), c2: g.zeros3(), rho: g.zeros3(), p: g.zeros3() };
        let mut last = (f64::NAN, [0.0; 5]);
        for (n, &r) in self.d0.data.iter().enumerate() {
            if r != last.0 {
                let s = bg.plus(r)?;
                last = (r, [s.u, s.u_prime(), s.c2, s.rho, s.p]);
            }
            let [u, du, c2, rho, p] = last.1;
            out.u.data[n] = u;
            out.du.data[n] = du;
            out.c2.data[n] = c2;
            out.rho.data[n] = rho;
            out.p.data[n] = p;
        }
        Ok(out)
    }
}
