//! Cross-section eigenfunction expansions on wall-inclusive nodes.
//!
//! Even fields expand in `cos(kappa (y2 + theta0)) cos(lambda (y3 + 1))` with
//! `kappa = k pi / (2 theta0)`, `lambda = l pi / 2`; odd directions use `sin`.
//! Coefficient arrays share the `Field2` layout, indexed `(k, l)`.

use crate::grid::{BoxGrid, Field2, Parity, Sym};

/// Dense forward/inverse matrices for one direction.
#[derive(Debug, Clone, PartialEq)]
struct Line {
    n: usize,
    kmax: usize,
    // fwd[k * (n+1) + j], inv[j * (n+1) + k]
    fwd: [Vec<f64>; 2],
    inv: [Vec<f64>; 2],
}

fn pidx(p: Parity) -> usize {
    match p {
        Parity::Even => 0,
        Parity::Odd => 1,
    }
}

impl Line {
    fn new(n: usize, kmax: usize) -> Self {
        let m = n + 1;
        let mut fwd = [vec![0.0; m * m], vec![0.0; m * m]];
        let mut inv = [vec![0.0; m * m], vec![0.0; m * m]];
        let pi = std::f64::consts::PI;
        for k in 0..=n.min(kmax) {
            let norm = if k == 0 || k == n { n as f64 } else { n as f64 / 2.0 };
            for j in 0..=n {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let x = pi * (k * j) as f64 / n as f64;
                let (c, s) = (x.cos(), if j == 0 || j == n { 0.0 } else { x.sin() });
                fwd[0][k * m + j] = w * c / norm;
                inv[0][j * m + k] = c;
                if k > 0 && k < n {
                    fwd[1][k * m + j] = w * s / norm;
                    inv[1][j * m + k] = s;
                }
            }
        }
        Line { n, kmax: kmax.min(n), fwd, inv }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalBasis {
    pub grid: BoxGrid,
    l2: Line,
    l3: Line,
}

impl ModalBasis {
    /// Keeps indices `k <= kmax2`, `l <= kmax3`.
    pub fn new(grid: BoxGrid, kmax2: usize, kmax3: usize) -> Self {
        ModalBasis { grid, l2: Line::new(grid.n2, kmax2), l3: Line::new(grid.n3, kmax3) }
    }

    pub fn kmax(&self) -> (usize, usize) {
        (self.l2.kmax, self.l3.kmax)
    }

    pub fn kappa(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / (2.0 * self.grid.theta0)
    }

    pub fn lambda(&self, l: usize) -> f64 {
        l as f64 * std::f64::consts::PI / 2.0
    }

    /// Whether `(k, l)` carries a basis function of the given symmetry.
    pub fn active(&self, sym: Sym, k: usize, l: usize) -> bool {
        let ok = |p: Parity, i: usize, line: &Line| {
            i <= line.kmax && (p == Parity::Even || (i > 0 && i < line.n))
        };
        ok(sym.0, k, &self.l2) && ok(sym.1, l, &self.l3)
    }

    fn apply(&self, f: &Field2, m2: &[f64], m3: &[f64], kmax: (usize, usize), fwd: bool) -> Field2 {
        let (n2, n3) = (self.grid.n2, self.grid.n3);
        let (a2, a3) = (n2 + 1, n3 + 1);
        // along y3
        let mut t = vec![0.0; a2 * a3];
        for j in 0..a2 {
            for l in 0..a3 {
                if fwd && l > kmax.1 {
                    continue;
                }
                let mut s = 0.0;
                for k in 0..a3 {
                    if !fwd && k > kmax.1 {
                        continue;
                    }
                    s += m3[l * a3 + k] * f.data[j * a3 + k];
                }
                t[j * a3 + l] = s;
            }
        }
        let mut out = Field2 { n2, n3, data: vec![0.0; a2 * a3] };
        for k in 0..a2 {
            if fwd && k > kmax.0 {
                continue;
            }
            for j in 0..a2 {
                if !fwd && j > kmax.0 {
                    continue;
                }
                let w = m2[k * a2 + j];
                if w == 0.0 {
                    continue;
                }
                for l in 0..a3 {
                    out.data[k * a3 + l] += w * t[j * a3 + l];
                }
            }
        }
        out
    }

    /// Projection onto the truncated basis of symmetry `sym`.
    pub fn forward(&self, f: &Field2, sym: Sym) -> Field2 {
        self.apply(f, &self.l2.fwd[pidx(sym.0)], &self.l3.fwd[pidx(sym.1)], self.kmax(), true)
    }

    /// Synthesis from coefficients (indices above the truncation are ignored).
    pub fn inverse(&self, c: &Field2, sym: Sym) -> Field2 {
        self.apply(c, &self.l2.inv[pidx(sym.0)], &self.l3.inv[pidx(sym.1)], self.kmax(), false)
    }
}
