//! Tensor grids on the box `(r_s, r2) x (-theta0, theta0) x (-1, 1)`, gridded
//! fields, finite differences and interpolation.
//!
//! Cross-section stencils read ghost values by even or odd reflection about
//! the walls, which is how the slip and compatibility conditions enter every
//! derivative.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Wall parity of a field in `(y2, y3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sym(pub Parity, pub Parity);

pub const EE: Sym = Sym(Parity::Even, Parity::Even);
pub const OE: Sym = Sym(Parity::Odd, Parity::Even);
pub const EO: Sym = Sym(Parity::Even, Parity::Odd);
pub const OO: Sym = Sym(Parity::Odd, Parity::Odd);

impl Sym {
    pub fn times(self, o: Sym) -> Sym {
        Sym(self.0.times(o.0), self.1.times(o.1))
    }
    pub fn d2(self) -> Sym {
        Sym(self.0.flip(), self.1)
    }
    pub fn d3(self) -> Sym {
        Sym(self.0, self.1.flip())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    pub r_s: f64,
    pub r2: f64,
    pub theta0: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl BoxGrid {
    pub fn new(r_s: f64, r2: f64, theta0: f64, n1: usize, n2: usize, n3: usize) -> Self {
        assert!(r_s < r2, "box needs r_s < r2");
        assert!(n1 >= 4 && n2 >= 4 && n3 >= 4, "grid needs at least 4 intervals per direction");
        BoxGrid { r_s, r2, theta0, n1, n2, n3 }
    }
    pub fn h1(&self) -> f64 {
        (self.r2 - self.r_s) / self.n1 as f64
    }
    pub fn h2(&self) -> f64 {
        2.0 * self.theta0 / self.n2 as f64
    }
    pub fn h3(&self) -> f64 {
        2.0 / self.n3 as f64
    }
    pub fn y1(&self, i: usize) -> f64 {
        if i == self.n1 {
            self.r2
        } else {
            self.r_s + i as f64 * self.h1()
        }
    }
    pub fn y2(&self, j: usize) -> f64 {
        if j == self.n2 {
            self.theta0
        } else {
            -self.theta0 + j as f64 * self.h2()
        }
    }
    pub fn y3(&self, k: usize) -> f64 {
        if k == self.n3 {
            1.0
        } else {
            -1.0 + k as f64 * self.h3()
        }
    }
    pub fn face_len(&self) -> usize {
        (self.n2 + 1) * (self.n3 + 1)
    }
    pub fn len(&self) -> usize {
        (self.n1 + 1) * self.face_len()
    }
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * (self.n2 + 1) + j) * (self.n3 + 1) + k
    }
    pub fn fidx(&self, j: usize, k: usize) -> usize {
        j * (self.n3 + 1) + k
    }
    /// Inverse of `idx`.
    pub fn ijk(&self, n: usize) -> (usize, usize, usize) {
        let k = n % (self.n3 + 1);
        let rest = n / (self.n3 + 1);
        (rest / (self.n2 + 1), rest % (self.n2 + 1), k)
    }
    pub fn zeros3(&self) -> Field3 {
        Field3 { n1: self.n1, n2: self.n2, n3: self.n3, data: vec![0.0; self.len()] }
    }
    pub fn zeros2(&self) -> Field2 {
        Field2 { n2: self.n2, n3: self.n3, data: vec![0.0; self.face_len()] }
    }
    pub fn field3(&self, f: impl Fn(f64, f64, f64) -> f64) -> Field3 {
        let mut out = self.zeros3();
        for i in 0..=self.n1 {
            for j in 0..=self.n2 {
                for k in 0..=self.n3 {
                    out.data[self.idx(i, j, k)] = f(self.y1(i), self.y2(j), self.y3(k));
                }
            }
        }
        out
    }
    pub fn field2(&self, f: impl Fn(f64, f64) -> f64) -> Field2 {
        let mut out = self.zeros2();
        for j in 0..=self.n2 {
            for k in 0..=self.n3 {
                out.data[self.fidx(j, k)] = f(self.y2(j), self.y3(k));
            }
        }
        out
    }
    /// Trapezoid weights on the cross-section.
    pub fn face_weight(&self, j: usize, k: usize) -> f64 {
        let w2 = if j == 0 || j == self.n2 { 0.5 } else { 1.0 };
        let w3 = if k == 0 || k == self.n3 { 0.5 } else { 1.0 };
        w2 * w3 * self.h2() * self.h3()
    }
    pub fn integrate2(&self, f: &Field2) -> f64 {
        let mut s = 0.0;
        for j in 0..=self.n2 {
            for k in 0..=self.n3 {
                s += self.face_weight(j, k) * f.data[self.fidx(j, k)];
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field3 {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    pub n2: usize,
    pub n3: usize,
    pub data: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl Field3 {
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * (self.n2 + 1) + j) * (self.n3 + 1) + k]
    }
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * (self.n2 + 1) + j) * (self.n3 + 1) + k] = v;
    }
    pub fn face(&self, i: usize) -> Field2 {
        let fl = (self.n2 + 1) * (self.n3 + 1);
        Field2 { n2: self.n2, n3: self.n3, data: self.data[i * fl..(i + 1) * fl].to_vec() }
    }
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field3 {
        Field3 { data: self.data.iter().map(|&x| f(x)).collect(), ..*self }
    }
    pub fn zip(&self, o: &Field3, f: impl Fn(f64, f64) -> f64) -> Field3 {
        Field3 { data: self.data.iter().zip(&o.data).map(|(&a, &b)| f(a, b)).collect(), ..*self }
    }
    pub fn sub(&self, o: &Field3) -> Field3 {
        self.zip(o, |a, b| a - b)
    }
    pub fn add(&self, o: &Field3) -> Field3 {
        self.zip(o, |a, b| a + b)
    }
    pub fn scale(&self, s: f64) -> Field3 {
        self.map(|a| a * s)
    }
}

impl Field2 {
    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.data[j * (self.n3 + 1) + k]
    }
    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        self.data[j * (self.n3 + 1) + k] = v;
    }
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2 {
        Field2 { data: self.data.iter().map(|&x| f(x)).collect(), ..*self }
    }
    pub fn zip(&self, o: &Field2, f: impl Fn(f64, f64) -> f64) -> Field2 {
        Field2 { data: self.data.iter().zip(&o.data).map(|(&a, &b)| f(a, b)).collect(), ..*self }
    }
    pub fn sub(&self, o: &Field2) -> Field2 {
        self.zip(o, |a, b| a - b)
    }
    pub fn add(&self, o: &Field2) -> Field2 {
        self.zip(o, |a, b| a + b)
    }
    pub fn scale(&self, s: f64) -> Field2 {
        self.map(|a| a * s)
    }
    /// Broadcast along `y1`.
    pub fn extrude(&self, n1: usize) -> Field3 {
        let mut data = Vec::with_capacity((n1 + 1) * self.data.len());
        for _ in 0..=n1 {
            data.extend_from_slice(&self.data);
        }
        Field3 { n1, n2: self.n2, n3: self.n3, data }
    }
}

/// Value of a line with reflected ghosts.
#[inline]
fn ghost(src: &[f64], off: usize, stride: usize, n: usize, j: isize, par: Parity) -> f64 {
    let nn = n as isize;
    if j < 0 {
        par.sign() * src[off + (-j) as usize * stride]
    } else if j > nn {
        par.sign() * src[off + (2 * nn - j) as usize * stride]
    } else {
        src[off + j as usize * stride]
    }
}

/// Centered derivative of order `deriv` (1 or 2) and accuracy `order` (2 or 4)
/// along a strided line with parity ghosts.
fn line_centered(
    src: &[f64],
    dst: &mut [f64],
    off: usize,
    stride: usize,
    n: usize,
    h: f64,
    par: Parity,
    order: usize,
    deriv: usize,
) {
    for j in 0..=n {
        let g = |d: isize| ghost(src, off, stride, n, j as isize + d, par);
        let v = match (deriv, order) {
            (1, 2) => (g(1) - g(-1)) / (2.0 * h),
            (1, _) => (-g(2) + 8.0 * g(1) - 8.0 * g(-1) + g(-2)) / (12.0 * h),
            (2, 2) => (g(1) - 2.0 * g(0) + g(-1)) / (h * h),
            (_, _) => (-g(2) + 16.0 * g(1) - 30.0 * g(0) + 16.0 * g(-1) - g(-2)) / (12.0 * h * h),
        };
        dst[off + j * stride] = v;
    }
}

/// Radial first-derivative weights at node `i` of `0..=n`, times `12 h`.
/// Five points, fourth order, shifted inward next to the faces.
pub fn radial_d1_stencil(i: usize, n: usize) -> (usize, [f64; 5]) {
    match i {
        0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
        1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
        _ if i == n - 1 => (n - 4, [-1.0, 6.0, -18.0, 10.0, 3.0]),
        _ if i == n => (n - 4, [3.0, -16.0, 36.0, -48.0, 25.0]),
        _ => (i - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
    }
}

/// Radial second-derivative weights at node `i`, times `12 h^2`; six points
/// next to the faces, five inside.
pub fn radial_d2_stencil(i: usize, n: usize) -> (usize, [f64; 6]) {
    match i {
        0 => (0, [45.0, -154.0, 214.0, -156.0, 61.0, -10.0]),
        1 => (0, [10.0, -15.0, -4.0, 14.0, -6.0, 1.0]),
        _ if i == n - 1 => (n - 5, [1.0, -6.0, 14.0, -4.0, -15.0, 10.0]),
        _ if i == n => (n - 5, [-10.0, 61.0, -156.0, 214.0, -154.0, 45.0]),
        _ => (i - 2, [-1.0, 16.0, -30.0, 16.0, -1.0, 0.0]),
    }
}

/// Radial derivative along a strided line, one-sided at both faces.
fn line_radial(src: &[f64], dst: &mut [f64], off: usize, stride: usize, n: usize, h: f64, order: usize) {
    let f = |i: usize| src[off + i * stride];
    if order == 2 || n < 5 {
        dst[off] = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
        for i in 1..n {
            dst[off + i * stride] = (f(i + 1) - f(i - 1)) / (2.0 * h);
        }
        dst[off + n * stride] = (3.0 * f(n) - 4.0 * f(n - 1) + f(n - 2)) / (2.0 * h);
        return;
    }
    for i in 0..=n {
        let (b, w) = radial_d1_stencil(i, n);
        dst[off + i * stride] = w.iter().enumerate().map(|(a, c)| c * f(b + a)).sum::<f64>() / (12.0 * h);
    }
}

/// Finite-difference operators with a fixed accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fd {
    pub grid: BoxGrid,
    pub order: usize,
}

impl Fd {
    pub fn new(grid: BoxGrid, order: usize) -> Self {
        assert!(order == 2 || order == 4, "difference order must be 2 or 4");
        Fd { grid, order }
    }

    pub fn d1(&self, f: &Field3) -> Field3 {
        let g = &self.grid;
        let mut out = g.zeros3();
        let fl = g.face_len();
        for off in 0..fl {
            line_radial(&f.data, &mut out.data, off, fl, g.n1, g.h1(), self.order);
        }
        out
    }

    /// Plain `d/dy2` (no metric factor).
    pub fn d2(&self, f: &Field3, sym: Sym) -> Field3 {
        self.cross(f, sym, 2, 1)
    }

    pub fn d3(&self, f: &Field3, sym: Sym) -> Field3 {
        self.cross(f, sym, 3, 1)
    }

    pub fn dd2(&self, f: &Field3, sym: Sym) -> Field3 {
        self.cross(f, sym, 2, 2)
    }

    pub fn dd3(&self, f: &Field3, sym: Sym) -> Field3 {
        self.cross(f, sym, 3, 2)
    }

    fn cross(&self, f: &Field3, sym: Sym, dir: usize, deriv: usize) -> Field3 {
        let g = &self.grid;
        let mut out = g.zeros3();
        for i in 0..=g.n1 {
            if dir == 2 {
                for k in 0..=g.n3 {
                    line_centered(&f.data, &mut out.data, g.idx(i, 0, k), g.n3 + 1, g.n2, g.h2(), sym.0, self.order, deriv);
                }
            } else {
                for j in 0..=g.n2 {
                    line_centered(&f.data, &mut out.data, g.idx(i, j, 0), 1, g.n3, g.h3(), sym.1, self.order, deriv);
                }
            }
        }
        out
    }

    pub fn f2(&self, f: &Field2, sym: Sym, dir: usize, deriv: usize) -> Field2 {
        let g = &self.grid;
        let mut out = g.zeros2();
        if dir == 2 {
            for k in 0..=g.n3 {
                line_centered(&f.data, &mut out.data, k, g.n3 + 1, g.n2, g.h2(), sym.0, self.order, deriv);
            }
        } else {
            for j in 0..=g.n2 {
                line_centered(&f.data, &mut out.data, g.fidx(j, 0), 1, g.n3, g.h3(), sym.1, self.order, deriv);
            }
        }
        out
    }

    pub fn d2f(&self, f: &Field2, sym: Sym) -> Field2 {
        self.f2(f, sym, 2, 1)
    }
    pub fn d3f(&self, f: &Field2, sym: Sym) -> Field2 {
        self.f2(f, sym, 3, 1)
    }
    pub fn dd2f(&self, f: &Field2, sym: Sym) -> Field2 {
        self.f2(f, sym, 2, 2)
    }
    pub fn dd3f(&self, f: &Field2, sym: Sym) -> Field2 {
        self.f2(f, sym, 3, 2)
    }
}

/// One-sided derivative at a wall with a truncation estimate, used only by
/// compatibility diagnostics (no parity assumption).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallProbe {
    pub value: f64,
    pub estimate: f64,
}

/// `deriv`-th derivative (0..=3) at the first node of `v` (spacing `h`,
/// pointing into the domain). Derivative 0 returns the value itself.
pub fn wall_derivative(v: &[f64], h: f64, deriv: usize) -> WallProbe {
    let d4 = v[0] - 4.0 * v[1] + 6.0 * v[2] - 4.0 * v[3] + v[4];
    let d5 = -v[0] + 5.0 * v[1] - 10.0 * v[2] + 10.0 * v[3] - 5.0 * v[4] + v[5];
    let scale = v.iter().take(6).fold(0.0f64, |m, x| m.max(x.abs()));
    match deriv {
        0 => WallProbe { value: v[0], estimate: (d4.abs()).max(1e-14 * scale) },
        1 => WallProbe {
            value: (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h),
            estimate: (d4.abs() / (4.0 * h)).max(1e-13 * scale / h),
        },
        2 => WallProbe {
            value: (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h),
            estimate: (11.0 / 12.0 * d4.abs() / (h * h)).max(1e-12 * scale / (h * h)),
        },
        _ => WallProbe {
            value: (-5.0 * v[0] + 18.0 * v[1] - 24.0 * v[2] + 14.0 * v[3] - 3.0 * v[4]) / (2.0 * h * h * h),
            estimate: (7.0 / 4.0 * d5.abs() / (h * h * h)).max(1e-11 * scale / (h * h * h)),
        },
    }
}

/// Ratio of the largest wall-condition violation of a face field to the
/// truncation estimate of the one-sided probe, both taken over all probed
/// walls. `noise` is the absolute rounding level of the stored values.
pub fn wall_ratio(grid: &BoxGrid, f: &Field2, deriv: usize, y2_walls: bool, y3_walls: bool, noise: f64) -> f64 {
    let (mut value, mut estimate) = (0.0f64, 0.0f64);
    let mut probe = |vals: Vec<f64>, h: f64| {
        let p = wall_derivative(&vals, h, deriv);
        value = value.max(p.value.abs());
        estimate = estimate.max(p.estimate).max(64.0 * noise / h.powi(deriv as i32));
    };
    if y2_walls {
        for k in 0..=grid.n3 {
            probe((0..6).map(|j| f.at(j, k)).collect(), grid.h2());
            probe((0..6).map(|j| f.at(grid.n2 - j, k)).collect(), grid.h2());
        }
    }
    if y3_walls {
        for j in 0..=grid.n2 {
            probe((0..6).map(|k| f.at(j, k)).collect(), grid.h3());
            probe((0..6).map(|k| f.at(j, grid.n3 - k)).collect(), grid.h3());
        }
    }
    if estimate == 0.0 {
        return 0.0;
    }
    value / estimate
}

/// Cubic Lagrange weights on nodes `-1, 0, 1, 2` at offset `t`.
#[inline]
pub fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Stencil base and weights for a periodic-by-reflection cross direction.
#[inline]
fn cross_stencil(x: f64, lo: f64, h: f64) -> (isize, [f64; 4]) {
    let mut s = (x - lo) / h;
    let r = s.round();
    if (s - r).abs() < 1e-10 {
        s = r;
    }
    let f = s.floor();
    (f as isize - 1, cubic_weights(s - f))
}

/// Stencil base and weights for the bounded radial direction.
#[inline]
fn radial_stencil(x: f64, lo: f64, h: f64, n: usize) -> (usize, [f64; 4]) {
    let mut s = (x - lo) / h;
    let r = s.round();
    if (s - r).abs() < 1e-10 {
        s = r;
    }
    let base = (s.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
    let t = s - base as f64 - 1.0;
    (base, cubic_weights(t))
}

#[inline]
fn reflect(j: isize, n: usize, par: Parity) -> (usize, f64) {
    let nn = n as isize;
    if j < 0 {
        ((-j) as usize, par.sign())
    } else if j > nn {
        ((2 * nn - j) as usize, par.sign())
    } else {
        (j as usize, 1.0)
    }
}

/// Bicubic interpolation of a face field at `(y2, y3)`.
pub fn sample2(grid: &BoxGrid, f: &Field2, sym: Sym, y2: f64, y3: f64) -> f64 {
    let (b2, w2) = cross_stencil(y2, -grid.theta0, grid.h2());
    let (b3, w3) = cross_stencil(y3, -1.0, grid.h3());
    let mut acc = 0.0;
    for a in 0..4 {
        if w2[a] == 0.0 {
            continue;
        }
        let (j, s2) = reflect(b2 + a as isize, grid.n2, sym.0);
        let mut row = 0.0;
        for b in 0..4 {
            if w3[b] == 0.0 {
                continue;
            }
            let (k, s3) = reflect(b3 + b as isize, grid.n3, sym.1);
            row += w3[b] * s3 * f.at(j, k);
        }
        acc += w2[a] * s2 * row;
    }
    acc
}

/// Precomputed cross-section stencil, reusable across fields with equal symmetry.
#[derive(Debug, Clone, Copy)]
pub struct CrossStencil {
    j: [usize; 4],
    k: [usize; 4],
    w: [[f64; 4]; 4],
}

/// Tricubic sampler for several 3D fields at one point.
#[derive(Debug, Clone, Copy)]
pub struct Point3 {
    i: usize,
    wr: [f64; 4],
    cross: CrossStencil,
}

impl CrossStencil {
    pub fn new(grid: &BoxGrid, sym: Sym, y2: f64, y3: f64) -> Self {
        let (b2, w2) = cross_stencil(y2, -grid.theta0, grid.h2());
        let (b3, w3) = cross_stencil(y3, -1.0, grid.h3());
        let mut j = [0; 4];
        let mut k = [0; 4];
        let mut w = [[0.0; 4]; 4];
        let mut s2 = [0.0; 4];
        let mut s3 = [0.0; 4];
        for a in 0..4 {
            let (jj, s) = reflect(b2 + a as isize, grid.n2, sym.0);
            j[a] = jj;
            s2[a] = s * w2[a];
            let (kk, s) = reflect(b3 + a as isize, grid.n3, sym.1);
            k[a] = kk;
            s3[a] = s * w3[a];
        }
        for a in 0..4 {
            for b in 0..4 {
                w[a][b] = s2[a] * s3[b];
            }
        }
        CrossStencil { j, k, w }
    }

    #[inline]
    pub fn apply(&self, grid: &BoxGrid, f: &[f64], base: usize) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            let row = base + self.j[a] * (grid.n3 + 1);
            for b in 0..4 {
                acc += self.w[a][b] * f[row + self.k[b]];
            }
        }
        acc
    }
}

impl Point3 {
    pub fn new(grid: &BoxGrid, sym: Sym, y1: f64, y2: f64, y3: f64) -> Self {
        let (i, wr) = radial_stencil(y1, grid.r_s, grid.h1(), grid.n1);
        Point3 { i, wr, cross: CrossStencil::new(grid, sym, y2, y3) }
    }

    #[inline]
    pub fn sample(&self, grid: &BoxGrid, f: &Field3) -> f64 {
        let fl = grid.face_len();
        let mut acc = 0.0;
        for a in 0..4 {
            if self.wr[a] != 0.0 {
                acc += self.wr[a] * self.cross.apply(grid, &f.data, (self.i + a) * fl);
            }
        }
        acc
    }
}

pub fn sample3(grid: &BoxGrid, f: &Field3, sym: Sym, y1: f64, y2: f64, y3: f64) -> f64 {
    Point3::new(grid, sym, y1, y2, y3).sample(grid, f)
}

/// Solves a tridiagonal system in place (Thomas algorithm). `a` is the
/// sub-diagonal (a[0] unused), `c` the super-diagonal (c[n-1] unused).
pub fn tridiag(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) -> Option<()> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut beta = b[0];
    if beta.abs() < 1e-300 {
        return None;
    }
    d[0] /= beta;
    for i in 1..n {
        cp[i - 1] = c[i - 1] / beta;
        beta = b[i] - a[i] * cp[i - 1];
        if beta.abs() < 1e-300 || !beta.is_finite() {
            return None;
        }
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
    Some(())
}
