//! Rankine-Hugoniot conditions on the fitted shock `y1 = r_s + V6(y')`.

use crate::background::{BackgroundCoefficients, BackgroundSolution};
use crate::error::{Error, Result};
use crate::gas::FlowState;
use crate::grid::{BoxGrid, Fd, Field2, EE, EO, OE};

/// Pointwise jump algebra, generic over the scalar type.
pub mod point {
    use num_traits::Float;

    use crate::error::{Error, Result};
    use crate::gas::{FlowState, GasModel};

    #[inline]
    fn k<T: Float>(x: f64) -> T {
        T::from(x).unwrap()
    }

    /// Rows of the inverse of the linearized jump matrix that give `W1` and
    /// `W4` from `(R01, R02, R03)`.
    pub fn b_coefficients<T: Float>(g: T, rho: T, u: T, c2: T) -> ([T; 3], [T; 3]) {
        let one = T::one();
        let d = rho * (c2 - u * u);
        let b1 = [(c2 + g * u * u) / d, -g * u / d, (g - one) * rho * u / d];
        let f = (g - one) / rho.powf(g);
        (b1, [f * u, -f, f * rho])
    }

    /// The `W4` row exactly as displayed, with `rho^(gamma-1)` in the prefactor.
    pub fn b2_displayed<T: Float>(g: T, rho: T, u: T) -> [T; 3] {
        let f = (g - T::one()) / rho.powf(g - T::one());
        [f * u, -f, f * rho]
    }

    /// The linearized jump matrix acting on `(W1, rho_dot, W4)`.
    pub fn jump_matrix<T: Float>(g: T, rho: T, u: T, c2: T) -> [[T; 3]; 3] {
        let two = k::<T>(2.0);
        [
            [rho, u, T::zero()],
            [two * rho * u, u * u + c2, rho.powf(g)],
            [u, c2 / rho, g * rho.powf(g - T::one()) / (g - T::one())],
        ]
    }

    /// Rows 0 and 2 of the numeric inverse of the jump matrix.
    pub fn b_coefficients_numeric<T: Float>(g: T, rho: T, u: T, c2: T) -> Option<([T; 3], [T; 3])> {
        let m = jump_matrix(g, rho, u, c2);
        let cof = |r: usize, c: usize| {
            let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
            let (c0, c1) = ((c + 1) % 3, (c + 2) % 3);
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        let det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
        let scale = m.iter().flatten().fold(T::zero(), |a, &x| a.max(x.abs()));
        if det.abs() <= k::<T>(1e-13) * scale * scale * scale {
            return None;
        }
        // inverse[i][j] = cof(j, i) / det
        let row = |i: usize| [cof(0, i) / det, cof(1, i) / det, cof(2, i) / det];
        Some((row(0), row(2)))
    }

    /// Primitive view of one side of the shock.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Side<T> {
        pub rho: T,
        pub u: [T; 3],
        pub p: T,
    }

    impl<T: Float> Side<T> {
        pub fn from_state(gas: &GasModel<T>, s: &FlowState<T>) -> Self {
            Side { rho: s.density, u: [s.u_r, s.u_theta, s.u_z], p: gas.pressure(s) }
        }

        fn bernoulli(&self, g: T) -> T {
            let q2 = self.u[0] * self.u[0] + self.u[1] * self.u[1] + self.u[2] * self.u[2];
            q2 / k(2.0) + g / (g - T::one()) * self.p / self.rho
        }

        /// Momentum flux `rho u_a u_b + P delta_ab`.
        fn flux(&self, a: usize, b: usize) -> T {
            let pd = if a == b { self.p } else { T::zero() };
            self.rho * self.u[a] * self.u[b] + pd
        }
    }

    /// Jumps `[rho u_a]`, `[rho u_a u_b + P delta_ab]` and `[B]`, plus minus minus.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Brackets<T> {
        pub mass: [T; 3],
        pub mom: [[T; 3]; 3],
        pub b: T,
    }

    pub fn brackets<T: Float>(g: T, plus: &Side<T>, minus: &Side<T>) -> Brackets<T> {
        let mut mass = [T::zero(); 3];
        let mut mom = [[T::zero(); 3]; 3];
        for a in 0..3 {
            mass[a] = plus.rho * plus.u[a] - minus.rho * minus.u[a];
            for b in 0..3 {
                mom[a][b] = plus.flux(a, b) - minus.flux(a, b);
            }
        }
        Brackets { mass, mom, b: plus.bernoulli(g) - minus.bernoulli(g) }
    }

    /// The five jump conditions across `r = xi(theta, x3)` with normal
    /// `(1, -xi_theta/xi, -xi_3)`.
    pub fn rh_residual<T: Float>(g: T, minus: &Side<T>, plus: &Side<T>, xi: T, dxi_theta: T, dxi_3: T) -> [T; 5] {
        let br = brackets(g, plus, minus);
        let n = [T::one(), -dxi_theta / xi, -dxi_3];
        let dot = |v: [T; 3]| v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
        [dot(br.mass), dot(br.mom[0]), dot(br.mom[1]), dot(br.mom[2]), br.b]
    }

    /// `(J, J2, J3)` with `xi_theta / xi = J2/J` and `xi_3 = J3/J`.
    pub fn jump_kernels<T: Float>(g: T, minus: &Side<T>, plus: &Side<T>) -> (T, T, T) {
        let m = brackets(g, plus, minus).mom;
        let j = m[1][1] * m[2][2] - m[1][2] * m[1][2];
        let j2 = m[2][2] * m[0][1] - m[0][2] * m[1][2];
        let j3 = m[1][1] * m[0][2] - m[0][1] * m[1][2];
        (j, j2, j3)
    }

    /// Background scalars at the unperturbed shock.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ShockFrame<T> {
        pub gamma: T,
        pub r_s: T,
        pub b_bar: T,
        pub k_plus: T,
        pub rho_s: T,
        pub u_s: T,
        pub c2_s: T,
        pub p_jump: T,
        pub a0: T,
        pub a1: T,
        pub a2: T,
        pub b1: [T; 3],
        pub b2: [T; 3],
    }

    /// Background `(rho, U, P)` of both branches at `xi = r_s + V6`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct RadialPair<T> {
        pub plus: [T; 3],
        pub minus: [T; 3],
    }

    /// Everything the shock conditions produce at one cross-section node.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct PointKernels<T> {
        pub j: T,
        pub j2: T,
        pub j3: T,
        pub r0: [T; 3],
        pub r1: T,
        pub r2: T,
        pub r3: T,
        pub g2: T,
        pub g3: T,
        pub rho_tilde: T,
        pub p_tilde: T,
    }

    /// Downstream density from Bernoulli with the perturbed `B`, `K` and speed.
    pub fn rho_tilde<T: Float>(gas: &GasModel<T>, b_bar: T, k_bar: T, u_bar: T, v: &[T; 5]) -> Result<T> {
        let w = u_bar + v[0];
        gas.density_from_bernoulli(b_bar + v[4], k_bar + v[3], w * w + v[1] * v[1] + v[2] * v[2])
    }

    pub fn point_kernels<T: Float>(
        f: &ShockFrame<T>,
        bg: &RadialPair<T>,
        minus: &FlowState<T>,
        v: [T; 5],
        v6: T,
    ) -> Result<PointKernels<T>> {
        let one = T::one();
        let half = k::<T>(0.5);
        let g = f.gamma;
        let gas = GasModel { gamma: g, eos_constant_a: one };
        let [rp, up, pp] = bg.plus;
        let [rm, um, pm] = bg.minus;
        let rt = rho_tilde(&gas, f.b_bar, f.k_plus, up, &v)?;
        let pt = (f.k_plus + v[3]) * rt.powf(g);
        let w = up + v[0];
        let plus = Side { rho: rt, u: [w, v[1], v[2]], p: pt };
        let ms = Side::from_state(&gas, minus);
        let (j, j2, j3) = jump_kernels(g, &ms, &plus);
        if !(j.abs() >= k::<T>(1e-8) * f.p_jump * f.p_jump) {
            return Err(Error::DegenerateJ { j: j.to_f64().unwrap_or(f64::NAN), j2: 0, j3: 0 });
        }
        let (q2, q3) = (j2 / j, j3 / j);
        let mu = ms.u;
        let rs = f.r_s;

        let r01 = -(rp * up - rm * um) + ms.rho * mu[0] - rm * um - (v[0] + up - f.u_s) * (rt - rp)
            + (rt * v[1] - ms.rho * mu[1]) * q2
            + (rt * v[2] - ms.rho * mu[2]) * q3
            - (rp - f.rho_s) * v[0];

        let bar_flux_jump = (rp * up * up + pp) - (rm * um * um + pm);
        let rest = rt * w * w + pt
            - (rp * up * up + pp)
            - k::<T>(2.0) * f.rho_s * f.u_s * v[0]
            - (f.u_s * f.u_s + f.c2_s) * (rt - rp)
            - f.rho_s.powf(g) * v[3];
        let r02 = -(bar_flux_jump - f.p_jump * v6 / rs) + (ms.rho * mu[0] * mu[0] + ms.p)
            - (rm * um * um + pm)
            - rest
            + (rt * w * v[1] - ms.rho * mu[0] * mu[1]) * q2
            + (rt * w * v[2] - ms.rho * mu[0] * mu[2]) * q3;

        let enth = g / (g - one);
        let b_minus = gas.bernoulli(minus);
        let r03 = b_minus - f.b_bar - up * v[0] - half * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            + f.u_s * v[0]
            - enth * ((f.k_plus + v[3]) * rt.powf(g - one) - f.k_plus * rp.powf(g - one))
            + f.c2_s / f.rho_s * (rt - rp)
            + enth * f.rho_s.powf(g - one) * v[3];

        let r0 = [r01, r02, r03];
        let r1 = f.b1[0] * r01 + f.b1[1] * r02 + f.b1[2] * r03;
        let r2 = f.b2[0] * r01 + f.b2[1] * r02 + f.b2[2] * r03;
        let r3 = r2 - f.a2 / f.a1 * r1;
        let g2 = ((rs + v6) * q2 - f.a0 * rs * v[1]) / rs;
        let g3 = q3 - f.a0 * v[2];
        Ok(PointKernels { j, j2, j3, r0, r1, r2, r3, g2, g3, rho_tilde: rt, p_tilde: pt })
    }

    /// Nonlinear remainder of the exit-pressure condition at `r2`.
    #[allow(clippy::too_many_arguments)]
    pub fn exit_error<T: Float>(g: T, b_bar: T, k_bar: T, rho: T, u: T, p: T, v4: T, p_tilde: T) -> T {
        let one = T::one();
        let e = g / (g - one);
        let x = (g - one) / g;
        e * (k_bar + v4).powf(one / g) * p_tilde.powf(x) - e * k_bar.powf(one / g) * p.powf(x)
            - (p_tilde - p) / rho
            - (b_bar - u * u / k(2.0)) / (g * k_bar) * v4
    }
}

pub use point::{PointKernels, RadialPair, ShockFrame};

impl BackgroundCoefficients {
    pub fn frame(&self) -> ShockFrame<f64> {
        let p = &self.plus_rs;
        ShockFrame {
            gamma: self.gamma,
            r_s: self.r_s,
            b_bar: self.b_bar,
            k_plus: self.k_plus,
            rho_s: p.rho,
            u_s: p.u,
            c2_s: p.c2,
            p_jump: self.p_jump,
            a0: self.a0,
            a1: self.a1,
            a2: self.a2,
            b1: self.b1,
            b2: self.b2,
        }
    }
}

/// Background pair at `xi`; the subsonic branch is continued analytically
/// below `r_s` and the supersonic one above it.
pub fn radial_pair(bg: &BackgroundSolution, xi: f64) -> Result<RadialPair<f64>> {
    let p = bg.plus(xi)?;
    let m = bg.minus(xi)?;
    Ok(RadialPair { plus: [p.rho, p.u, p.p], minus: [m.rho, m.u, m.p] })
}

/// Shock kernels over the cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpKernels {
    pub j: Field2,
    pub j2: Field2,
    pub j3: Field2,
    pub r0: [Field2; 3],
    pub r1: Field2,
    pub r2: Field2,
    pub r3: Field2,
    pub g2: Field2,
    pub g3: Field2,
    pub rho_tilde: Field2,
    pub p_tilde: Field2,
}

/// Evaluates the kernels at every face node from the face values of
/// `V1..V5`, the shock displacement and the upstream states at `r_s + V6`.
pub fn jump_kernels(
    bg: &BackgroundSolution,
    coef: &BackgroundCoefficients,
    grid: &BoxGrid,
    v: [&Field2; 5],
    v6: &Field2,
    minus: &[FlowState<f64>],
) -> Result<JumpKernels> {
    let frame = coef.frame();
    let z = grid.zeros2();
    let mut out = JumpKernels {
        j: z.clone(),
        j2: z.clone(),
        j3: z.clone(),
        r0: [z.clone(), z.clone(), z.clone()],
        r1: z.clone(),
        r2: z.clone(),
        r3: z.clone(),
        g2: z.clone(),
        g3: z.clone(),
        rho_tilde: z.clone(),
        p_tilde: z,
    };
    for j in 0..=grid.n2 {
        for k in 0..=grid.n3 {
            let n = grid.fidx(j, k);
            let vv = [v[0].data[n], v[1].data[n], v[2].data[n], v[3].data[n], v[4].data[n]];
            let pair = radial_pair(bg, grid.r_s + v6.data[n])?;
            let pk = point::point_kernels(&frame, &pair, &minus[n], vv, v6.data[n]).map_err(|e| match e {
                Error::DegenerateJ { j: jj, .. } => Error::DegenerateJ { j: jj, j2: j, j3: k },
                e => e,
            })?;
            out.j.data[n] = pk.j;
            out.j2.data[n] = pk.j2;
            out.j3.data[n] = pk.j3;
            for c in 0..3 {
                out.r0[c].data[n] = pk.r0[c];
            }
            out.r1.data[n] = pk.r1;
            out.r2.data[n] = pk.r2;
            out.r3.data[n] = pk.r3;
            out.g2.data[n] = pk.g2;
            out.g3.data[n] = pk.g3;
            out.rho_tilde.data[n] = pk.rho_tilde;
            out.p_tilde.data[n] = pk.p_tilde;
        }
    }
    Ok(out)
}

/// `q1 = a1((1/r_s) d2 g2 + d3 g3) + ((1/r_s^2) d2^2 + d3^2) R1`.
pub fn q1(fd: &Fd, coef: &BackgroundCoefficients, k: &JumpKernels) -> Field2 {
    let rs = coef.r_s;
    let div = fd.d2f(&k.g2, OE).scale(1.0 / rs).add(&fd.d3f(&k.g3, EO));
    let lap = fd.dd2f(&k.r1, EE).scale(1.0 / (rs * rs)).add(&fd.dd3f(&k.r1, EE));
    div.scale(coef.a1).add(&lap)
}

/// Wall traces of the oblique-derivative data, `max |(1/r_s) d2 R1 + g2|` on
/// the `y2` walls and `max |d3 R1 + g3|` on the `y3` walls, from one-sided
/// differences (no parity assumed).
pub fn wall_traces(grid: &BoxGrid, coef: &BackgroundCoefficients, k: &JumpKernels) -> (f64, f64) {
    let rs = coef.r_s;
    let mut q2 = 0.0f64;
    let mut q3 = 0.0f64;
    let one_sided = |v: [f64; 3], h: f64| (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for kk in 0..=grid.n3 {
        let lo = one_sided([k.r1.at(0, kk), k.r1.at(1, kk), k.r1.at(2, kk)], grid.h2());
        let n2 = grid.n2;
        let hi = -one_sided([k.r1.at(n2, kk), k.r1.at(n2 - 1, kk), k.r1.at(n2 - 2, kk)], grid.h2());
        q2 = q2.max((lo / rs + k.g2.at(0, kk)).abs()).max((hi / rs + k.g2.at(n2, kk)).abs());
    }
    for j in 0..=grid.n2 {
        let n3 = grid.n3;
        let lo = one_sided([k.r1.at(j, 0), k.r1.at(j, 1), k.r1.at(j, 2)], grid.h3());
        let hi = -one_sided([k.r1.at(j, n3), k.r1.at(j, n3 - 1), k.r1.at(j, n3 - 2)], grid.h3());
        q3 = q3.max((lo + k.g3.at(j, 0)).abs()).max((hi + k.g3.at(j, n3)).abs());
    }
    (q2, q3)
}

/// Shock displacement and its gradient from the downstream trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockUpdate {
    pub v6: Field2,
    pub dv6: [Field2; 2],
}

/// `V6 = (V1(r_s) - R1)/a1`, `d2 V6 = r_s(a0 V2(r_s) + g2)`, `d3 V6 = a0 V3(r_s) + g3`.
pub fn update_shock(coef: &BackgroundCoefficients, v_rs: [&Field2; 3], k: &JumpKernels) -> ShockUpdate {
    let v6 = v_rs[0].sub(&k.r1).scale(1.0 / coef.a1);
    let d2 = v_rs[1].scale(coef.a0).add(&k.g2).scale(coef.r_s);
    let d3 = v_rs[2].scale(coef.a0).add(&k.g3);
    ShockUpdate { v6, dv6: [d2, d3] }
}
