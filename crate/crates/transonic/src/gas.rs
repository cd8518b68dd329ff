//! Polytropic gas closure and pointwise flow-state algebra.
//!
//! Pressure is `P = K rho^gamma`; the entropy function `K` carries all the
//! entropy information, so the EOS scale only enters through `K`.

use num_traits::Float;

use crate::error::{Error, Result};

/// Flow regime of a state relative to the sonic line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subsonic,
    Sonic,
    Supersonic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel<T> {
    pub gamma: T,
    pub eos_constant_a: T,
}

/// Velocity in the cylindrical basis `(e_r, e_theta, e_3)` plus density and `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState<T> {
    pub u_r: T,
    pub u_theta: T,
    pub u_z: T,
    pub density: T,
    pub entropy_k: T,
}

/// Deviations `(V1..V5)` from the background: three velocity components,
/// entropy `K` and Bernoulli `B`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerturbationState<T> {
    pub v: [T; 5],
}

impl<T: Float> FlowState<T> {
    pub fn new(u_r: T, u_theta: T, u_z: T, density: T, entropy_k: T) -> Self {
        FlowState { u_r, u_theta, u_z, density, entropy_k }
    }

    pub fn speed_sq(&self) -> T {
        self.u_r * self.u_r + self.u_theta * self.u_theta + self.u_z * self.u_z
    }
}

impl<T: Float> GasModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::one()) {
            return Err(Error::InvalidGas(format!(
                "gamma must exceed 1, got {}",
                gamma.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(GasModel { gamma, eos_constant_a: T::one() })
    }

    fn gm1(&self) -> T {
        self.gamma - T::one()
    }

    pub fn pressure(&self, s: &FlowState<T>) -> T {
        s.entropy_k * s.density.powf(self.gamma)
    }

    pub fn sound_speed_sq(&self, s: &FlowState<T>) -> T {
        self.gamma * s.entropy_k * s.density.powf(self.gm1())
    }

    /// Enthalpy `gamma/(gamma-1) K rho^(gamma-1)`.
    pub fn enthalpy(&self, density: T, k: T) -> T {
        self.gamma / self.gm1() * k * density.powf(self.gm1())
    }

    pub fn bernoulli(&self, s: &FlowState<T>) -> T {
        s.speed_sq() / (T::one() + T::one()) + self.enthalpy(s.density, s.entropy_k)
    }

    /// Inverts the Bernoulli relation for the density.
    pub fn density_from_bernoulli(&self, b: T, k: T, speed_sq: T) -> Result<T> {
        let bracket = b - speed_sq / (T::one() + T::one());
        if !(bracket > T::zero()) || !(k > T::zero()) {
            return Err(Error::VacuumBracket { bracket: bracket.to_f64().unwrap_or(f64::NAN) });
        }
        Ok((self.gm1() / (self.gamma * k) * bracket).powf(T::one() / self.gm1()))
    }

    /// Sound speed squared from the Bernoulli bracket, `(gamma-1)(B - |u|^2/2)`.
    pub fn sound_speed_sq_from_bernoulli(&self, b: T, speed_sq: T) -> T {
        self.gm1() * (b - speed_sq / (T::one() + T::one()))
    }

    pub fn mach(&self, s: &FlowState<T>) -> T {
        (s.speed_sq() / self.sound_speed_sq(s)).sqrt()
    }

    pub fn classify(&self, s: &FlowState<T>, sonic_tol: T) -> Regime {
        let m = self.mach(s);
        if (m - T::one()).abs() < sonic_tol {
            Regime::Sonic
        } else if m > T::one() {
            Regime::Supersonic
        } else {
            Regime::Subsonic
        }
    }

    /// Rebuilds a state from velocity, Bernoulli and entropy.
    pub fn state_from_bernoulli(&self, u: [T; 3], b: T, k: T) -> Result<FlowState<T>> {
        let q2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        let rho = self.density_from_bernoulli(b, k, q2)?;
        Ok(FlowState::new(u[0], u[1], u[2], rho, k))
    }
}

impl<T: Float> PerturbationState<T> {
    /// Adds the perturbation to a background radial state `(rho, U, K)` with
    /// Bernoulli constant `b`.
    pub fn apply(&self, gas: &GasModel<T>, u_bar: T, b_bar: T, k_bar: T) -> Result<FlowState<T>> {
        let v = &self.v;
        gas.state_from_bernoulli([u_bar + v[0], v[1], v[2]], b_bar + v[4], k_bar + v[3])
    }
}
