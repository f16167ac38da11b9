//! The rotating single-qubit frame `V(t) = μ(t)·σ` and the single-spin
//! drive it generates.
//!
//! Spin conventions: `σ^z = 2n̂ - 1`, `σ^+ = |1><0|`, `σ^- = |0><1|`. In the
//! `(|0>, |1>)` matrix ordering used throughout the crate
//!
//! ```text
//! f·σ = [[-f_z,         f_x + i f_y],
//!        [f_x - i f_y,  f_z        ]]
//! ```

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::linalg::{I, ONE, ZERO};

/// A uniform single-spin field: the operator `Σ_j (x σ^x_j + y σ^y_j + z σ^z_j)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpinField {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpinField {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        SpinField { x, y, z }
    }

    /// Field of the laboratory drive
    /// `(Ω/2)cosφ Σσ^x + (Ω/2)sinφ Σσ^y - (Δ/2) Σσ^z`.
    pub fn from_controls(omega: f64, phase: f64, detuning: f64) -> Self {
        SpinField {
            x: 0.5 * omega * phase.cos(),
            y: 0.5 * omega * phase.sin(),
            z: -0.5 * detuning,
        }
    }

    /// Inverse of [`SpinField::from_controls`]: `(Ω, φ, Δ)` with `Ω >= 0`
    /// and `φ` in `(-π, π]`.
    pub fn to_controls(self) -> (f64, f64, f64) {
        (2.0 * self.x.hypot(self.y), self.y.atan2(self.x), -2.0 * self.z)
    }

    pub fn magnitude(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `x + i y`, the coefficient of `σ^-`.
    pub fn transverse(self) -> C64 {
        C64::new(self.x, self.y)
    }

    pub fn matrix(self) -> Matrix2<C64> {
        let c = self.transverse();
        Matrix2::new(C64::from(-self.z), c, c.conj(), C64::from(self.z))
    }
}

/// The two angular rates of the frame: `θ(t) = ω_θ t`, `φ(t) = ω_φ t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameRates {
    pub omega_theta: f64,
    pub omega_phi: f64,
}

/// Which single-qubit frame is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameKind {
    /// `V(t) = μ(t)·σ`.
    Full,
    /// `V_s(t) = (μ(t)·σ) U_s(t)` with the diagonal phase
    /// `U_s = |1><1| + e^{iφ}|0><0|`.
    Simplified,
}

impl FrameRates {
    pub fn new(omega_theta: f64, omega_phi: f64) -> Self {
        FrameRates {
            omega_theta,
            omega_phi,
        }
    }

    /// Rates for total time `T` with `ω_θ = π/T` and `ω_φ = ratio · ω_θ`.
    pub fn for_duration(total_time: f64, ratio: f64) -> Self {
        let omega_theta = std::f64::consts::PI / total_time;
        FrameRates::new(omega_theta, ratio * omega_theta)
    }

    /// Duration `π/ω_θ` over which `θ` sweeps from 0 to π.
    pub fn total_time(&self) -> f64 {
        std::f64::consts::PI / self.omega_theta.abs()
    }

    pub fn theta(&self, t: f64) -> f64 {
        self.omega_theta * t
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.omega_phi * t
    }

    /// Unit vector `μ = (sin(θ/2)cosφ, sin(θ/2)sinφ, cos(θ/2))`.
    pub fn mu(&self, t: f64) -> [f64; 3] {
        let (s, c) = (0.5 * self.theta(t)).sin_cos();
        let (sp, cp) = self.phi(t).sin_cos();
        [s * cp, s * sp, c]
    }

    /// Time derivative of [`FrameRates::mu`].
    pub fn mu_dot(&self, t: f64) -> [f64; 3] {
        let (s, c) = (0.5 * self.theta(t)).sin_cos();
        let (sp, cp) = self.phi(t).sin_cos();
        let (wt, wp) = (0.5 * self.omega_theta, self.omega_phi);
        [wt * c * cp - wp * s * sp, wt * c * sp + wp * s * cp, -wt * s]
    }

    /// `μ × μ'`, the field of `Ĥ_1 = -i U† ∂_t U` in the full frame.
    pub fn field(&self, t: f64) -> SpinField {
        let m = self.mu(t);
        let d = self.mu_dot(t);
        SpinField::new(
            m[1] * d[2] - m[2] * d[1],
            m[2] * d[0] - m[0] * d[2],
            m[0] * d[1] - m[1] * d[0],
        )
    }

    /// Traceless part of `-i V_s† ∂_t V_s`. The dropped identity term is
    /// `ω_φ/2` per spin.
    pub fn simplified_field(&self, t: f64) -> SpinField {
        let th = self.theta(t);
        SpinField::new(
            -0.5 * self.omega_phi * th.sin(),
            0.5 * self.omega_theta,
            -0.5 * self.omega_phi * th.cos(),
        )
    }

    pub fn field_for(&self, kind: FrameKind, t: f64) -> SpinField {
        match kind {
            FrameKind::Full => self.field(t),
            FrameKind::Simplified => self.simplified_field(t),
        }
    }

    /// The single-qubit frame matrix `V(t)` or `V_s(t)`.
    pub fn single_qubit(&self, kind: FrameKind, t: f64) -> Matrix2<C64> {
        let m = self.mu(t);
        let v = SpinField::new(m[0], m[1], m[2]).matrix();
        match kind {
            FrameKind::Full => v,
            FrameKind::Simplified => {
                let us = Matrix2::new(C64::from_polar(1.0, self.phi(t)), ZERO, ZERO, ONE);
                v * us
            }
        }
    }

    /// Closed-form single-spin gap of `Ĥ_1` in the full frame,
    /// `(4 ω_φ² sin²(θ/2) + ω_θ²)^{1/2}`.
    pub fn h1_gap(&self, t: f64) -> f64 {
        let s = (0.5 * self.theta(t)).sin();
        (4.0 * self.omega_phi * self.omega_phi * s * s + self.omega_theta * self.omega_theta).sqrt()
    }
}

/// `-i V† dV/dt` for an arbitrary single-qubit family, by central differences.
/// Used to check the closed forms above.
pub fn numerical_generator<F: Fn(f64) -> Matrix2<C64>>(v: F, t: f64, h: f64) -> Matrix2<C64> {
    let dv = (v(t + h) - v(t - h)) / C64::from(2.0 * h);
    (v(t).adjoint() * dv) * (-I)
}
