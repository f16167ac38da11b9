//! Control paths `Ω(t)`, `φ(t)`, `Δ(t)` on `[0, T]`.
//!
//! All rates are in rad/μs and times in μs. Evaluation outside `[0, T]` is
//! clamped to the interval.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{FrameKind, FrameRates, SpinField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    PkFull,
    PkSimplified,
    HvUnoptimized,
    Knots,
}

impl ScheduleKind {
    pub fn label(self) -> &'static str {
        match self {
            ScheduleKind::PkFull => "pk-full",
            ScheduleKind::PkSimplified => "pk-simplified",
            ScheduleKind::HvUnoptimized => "hv-unoptimized",
            ScheduleKind::Knots => "knots",
        }
    }

    pub fn is_pk(self) -> bool {
        matches!(self, ScheduleKind::PkFull | ScheduleKind::PkSimplified)
    }
}

/// Control values at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Controls {
    pub omega: f64,
    pub phase: f64,
    pub detuning: f64,
}

impl Controls {
    pub fn field(self) -> SpinField {
        SpinField::from_controls(self.omega, self.phase, self.detuning)
    }
}

/// Default final detuning of the unoptimized path, `2π × 15 MHz`. It lies
/// above the next-nearest-neighbour interaction, so the end point favours
/// configurations that violate the diagonal blockade.
pub const HV_DELTA_END: f64 = 2.0 * std::f64::consts::PI * 15.0;

/// Piecewise-linear ramp-sweep-ramp path with `φ ≡ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HvPath {
    /// Fraction of `T` spent on each Rabi ramp, in `(0, 1/2)`.
    pub ramp: f64,
    pub omega_max: f64,
    pub delta_start: f64,
    pub delta_end: f64,
    pub total_time: f64,
}

impl HvPath {
    /// Default path on the same scale as a PK schedule with the given rates:
    /// ramp fraction 0.12, `Ω_max = (ω_φ² + ω_θ²)^{1/2}`, detuning swept
    /// from `-|ω_φ|` to [`HV_DELTA_END`] over `T = π/|ω_θ|`.
    pub fn matching(rates: &FrameRates) -> Self {
        HvPath {
            ramp: 0.12,
            omega_max: rates.omega_phi.hypot(rates.omega_theta),
            delta_start: -rates.omega_phi.abs(),
            delta_end: HV_DELTA_END,
            total_time: rates.total_time(),
        }
    }

    /// Same shape with a symmetric sweep `-|ω_φ| -> +|ω_φ|`.
    pub fn symmetric(rates: &FrameRates) -> Self {
        HvPath {
            delta_end: rates.omega_phi.abs(),
            ..HvPath::matching(rates)
        }
    }

    fn controls(&self, t: f64) -> Controls {
        let t_up = self.ramp * self.total_time;
        let t_down = (1.0 - self.ramp) * self.total_time;
        let omega = if t < t_up {
            self.omega_max * t / t_up
        } else if t > t_down {
            self.omega_max * (self.total_time - t) / (self.total_time - t_down)
        } else {
            self.omega_max
        };
        let detuning = if t <= t_up {
            self.delta_start
        } else if t >= t_down {
            self.delta_end
        } else {
            self.delta_start + (self.delta_end - self.delta_start) * (t - t_up) / (t_down - t_up)
        };
        Controls {
            omega: omega.max(0.0),
            phase: 0.0,
            detuning,
        }
    }
}

/// Which knot values are free parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnotBoundary {
    /// End knots of both Δ and Ω stay fixed; only interior knots vary.
    Pinned,
    /// Every knot varies.
    Free,
}

/// Piecewise-linear Δ and Ω through knots at uniform times on `[0, T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotPath {
    pub total_time: f64,
    pub delta: Vec<f64>,
    pub omega: Vec<f64>,
    pub boundary: KnotBoundary,
}

impl KnotPath {
    pub fn new(total_time: f64, delta: Vec<f64>, omega: Vec<f64>, boundary: KnotBoundary) -> Result<Self> {
        let k = KnotPath {
            total_time,
            delta,
            omega,
            boundary,
        };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0) {
            return Err(Error::invalid(format!("total time must be positive, got {}", self.total_time)));
        }
        if self.delta.len() < 2 || self.delta.len() != self.omega.len() {
            return Err(Error::invalid(format!(
                "need matching Δ/Ω knot vectors of length >= 2, got {} and {}",
                self.delta.len(),
                self.omega.len()
            )));
        }
        if let Some(w) = self.omega.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::invalid(format!("Ω knot {w} is negative")));
        }
        if self.delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("Δ knot".into()));
        }
        Ok(())
    }

    /// Samples Δ and Ω of any schedule at `m` uniform knot times.
    pub fn sample(schedule: &Schedule, m: usize, boundary: KnotBoundary) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("knot count must be at least 2"));
        }
        let times = uniform_times(schedule.total_time(), m);
        let controls: Vec<_> = times.iter().map(|&t| schedule.controls(t)).collect();
        KnotPath::new(
            schedule.total_time(),
            controls.iter().map(|c| c.detuning).collect(),
            controls.iter().map(|c| c.omega.max(0.0)).collect(),
            boundary,
        )
    }

    pub fn knot_count(&self) -> usize {
        self.delta.len()
    }

    pub fn knot_times(&self) -> Vec<f64> {
        uniform_times(self.total_time, self.knot_count())
    }

    fn free_range(&self) -> std::ops::Range<usize> {
        match self.boundary {
            KnotBoundary::Pinned => 1..self.knot_count() - 1,
            KnotBoundary::Free => 0..self.knot_count(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.free_range().len()
    }

    /// Free parameters: the free Δ knots followed by the free Ω knots.
    pub fn params(&self) -> Vec<f64> {
        let r = self.free_range();
        self.delta[r.clone()].iter().chain(&self.omega[r]).copied().collect()
    }

    /// Copy with new free parameters (same layout as [`KnotPath::params`]).
    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        if params.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                actual: params.len(),
            });
        }
        let r = self.free_range();
        let half = r.len();
        let mut out = self.clone();
        out.delta[r.clone()].copy_from_slice(&params[..half]);
        out.omega[r].copy_from_slice(&params[half..]);
        out.validate()?;
        Ok(out)
    }

    /// Indices into [`KnotPath::params`] that hold Ω knots.
    pub fn omega_param_indices(&self) -> std::ops::Range<usize> {
        let half = self.free_range().len();
        half..2 * half
    }

    fn controls(&self, t: f64) -> Controls {
        let segments = (self.knot_count() - 1) as f64;
        let x = (t / self.total_time * segments).clamp(0.0, segments);
        let i = (x.floor() as usize).min(self.knot_count() - 2);
        let w = x - i as f64;
        let lerp = |v: &[f64]| v[i] + (v[i + 1] - v[i]) * w;
        Controls {
            omega: lerp(&self.omega).max(0.0),
            phase: 0.0,
            detuning: lerp(&self.delta),
        }
    }
}

fn uniform_times(total: f64, m: usize) -> Vec<f64> {
    (0..m).map(|k| total * k as f64 / (m - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Shape {
    PkFull { rates: FrameRates },
    PkSimplified { rates: FrameRates, follow_phase: bool },
    HvUnoptimized { path: HvPath },
    Knots { path: KnotPath },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    total_time: f64,
    #[serde(flatten)]
    shape: Shape,
}

fn check_rates(omega_theta: f64, omega_phi: f64) -> Result<FrameRates> {
    if omega_theta == 0.0 || !omega_theta.is_finite() {
        return Err(Error::invalid("ω_θ must be finite and nonzero"));
    }
    if !omega_phi.is_finite() {
        return Err(Error::invalid("ω_φ must be finite"));
    }
    Ok(FrameRates::new(omega_theta, omega_phi))
}

/// Full PK path on `[0, π/|ω_θ|]`:
/// `Δ = -2ω_φ sin²(ω_θ t/2)`, `Ω = (ω_φ² sin²(ω_θ t) + ω_θ²)^{1/2}`, and the
/// phase `φ = ω_φ t + atan2(ω_θ, -ω_φ sin ω_θ t)`, which is the continuous
/// branch of the arctangent expression for `tan φ`.
pub fn pk_full(omega_theta: f64, omega_phi: f64) -> Result<Schedule> {
    let rates = check_rates(omega_theta, omega_phi)?;
    Ok(Schedule {
        total_time: rates.total_time(),
        shape: Shape::PkFull { rates },
    })
}

/// Simplified PK path: `Δ = ω_φ cos(ω_θ t)`, the same `Ω` as the full path,
/// and `φ = atan2(ω_θ, -ω_φ sin ω_θ t)`.
pub fn pk_simplified(omega_theta: f64, omega_phi: f64) -> Result<Schedule> {
    pk_simplified_with(omega_theta, omega_phi, true)
}

/// Simplified PK path with the phase either following the frame or held at 0.
pub fn pk_simplified_with(omega_theta: f64, omega_phi: f64, follow_phase: bool) -> Result<Schedule> {
    let rates = check_rates(omega_theta, omega_phi)?;
    Ok(Schedule {
        total_time: rates.total_time(),
        shape: Shape::PkSimplified { rates, follow_phase },
    })
}

pub fn hv_unoptimized(path: HvPath) -> Result<Schedule> {
    if !(path.ramp > 0.0 && path.ramp < 0.5) {
        return Err(Error::invalid(format!("ramp fraction must be in (0, 1/2), got {}", path.ramp)));
    }
    if !(path.total_time > 0.0) {
        return Err(Error::invalid(format!("total time must be positive, got {}", path.total_time)));
    }
    if !(path.omega_max >= 0.0) {
        return Err(Error::invalid(format!("Ω_max must be non-negative, got {}", path.omega_max)));
    }
    Ok(Schedule {
        total_time: path.total_time,
        shape: Shape::HvUnoptimized { path },
    })
}

pub fn knots_to_schedule(path: KnotPath) -> Result<Schedule> {
    path.validate()?;
    Ok(Schedule {
        total_time: path.total_time,
        shape: Shape::Knots { path },
    })
}

impl Schedule {
    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn kind(&self) -> ScheduleKind {
        match self.shape {
            Shape::PkFull { .. } => ScheduleKind::PkFull,
            Shape::PkSimplified { .. } => ScheduleKind::PkSimplified,
            Shape::HvUnoptimized { .. } => ScheduleKind::HvUnoptimized,
            Shape::Knots { .. } => ScheduleKind::Knots,
        }
    }

    /// Frame rates of PK schedules.
    pub fn rates(&self) -> Option<FrameRates> {
        match self.shape {
            Shape::PkFull { rates } | Shape::PkSimplified { rates, .. } => Some(rates),
            _ => None,
        }
    }

    /// The frame this schedule realises exactly, if any. A simplified path
    /// with its phase held at zero follows no frame exactly.
    pub fn frame(&self) -> Option<(FrameRates, FrameKind)> {
        match self.shape {
            Shape::PkFull { rates } => Some((rates, FrameKind::Full)),
            Shape::PkSimplified {
                rates,
                follow_phase: true,
            } => Some((rates, FrameKind::Simplified)),
            _ => None,
        }
    }

    pub fn follows_phase(&self) -> bool {
        !matches!(
            self.shape,
            Shape::PkSimplified {
                follow_phase: false,
                ..
            } | Shape::HvUnoptimized { .. }
                | Shape::Knots { .. }
        )
    }

    pub fn knots(&self) -> Option<&KnotPath> {
        match &self.shape {
            Shape::Knots { path } => Some(path),
            _ => None,
        }
    }

    pub fn controls(&self, t: f64) -> Controls {
        let t = t.clamp(0.0, self.total_time);
        match &self.shape {
            Shape::PkFull { rates } => {
                let th = rates.theta(t);
                let (s_half, s) = ((0.5 * th).sin(), th.sin());
                Controls {
                    omega: pk_omega(rates, s),
                    phase: rates.phi(t) + rates.omega_theta.atan2(-rates.omega_phi * s),
                    detuning: -2.0 * rates.omega_phi * s_half * s_half,
                }
            }
            Shape::PkSimplified { rates, follow_phase } => {
                let (s, c) = rates.theta(t).sin_cos();
                Controls {
                    omega: pk_omega(rates, s),
                    phase: if *follow_phase {
                        rates.omega_theta.atan2(-rates.omega_phi * s)
                    } else {
                        0.0
                    },
                    detuning: rates.omega_phi * c,
                }
            }
            Shape::HvUnoptimized { path } => path.controls(t),
            Shape::Knots { path } => path.controls(t),
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.controls(t).omega
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.controls(t).phase
    }

    pub fn detuning(&self, t: f64) -> f64 {
        self.controls(t).detuning
    }

    /// Single-spin field of the laboratory drive at `t`.
    pub fn field(&self, t: f64) -> SpinField {
        self.controls(t).field()
    }

    /// `t, Ω, φ, Δ` on `points` uniform samples of `[0, T]`.
    pub fn to_csv(&self, points: usize) -> String {
        let mut out = String::from("t_us,omega_rad_per_us,phi_rad,delta_rad_per_us\n");
        let points = points.max(2);
        for k in 0..points {
            let t = self.total_time * k as f64 / (points - 1) as f64;
            let c = self.controls(t);
            let _ = writeln!(out, "{t},{},{},{}", c.omega, c.phase, c.detuning);
        }
        out
    }
}

fn pk_omega(rates: &FrameRates, sin_theta: f64) -> f64 {
    (rates.omega_phi * rates.omega_phi * sin_theta * sin_theta + rates.omega_theta * rates.omega_theta).sqrt()
}

/// The two ratios of the adiabaticity hierarchy `V0 ≫ |ω_φ| ≫ |ω_θ|/δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdiabaticityReport {
    /// `V0 / |ω_φ|`.
    pub interaction_ratio: f64,
    /// `|ω_φ| δ / |ω_θ|`.
    pub gap_ratio: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

pub const DEFAULT_ADIABATIC_THRESHOLD: f64 = 3.0;

pub fn adiabaticity_report(s: &Schedule, v0: f64, delta: f64, threshold: f64) -> Result<AdiabaticityReport> {
    let rates = s.rates().ok_or(Error::UnsupportedKind(s.kind().label()))?;
    let interaction_ratio = v0 / rates.omega_phi.abs();
    let gap_ratio = rates.omega_phi.abs() * delta / rates.omega_theta.abs();
    Ok(AdiabaticityReport {
        interaction_ratio,
        gap_ratio,
        threshold,
        satisfied: interaction_ratio > threshold && gap_ratio > threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz_to_rad_per_us;
    use std::f64::consts::PI;

    fn standard_rates() -> (f64, f64) {
        let wt = PI / 1.5;
        (wt, -11.0 * wt)
    }

    #[test]
    fn pk_full_endpoints() {
        let (wt, wp) = standard_rates();
        let s = pk_full(wt, wp).unwrap();
        let t_end = s.total_time();
        assert!((t_end - 1.5).abs() < 1e-14);
        assert_eq!(s.detuning(0.0), 0.0);
        assert!((s.detuning(t_end) + 2.0 * wp).abs() < 1e-12);
        assert!((s.omega(0.0) - wt).abs() < 1e-12);
        assert!((s.omega(t_end) - wt).abs() < 1e-12);
    }

    #[test]
    fn pk_full_peak_rabi_frequency() {
        let (wt, wp) = standard_rates();
        let s = pk_full(wt, wp).unwrap();
        let peak = (0..=10_000)
            .map(|k| s.omega(1.5 * k as f64 / 10_000.0))
            .fold(0.0, f64::max);
        assert!((peak - wp.hypot(wt)).abs() < 1e-9);
        assert!((peak - 23.13).abs() < 0.01);
    }

    #[test]
    fn pk_full_phase_satisfies_the_arctangent_relation() {
        let (wt, wp) = (0.8, 5.0);
        let s = pk_full(wt, wp).unwrap();
        for k in 1..40 {
            let t = s.total_time() * k as f64 / 40.0;
            let (st, sp, cp) = ((wt * t).sin(), (wp * t).sin(), (wp * t).cos());
            let num = wp * st * sp - wt * cp;
            let den = wp * st * cp + wt * sp;
            let phase = s.phase(t);
            // same tangent, i.e. equal up to a multiple of π
            assert!((phase.sin() * den - phase.cos() * num).abs() < 1e-10);
        }
    }

    #[test]
    fn simplified_endpoints_and_midpoint() {
        let (wt, wp) = standard_rates();
        let s = pk_simplified(wt, wp).unwrap();
        let t_end = s.total_time();
        assert!((s.detuning(0.0) - wp).abs() < 1e-12);
        assert!(s.detuning(t_end / 2.0).abs() < 1e-12);
        assert!((s.detuning(t_end) + wp).abs() < 1e-12);
        assert!((s.omega(t_end / 2.0) - wp.hypot(wt)).abs() < 1e-12);
        let flat = pk_simplified_with(wt, wp, false).unwrap();
        assert_eq!(flat.phase(0.3), 0.0);
        assert_eq!(flat.omega(0.3), s.omega(0.3));
    }

    #[test]
    fn simplified_phase_matches_arctan_form_for_positive_rate() {
        // for ω_φ > 0 the continuous branch equals -arctan(ω_θ/(ω_φ sin θ)) + π
        let s = pk_simplified(1.0, 4.0).unwrap();
        for k in 1..20 {
            let t = s.total_time() * k as f64 / 20.0;
            let expected = -(1.0 / (4.0 * t.sin())).atan() + PI;
            assert!((s.phase(t) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rate_is_rejected() {
        assert!(pk_full(0.0, 1.0).is_err());
        assert!(pk_simplified(0.0, 1.0).is_err());
    }

    #[test]
    fn pk_paths_share_omega() {
        let (wt, wp) = standard_rates();
        let a = pk_full(wt, wp).unwrap();
        let b = pk_simplified(wt, wp).unwrap();
        for k in 0..=100 {
            let t = 1.5 * k as f64 / 100.0;
            assert_eq!(a.omega(t), b.omega(t));
        }
    }

    #[test]
    fn phase_is_continuous() {
        let (wt, wp) = standard_rates();
        for s in [pk_full(wt, wp).unwrap(), pk_simplified(wt, wp).unwrap()] {
            let samples: Vec<f64> = (0..10_000).map(|k| s.phase(1.5 * k as f64 / 9_999.0)).collect();
            let worst = samples.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            assert!(worst < PI / 2.0, "{:?}: jump {worst}", s.kind());
        }
    }

    #[test]
    fn hv_path_shape() {
        let (wt, wp) = standard_rates();
        let path = HvPath::matching(&FrameRates::new(wt, wp));
        let s = hv_unoptimized(path.clone()).unwrap();
        assert_eq!(s.omega(0.0), 0.0);
        assert!(s.omega(1.5).abs() < 1e-12);
        assert_eq!(s.detuning(1.5), path.delta_end);
        assert_eq!(s.detuning(0.0), path.delta_start);
        assert!((s.omega(0.75) - path.omega_max).abs() < 1e-12);
        assert!((0..=1000).all(|k| s.omega(1.5 * k as f64 / 1000.0) >= 0.0));

        for bad in [0.0, 0.5, -0.1] {
            assert!(hv_unoptimized(HvPath { ramp: bad, ..path.clone() }).is_err());
        }
    }

    #[test]
    fn knots_reproduce_samples() {
        let (wt, wp) = standard_rates();
        let hv = hv_unoptimized(HvPath::matching(&FrameRates::new(wt, wp))).unwrap();
        let k = KnotPath::sample(&hv, 7, KnotBoundary::Pinned).unwrap();
        let s = knots_to_schedule(k.clone()).unwrap();
        for t in k.knot_times() {
            assert!((s.omega(t) - hv.omega(t)).abs() < 1e-12);
            assert!((s.detuning(t) - hv.detuning(t)).abs() < 1e-12);
            assert_eq!(s.phase(t), 0.0);
        }
        // five interior Δ knots plus five interior Ω knots
        assert_eq!(k.parameter_count(), 10);
        let back = k.with_params(&k.params()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn two_knots_are_one_segment() {
        let k = KnotPath::new(2.0, vec![-1.0, 3.0], vec![0.0, 2.0], KnotBoundary::Free).unwrap();
        let s = knots_to_schedule(k).unwrap();
        assert!((s.detuning(0.5) - 0.0).abs() < 1e-15);
        assert!((s.omega(1.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn negative_omega_knot_is_rejected() {
        assert!(KnotPath::new(1.0, vec![0.0, 0.0], vec![0.0, -0.1], KnotBoundary::Free).is_err());
    }

    #[test]
    fn adiabaticity_ratios() {
        let s = pk_simplified(PI / 1.5, -23.04).unwrap();
        let r = adiabaticity_report(&s, mhz_to_rad_per_us(13.0), 0.5, 3.0).unwrap();
        assert!((r.interaction_ratio - 3.545).abs() < 0.01);
        assert!(!adiabaticity_report(&s, 1e6, 0.0, 3.0).unwrap().satisfied);
        let slow = pk_simplified(1e-9, -23.04).unwrap();
        let r = adiabaticity_report(&slow, 1e6, 0.5, 3.0).unwrap();
        assert!(r.gap_ratio > 1e6 && r.satisfied);
        let hv = hv_unoptimized(HvPath::matching(&FrameRates::new(1.0, 2.0))).unwrap();
        assert!(matches!(adiabaticity_report(&hv, 1.0, 1.0, 3.0), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn csv_has_header_and_points() {
        let s = pk_simplified(1.0, 2.0).unwrap();
        let csv = s.to_csv(11);
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.starts_with("t_us,omega_rad_per_us,phi_rad,delta_rad_per_us\n"));
    }
}
