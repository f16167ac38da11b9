//! Unit conventions: `ħ = 1`, energies and rates in rad/μs, times in μs.

use std::f64::consts::TAU;

/// Converts a frequency `f/h` given in MHz to an angular rate in rad/μs.
#[inline]
pub fn mhz_to_rad_per_us(mhz: f64) -> f64 {
    TAU * mhz
}

#[inline]
pub fn rad_per_us_to_mhz(rate: f64) -> f64 {
    rate / TAU
}
