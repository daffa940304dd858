//! SI constants (CODATA 2018 exact values where defined).

use std::f64::consts::PI;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// First zero of the Bessel function J0.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

pub const TWO_PI: f64 = 2.0 * PI;

#[inline]
pub fn hz_to_rad_s(hz: f64) -> f64 {
    TWO_PI * hz
}

#[inline]
pub fn rad_s_to_hz(w: f64) -> f64 {
    w / TWO_PI
}
