//! Physical constants and the single Hz <-> rad/s conversion layer.
//!
//! Every rate stored in a public type is an ordinary frequency in Hz. The
//! steady-state algebra works in rad/s; conversions happen through the
//! helpers below and nowhere else.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Hz -> rad/s.
#[inline]
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// rad/s -> Hz.
#[inline]
pub fn ordinary(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}

/// Converts a density of states expressed per Hz into one per (rad/s).
///
/// `kappa / (delta^2 + (Gamma/2)^2)` evaluated with angular rates equals the
/// same expression evaluated in Hz divided by 2π.
#[inline]
pub fn dos_to_angular(per_hz: f64) -> f64 {
    per_hz / (2.0 * PI)
}

/// Shortest round-trip text for `x`, in exponent form outside `[1e-4, 1e16)`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;
pub const MICRON: f64 = 1e-6;
