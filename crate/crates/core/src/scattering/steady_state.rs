//! Full 2×2 steady state of the linearized output-mode/magnon equations.
//!
//! With the pumped mode replaced by a classical field of `n_pump` photons the
//! coupling becomes `G = g sqrt(n_pump)`. In the frame rotating at the
//! sideband frequency, `δ = 0` by construction and the detunings are
//! `Δ_out = Ω_out − ω_sideband`, `Δ_m = Ω_m − ω_drive`.
//!
//! Red (magnon-creating) process, for `a†` of the output mode and `b`:
//!
//! ```text
//! 0 = (iΔ_out − Γ_out/2) a† + iG b
//! 0 = −iG a† − (iΔ_m + Γ_m/2) b − sqrt(κ_m) B_in
//! ```
//!
//! Blue (magnon-annihilating) process, beam-splitter form for `a` and `b`:
//!
//! ```text
//! 0 = −(iΔ_out + Γ_out/2) a − iG b
//! 0 = −iG a − (iΔ_m + Γ_m/2) b − sqrt(κ_m) B_in
//! ```
//!
//! The output-mode input field is zero. `B_in` is taken real with
//! `|B_in|² = n_mw`. The scattered flux is `κ_out |a|²`.

use num_complex::Complex64;
use serde::Serialize;

use super::{intracavity_photon_number, ScatteringScenario, Sideband};
use crate::error::{Error, Result};
use crate::units::angular;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub sideband: Sideband,
    /// `a†` for the red process, `a` for the blue one.
    #[serde(serialize_with = "complex_pair")]
    pub output_amplitude: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub magnon_amplitude: Complex64,
    /// `κ_out |a|²`, photons/s.
    pub output_flux: f64,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Red-process steady state: the direct counterpart of
/// [`super::scattered_flux_red`] without the adiabatic elimination.
pub fn full_linear_steady_state(s: &ScatteringScenario) -> Result<SteadyState> {
    full_linear_steady_state_for(s, Sideband::Red)
}

pub fn full_linear_steady_state_for(s: &ScatteringScenario, sideband: Sideband) -> Result<SteadyState> {
    s.validate()?;
    let i = Complex64::i();
    let pump = s.pumped_mode();
    let out = s.output_mode();

    let n_pump = intracavity_photon_number(pump, s.input_flux_per_s, s.laser_frequency_hz)?;
    let big_g = s.coupling_g * n_pump.sqrt();

    let delta_out = angular(out.frequency_hz - s.sideband_frequency_hz(sideband));
    let half_out = 0.5 * angular(out.total_linewidth_hz());
    let delta_m = angular(s.kittel.frequency_hz - s.microwave.frequency_hz);
    let half_m = 0.5 * angular(s.kittel.total_linewidth_hz());
    let source = (angular(s.kittel.external_coupling_hz) * s.microwave.flux_per_s).sqrt();

    // [m00 m01; m10 m11] (a, b)^T = (0, r)^T
    let (m00, m01) = match sideband {
        Sideband::Red => (i * delta_out - half_out, i * big_g),
        Sideband::Blue => (-(i * delta_out + half_out), -i * big_g),
    };
    let m10 = -i * big_g;
    let m11 = -(i * delta_m + half_m);
    let rhs = Complex64::new(source, 0.0);

    let det = m00 * m11 - m01 * m10;
    if det == Complex64::new(0.0, 0.0) || !det.is_finite() {
        return Err(Error::SingularSystem);
    }
    // Cramer's rule with the first right-hand entry zero.
    let a = -m01 * rhs / det;
    let b = m00 * rhs / det;

    Ok(SteadyState {
        sideband,
        output_amplitude: a,
        magnon_amplitude: b,
        output_flux: angular(out.kappa_hz) * a.norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::reference_scenario;
    use super::super::{scattered_flux_blue, scattered_flux_red, weak_coupling_check, MicrowaveDrive};
    use super::*;
    use crate::resonator::Polarization;
    use approx::assert_relative_eq;

    #[test]
    fn decoupled_limit() {
        let s = ScatteringScenario { coupling_g: 0.0, ..reference_scenario() };
        let ss = full_linear_steady_state(&s).unwrap();
        assert_eq!(ss.output_amplitude, Complex64::new(0.0, 0.0));
        assert_eq!(ss.output_flux, 0.0);
        let i = Complex64::i();
        let delta_m = angular(s.kittel.frequency_hz - s.microwave.frequency_hz);
        let half_m = 0.5 * angular(s.kittel.total_linewidth_hz());
        let expected = -(angular(s.kittel.external_coupling_hz) * s.microwave.flux_per_s).sqrt() / (i * delta_m + half_m);
        assert_relative_eq!(ss.magnon_amplitude.re, expected.re, max_relative = 1e-12);
        assert_relative_eq!(ss.magnon_amplitude.im, expected.im, epsilon = 1e-6 * expected.norm());
    }

    #[test]
    fn matches_adiabatic_red_flux_at_reference_point() {
        let s = reference_scenario();
        let full = full_linear_steady_state(&s).unwrap().output_flux;
        // Stimulated part only; the full solve carries no vacuum term.
        let adiabatic = scattered_flux_red(&s).unwrap() * s.microwave.flux_per_s / (s.microwave.flux_per_s + 1.0);
        assert!(weak_coupling_check(&s).unwrap().margin < 1e-3);
        assert_relative_eq!(full, adiabatic, max_relative = 1e-6);
    }

    #[test]
    fn matches_adiabatic_blue_flux() {
        let s = ScatteringScenario {
            input_polarization: Polarization::TE,
            laser_frequency_hz: reference_scenario().te_mode.frequency_hz,
            ..reference_scenario()
        };
        let full = full_linear_steady_state_for(&s, Sideband::Blue).unwrap().output_flux;
        assert_relative_eq!(full, scattered_flux_blue(&s).unwrap(), max_relative = 1e-6);
    }

    #[test]
    fn off_resonant_drive_uses_sideband_frame() {
        // Detuned microwave drive: δ stays zero in the sideband frame and the
        // output frequency follows the drive, not the Kittel frequency.
        let mut s = reference_scenario();
        s.microwave = MicrowaveDrive::from_power(1e-3, 6.812e9);
        let full = full_linear_steady_state(&s).unwrap().output_flux;
        let adiabatic = scattered_flux_red(&s).unwrap() * s.microwave.flux_per_s / (s.microwave.flux_per_s + 1.0);
        assert_relative_eq!(full, adiabatic, max_relative = 1e-6);
    }

    #[test]
    fn strong_coupling_departs_from_adiabatic() {
        let mut s = ScatteringScenario { coupling_g: reference_scenario().coupling_g * 3e4, ..reference_scenario() };
        s.te_mode.frequency_hz = s.sideband_frequency_hz(Sideband::Red);
        assert!(weak_coupling_check(&s).unwrap().margin > 1e-2);
        let full = full_linear_steady_state(&s).unwrap().output_flux;
        let adiabatic = scattered_flux_red(&s).unwrap();
        assert!((full / adiabatic - 1.0).abs() > 0.01);
    }
}
