//! Magnon-induced Brillouin scattering between a TE/TM mode pair.
//!
//! Rates on [`ScatteringScenario`] are stored in Hz. Every flux formula here
//! converts them to rad/s before multiplying: densities of states become
//! `κ / (Δ² + (Γ/2)²)` in seconds and `g` is carried in rad/s, so
//! `g² ρ ρ ρ n_in n_mw` comes out in photons per second.
//!
//! The adiabatic-elimination fluxes ([`scattered_flux_red`],
//! [`scattered_flux_blue`]) are checked against the full linear steady
//! state in [`steady_state`].

mod improve;
mod selection;
pub mod steady_state;

pub use improve::{staged_efficiency, Improvement, ImprovementPlan, Stage, StagedEfficiency};
pub use selection::{
    select_process, select_process_with, selection_table, CavityPolarization, Magnetization, Orbit,
    ProcessOutcome, Sideband,
};
pub use steady_state::{full_linear_steady_state, full_linear_steady_state_for, SteadyState};

use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};
use crate::instrument::photon_flux;
use crate::magnonics::KittelMode;
use crate::resonator::{OpticalMode, Polarization};
use crate::units::{angular, dos_to_angular};

/// Weak-coupling margins below this count as weak.
pub const WEAK_COUPLING_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MicrowaveDrive {
    pub flux_per_s: f64,
    pub frequency_hz: f64,
}

impl MicrowaveDrive {
    pub fn from_flux(flux_per_s: f64, frequency_hz: f64) -> Self {
        Self {
            flux_per_s,
            frequency_hz,
        }
    }

    /// Flux from power via `P / (h ν)`.
    pub fn from_power(power_w: f64, frequency_hz: f64) -> Self {
        Self::from_flux(photon_flux(power_w, frequency_hz), frequency_hz)
    }
}

/// Everything the steady-state flux formulas need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringScenario {
    pub orbit: Orbit,
    pub magnetization: Magnetization,
    pub input_polarization: Polarization,
    /// Optical input flux into the pumped mode, photons/s.
    pub input_flux_per_s: f64,
    pub laser_frequency_hz: f64,
    pub te_mode: OpticalMode,
    pub tm_mode: OpticalMode,
    pub kittel: KittelMode,
    /// rad/s.
    pub coupling_g: f64,
    pub microwave: MicrowaveDrive,
    /// Amplitude leaking into the nominally forbidden sideband.
    pub spin_orbit_imperfection: f64,
}

impl ScatteringScenario {
    pub fn validate(&self) -> Result<()> {
        non_negative("input_flux_per_s", self.input_flux_per_s)?;
        positive("laser_frequency_hz", self.laser_frequency_hz)?;
        self.te_mode.validate()?;
        self.tm_mode.validate()?;
        self.kittel.validate()?;
        if self.kittel.total_linewidth_hz() <= 0.0 {
            return Err(Error::ZeroLinewidth);
        }
        non_negative("coupling_g", self.coupling_g)?;
        non_negative("microwave.flux_per_s", self.microwave.flux_per_s)?;
        positive("microwave.frequency_hz", self.microwave.frequency_hz)?;
        let eps = self.spin_orbit_imperfection;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidParameter {
                name: "spin_orbit_imperfection",
                value: eps,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }

    pub fn mode(&self, polarization: Polarization) -> &OpticalMode {
        match polarization {
            Polarization::TE => &self.te_mode,
            Polarization::TM => &self.tm_mode,
        }
    }

    pub fn mode_mut(&mut self, polarization: Polarization) -> &mut OpticalMode {
        match polarization {
            Polarization::TE => &mut self.te_mode,
            Polarization::TM => &mut self.tm_mode,
        }
    }

    /// The mode the laser drives.
    pub fn pumped_mode(&self) -> &OpticalMode {
        self.mode(self.input_polarization)
    }

    /// The mode the scattered photons leave through.
    pub fn output_mode(&self) -> &OpticalMode {
        self.mode(self.input_polarization.other())
    }

    /// Frequency of the scattered light for `sideband`, Hz.
    pub fn sideband_frequency_hz(&self, sideband: Sideband) -> f64 {
        self.laser_frequency_hz + sideband.shift_sign() * self.microwave.frequency_hz
    }

    /// The allowed process for this scenario's orbit, input and field direction.
    pub fn process(&self) -> ProcessOutcome {
        select_process_with(self.orbit, self.input_polarization, self.magnetization)
    }
}

fn dos_angular(mode: &OpticalMode, frequency_hz: f64) -> f64 {
    dos_to_angular(mode.dos(frequency_hz))
}

/// Mean intracavity photon number `n_in κ / (Δ² + (Γ/2)²)` with all rates in
/// rad/s. On resonance at critical coupling this is `n_in / (π Γ_Hz)`.
pub fn intracavity_photon_number(mode: &OpticalMode, input_flux_per_s: f64, frequency_hz: f64) -> Result<f64> {
    if mode.total_linewidth_hz() <= 0.0 {
        return Err(Error::ZeroLinewidth);
    }
    non_negative("input_flux_per_s", input_flux_per_s)?;
    Ok(input_flux_per_s * dos_angular(mode, frequency_hz))
}

/// `g² ρ_in(ω) ρ_out(ω ± ω_d) ρ_m(ω_d) n_in`: sideband flux per unit of
/// microwave occupation, before the stimulated/spontaneous factor.
fn rate_per_microwave_photon(s: &ScatteringScenario, sideband: Sideband) -> f64 {
    let rho_in = dos_angular(s.pumped_mode(), s.laser_frequency_hz);
    let rho_out = dos_angular(s.output_mode(), s.sideband_frequency_hz(sideband));
    let rho_m = dos_to_angular(
        crate::resonator::lorentzian(
            s.kittel.frequency_hz,
            s.kittel.intrinsic_decay_hz,
            s.kittel.external_coupling_hz,
            s.microwave.frequency_hz,
        ),
    );
    s.coupling_g * s.coupling_g * rho_in * rho_out * rho_m * s.input_flux_per_s
}

fn occupation_factor(s: &ScatteringScenario, sideband: Sideband) -> f64 {
    match sideband {
        Sideband::Red => s.microwave.flux_per_s + 1.0,
        Sideband::Blue => s.microwave.flux_per_s,
    }
}

/// Unweighted flux into `sideband`, photons/s.
pub fn sideband_flux(s: &ScatteringScenario, sideband: Sideband) -> Result<f64> {
    s.validate()?;
    Ok(rate_per_microwave_photon(s, sideband) * occupation_factor(s, sideband))
}

/// Magnon-creating flux, `g² ρ_out(ω − ω_m) ρ_in(ω) ρ_m(ω_m) n_in (n_mw + 1)`.
///
/// With TM input this is the CCW allowed channel; the `+ 1` keeps the
/// spontaneous term alive when no microwaves are applied.
pub fn scattered_flux_red(s: &ScatteringScenario) -> Result<f64> {
    sideband_flux(s, Sideband::Red)
}

/// Magnon-annihilating flux, `g² ρ_in(ω) ρ_out(ω + ω_m) ρ_m(ω_m) n_in n_mw`.
/// Stimulated only: zero without microwave drive.
pub fn scattered_flux_blue(s: &ScatteringScenario) -> Result<f64> {
    sideband_flux(s, Sideband::Blue)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelFluxes {
    pub allowed: Sideband,
    pub allowed_flux: f64,
    pub forbidden_flux: f64,
}

/// Allowed channel at weight 1 and the other sideband at flux weight `ε²`,
/// each with its own frequency arguments.
pub fn channel_fluxes(s: &ScatteringScenario) -> Result<ChannelFluxes> {
    let allowed = s.process().sideband;
    let eps = s.spin_orbit_imperfection;
    let allowed_flux = sideband_flux(s, allowed)?;
    let forbidden_flux = if eps == 0.0 {
        0.0
    } else {
        eps * eps * sideband_flux(s, allowed.other())?
    };
    Ok(ChannelFluxes {
        allowed,
        allowed_flux,
        forbidden_flux,
    })
}

fn ratio_db(num: f64, den: f64) -> Result<f64> {
    match (num > 0.0, den > 0.0) {
        (true, true) => Ok(10.0 * (num / den).log10()),
        (true, false) => Ok(f64::INFINITY),
        (false, true) => Ok(f64::NEG_INFINITY),
        (false, false) => Err(Error::UndefinedRatio),
    }
}

/// Flux the detector sees when the same drive is sent into `orbit`. The
/// detected sideband is the one a CCW orbit produces under +z field.
fn detected_flux(s: &ScatteringScenario, orbit: Orbit) -> Result<f64> {
    let detected = select_process(Orbit::Ccw, s.input_polarization).sideband;
    let allowed = select_process_with(orbit, s.input_polarization, s.magnetization).sideband;
    let weight = if allowed == detected { 1.0 } else { s.spin_orbit_imperfection };
    if weight == 0.0 {
        return Ok(0.0);
    }
    Ok(weight * weight * sideband_flux(s, detected)?)
}

/// `10 log10(P_ccw / P_cw)` for the beat at the CCW-favoured sideband.
///
/// The orbit field on the scenario is ignored; both orbits are evaluated
/// at identical drive. Returns `+inf` when the CW signal vanishes (`ε = 0`).
pub fn nonreciprocity_ratio_db(s: &ScatteringScenario) -> Result<f64> {
    s.validate()?;
    ratio_db(detected_flux(s, Orbit::Ccw)?, detected_flux(s, Orbit::Cw)?)
}

/// `10 log10(red / blue)` of the weighted sideband fluxes on the scenario's orbit.
pub fn sideband_asymmetry_db(s: &ScatteringScenario) -> Result<f64> {
    let ch = channel_fluxes(s)?;
    let (red, blue) = match ch.allowed {
        Sideband::Red => (ch.allowed_flux, ch.forbidden_flux),
        Sideband::Blue => (ch.forbidden_flux, ch.allowed_flux),
    };
    ratio_db(red, blue)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakCoupling {
    pub ok: bool,
    pub margin: f64,
}

/// `g² n_pump / (Γ_pump Γ_m)` with angular rates; weak iff below 1e-2.
pub fn weak_coupling_check(s: &ScatteringScenario) -> Result<WeakCoupling> {
    s.validate()?;
    let pump = s.pumped_mode();
    let n_pump = intracavity_photon_number(pump, s.input_flux_per_s, s.laser_frequency_hz)?;
    let margin = s.coupling_g * s.coupling_g * n_pump
        / (angular(pump.total_linewidth_hz()) * angular(s.kittel.total_linewidth_hz()));
    Ok(WeakCoupling {
        ok: margin < WEAK_COUPLING_THRESHOLD,
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiency {
    pub value: f64,
    pub weak_coupling: WeakCoupling,
    /// Set when the weak-coupling assumption fails; the value is not clamped.
    pub flagged: bool,
}

/// Microwave-to-optical photon conversion efficiency of the allowed
/// channel, using only the stimulated term: `n_out / n_mw`.
pub fn conversion_efficiency(s: &ScatteringScenario) -> Result<Efficiency> {
    s.validate()?;
    positive("microwave.flux_per_s", s.microwave.flux_per_s)?;
    let value = rate_per_microwave_photon(s, s.process().sideband);
    let weak_coupling = weak_coupling_check(s)?;
    Ok(Efficiency {
        value,
        weak_coupling,
        flagged: !weak_coupling.ok,
    })
}

/// Coupling constant (rad/s) that makes [`scattered_flux_red`] reproduce a
/// measured sideband flux. `s.coupling_g` is ignored.
pub fn g_exp_from_sideband(measured_flux_per_s: f64, s: &ScatteringScenario) -> Result<f64> {
    if measured_flux_per_s < 0.0 || !measured_flux_per_s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "measured_flux_per_s",
            value: measured_flux_per_s,
            reason: "sideband flux cannot be negative",
        });
    }
    let unit = ScatteringScenario {
        coupling_g: 1.0,
        ..*s
    };
    unit.validate()?;
    let per_g_sq = rate_per_microwave_photon(&unit, Sideband::Red) * occupation_factor(&unit, Sideband::Red);
    if measured_flux_per_s == 0.0 {
        return Ok(0.0);
    }
    if per_g_sq <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "density_of_states",
            value: per_g_sq,
            reason: "densities of states vanish at the operating point",
        });
    }
    Ok((measured_flux_per_s / per_g_sq).sqrt())
}

/// JSON-ready evaluation of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub inputs: ScatteringScenario,
    pub fluxes: ChannelFluxes,
    pub efficiency: Option<f64>,
    pub weak_coupling_margin: f64,
    pub warnings: Vec<String>,
}

pub fn evaluate(s: &ScatteringScenario) -> Result<ScatteringResult> {
    let fluxes = channel_fluxes(s)?;
    let weak = weak_coupling_check(s)?;
    let mut warnings = Vec::new();
    if !weak.ok {
        warnings.push(format!(
            "weak-coupling margin {:.3e} exceeds {:.0e}; adiabatic elimination is not trustworthy",
            weak.margin, WEAK_COUPLING_THRESHOLD
        ));
    }
    let efficiency = if s.microwave.flux_per_s > 0.0 {
        let eff = conversion_efficiency(s)?;
        if eff.value > 1.0 {
            warnings.push(format!("conversion efficiency {:.3e} exceeds unity", eff.value));
        }
        Some(eff.value)
    } else {
        None
    };
    Ok(ScatteringResult {
        inputs: *s,
        fluxes,
        efficiency,
        weak_coupling_margin: weak.margin,
        warnings,
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn photon_number_conventions() {
        let s = reference_scenario();
        assert_eq!(intracavity_photon_number(&s.tm_mode, 0.0, s.laser_frequency_hz).unwrap(), 0.0);

        let crit = OpticalMode::new(Polarization::TM, 1e14, crate::resonator::Linewidths::new(1e9, 1e9)).unwrap();
        let n = intracavity_photon_number(&crit, 1e15, 1e14).unwrap();
        assert_relative_eq!(n, 1e15 / (PI * 2e9), max_relative = 1e-14);

        // 3e15 * 0.4e9 / (9e18 + (2.3e9/2)^2) / 2π with Γ = 2.3 GHz.
        let m = OpticalMode::new(Polarization::TM, 1e14, crate::resonator::Linewidths::new(1.9e9, 0.4e9)).unwrap();
        let n = intracavity_photon_number(&m, 3e15, 1e14 - 3e9).unwrap();
        assert_relative_eq!(n, 3e15 * 0.4e9 / (9e18 + 1.3225e18) / (2.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(n, 18_500.9, max_relative = 1e-4);
    }

    #[test]
    fn red_flux_scalings() {
        let s = reference_scenario();
        let base = scattered_flux_red(&s).unwrap();
        let zero_g = ScatteringScenario { coupling_g: 0.0, ..s };
        assert_eq!(scattered_flux_red(&zero_g).unwrap(), 0.0);
        let no_mw = ScatteringScenario {
            microwave: MicrowaveDrive::from_flux(0.0, 6.81e9),
            ..s
        };
        let spont = scattered_flux_red(&no_mw).unwrap();
        assert!(spont > 0.0);
        assert_relative_eq!(spont * (s.microwave.flux_per_s + 1.0), base, max_relative = 1e-12);
        let doubled = ScatteringScenario {
            input_flux_per_s: 2.0 * s.input_flux_per_s,
            ..s
        };
        assert_relative_eq!(scattered_flux_red(&doubled).unwrap(), 2.0 * base, max_relative = 1e-14);
    }

    #[test]
    fn blue_flux_is_stimulated_only() {
        let s = ScatteringScenario {
            input_polarization: Polarization::TE,
            laser_frequency_hz: reference_scenario().te_mode.frequency_hz,
            ..reference_scenario()
        };
        let no_mw = ScatteringScenario {
            microwave: MicrowaveDrive::from_flux(0.0, 6.81e9),
            ..s
        };
        assert_eq!(scattered_flux_blue(&no_mw).unwrap(), 0.0);
        let double_g = ScatteringScenario { coupling_g: 2.0 * s.coupling_g, ..s };
        assert_relative_eq!(
            scattered_flux_blue(&double_g).unwrap(),
            4.0 * scattered_flux_blue(&s).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn red_blue_ratio_is_a_dos_ratio() {
        let tm_in = ScatteringScenario {
            microwave: MicrowaveDrive::from_flux(1e25, 6.81e9),
            ..reference_scenario()
        };
        let te_in = ScatteringScenario {
            input_polarization: Polarization::TE,
            ..tm_in
        };
        let w = tm_in.laser_frequency_hz;
        let wm = tm_in.microwave.frequency_hz;
        let expected = tm_in.te_mode.dos(w - wm) * tm_in.tm_mode.dos(w) / (tm_in.te_mode.dos(w) * tm_in.tm_mode.dos(w + wm));
        let ratio = scattered_flux_red(&tm_in).unwrap() / scattered_flux_blue(&te_in).unwrap();
        assert_relative_eq!(ratio, expected, max_relative = 1e-12);
    }

    #[test]
    fn forbidden_channel_weights() {
        let s = reference_scenario();
        let ch = channel_fluxes(&s).unwrap();
        assert_eq!(ch.allowed, Sideband::Red);
        assert_eq!(ch.forbidden_flux, 0.0);

        let leaky = ScatteringScenario { spin_orbit_imperfection: 0.1, ..s };
        let ch = channel_fluxes(&leaky).unwrap();
        let dos_ratio = scattered_flux_blue(&leaky).unwrap() / scattered_flux_red(&leaky).unwrap();
        assert_relative_eq!(ch.forbidden_flux / ch.allowed_flux, 0.01 * dos_ratio, max_relative = 1e-12);
        assert!(ch.forbidden_flux / ch.allowed_flux <= 1e-2 * dos_ratio * (1.0 + 1e-12));
    }

    #[test]
    fn imperfection_out_of_range_is_rejected() {
        let s = ScatteringScenario { spin_orbit_imperfection: 1.5, ..reference_scenario() };
        assert!(channel_fluxes(&s).is_err());
    }

    #[test]
    fn nonreciprocity() {
        let s = reference_scenario();
        assert_eq!(nonreciprocity_ratio_db(&s).unwrap(), f64::INFINITY);
        let leaky = ScatteringScenario { spin_orbit_imperfection: 0.1, ..s };
        let db = nonreciprocity_ratio_db(&leaky).unwrap();
        assert_relative_eq!(db, 20.0, max_relative = 1e-12);
        let flipped = ScatteringScenario { magnetization: Magnetization::Down, ..leaky };
        assert_relative_eq!(nonreciprocity_ratio_db(&flipped).unwrap(), -db, max_relative = 1e-12);
        let dead = ScatteringScenario { coupling_g: 0.0, ..leaky };
        assert_eq!(nonreciprocity_ratio_db(&dead), Err(Error::UndefinedRatio));
    }

    #[test]
    fn sideband_asymmetry_favours_red_for_tm_input() {
        let leaky = ScatteringScenario { spin_orbit_imperfection: 0.1, ..reference_scenario() };
        assert!(sideband_asymmetry_db(&leaky).unwrap() > 20.0);
        let te = ScatteringScenario {
            input_polarization: Polarization::TE,
            laser_frequency_hz: leaky.te_mode.frequency_hz + 3e9,
            ..leaky
        };
        assert!(sideband_asymmetry_db(&te).unwrap() < -20.0);
    }

    #[test]
    fn weak_coupling() {
        let s = reference_scenario();
        let w = weak_coupling_check(&s).unwrap();
        assert!(w.ok && w.margin < 1e-6, "{w:?}");
        let zero = weak_coupling_check(&ScatteringScenario { coupling_g: 0.0, ..s }).unwrap();
        assert_eq!(zero.margin, 0.0);
        assert!(zero.ok);
        let strong = weak_coupling_check(&ScatteringScenario { coupling_g: s.coupling_g * 1e6, ..s }).unwrap();
        assert!(!strong.ok);
    }

    #[test]
    fn efficiency_anchor() {
        let eff = conversion_efficiency(&reference_scenario()).unwrap();
        assert!(eff.value > 7e-14 / 3.0 && eff.value < 7e-14 * 3.0, "{}", eff.value);
        assert!(!eff.flagged);
        let zero = conversion_efficiency(&ScatteringScenario { coupling_g: 0.0, ..reference_scenario() }).unwrap();
        assert_eq!(zero.value, 0.0);
        let no_mw = ScatteringScenario {
            microwave: MicrowaveDrive::from_flux(0.0, 6.81e9),
            ..reference_scenario()
        };
        assert!(conversion_efficiency(&no_mw).is_err());
    }

    #[test]
    fn strong_coupling_is_flagged_not_clamped() {
        let s = ScatteringScenario { coupling_g: reference_scenario().coupling_g * 1e8, ..reference_scenario() };
        let eff = conversion_efficiency(&s).unwrap();
        assert!(eff.flagged);
        assert!(eff.value > 1.0);
        let report = evaluate(&s).unwrap();
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn efficiency_rises_with_kittel_coupling_up_to_critical() {
        let s = reference_scenario();
        let total = s.kittel.total_linewidth_hz();
        let mut last = 0.0;
        for i in 1..=50 {
            let kappa = total / 2.0 * f64::from(i) / 50.0;
            let scn = ScatteringScenario {
                kittel: KittelMode::new(6.81e9, total - kappa, kappa).unwrap(),
                ..s
            };
            let eta = conversion_efficiency(&scn).unwrap().value;
            assert!(eta > last);
            last = eta;
        }
    }

    #[test]
    fn g_round_trip_and_anchor() {
        let s = reference_scenario();
        let flux = scattered_flux_red(&s).unwrap();
        assert_relative_eq!(g_exp_from_sideband(flux, &s).unwrap(), s.coupling_g, max_relative = 1e-9);
        assert_relative_eq!(
            g_exp_from_sideband(4.0 * flux, &s).unwrap(),
            2.0 * s.coupling_g,
            max_relative = 1e-12
        );
        assert_eq!(g_exp_from_sideband(0.0, &s).unwrap(), 0.0);
        assert!(g_exp_from_sideband(-1.0, &s).is_err());

        let measured = ScatteringScenario {
            microwave: MicrowaveDrive::from_flux(2.2e20, 6.81e9),
            ..s
        };
        let g_hz = g_exp_from_sideband(8.1e6, &measured).unwrap() / (2.0 * PI);
        assert!((g_hz / 5.0 - 1.0).abs() <= 0.5, "{g_hz}");
    }

    #[test]
    fn translation_invariance() {
        let s = reference_scenario();
        let fsr = 62.1e9;
        let mut shifted = s;
        shifted.laser_frequency_hz += fsr;
        shifted.te_mode.frequency_hz += fsr;
        shifted.tm_mode.frequency_hz += fsr;
        for sb in [Sideband::Red, Sideband::Blue] {
            assert_relative_eq!(
                sideband_flux(&s, sb).unwrap(),
                sideband_flux(&shifted, sb).unwrap(),
                max_relative = 1e-6
            );
        }
    }
}
