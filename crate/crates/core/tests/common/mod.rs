#![allow(dead_code)]

use omsim_core::magnonics::KittelMode;
use omsim_core::resonator::{build_ladder, FamilySpec, Linewidths, ModeLadder, OpticalMode, Polarization, ResonatorSpec};
use omsim_core::scattering::{Magnetization, MicrowaveDrive, Orbit, ScatteringScenario};
use omsim_core::units::angular;
use rand::Rng;

pub const TM_HZ: f64 = 193_133e9;

pub fn reference_scenario() -> ScatteringScenario {
    let te_hz = TM_HZ - 50e9;
    let te = OpticalMode::new(Polarization::TE, te_hz, Linewidths::from_quality_factor(te_hz, 1e5, 0.4e9).unwrap()).unwrap();
    let tm = OpticalMode::new(Polarization::TM, TM_HZ, Linewidths::from_quality_factor(TM_HZ, 1e5, 0.4e9).unwrap()).unwrap();
    ScatteringScenario {
        orbit: Orbit::Ccw,
        magnetization: Magnetization::Up,
        input_polarization: Polarization::TM,
        input_flux_per_s: 3e15,
        laser_frequency_hz: TM_HZ - 3e9,
        te_mode: te,
        tm_mode: tm,
        kittel: KittelMode::critically_coupled(6.81e9, 3000.0).unwrap(),
        coupling_g: angular(5.0),
        microwave: MicrowaveDrive::from_power(1e-3, 6.81e9),
        spin_orbit_imperfection: 0.0,
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Any valid scenario: random mode placement, linewidths, drive and coupling.
pub fn random_scenario<R: Rng>(rng: &mut R) -> ScatteringScenario {
    let tm_hz = rng.gen_range(180e12..200e12);
    let te_hz = tm_hz - rng.gen_range(1e9..80e9);
    let te = OpticalMode::new(
        Polarization::TE,
        te_hz,
        Linewidths::new(log_uniform(rng, 1e7, 5e9), log_uniform(rng, 1e7, 5e9)),
    )
    .unwrap();
    let tm = OpticalMode::new(
        Polarization::TM,
        tm_hz,
        Linewidths::new(log_uniform(rng, 1e7, 5e9), log_uniform(rng, 1e7, 5e9)),
    )
    .unwrap();
    let kittel_hz = rng.gen_range(1e9..20e9);
    let input_polarization = if rng.gen_bool(0.5) { Polarization::TM } else { Polarization::TE };
    let pumped = if input_polarization == Polarization::TM { tm_hz } else { te_hz };
    ScatteringScenario {
        orbit: if rng.gen_bool(0.5) { Orbit::Ccw } else { Orbit::Cw },
        magnetization: Magnetization::Up,
        input_polarization,
        input_flux_per_s: log_uniform(rng, 1e12, 1e17),
        laser_frequency_hz: pumped + rng.gen_range(-5e9..5e9),
        te_mode: te,
        tm_mode: tm,
        kittel: KittelMode::new(kittel_hz, log_uniform(rng, 1e5, 1e8), log_uniform(rng, 1e5, 1e8)).unwrap(),
        coupling_g: angular(log_uniform(rng, 0.1, 1e3)),
        microwave: MicrowaveDrive::from_flux(log_uniform(rng, 1e10, 1e22), kittel_hz + rng.gen_range(-5e6..5e6)),
        spin_orbit_imperfection: 0.0,
    }
}

/// Ladder with random families on a 750 µm-class sphere. The Kittel
/// frequency is whole hertz so that `(ω + ω_m) − ω_m` reproduces `ω`
/// exactly near 190 THz.
pub fn random_ladder<R: Rng>(rng: &mut R) -> (ModeLadder, KittelMode) {
    let spec = ResonatorSpec::new(rng.gen_range(300e-6..1.5e-3), rng.gen_range(1.8..2.6)).unwrap();
    let n_families = rng.gen_range(1..5);
    let families: Vec<FamilySpec> = (0..n_families)
        .map(|_| FamilySpec {
            weight: rng.gen_range(0.1..3.0),
            te: Linewidths::new(log_uniform(rng, 1e8, 3e9), log_uniform(rng, 1e8, 1e9)),
            tm: Linewidths::new(log_uniform(rng, 1e8, 3e9), log_uniform(rng, 1e8, 1e9)),
            offset_hz: rng.gen_range(0.0..50e9),
        })
        .collect();
    let ladder = build_ladder(&spec, &families, rng.gen_range(1..4), 192.9e12).unwrap();
    let kittel = KittelMode::critically_coupled(rng.gen_range(2e9..15e9_f64).round(), rng.gen_range(500.0..5000.0)).unwrap();
    (ladder, kittel)
}
