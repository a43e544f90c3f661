mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use omsim_core::instrument::{dbm_to_watts, photon_flux, sideband_flux_from_snr, snr_from_sideband_flux, watts_to_dbm};
use omsim_core::magnonics::{coupling_g_from_field_prefactors, coupling_g_theory, MagnetMaterial, SampleGeometry};
use omsim_core::resonator::{build_ladder, lorentzian_dos, FamilySpec, Linewidths, OpticalMode, Polarization, ResonatorSpec};
use omsim_core::scattering::{
    full_linear_steady_state_for, g_exp_from_sideband, scattered_flux_red, sideband_flux, weak_coupling_check, Sideband,
};
use omsim_core::spectra::{
    correlation_peaks, cross_correlation, strength_te_to_tm, strength_tm_to_te, sweep, symmetric_offsets, Direction,
    FrequencyGrid, ScatteringSpectrum,
};
use omsim_core::units::{angular, SPEED_OF_LIGHT};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lorentzian_integrates_to_two_pi_kappa_over_gamma(
        gamma in 1e6f64..5e9,
        kappa in 1e6f64..5e9,
        center in 1e14f64..3e14,
    ) {
        let mode = OpticalMode::new(Polarization::TE, center, Linewidths::new(gamma, kappa)).unwrap();
        let total = gamma + kappa;
        let step = total / 20.0;
        let n = 2 * 2000 * 20;
        let xs: Vec<f64> = (0..=n).map(|k| center - 2000.0 * total + k as f64 * step).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| lorentzian_dos(&mode, x).unwrap()).collect();
        let expected = 2.0 * PI * kappa / total;
        prop_assert!((trapezoid(&xs, &ys) / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn coupling_matches_closed_form(
        verdet_rad_per_cm in 0.1f64..1e3,
        spin_density in 1e26f64..1e29,
        index in 1.2f64..4.0,
        diameter in 1e-5f64..5e-3,
    ) {
        let material = MagnetMaterial::new(verdet_rad_per_cm, spin_density, index).unwrap();
        let sphere = SampleGeometry::sphere(diameter).unwrap();
        let volume = PI * diameter.powi(3) / 6.0;
        let oracle = verdet_rad_per_cm * 100.0 * SPEED_OF_LIGHT / index * (2.0 / (spin_density * volume)).sqrt();
        let g = coupling_g_theory(&material, &sphere);
        prop_assert!((g / oracle - 1.0).abs() < 1e-12);

        // g ∝ V^{-1/2}.
        let half = SampleGeometry::custom(volume / 4.0).unwrap();
        prop_assert!((coupling_g_theory(&material, &half) / (2.0 * g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn field_prefactor_route_agrees(
        index in 1.2f64..4.0,
        wavelength in 0.5e-6f64..3e-6,
        mode_volume in 1e-15f64..1e-9,
    ) {
        let material = MagnetMaterial::new(3.77, 2.1e28, index).unwrap();
        let sphere = SampleGeometry::sphere(750e-6).unwrap();
        let k0 = 2.0 * PI / wavelength;
        let a = coupling_g_theory(&material, &sphere);
        let b = coupling_g_from_field_prefactors(&material, &sphere, k0, mode_volume).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snr_round_trip(flux in 1e-3f64..1e15, rbw in 1e-2f64..1e7) {
        let snr = snr_from_sideband_flux(flux, rbw).unwrap();
        prop_assert!((sideband_flux_from_snr(snr, rbw).unwrap() / flux - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dbm_round_trip(dbm in -150f64..60.0) {
        prop_assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-12 * dbm.abs().max(1.0));
    }

    #[test]
    fn photon_flux_homogeneity(p in 1e-12f64..10.0, f in 1e6f64..1e15, c in 0.01f64..100.0) {
        let base = photon_flux(p, f);
        prop_assert!((photon_flux(c * p, f) / (c * base) - 1.0).abs() < 1e-12);
        prop_assert!((photon_flux(p, c * f) * c / base - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_is_bounded(values in prop::collection::vec(0.0f64..1e3, 40)) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let xs: Vec<f64> = (0..values.len()).map(|k| k as f64).collect();
        let a = ScatteringSpectrum::new(xs.clone(), values.clone(), Direction::TeToTm).unwrap();
        let mut rev = values.clone();
        rev.reverse();
        let b = ScatteringSpectrum::new(xs, rev, Direction::TmToTe).unwrap();
        let curve = cross_correlation(&a, &b, &symmetric_offsets(20.0, 0.5).unwrap()).unwrap();
        for r in curve.values {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&r), "{r}");
        }
    }
}

#[test]
fn g_round_trip_over_random_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let s = common::random_scenario(&mut rng);
        let flux = scattered_flux_red(&s).unwrap();
        if flux == 0.0 || !flux.is_normal() {
            continue;
        }
        let g = g_exp_from_sideband(flux, &s).unwrap();
        assert_relative_eq!(g, s.coupling_g, max_relative = 1e-9);
    }
}

#[test]
fn adiabatic_matches_full_solve_in_weak_coupling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 1000 {
        let mut s = common::random_scenario(&mut rng);
        // Adiabatic elimination needs the output mode to be the fastest.
        if s.output_mode().total_linewidth_hz() < s.pumped_mode().total_linewidth_hz() {
            continue;
        }
        let unit = weak_coupling_check(&s).unwrap().margin / (s.coupling_g * s.coupling_g);
        let target = (rng.gen_range(1e-9f64.ln()..1e-3f64.ln())).exp();
        s.coupling_g = (target / unit).sqrt();
        assert!(weak_coupling_check(&s).unwrap().margin < 1e-3);

        let sideband = s.process().sideband;
        let mut adiabatic = sideband_flux(&s, sideband).unwrap();
        if sideband == Sideband::Red {
            adiabatic *= s.microwave.flux_per_s / (s.microwave.flux_per_s + 1.0);
        }
        let full = full_linear_steady_state_for(&s, sideband).unwrap().output_flux;
        assert!((full / adiabatic - 1.0).abs() < 0.01, "full {full} adiabatic {adiabatic}");
        checked += 1;
    }
}

#[test]
fn shift_identity_on_random_ladders() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (ladder, kittel) = common::random_ladder(&mut rng);
        for _ in 0..50 {
            let w = rng.gen_range(192.8e12..193.2e12);
            let a = strength_te_to_tm(&ladder, &kittel, w);
            let b = strength_tm_to_te(&ladder, &kittel, w + kittel.frequency_hz);
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }
}

#[test]
fn ladder_sums_ignore_mode_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (ladder, kittel) = common::random_ladder(&mut rng);
        let mut shuffled = ladder.clone();
        shuffled.modes.shuffle(&mut rng);
        for _ in 0..20 {
            let w = rng.gen_range(192.8e12..193.2e12);
            for (x, y) in [
                (strength_te_to_tm(&ladder, &kittel, w), strength_te_to_tm(&shuffled, &kittel, w)),
                (strength_tm_to_te(&ladder, &kittel, w), strength_tm_to_te(&shuffled, &kittel, w)),
            ] {
                assert_relative_eq!(x, y, max_relative = 1e-12);
            }
        }
    }
}

fn random_spectrum(rng: &mut ChaCha8Rng, direction: Direction) -> ScatteringSpectrum {
    let xs: Vec<f64> = (0..200).map(|k| 1e9 + k as f64 * 1e7).collect();
    let ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
    ScatteringSpectrum::new(xs, ys, direction).unwrap()
}

#[test]
fn correlation_symmetry_and_rescaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let offsets = symmetric_offsets(1e9, 1e7).unwrap();
    let negated: Vec<f64> = offsets.iter().map(|o| -o).collect();
    for _ in 0..10 {
        let a = random_spectrum(&mut rng, Direction::TeToTm);
        let b = random_spectrum(&mut rng, Direction::TmToTe);
        let ab = cross_correlation(&a, &b, &offsets).unwrap();
        let ba = cross_correlation(&b, &a, &negated).unwrap();
        for (x, y) in ab.values.iter().zip(&ba.values) {
            assert!((x - y).abs() < 1e-6);
        }

        let (ca, cb) = (rng.gen_range(1e-6..1e6), rng.gen_range(1e-6..1e6));
        let scale = |s: &ScatteringSpectrum, c: f64| {
            ScatteringSpectrum::new(s.frequencies_hz.clone(), s.values.iter().map(|v| c * v).collect(), s.direction)
                .unwrap()
        };
        let scaled = cross_correlation(&scale(&a, ca), &scale(&b, cb), &offsets).unwrap();
        for (x, y) in ab.values.iter().zip(&scaled.values) {
            assert_relative_eq!(*x, *y, max_relative = 1e-12);
        }
        let (pa, pb) = (correlation_peaks(&ab, 0.01), correlation_peaks(&scaled, 0.01));
        assert_eq!(pa.len(), pb.len());
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(x.offset_hz, y.offset_hz);
            assert_relative_eq!(x.value, y.value, max_relative = 1e-12);
        }
    }
}

fn sphere_ladder(families: &[FamilySpec], copies: u32) -> omsim_core::resonator::ModeLadder {
    build_ladder(&ResonatorSpec::new(750e-6, 2.19).unwrap(), families, copies, 193.0e12).unwrap()
}

fn family(offset_hz: f64, weight: f64) -> FamilySpec {
    let lw = Linewidths::new(1.5e9, 0.4e9);
    FamilySpec { weight, te: lw, tm: lw, offset_hz }
}

#[test]
fn single_family_spectra_correlate_at_the_magnon_frequency() {
    let ladder = sphere_ladder(&[family(0.0, 1.0)], 1);
    let kittel = omsim_core::magnonics::KittelMode::critically_coupled(6.81e9, 3000.0).unwrap();
    let grid = FrequencyGrid::new(192.95e12, 193.1e12, 0.05e9).unwrap().points();
    let te = sweep(&ladder, &kittel, &grid, Direction::TeToTm).unwrap();
    let tm = sweep(&ladder, &kittel, &grid, Direction::TmToTe).unwrap();
    let curve = cross_correlation(&te, &tm, &symmetric_offsets(20e9, 0.05e9).unwrap()).unwrap();
    let best = correlation_peaks(&curve, 0.05)[0];
    assert!((best.offset_hz - kittel.frequency_hz).abs() <= 0.05e9, "{best:?}");
}

#[test]
fn fsr_periodic_ladder_peaks_at_fsr_multiples() {
    let ladder = sphere_ladder(&[family(0.0, 1.0)], 9);
    let fsr = ladder.fsr_hz;
    let kittel = omsim_core::magnonics::KittelMode::critically_coupled(6.81e9, 3000.0).unwrap();
    let step = 0.1e9;
    // Empty margins keep both combs whole inside every overlap window.
    let grid = FrequencyGrid::new(193.0e12 - 2.0 * fsr, 193.0e12 + 11.0 * fsr, step).unwrap().points();
    let te = sweep(&ladder, &kittel, &grid, Direction::TeToTm).unwrap();
    let tm = sweep(&ladder, &kittel, &grid, Direction::TmToTe).unwrap().shifted(-kittel.frequency_hz);
    let curve = cross_correlation(&te, &tm, &symmetric_offsets(1.5 * fsr, step).unwrap()).unwrap();
    // Each tooth of the comb has two sub-peaks, so weaker maxima appear
    // between the FSR multiples; the three strongest sit on them.
    let peaks = correlation_peaks(&curve, 0.05);
    assert!(peaks.len() >= 3);
    let mut found: Vec<f64> = peaks[..3].iter().map(|p| p.offset_hz).collect();
    found.sort_by(f64::total_cmp);
    for (got, want) in found.iter().zip([-fsr, 0.0, fsr]) {
        assert!((got - want).abs() <= step, "{got} vs {want}");
    }
}

#[test]
fn weak_coupling_margin_scales_with_g_squared() {
    let s = common::reference_scenario();
    let base = weak_coupling_check(&s).unwrap().margin;
    let doubled = omsim_core::scattering::ScatteringScenario { coupling_g: 2.0 * s.coupling_g, ..s };
    assert_relative_eq!(weak_coupling_check(&doubled).unwrap().margin, 4.0 * base, max_relative = 1e-12);
    assert!(angular(1.0) > 0.0);
}
