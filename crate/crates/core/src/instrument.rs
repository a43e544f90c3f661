//! Measurement-chain bookkeeping: photon fluxes, heterodyne sideband
//! placement, and the shot-noise-referenced SNR.

use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};
use crate::units::PLANCK;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeterodyneSetup {
    /// AOM shift of the local oscillator, Hz.
    pub lo_offset_hz: f64,
    pub resolution_bandwidth_hz: f64,
    pub lo_flux_per_s: f64,
}

impl Default for HeterodyneSetup {
    fn default() -> Self {
        Self {
            lo_offset_hz: 150e6,
            resolution_bandwidth_hz: 1.0,
            lo_flux_per_s: 1e16,
        }
    }
}

impl HeterodyneSetup {
    pub fn validate(&self) -> Result<()> {
        positive("lo_offset_hz", self.lo_offset_hz)?;
        positive("resolution_bandwidth_hz", self.resolution_bandwidth_hz)?;
        positive("lo_flux_per_s", self.lo_flux_per_s)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerPoint {
    pub power_w: f64,
    pub carrier_frequency_hz: f64,
}

impl PowerPoint {
    pub fn new(power_w: f64, carrier_frequency_hz: f64) -> Result<Self> {
        Ok(Self {
            power_w: positive("power_w", power_w)?,
            carrier_frequency_hz: positive("carrier_frequency_hz", carrier_frequency_hz)?,
        })
    }

    pub fn photon_flux(&self) -> f64 {
        photon_flux(self.power_w, self.carrier_frequency_hz)
    }
}

/// Photons per second carried by power `power_w` at `frequency_hz`: `P / (h ν)`.
pub fn photon_flux(power_w: f64, frequency_hz: f64) -> f64 {
    power_w / (PLANCK * frequency_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandPlacement {
    pub red_at_hz: f64,
    pub blue_at_hz: f64,
}

/// Where the two sidebands land on the spectrum analyzer when beaten against
/// the frequency-shifted LO.
pub fn sideband_observation_frequencies(
    setup: &HeterodyneSetup,
    kittel_hz: f64,
) -> Result<SidebandPlacement> {
    positive("lo_offset_hz", setup.lo_offset_hz)?;
    if kittel_hz <= setup.lo_offset_hz {
        return Err(Error::Aliasing {
            kittel_hz,
            lo_offset_hz: setup.lo_offset_hz,
        });
    }
    Ok(SidebandPlacement {
        red_at_hz: kittel_hz + setup.lo_offset_hz,
        blue_at_hz: kittel_hz - setup.lo_offset_hz,
    })
}

/// Shot-noise-referenced SNR in dB for sideband flux `n_s` in one
/// resolution bin: `10 log10(n_s / (2 rbw))`. Zero flux gives `-inf`.
pub fn snr_from_sideband_flux(sideband_flux_per_s: f64, rbw_hz: f64) -> Result<f64> {
    non_negative("sideband_flux_per_s", sideband_flux_per_s)?;
    positive("rbw_hz", rbw_hz)?;
    Ok(10.0 * (sideband_flux_per_s / rbw_hz / 2.0).log10())
}

/// Inverse of [`snr_from_sideband_flux`].
pub fn sideband_flux_from_snr(snr_db: f64, rbw_hz: f64) -> Result<f64> {
    positive("rbw_hz", rbw_hz)?;
    Ok(2.0 * rbw_hz * 10f64.powf(snr_db / 10.0))
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}
