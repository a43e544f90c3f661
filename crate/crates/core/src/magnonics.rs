//! Magnet material constants, the Kittel mode, and the optomagnonic coupling
//! constant `g`.
//!
//! `g` is available through two independent algebraic routes:
//! [`coupling_g_theory`] uses the compact Verdet/spin-number form, while
//! [`coupling_g_from_field_prefactors`] multiplies out the magnon and photon
//! field normalizations with the magneto-optic coefficient `f`. The two agree
//! whenever `ε_r = n_r²`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};
use crate::resonator::lorentzian;
use crate::units::{BOHR_MAGNETON, HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagnetMaterial {
    /// Verdet constant in rad/m.
    pub verdet_rad_per_m: f64,
    pub spin_density_per_m3: f64,
    pub refractive_index: f64,
    pub relative_permittivity: f64,
    /// Optical absorption coefficient, 1/m.
    pub absorption_per_m: Option<f64>,
    pub lande_g: f64,
}

impl MagnetMaterial {
    /// Builds a material with `ε_r = n_r²` and `g_s = 2`. The Verdet constant
    /// is given in rad/cm.
    pub fn new(verdet_rad_per_cm: f64, spin_density_per_m3: f64, refractive_index: f64) -> Result<Self> {
        let material = Self {
            verdet_rad_per_m: verdet_rad_per_cm * 100.0,
            spin_density_per_m3,
            refractive_index,
            relative_permittivity: refractive_index * refractive_index,
            absorption_per_m: None,
            lande_g: 2.0,
        };
        material.validate()?;
        Ok(material)
    }

    /// Yttrium iron garnet at 1.5 µm: 3.77 rad/cm, 2.1e28 spins/m³,
    /// n = 2.19, α = 0.03 /cm.
    ///
    /// The Verdet value is recorded as quoted for the 1.5 µm experiment; the
    /// exact wavelength it was measured at is not stated with it.
    pub fn yig() -> Self {
        Self {
            verdet_rad_per_m: 377.0,
            spin_density_per_m3: 2.1e28,
            refractive_index: 2.19,
            relative_permittivity: 2.19 * 2.19,
            absorption_per_m: Some(3.0),
            lande_g: 2.0,
        }
    }

    pub fn with_absorption_per_cm(mut self, alpha_per_cm: f64) -> Self {
        self.absorption_per_m = Some(alpha_per_cm * 100.0);
        self
    }

    pub fn verdet_rad_per_cm(&self) -> f64 {
        self.verdet_rad_per_m / 100.0
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("verdet_rad_per_m", self.verdet_rad_per_m)?;
        positive("spin_density_per_m3", self.spin_density_per_m3)?;
        if !(self.refractive_index.is_finite() && self.refractive_index >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "refractive_index",
                value: self.refractive_index,
                reason: "must be >= 1",
            });
        }
        if !(self.relative_permittivity.is_finite() && self.relative_permittivity >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "relative_permittivity",
                value: self.relative_permittivity,
                reason: "must be >= 1",
            });
        }
        if let Some(alpha) = self.absorption_per_m {
            positive("absorption_per_m", alpha)?;
        }
        positive("lande_g", self.lande_g)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum SampleShape {
    Sphere { diameter_m: f64 },
    Disk { diameter_m: f64, thickness_m: f64 },
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleGeometry {
    pub volume_m3: f64,
    pub shape: SampleShape,
}

impl SampleGeometry {
    pub fn sphere(diameter_m: f64) -> Result<Self> {
        positive("diameter_m", diameter_m)?;
        let r = diameter_m / 2.0;
        Ok(Self {
            volume_m3: 4.0 * PI / 3.0 * r * r * r,
            shape: SampleShape::Sphere { diameter_m },
        })
    }

    pub fn disk(diameter_m: f64, thickness_m: f64) -> Result<Self> {
        positive("diameter_m", diameter_m)?;
        positive("thickness_m", thickness_m)?;
        let r = diameter_m / 2.0;
        Ok(Self {
            volume_m3: PI * r * r * thickness_m,
            shape: SampleShape::Disk {
                diameter_m,
                thickness_m,
            },
        })
    }

    pub fn custom(volume_m3: f64) -> Result<Self> {
        positive("volume_m3", volume_m3)?;
        Ok(Self {
            volume_m3,
            shape: SampleShape::Custom,
        })
    }
}

/// Uniform-precession magnon mode. Rates in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KittelMode {
    pub frequency_hz: f64,
    pub intrinsic_decay_hz: f64,
    pub external_coupling_hz: f64,
}

impl KittelMode {
    pub fn new(frequency_hz: f64, intrinsic_decay_hz: f64, external_coupling_hz: f64) -> Result<Self> {
        let mode = Self {
            frequency_hz,
            intrinsic_decay_hz,
            external_coupling_hz,
        };
        mode.validate()?;
        Ok(mode)
    }

    /// Critically coupled mode with total linewidth `frequency / Q`, split
    /// evenly between intrinsic decay and external coupling.
    pub fn critically_coupled(frequency_hz: f64, quality_factor: f64) -> Result<Self> {
        positive("quality_factor", quality_factor)?;
        let half = 0.5 * frequency_hz / quality_factor;
        Self::new(frequency_hz, half, half)
    }

    pub fn validate(&self) -> Result<()> {
        positive("kittel.frequency_hz", self.frequency_hz)?;
        non_negative("kittel.intrinsic_decay_hz", self.intrinsic_decay_hz)?;
        non_negative("kittel.external_coupling_hz", self.external_coupling_hz)?;
        Ok(())
    }

    pub fn total_linewidth_hz(&self) -> f64 {
        self.intrinsic_decay_hz + self.external_coupling_hz
    }

    /// Magnon density of states per Hz at drive frequency `frequency_hz`.
    pub fn dos(&self, frequency_hz: f64) -> Result<f64> {
        if self.total_linewidth_hz() <= 0.0 {
            return Err(Error::ZeroLinewidth);
        }
        Ok(lorentzian(
            self.frequency_hz,
            self.intrinsic_decay_hz,
            self.external_coupling_hz,
            frequency_hz,
        ))
    }
}

/// `g = V c' sqrt(2 / N_spin)` in rad/s, with `c' = c / n_r` and
/// `N_spin = n_spin V`.
///
/// ```
/// use omsim_core::magnonics::{coupling_g_theory, MagnetMaterial, SampleGeometry};
/// let g = coupling_g_theory(&MagnetMaterial::yig(), &SampleGeometry::sphere(750e-6).unwrap());
/// let g_hz = g / (2.0 * std::f64::consts::PI);
/// assert!((g_hz - 5.4).abs() < 0.1);
/// ```
pub fn coupling_g_theory(material: &MagnetMaterial, sample: &SampleGeometry) -> f64 {
    let n_spin = material.spin_density_per_m3 * sample.volume_m3;
    let c_in_medium = SPEED_OF_LIGHT / material.refractive_index;
    material.verdet_rad_per_m * c_in_medium * (2.0 / n_spin).sqrt()
}

/// `M_z = g_s µ_B n_spin`.
pub fn magnetization_mz(material: &MagnetMaterial) -> f64 {
    material.lande_g * BOHR_MAGNETON * material.spin_density_per_m3
}

/// Magneto-optic coefficient `f = 2 sqrt(ε_r) V / (k0 M_z)`.
pub fn verdet_to_f(material: &MagnetMaterial, vacuum_wavevector: f64) -> Result<f64> {
    positive("vacuum_wavevector", vacuum_wavevector)?;
    let mz = positive("magnetization_mz", magnetization_mz(material))?;
    Ok(2.0 * material.relative_permittivity.sqrt() * material.verdet_rad_per_m / (vacuum_wavevector * mz))
}

/// `g` rebuilt from the field prefactors of magnon and photon operators:
///
/// `(1/ħ) ε0 f V_wgm sqrt(2 g_s µ_B M_z / V) * (ħ Ω / (2 ε0 ε_r V_wgm))`
///
/// with `Ω = c k0` for both optical modes and a common mode volume
/// `V_wgm`, which cancels. Independent of [`coupling_g_theory`]; the two
/// agree when `ε_r = n_r²`.
pub fn coupling_g_from_field_prefactors(
    material: &MagnetMaterial,
    sample: &SampleGeometry,
    vacuum_wavevector: f64,
    mode_volume_m3: f64,
) -> Result<f64> {
    positive("mode_volume_m3", mode_volume_m3)?;
    let f = verdet_to_f(material, vacuum_wavevector)?;
    let mz = magnetization_mz(material);
    let omega = SPEED_OF_LIGHT * vacuum_wavevector;
    let magnon = (2.0 * material.lande_g * BOHR_MAGNETON * mz / sample.volume_m3).sqrt();
    let photon_sq = HBAR * omega / (2.0 * VACUUM_PERMITTIVITY * material.relative_permittivity * mode_volume_m3);
    Ok(VACUUM_PERMITTIVITY * f * mode_volume_m3 * magnon * photon_sq / HBAR)
}

/// Rough Kittel frequency `γ_gyro B` in Hz. A measured frequency in the
/// configuration always takes precedence over this.
pub fn kittel_frequency_estimate(field_t: f64, gyromagnetic_hz_per_t: f64) -> Result<f64> {
    non_negative("field_t", field_t)?;
    Ok(gyromagnetic_hz_per_t * field_t)
}

/// Absorption-limited optical quality factor `Q = 2π n_r / (α λ)`.
pub fn absorption_limited_q(material: &MagnetMaterial, wavelength_m: f64) -> Result<f64> {
    let alpha = material.absorption_per_m.ok_or(Error::MissingAbsorption)?;
    positive("absorption_per_m", alpha)?;
    positive("wavelength_m", wavelength_m)?;
    Ok(2.0 * PI * material.refractive_index / (alpha * wavelength_m))
}
