//! Optical mode structure of a whispering-gallery sphere.
//!
//! The resonator is described only through its diameter and refractive
//! index. From those we get the free spectral range and the TE/TM
//! geometrical-birefringence split; a [`ModeLadder`] is then synthesized from
//! user-supplied mode families. No electromagnetic mode solving happens here.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::units::{format_f64, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    #[serde(alias = "te")]
    TE,
    #[serde(alias = "tm")]
    TM,
}

impl Polarization {
    pub fn other(self) -> Self {
        match self {
            Polarization::TE => Polarization::TM,
            Polarization::TM => Polarization::TE,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::TE => "TE",
            Polarization::TM => "TM",
        })
    }
}

/// Sphere geometry plus refractive index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonatorSpec {
    pub diameter_m: f64,
    pub refractive_index: f64,
    /// Measured FSR; replaces the large-sphere estimate when set.
    pub observed_fsr_hz: Option<f64>,
}

impl ResonatorSpec {
    pub fn new(diameter_m: f64, refractive_index: f64) -> Result<Self> {
        let spec = Self {
            diameter_m,
            refractive_index,
            observed_fsr_hz: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_observed_fsr(mut self, fsr_hz: f64) -> Result<Self> {
        self.observed_fsr_hz = Some(positive("observed_fsr_hz", fsr_hz)?);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("diameter_m", self.diameter_m)?;
        if !(self.refractive_index.is_finite() && self.refractive_index > 1.0) {
            return Err(Error::InvalidParameter {
                name: "refractive_index",
                value: self.refractive_index,
                reason: "must exceed 1 for the birefringence square root to be real",
            });
        }
        if let Some(fsr) = self.observed_fsr_hz {
            positive("observed_fsr_hz", fsr)?;
        }
        Ok(())
    }

    fn large_sphere_fsr(&self) -> f64 {
        SPEED_OF_LIGHT / (PI * self.refractive_index * self.diameter_m)
    }
}

/// TM-minus-TE frequency difference from geometrical birefringence, in Hz.
///
/// `(c / (π n D)) * sqrt(1 - 1/n²)`; the TM family always sits above TE.
///
/// ```
/// use omsim_core::resonator::{gb_split, ResonatorSpec};
/// let sphere = ResonatorSpec::new(750e-6, 2.19).unwrap();
/// let split = gb_split(&sphere).unwrap();
/// assert!((split / 1e9 - 51.69).abs() < 0.01);
/// ```
pub fn gb_split(spec: &ResonatorSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.refractive_index;
    Ok(spec.large_sphere_fsr() * (1.0 - 1.0 / (n * n)).sqrt())
}

/// Free spectral range in Hz: the observed override if present, otherwise
/// the large-sphere estimate `c / (π n D)`.
pub fn analytic_fsr(spec: &ResonatorSpec) -> f64 {
    spec.observed_fsr_hz
        .unwrap_or_else(|| spec.large_sphere_fsr())
}

/// Intrinsic decay and external coupling of one mode, both in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linewidths {
    pub gamma_hz: f64,
    pub kappa_hz: f64,
}

impl Linewidths {
    pub fn new(gamma_hz: f64, kappa_hz: f64) -> Self {
        Self { gamma_hz, kappa_hz }
    }

    /// Intrinsic decay from a quality factor, `gamma = frequency / Q`.
    pub fn from_quality_factor(frequency_hz: f64, q: f64, kappa_hz: f64) -> Result<Self> {
        positive("quality_factor", q)?;
        Ok(Self::new(frequency_hz / q, kappa_hz))
    }

    pub fn total(&self) -> f64 {
        self.gamma_hz + self.kappa_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalMode {
    pub family_id: u32,
    /// FSR copy this mode belongs to. TE and TM pair up by `(family_id, order)`.
    pub order: i32,
    pub polarization: Polarization,
    pub frequency_hz: f64,
    pub gamma_hz: f64,
    pub kappa_hz: f64,
    pub weight: f64,
}

impl OpticalMode {
    pub fn new(
        polarization: Polarization,
        frequency_hz: f64,
        linewidths: Linewidths,
    ) -> Result<Self> {
        let mode = Self {
            family_id: 0,
            order: 0,
            polarization,
            frequency_hz,
            gamma_hz: linewidths.gamma_hz,
            kappa_hz: linewidths.kappa_hz,
            weight: 1.0,
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        positive("frequency_hz", self.frequency_hz)?;
        non_negative("gamma_hz", self.gamma_hz)?;
        non_negative("kappa_hz", self.kappa_hz)?;
        non_negative("weight", self.weight)?;
        if self.total_linewidth_hz() <= 0.0 {
            return Err(Error::ZeroLinewidth);
        }
        Ok(())
    }

    /// `Gamma = gamma + kappa`, Hz.
    pub fn total_linewidth_hz(&self) -> f64 {
        self.gamma_hz + self.kappa_hz
    }

    pub fn linewidths(&self) -> Linewidths {
        Linewidths::new(self.gamma_hz, self.kappa_hz)
    }

    /// Density of states per Hz; the caller guarantees a nonzero linewidth.
    #[inline]
    pub(crate) fn dos(&self, frequency_hz: f64) -> f64 {
        lorentzian(self.frequency_hz, self.gamma_hz, self.kappa_hz, frequency_hz)
    }
}

#[inline]
pub(crate) fn lorentzian(center_hz: f64, gamma_hz: f64, kappa_hz: f64, frequency_hz: f64) -> f64 {
    let detuning = center_hz - frequency_hz;
    let half_width = 0.5 * (gamma_hz + kappa_hz);
    kappa_hz / (detuning * detuning + half_width * half_width)
}

/// Lorentzian density of states `kappa / (Δ² + (Γ/2)²)` with `Δ = Ω − ω`,
/// everything in Hz, result in 1/Hz.
///
/// Integrated over all ω this gives `2π κ / Γ`.
pub fn lorentzian_dos(mode: &OpticalMode, frequency_hz: f64) -> Result<f64> {
    if mode.total_linewidth_hz() <= 0.0 {
        return Err(Error::ZeroLinewidth);
    }
    Ok(mode.dos(frequency_hz))
}

/// One mode family: its weight `C_i`, per-polarization linewidths, and
/// frequency offset from the ladder anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub weight: f64,
    pub te: Linewidths,
    pub tm: Linewidths,
    pub offset_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeLadder {
    pub modes: Vec<OpticalMode>,
    pub fsr_hz: f64,
}

/// A TE/TM pair sharing family and FSR order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePair {
    pub te: OpticalMode,
    pub tm: OpticalMode,
    /// Taken from the TE entry.
    pub weight: f64,
}

impl ModeLadder {
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    /// TE/TM pairs in `(family_id, order)` order. Entries lacking a partner
    /// are skipped; see [`ModeLadder::unpaired`].
    pub fn pairs(&self) -> Vec<ModePair> {
        let mut slots: BTreeMap<(u32, i32), (Option<OpticalMode>, Option<OpticalMode>)> =
            BTreeMap::new();
        for mode in &self.modes {
            let slot = slots.entry((mode.family_id, mode.order)).or_default();
            match mode.polarization {
                Polarization::TE => slot.0 = Some(*mode),
                Polarization::TM => slot.1 = Some(*mode),
            }
        }
        slots
            .into_values()
            .filter_map(|slot| match slot {
                (Some(te), Some(tm)) => Some(ModePair {
                    te,
                    tm,
                    weight: te.weight,
                }),
                _ => None,
            })
            .collect()
    }

    /// `(family_id, order, present polarization)` for every entry without a partner.
    pub fn unpaired(&self) -> Vec<(u32, i32, Polarization)> {
        let mut seen: BTreeMap<(u32, i32), Vec<Polarization>> = BTreeMap::new();
        for mode in &self.modes {
            seen.entry((mode.family_id, mode.order))
                .or_default()
                .push(mode.polarization);
        }
        seen.into_iter()
            .filter_map(|((family, order), pols)| {
                let has_te = pols.contains(&Polarization::TE);
                let has_tm = pols.contains(&Polarization::TM);
                match (has_te, has_tm) {
                    (true, false) => Some((family, order, Polarization::TE)),
                    (false, true) => Some((family, order, Polarization::TM)),
                    _ => None,
                }
            })
            .collect()
    }

    /// Narrowest total linewidth in the ladder, Hz.
    pub fn min_linewidth_hz(&self) -> Option<f64> {
        self.modes
            .iter()
            .map(OpticalMode::total_linewidth_hz)
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }

    /// CSV with columns `family_id,polarization,frequency_Hz,gamma_Hz,kappa_Hz,weight`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record([
            "family_id",
            "polarization",
            "frequency_Hz",
            "gamma_Hz",
            "kappa_Hz",
            "weight",
        ])
        .map_err(io)?;
        for m in &self.modes {
            out.write_record([
                m.family_id.to_string(),
                m.polarization.to_string(),
                format_f64(m.frequency_hz),
                format_f64(m.gamma_hz),
                format_f64(m.kappa_hz),
                format_f64(m.weight),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Emits, for each family and FSR copy `k`, a TE mode at
/// `anchor + offset + k * fsr` and a TM mode `gb_split` above it.
pub fn build_ladder(
    spec: &ResonatorSpec,
    families: &[FamilySpec],
    n_fsr_copies: u32,
    anchor_frequency_hz: f64,
) -> Result<ModeLadder> {
    if n_fsr_copies == 0 {
        return Err(Error::InvalidParameter {
            name: "n_fsr_copies",
            value: 0.0,
            reason: "need at least one FSR copy",
        });
    }
    positive("anchor_frequency_hz", anchor_frequency_hz)?;
    let split = gb_split(spec)?;
    let fsr = analytic_fsr(spec);

    let mut modes = Vec::with_capacity(2 * families.len() * n_fsr_copies as usize);
    for (id, family) in families.iter().enumerate() {
        for k in 0..n_fsr_copies {
            let te_freq = anchor_frequency_hz + family.offset_hz + f64::from(k) * fsr;
            let te = OpticalMode {
                family_id: id as u32,
                order: k as i32,
                polarization: Polarization::TE,
                frequency_hz: te_freq,
                gamma_hz: family.te.gamma_hz,
                kappa_hz: family.te.kappa_hz,
                weight: family.weight,
            };
            let tm = OpticalMode {
                polarization: Polarization::TM,
                frequency_hz: te_freq + split,
                gamma_hz: family.tm.gamma_hz,
                kappa_hz: family.tm.kappa_hz,
                ..te
            };
            te.validate()?;
            tm.validate()?;
            modes.push(te);
            modes.push(tm);
        }
    }
    Ok(ModeLadder { modes, fsr_hz: fsr })
}
