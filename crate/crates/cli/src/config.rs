//! Scenario files: strict TOML with unit-suffixed keys.
//!
//! Parsing happens in two passes. Serde rejects unknown keys, missing keys
//! and type errors with the key path; [`ScenarioConfig::resolve`] then
//! checks values and builds the physics objects, collecting every
//! diagnostic instead of stopping at the first.

use std::fmt;
use std::path::{Path, PathBuf};

use omsim_core::instrument::{dbm_to_watts, photon_flux, HeterodyneSetup};
use omsim_core::magnonics::{absorption_limited_q, coupling_g_theory, KittelMode, MagnetMaterial, SampleGeometry};
use omsim_core::resonator::{build_ladder, FamilySpec, Linewidths, ModeLadder, Polarization, ResonatorSpec};
use omsim_core::scattering::{Improvement, ImprovementPlan, Magnetization, MicrowaveDrive, Orbit, ScatteringScenario};
use omsim_core::spectra::{FrequencyGrid, POINTS_PER_LINEWIDTH};
use omsim_core::units::{angular, GHZ, MHZ, MICRON, SPEED_OF_LIGHT};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ConfigError {
    pub fn single(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            diagnostics: vec![Diagnostic {
                path: path.into(),
                message: message.into(),
            }],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.diagnostics.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKey {
    Ccw,
    Cw,
}

impl From<OrbitKey> for Orbit {
    fn from(o: OrbitKey) -> Self {
        match o {
            OrbitKey::Ccw => Orbit::Ccw,
            OrbitKey::Cw => Orbit::Cw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnetizationKey {
    #[default]
    Up,
    Down,
}

impl From<MagnetizationKey> for Magnetization {
    fn from(m: MagnetizationKey) -> Self {
        match m {
            MagnetizationKey::Up => Magnetization::Up,
            MagnetizationKey::Down => Magnetization::Down,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub resonator: ResonatorConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    pub sample: Option<SampleConfig>,
    pub kittel: KittelConfig,
    pub drive: DriveConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub improvement: ImprovementConfig,
    #[serde(default)]
    pub instrument: InstrumentConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorConfig {
    pub diameter_um: f64,
    pub refractive_index: f64,
    pub observed_fsr_ghz: Option<f64>,
    /// TE frequency of family 0, FSR copy 0.
    pub anchor_frequency_ghz: f64,
    #[serde(default = "one")]
    pub fsr_copies: u32,
    pub families: Vec<FamilyConfig>,
}

fn one() -> u32 {
    1
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    #[serde(default = "unit_weight")]
    pub weight: f64,
    #[serde(default)]
    pub offset_ghz: f64,
    pub te_quality_factor: Option<f64>,
    pub te_gamma_ghz: Option<f64>,
    pub te_kappa_ghz: f64,
    pub tm_quality_factor: Option<f64>,
    pub tm_gamma_ghz: Option<f64>,
    pub tm_kappa_ghz: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub preset: Option<String>,
    pub verdet_rad_per_cm: Option<f64>,
    pub spin_density_per_m3: Option<f64>,
    pub refractive_index: Option<f64>,
    pub relative_permittivity: Option<f64>,
    pub absorption_per_cm: Option<f64>,
    pub lande_g: Option<f64>,
}

/// An absent `[material]` section means the YIG preset.
impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            preset: Some("yig".to_string()),
            verdet_rad_per_cm: None,
            spin_density_per_m3: None,
            refractive_index: None,
            relative_permittivity: None,
            absorption_per_cm: None,
            lande_g: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKey {
    Sphere,
    Disk,
    Custom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub shape: ShapeKey,
    pub diameter_um: Option<f64>,
    pub thickness_um: Option<f64>,
    pub volume_m3: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KittelConfig {
    pub frequency_ghz: f64,
    /// Critically coupled mode with this loaded Q.
    pub quality_factor: Option<f64>,
    pub intrinsic_decay_mhz: Option<f64>,
    pub external_coupling_mhz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub orbit: OrbitKey,
    #[serde(default)]
    pub magnetization: MagnetizationKey,
    pub input_polarization: Polarization,
    #[serde(default)]
    pub mode_family: u32,
    #[serde(default)]
    pub mode_order: i32,
    /// Replaces the ladder's TE position by `TM − split` for the operating point.
    pub mode_split_ghz: Option<f64>,
    pub laser_power_mw: Option<f64>,
    /// Taken verbatim when present; otherwise `P / (h ν)`.
    pub laser_flux_per_s: Option<f64>,
    pub laser_detuning_ghz: Option<f64>,
    pub laser_frequency_ghz: Option<f64>,
    pub microwave_power_dbm: Option<f64>,
    pub microwave_flux_per_s: Option<f64>,
    pub microwave_frequency_ghz: Option<f64>,
    #[serde(default)]
    pub spin_orbit_imperfection: f64,
    /// `g / 2π`; the Verdet-constant estimate is used when absent.
    pub coupling_g_hz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start_ghz: f64,
    pub stop_ghz: f64,
    pub step_ghz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImprovementConfig {
    pub optical_q: Option<f64>,
    #[serde(default = "default_volume_reduction")]
    pub volume_reduction: f64,
    #[serde(default = "default_pump_power")]
    pub pump_power_mw: f64,
}

fn default_volume_reduction() -> f64 {
    90.0
}

fn default_pump_power() -> f64 {
    20.0
}

impl Default for ImprovementConfig {
    fn default() -> Self {
        Self {
            optical_q: None,
            volume_reduction: default_volume_reduction(),
            pump_power_mw: default_pump_power(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentConfig {
    #[serde(default = "default_lo_offset")]
    pub lo_offset_mhz: f64,
    #[serde(default = "default_rbw")]
    pub resolution_bandwidth_hz: f64,
    #[serde(default = "default_lo_flux")]
    pub lo_flux_per_s: f64,
    pub measured_sideband_flux_per_s: Option<f64>,
}

fn default_lo_offset() -> f64 {
    HeterodyneSetup::default().lo_offset_hz / MHZ
}

fn default_rbw() -> f64 {
    HeterodyneSetup::default().resolution_bandwidth_hz
}

fn default_lo_flux() -> f64 {
    HeterodyneSetup::default().lo_flux_per_s
}

impl Default for InstrumentConfig {
    fn default() -> Self {
        Self {
            lo_offset_mhz: default_lo_offset(),
            resolution_bandwidth_hz: default_rbw(),
            lo_flux_per_s: default_lo_flux(),
            measured_sideband_flux_per_s: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
}

/// Everything a command needs, in SI units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: ResonatorSpec,
    pub families: Vec<FamilySpec>,
    pub ladder: ModeLadder,
    pub material: MagnetMaterial,
    pub sample: SampleGeometry,
    pub kittel: KittelMode,
    pub scenario: ScatteringScenario,
    /// `g` from the Verdet constant, rad/s.
    pub coupling_g_theory: f64,
    pub laser_power_w: Option<f64>,
    pub grid: Option<FrequencyGrid>,
    pub heterodyne: HeterodyneSetup,
    pub measured_sideband_flux: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub improvement: ImprovementConfig,
    pub warnings: Vec<String>,
}

impl Resolved {
    /// Parameters for the requested improvement stages. Only the inputs the
    /// stages actually use are required.
    pub fn improvement_plan(&self, wanted: &[Improvement]) -> Result<ImprovementPlan, ConfigError> {
        let mut diags = Checker::default();
        let optical_q = match self.improvement.optical_q {
            Some(q) => diags.positive("improvement.optical_q", q),
            None if wanted.contains(&Improvement::QLimit) => {
                let wavelength = SPEED_OF_LIGHT / self.scenario.laser_frequency_hz;
                match absorption_limited_q(&self.material, wavelength) {
                    Ok(q) => Some(q),
                    Err(e) => {
                        diags.push("improvement.optical_q", format!("required for q-limit ({e})"));
                        None
                    }
                }
            }
            None => Some(f64::NAN),
        };
        let volume_reduction = diags.positive("improvement.volume_reduction", self.improvement.volume_reduction);
        let pump_power_ratio = if wanted.contains(&Improvement::PumpPower) {
            let new = diags.positive("improvement.pump_power_mw", self.improvement.pump_power_mw);
            match (new, self.laser_power_w) {
                (Some(new), Some(old)) => Some(new * 1e-3 / old),
                (_, None) => {
                    diags.push("drive.laser_power_mw", "required for pump-power");
                    None
                }
                _ => None,
            }
        } else {
            Some(1.0)
        };
        diags.finish()?;
        Ok(ImprovementPlan {
            optical_q: optical_q.unwrap_or(f64::NAN),
            volume_reduction: volume_reduction.unwrap_or(1.0),
            pump_power_ratio: pump_power_ratio.unwrap_or(1.0),
        })
    }
}

#[derive(Default)]
struct Checker {
    diags: Vec<Diagnostic>,
}

impl Checker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, v: f64) -> Option<f64> {
        if v.is_finite() && v > 0.0 {
            Some(v)
        } else {
            self.push(path, format!("must be finite and > 0 (got {v})"));
            None
        }
    }

    fn non_negative(&mut self, path: &str, v: f64) -> Option<f64> {
        if v.is_finite() && v >= 0.0 {
            Some(v)
        } else {
            self.push(path, format!("must be finite and >= 0 (got {v})"));
            None
        }
    }

    fn finite(&mut self, path: &str, v: f64) -> Option<f64> {
        if v.is_finite() {
            Some(v)
        } else {
            self.push(path, format!("must be finite (got {v})"));
            None
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        if self.diags.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { diagnostics: self.diags })
        }
    }
}

/// Turns a serde error into a diagnostic whose path names the offending key.
fn serde_diagnostic(err: serde_path_to_error::Error<toml::de::Error>) -> Diagnostic {
    let mut path = err.path().to_string();
    let inner = err.into_inner();
    let message = inner.message().trim().to_string();
    for prefix in ["missing field `", "unknown field `"] {
        if let Some(rest) = message.strip_prefix(prefix) {
            if let Some(name) = rest.split('`').next() {
                // Unknown keys are already on the path; missing ones are not.
                if path.rsplit('.').next() == Some(name) {
                    continue;
                }
                path = if path == "." || path.is_empty() {
                    name.to_string()
                } else {
                    format!("{path}.{name}")
                };
            }
        }
    }
    if path.is_empty() {
        path = ".".to_string();
    }
    Diagnostic { path, message }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError {
            diagnostics: vec![serde_diagnostic(e)],
        })
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), ConfigError> {
        let bytes = std::fs::read(path)
            .map_err(|e| ConfigError::single(path.display().to_string(), format!("cannot read: {e}")))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| ConfigError::single(path.display().to_string(), format!("not UTF-8: {e}")))?;
        Ok((Self::parse(text)?, bytes))
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let mut c = Checker::default();
        let mut warnings = Vec::new();

        // Resonator and ladder.
        let r = &self.resonator;
        let diameter = c.positive("resonator.diameter_um", r.diameter_um).map(|d| d * MICRON);
        let index = if r.refractive_index.is_finite() && r.refractive_index > 1.0 {
            Some(r.refractive_index)
        } else {
            c.push("resonator.refractive_index", format!("must be > 1 (got {})", r.refractive_index));
            None
        };
        let observed = match r.observed_fsr_ghz {
            Some(f) => c.positive("resonator.observed_fsr_ghz", f).map(|f| Some(f * GHZ)),
            None => Some(None),
        };
        let anchor = c.positive("resonator.anchor_frequency_ghz", r.anchor_frequency_ghz).map(|f| f * GHZ);
        if r.fsr_copies == 0 {
            c.push("resonator.fsr_copies", "must be at least 1");
        }
        if r.families.is_empty() {
            c.push("resonator.families", "at least one mode family is required");
        }
        let mut families = Vec::with_capacity(r.families.len());
        for (k, fam) in r.families.iter().enumerate() {
            let base = format!("resonator.families[{k}]");
            let weight = c.non_negative(&format!("{base}.weight"), fam.weight);
            let offset = c.finite(&format!("{base}.offset_ghz"), fam.offset_ghz).map(|o| o * GHZ);
            let te = family_linewidths(&mut c, &base, "te", fam.te_quality_factor, fam.te_gamma_ghz, fam.te_kappa_ghz, anchor);
            let tm = family_linewidths(&mut c, &base, "tm", fam.tm_quality_factor, fam.tm_gamma_ghz, fam.tm_kappa_ghz, anchor);
            if let (Some(weight), Some(offset_hz), Some(te), Some(tm)) = (weight, offset, te, tm) {
                families.push(FamilySpec { weight, te, tm, offset_hz });
            }
        }

        // Material and sample.
        let material = self.material(&mut c);
        let sample = match &self.sample {
            None => diameter.and_then(|d| SampleGeometry::sphere(d).ok()),
            Some(s) => sample_geometry(&mut c, s),
        };

        // Kittel mode.
        let k = &self.kittel;
        let kittel_hz = c.positive("kittel.frequency_ghz", k.frequency_ghz).map(|f| f * GHZ);
        let kittel = match (k.quality_factor, k.intrinsic_decay_mhz, k.external_coupling_mhz) {
            (Some(q), None, None) => match (kittel_hz, c.positive("kittel.quality_factor", q)) {
                (Some(f), Some(q)) => KittelMode::critically_coupled(f, q).ok(),
                _ => None,
            },
            (None, Some(gi), Some(ke)) => {
                let gi = c.non_negative("kittel.intrinsic_decay_mhz", gi);
                let ke = c.non_negative("kittel.external_coupling_mhz", ke);
                match (kittel_hz, gi, ke) {
                    (Some(f), Some(gi), Some(ke)) if gi + ke > 0.0 => KittelMode::new(f, gi * MHZ, ke * MHZ).ok(),
                    (Some(_), Some(_), Some(_)) => {
                        c.push("kittel.intrinsic_decay_mhz", "total Kittel linewidth must be > 0");
                        None
                    }
                    _ => None,
                }
            }
            _ => {
                c.push(
                    "kittel.quality_factor",
                    "give either quality_factor or both intrinsic_decay_mhz and external_coupling_mhz",
                );
                None
            }
        };

        let spec = match (diameter, index, observed) {
            (Some(d), Some(n), Some(obs)) => {
                let spec = ResonatorSpec::new(d, n).ok();
                match (spec, obs) {
                    (Some(s), Some(f)) => s.with_observed_fsr(f).ok(),
                    (s, None) => s,
                    _ => None,
                }
            }
            _ => None,
        };

        let ladder = match (&spec, anchor) {
            (Some(spec), Some(anchor)) if families.len() == r.families.len() && r.fsr_copies > 0 && !families.is_empty() => {
                match build_ladder(spec, &families, r.fsr_copies, anchor) {
                    Ok(l) => Some(l),
                    Err(e) => {
                        c.push("resonator", e.to_string());
                        None
                    }
                }
            }
            _ => None,
        };

        // Drive and operating point.
        let d = &self.drive;
        let mut scenario = None;
        let mut laser_power_w = None;
        if let Some(p) = d.laser_power_mw {
            laser_power_w = c.positive("drive.laser_power_mw", p).map(|p| p * 1e-3);
        }
        let eps = d.spin_orbit_imperfection;
        if !(eps.is_finite() && (0.0..=1.0).contains(&eps)) {
            c.push("drive.spin_orbit_imperfection", format!("must lie in [0, 1] (got {eps})"));
        }
        if d.laser_detuning_ghz.is_some() && d.laser_frequency_ghz.is_some() {
            c.push("drive.laser_frequency_ghz", "give laser_detuning_ghz or laser_frequency_ghz, not both");
        }
        if d.laser_power_mw.is_none() && d.laser_flux_per_s.is_none() {
            c.push("drive.laser_power_mw", "give laser_power_mw or laser_flux_per_s");
        }
        let mw_flux_given = match (d.microwave_power_dbm, d.microwave_flux_per_s) {
            (Some(_), Some(_)) => {
                c.push("drive.microwave_flux_per_s", "give microwave_power_dbm or microwave_flux_per_s, not both");
                None
            }
            (None, None) => {
                c.push("drive.microwave_power_dbm", "give microwave_power_dbm or microwave_flux_per_s");
                None
            }
            (Some(dbm), None) => c.finite("drive.microwave_power_dbm", dbm).map(|dbm| (Some(dbm_to_watts(dbm)), None)),
            (None, Some(f)) => c.non_negative("drive.microwave_flux_per_s", f).map(|f| (None, Some(f))),
        };
        let mw_freq = match d.microwave_frequency_ghz {
            Some(f) => c.positive("drive.microwave_frequency_ghz", f).map(|f| f * GHZ),
            None => kittel_hz,
        };
        let split = match d.mode_split_ghz {
            Some(s) => c.positive("drive.mode_split_ghz", s).map(|s| Some(s * GHZ)),
            None => Some(None),
        };
        let g_override = match d.coupling_g_hz {
            Some(g) => c.non_negative("drive.coupling_g_hz", g).map(|g| Some(angular(g))),
            None => Some(None),
        };
        let laser_flux_override = match d.laser_flux_per_s {
            Some(f) => c.non_negative("drive.laser_flux_per_s", f).map(Some),
            None => Some(None),
        };
        let laser_abs = match d.laser_frequency_ghz {
            Some(f) => c.positive("drive.laser_frequency_ghz", f).map(|f| Some(f * GHZ)),
            None => Some(None),
        };
        let detuning = c.finite("drive.laser_detuning_ghz", d.laser_detuning_ghz.unwrap_or(0.0)).map(|x| x * GHZ);

        let g_theory = match (&material, &sample) {
            (Some(m), Some(s)) => Some(coupling_g_theory(m, s)),
            _ => None,
        };

        if let Some(ladder) = &ladder {
            let pair = ladder
                .pairs()
                .into_iter()
                .find(|p| p.te.family_id == d.mode_family && p.te.order == d.mode_order);
            if pair.is_none() {
                c.push(
                    "drive.mode_family",
                    format!("no TE/TM pair with family {} and order {}", d.mode_family, d.mode_order),
                );
            }
            if let (
                Some(pair),
                Some(kittel),
                Some(split),
                Some(g_override),
                Some(g_theory),
                Some(flux_override),
                Some(laser_abs),
                Some(detuning),
                Some(mw),
                Some(mw_freq),
            ) = (pair, kittel, split, g_override, g_theory, laser_flux_override, laser_abs, detuning, mw_flux_given, mw_freq)
            {
                let mut te = pair.te;
                let tm = pair.tm;
                if let Some(split) = split {
                    te.frequency_hz = tm.frequency_hz - split;
                }
                let pumped = if d.input_polarization == Polarization::TM { tm } else { te };
                let laser_hz = laser_abs.unwrap_or(pumped.frequency_hz + detuning);
                let input_flux = match (flux_override, laser_power_w) {
                    (Some(f), _) => Some(f),
                    (None, Some(p)) => Some(photon_flux(p, laser_hz)),
                    (None, None) => None,
                };
                let microwave = match mw {
                    (Some(watts), _) => MicrowaveDrive::from_power(watts, mw_freq),
                    (None, Some(flux)) => MicrowaveDrive::from_flux(flux, mw_freq),
                    _ => unreachable!(),
                };
                if let Some(input_flux) = input_flux {
                    let s = ScatteringScenario {
                        orbit: d.orbit.into(),
                        magnetization: d.magnetization.into(),
                        input_polarization: d.input_polarization,
                        input_flux_per_s: input_flux,
                        laser_frequency_hz: laser_hz,
                        te_mode: te,
                        tm_mode: tm,
                        kittel,
                        coupling_g: g_override.unwrap_or(g_theory),
                        microwave,
                        spin_orbit_imperfection: eps,
                    };
                    match s.validate() {
                        Ok(()) => scenario = Some(s),
                        Err(e) => c.push("drive", e.to_string()),
                    }
                }
            }
        }

        // Sweep grid.
        let grid = match (&self.sweep, &ladder) {
            (Some(sw), Some(ladder)) => {
                let start = c.positive("sweep.start_ghz", sw.start_ghz).map(|f| f * GHZ);
                let stop = c.positive("sweep.stop_ghz", sw.stop_ghz).map(|f| f * GHZ);
                let step = match sw.step_ghz {
                    Some(s) => c.positive("sweep.step_ghz", s).map(|s| Some(s * GHZ)),
                    None => Some(None),
                };
                match (start, stop, step) {
                    (Some(a), Some(b), _) if b < a => {
                        c.push("sweep.stop_ghz", "must not be below sweep.start_ghz");
                        None
                    }
                    (Some(a), Some(b), Some(step)) => {
                        let grid = match step {
                            Some(s) => FrequencyGrid::new(a, b, s),
                            None => FrequencyGrid::for_ladder(ladder, a, b),
                        };
                        match grid {
                            Ok(g) => {
                                if let Some(min) = ladder.min_linewidth_hz() {
                                    if g.step_hz > min / POINTS_PER_LINEWIDTH * (1.0 + 1e-9) {
                                        warnings.push(format!(
                                            "sweep step {:.4e} Hz is coarser than the narrowest linewidth / {POINTS_PER_LINEWIDTH}",
                                            g.step_hz
                                        ));
                                    }
                                }
                                Some(g)
                            }
                            Err(e) => {
                                c.push("sweep", e.to_string());
                                None
                            }
                        }
                    }
                    _ => None,
                }
            }
            _ => None,
        };

        // Instrument.
        let ins = &self.instrument;
        let lo = c.positive("instrument.lo_offset_mhz", ins.lo_offset_mhz).map(|f| f * MHZ);
        let rbw = c.positive("instrument.resolution_bandwidth_hz", ins.resolution_bandwidth_hz);
        let lo_flux = c.positive("instrument.lo_flux_per_s", ins.lo_flux_per_s);
        let measured = match ins.measured_sideband_flux_per_s {
            Some(f) => c.non_negative("instrument.measured_sideband_flux_per_s", f).map(Some),
            None => Some(None),
        };

        c.finish()?;
        // Every Option below is Some once no diagnostic was recorded.
        let missing = || ConfigError::single(".", "incomplete configuration");
        Ok(Resolved {
            spec: spec.ok_or_else(missing)?,
            families,
            ladder: ladder.ok_or_else(missing)?,
            material: material.ok_or_else(missing)?,
            sample: sample.ok_or_else(missing)?,
            kittel: kittel.ok_or_else(missing)?,
            scenario: scenario.ok_or_else(missing)?,
            coupling_g_theory: g_theory.ok_or_else(missing)?,
            laser_power_w,
            grid,
            heterodyne: HeterodyneSetup {
                lo_offset_hz: lo.ok_or_else(missing)?,
                resolution_bandwidth_hz: rbw.ok_or_else(missing)?,
                lo_flux_per_s: lo_flux.ok_or_else(missing)?,
            },
            measured_sideband_flux: measured.ok_or_else(missing)?,
            output_dir: self.output.directory.clone(),
            improvement: self.improvement.clone(),
            warnings,
        })
    }

    fn material(&self, c: &mut Checker) -> Option<MagnetMaterial> {
        let m = &self.material;
        let base = match m.preset.as_deref() {
            Some("yig") => Some(MagnetMaterial::yig()),
            Some(other) => {
                c.push("material.preset", format!("unknown preset {other:?} (known: \"yig\")"));
                return None;
            }
            None => None,
        };
        let mut material = match base {
            Some(b) => b,
            None => {
                let mut ok = true;
                for (key, v) in [
                    ("verdet_rad_per_cm", m.verdet_rad_per_cm),
                    ("spin_density_per_m3", m.spin_density_per_m3),
                    ("refractive_index", m.refractive_index),
                ] {
                    if v.is_none() {
                        c.push(format!("material.{key}"), "required without a preset");
                        ok = false;
                    }
                }
                if !ok {
                    return None;
                }
                MagnetMaterial {
                    verdet_rad_per_m: 0.0,
                    spin_density_per_m3: 0.0,
                    refractive_index: 0.0,
                    relative_permittivity: f64::NAN,
                    absorption_per_m: None,
                    lande_g: 2.0,
                }
            }
        };
        if let Some(v) = m.verdet_rad_per_cm {
            material.verdet_rad_per_m = c.positive("material.verdet_rad_per_cm", v)? * 100.0;
        }
        if let Some(v) = m.spin_density_per_m3 {
            material.spin_density_per_m3 = c.positive("material.spin_density_per_m3", v)?;
        }
        if let Some(v) = m.refractive_index {
            material.refractive_index = c.positive("material.refractive_index", v)?;
            material.relative_permittivity = v * v;
        }
        if let Some(v) = m.relative_permittivity {
            material.relative_permittivity = c.positive("material.relative_permittivity", v)?;
        }
        if let Some(v) = m.absorption_per_cm {
            material.absorption_per_m = Some(c.positive("material.absorption_per_cm", v)? * 100.0);
        }
        if let Some(v) = m.lande_g {
            material.lande_g = c.positive("material.lande_g", v)?;
        }
        match material.validate() {
            Ok(()) => Some(material),
            Err(e) => {
                c.push("material", e.to_string());
                None
            }
        }
    }
}

fn family_linewidths(
    c: &mut Checker,
    base: &str,
    pol: &str,
    q: Option<f64>,
    gamma_ghz: Option<f64>,
    kappa_ghz: f64,
    anchor_hz: Option<f64>,
) -> Option<Linewidths> {
    let kappa = c.non_negative(&format!("{base}.{pol}_kappa_ghz"), kappa_ghz)? * GHZ;
    let gamma = match (q, gamma_ghz) {
        (Some(q), None) => {
            // Q refers to the ladder anchor; the few-GHz spread of a ladder
            // near 190 THz changes f/Q by well under a part in 10³.
            let q = c.positive(&format!("{base}.{pol}_quality_factor"), q)?;
            anchor_hz? / q
        }
        (None, Some(g)) => c.non_negative(&format!("{base}.{pol}_gamma_ghz"), g)? * GHZ,
        _ => {
            c.push(
                format!("{base}.{pol}_quality_factor"),
                format!("give exactly one of {pol}_quality_factor or {pol}_gamma_ghz"),
            );
            return None;
        }
    };
    if gamma + kappa <= 0.0 {
        c.push(format!("{base}.{pol}_kappa_ghz"), "total linewidth must be > 0");
        return None;
    }
    Some(Linewidths::new(gamma, kappa))
}

fn sample_geometry(c: &mut Checker, s: &SampleConfig) -> Option<SampleGeometry> {
    let require = |c: &mut Checker, key: &str, v: Option<f64>| -> Option<f64> {
        match v {
            Some(v) => c.positive(&format!("sample.{key}"), v),
            None => {
                c.push(format!("sample.{key}"), format!("required for shape {:?}", s.shape).to_lowercase());
                None
            }
        }
    };
    let geometry = match s.shape {
        ShapeKey::Sphere => SampleGeometry::sphere(require(c, "diameter_um", s.diameter_um)? * MICRON),
        ShapeKey::Disk => {
            let d = require(c, "diameter_um", s.diameter_um);
            let t = require(c, "thickness_um", s.thickness_um);
            SampleGeometry::disk(d? * MICRON, t? * MICRON)
        }
        ShapeKey::Custom => SampleGeometry::custom(require(c, "volume_m3", s.volume_m3)?),
    };
    geometry.ok()
}
