//! One function per subcommand. Each returns what to print and the
//! warnings raised; files are written into the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use omsim_core::instrument::{sideband_observation_frequencies, snr_from_sideband_flux, SidebandPlacement};
use omsim_core::resonator::{analytic_fsr, gb_split, Polarization};
use omsim_core::scattering::{
    channel_fluxes, evaluate, full_linear_steady_state_for, g_exp_from_sideband, nonreciprocity_ratio_db,
    select_process_with, sideband_asymmetry_db, staged_efficiency, ChannelFluxes, Improvement, ImprovementPlan,
    Magnetization, Orbit, ProcessOutcome, Sideband, Stage, WEAK_COUPLING_THRESHOLD,
};
use omsim_core::spectra::{
    correlation_peaks, cross_correlation, sweep, symmetric_offsets, CorrelationPeak, Direction, ScatteringSpectrum,
};
use omsim_core::units::{ordinary, GHZ};
use serde::Serialize;

use crate::config::{ConfigError, Resolved, ScenarioConfig};
use crate::report::{extended_f64, write_file, RunReport};
use crate::{CliError, Command, Common, MagnetizationArg, OrbitArg, PolarizationArg};

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub strict: bool,
}

pub fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    let (common, mut outcome) = match command {
        Command::Selection {
            common,
            orbit,
            polarization,
            magnetization,
        } => (common, selection(common, *orbit, *polarization, *magnetization)?),
        Command::Spectrum { common } => (common, spectrum(common)?),
        Command::Xcorr {
            common,
            a,
            b,
            max_offset_ghz,
            step_ghz,
            shift_b_ghz,
            min_prominence,
        } => (
            common,
            xcorr(common, &XcorrArgs {
                a,
                b,
                max_offset_ghz: *max_offset_ghz,
                step_ghz: *step_ghz,
                shift_b_ghz: *shift_b_ghz,
                min_prominence: *min_prominence,
            })?,
        ),
        Command::Efficiency { common, improved } => (common, efficiency(common, improved)?),
        Command::Validate { common } => (common, validate(common)?),
    };
    outcome.strict = common.strict;
    outcome.warnings = crate::report::dedup(outcome.warnings);
    Ok(outcome)
}

struct Loaded {
    resolved: Resolved,
    bytes: Vec<u8>,
    path: PathBuf,
}

fn load(common: &Common, command: &str) -> Result<Loaded, CliError> {
    let path = common
        .config
        .clone()
        .ok_or_else(|| CliError::Usage(format!("`omsim {command}` needs --config <path>")))?;
    let (config, bytes) = ScenarioConfig::load(&path)?;
    let resolved = config.resolve()?;
    Ok(Loaded { resolved, bytes, path })
}

fn out_dir(common: &Common, resolved: Option<&Resolved>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| resolved.and_then(|r| r.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."))
}

// ---------------------------------------------------------------- selection

#[derive(Serialize)]
struct SelectionRow {
    orbit: Orbit,
    input_polarization: Polarization,
    #[serde(flatten)]
    outcome: ProcessOutcome,
    selected: bool,
}

#[derive(Serialize)]
struct SelectionInputs {
    orbit: Orbit,
    input_polarization: Polarization,
    magnetization: Magnetization,
}

fn selection(
    common: &Common,
    orbit: Option<OrbitArg>,
    polarization: Option<PolarizationArg>,
    magnetization: Option<MagnetizationArg>,
) -> Result<Outcome, CliError> {
    let loaded = match &common.config {
        Some(_) => Some(load(common, "selection")?),
        None => None,
    };
    let scenario = loaded.as_ref().map(|l| l.resolved.scenario);
    let orbit = match orbit {
        Some(OrbitArg::Ccw) => Orbit::Ccw,
        Some(OrbitArg::Cw) => Orbit::Cw,
        None => scenario.map_or(Orbit::Ccw, |s| s.orbit),
    };
    let input = match polarization {
        Some(PolarizationArg::Te) => Polarization::TE,
        Some(PolarizationArg::Tm) => Polarization::TM,
        None => scenario.map_or(Polarization::TM, |s| s.input_polarization),
    };
    let magnetization = match magnetization {
        Some(MagnetizationArg::Up) => Magnetization::Up,
        Some(MagnetizationArg::Down) => Magnetization::Down,
        None => scenario.map_or(Magnetization::Up, |s| s.magnetization),
    };

    let rows: Vec<SelectionRow> = [
        (Orbit::Ccw, Polarization::TM),
        (Orbit::Ccw, Polarization::TE),
        (Orbit::Cw, Polarization::TM),
        (Orbit::Cw, Polarization::TE),
    ]
    .into_iter()
    .map(|(o, p)| SelectionRow {
        orbit: o,
        input_polarization: p,
        outcome: select_process_with(o, p, magnetization),
        selected: o == orbit && p == input,
    })
    .collect();

    let mut stdout = String::new();
    let field = match magnetization {
        Magnetization::Up => "+z",
        Magnetization::Down => "-z",
    };
    writeln!(stdout, "magnetization {field}").unwrap();
    writeln!(stdout, "  orbit  input  cavity  magnons  sideband  output").unwrap();
    for r in &rows {
        writeln!(
            stdout,
            "{} {:<6} {:<6} {:<7} {:<+8} {:<9} {}",
            if r.selected { ">" } else { " " },
            r.orbit.to_string(),
            r.input_polarization.to_string(),
            r.outcome.intracavity_polarization.to_string(),
            r.outcome.magnon_change,
            r.outcome.sideband.to_string(),
            r.outcome.output_polarization
        )
        .unwrap();
    }

    if common.out.is_some() || loaded.is_some() {
        let dir = out_dir(common, loaded.as_ref().map(|l| &l.resolved));
        let report = RunReport::new(
            "selection",
            loaded.as_ref().map(|l| l.bytes.as_slice()),
            SelectionInputs {
                orbit,
                input_polarization: input,
                magnetization,
            },
            &rows,
            Vec::new(),
        );
        write_file(&dir, "selection.json", report.to_json().as_bytes())?;
    }
    Ok(Outcome {
        stdout,
        ..Outcome::default()
    })
}

// ----------------------------------------------------------------- spectrum

#[derive(Serialize)]
struct SpectrumInputs {
    start_hz: f64,
    stop_hz: f64,
    step_hz: f64,
    kittel_frequency_hz: f64,
    families: usize,
    fsr_copies: usize,
}

#[derive(Serialize)]
struct SpectrumMaximum {
    frequency_hz: f64,
    value: f64,
}

#[derive(Serialize)]
struct SpectrumOutputs {
    points: usize,
    gb_split_hz: f64,
    fsr_hz: f64,
    modes: usize,
    te_to_tm_max: SpectrumMaximum,
    tm_to_te_max: SpectrumMaximum,
    files: Vec<String>,
}

fn maximum(s: &ScatteringSpectrum) -> SpectrumMaximum {
    let (k, v) = s
        .values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
    SpectrumMaximum {
        frequency_hz: s.frequencies_hz[k],
        value: v,
    }
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> omsim_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn spectrum(common: &Common) -> Result<Outcome, CliError> {
    let loaded = load(common, "spectrum")?;
    let r = &loaded.resolved;
    let grid = r
        .grid
        .ok_or_else(|| ConfigError::single("sweep", "a [sweep] section is required for `omsim spectrum`"))?;
    let points = grid.points();
    let te = sweep(&r.ladder, &r.kittel, &points, Direction::TeToTm)?;
    let tm = sweep(&r.ladder, &r.kittel, &points, Direction::TmToTe)?;

    let dir = out_dir(common, Some(r));
    let mut files = Vec::new();
    for (name, bytes) in [
        ("te_to_tm.csv", csv_bytes(|b| te.write_csv(b))?),
        ("tm_to_te.csv", csv_bytes(|b| tm.write_csv(b))?),
        ("ladder.csv", csv_bytes(|b| r.ladder.write_csv(b))?),
    ] {
        write_file(&dir, name, &bytes)?;
        files.push(name.to_string());
    }
    files.push("spectrum.json".to_string());

    let outputs = SpectrumOutputs {
        points: points.len(),
        gb_split_hz: gb_split(&r.spec)?,
        fsr_hz: analytic_fsr(&r.spec),
        modes: r.ladder.len(),
        te_to_tm_max: maximum(&te),
        tm_to_te_max: maximum(&tm),
        files,
    };
    let inputs = SpectrumInputs {
        start_hz: grid.start_hz,
        stop_hz: grid.stop_hz,
        step_hz: grid.step_hz,
        kittel_frequency_hz: r.kittel.frequency_hz,
        families: r.families.len(),
        fsr_copies: r.ladder.len() / (2 * r.families.len().max(1)),
    };
    let warnings = r.warnings.clone();
    let report = RunReport::new("spectrum", Some(&loaded.bytes), inputs, &outputs, warnings.clone());
    write_file(&dir, "spectrum.json", report.to_json().as_bytes())?;

    let mut stdout = String::new();
    writeln!(stdout, "swept {} points, {} modes", outputs.points, outputs.modes).unwrap();
    writeln!(
        stdout,
        "TE->TM max {:.4e} at {:.6} GHz",
        outputs.te_to_tm_max.value,
        outputs.te_to_tm_max.frequency_hz / GHZ
    )
    .unwrap();
    writeln!(
        stdout,
        "TM->TE max {:.4e} at {:.6} GHz",
        outputs.tm_to_te_max.value,
        outputs.tm_to_te_max.frequency_hz / GHZ
    )
    .unwrap();
    writeln!(stdout, "wrote {}", dir.display()).unwrap();
    Ok(Outcome {
        stdout,
        warnings,
        strict: false,
    })
}

// -------------------------------------------------------------------- xcorr

struct XcorrArgs<'a> {
    a: &'a Path,
    b: &'a Path,
    max_offset_ghz: Option<f64>,
    step_ghz: Option<f64>,
    shift_b_ghz: f64,
    min_prominence: f64,
}

#[derive(Serialize)]
struct XcorrInputs {
    max_offset_hz: f64,
    step_hz: f64,
    shift_b_hz: f64,
    min_prominence: f64,
    a_sha256: String,
    b_sha256: String,
}

#[derive(Serialize)]
struct XcorrOutputs {
    offsets: usize,
    peaks: Vec<CorrelationPeak>,
}

fn read_spectrum(path: &Path, direction: Direction) -> Result<(ScatteringSpectrum, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let spectrum = ScatteringSpectrum::read_csv(bytes.as_slice(), direction).map_err(|e| match e {
        omsim_core::Error::Csv { line, message } => CliError::Io {
            path: format!("{}:{line}", path.display()),
            message,
        },
        other => CliError::Io {
            path: path.display().to_string(),
            message: other.to_string(),
        },
    })?;
    Ok((spectrum, bytes))
}

fn xcorr(common: &Common, args: &XcorrArgs) -> Result<Outcome, CliError> {
    let (a, a_bytes) = read_spectrum(args.a, Direction::TeToTm)?;
    let (b, b_bytes) = read_spectrum(args.b, Direction::TmToTe)?;
    if a.len() < 2 {
        return Err(CliError::Usage(format!("{}: need at least two samples", args.a.display())));
    }
    let b = b.shifted(args.shift_b_ghz * GHZ);
    let step = match args.step_ghz {
        Some(s) if s.is_finite() && s > 0.0 => s * GHZ,
        Some(s) => return Err(CliError::Usage(format!("--step-ghz must be > 0 (got {s})"))),
        None => a.frequencies_hz[1] - a.frequencies_hz[0],
    };
    let span = a.frequencies_hz[a.len() - 1] - a.frequencies_hz[0];
    let max_offset = match args.max_offset_ghz {
        Some(m) if m.is_finite() && m >= 0.0 => m * GHZ,
        Some(m) => return Err(CliError::Usage(format!("--max-offset-ghz must be >= 0 (got {m})"))),
        None => 0.5 * span,
    };
    let offsets = symmetric_offsets(max_offset, step)?;
    let curve = cross_correlation(&a, &b, &offsets)?;
    let peaks = correlation_peaks(&curve, args.min_prominence);

    let config = match &common.config {
        Some(_) => Some(load(common, "xcorr")?),
        None => None,
    };
    let dir = out_dir(common, config.as_ref().map(|c| &c.resolved));
    write_file(&dir, "correlation.csv", &csv_bytes(|buf| curve.write_csv(buf))?)?;
    let inputs = XcorrInputs {
        max_offset_hz: max_offset,
        step_hz: step,
        shift_b_hz: args.shift_b_ghz * GHZ,
        min_prominence: args.min_prominence,
        a_sha256: crate::report::sha256_hex(&a_bytes),
        b_sha256: crate::report::sha256_hex(&b_bytes),
    };
    let outputs = XcorrOutputs {
        offsets: offsets.len(),
        peaks,
    };
    let report = RunReport::new("xcorr", config.as_ref().map(|c| c.bytes.as_slice()), inputs, &outputs, Vec::new());
    write_file(&dir, "peaks.json", report.to_json().as_bytes())?;

    let mut stdout = String::new();
    writeln!(stdout, "{} offsets, {} peaks", outputs.offsets, outputs.peaks.len()).unwrap();
    for p in outputs.peaks.iter().take(10) {
        writeln!(stdout, "  {:+12.6} GHz  R = {:.6}", p.offset_hz / GHZ, p.value).unwrap();
    }
    writeln!(stdout, "wrote {}", dir.display()).unwrap();
    Ok(Outcome {
        stdout,
        ..Outcome::default()
    })
}

// --------------------------------------------------------------- efficiency

#[derive(Serialize)]
struct EfficiencyInputs {
    scenario: omsim_core::scattering::ScatteringScenario,
    improvements: Vec<Improvement>,
    plan: Option<ImprovementPlan>,
}

#[derive(Serialize)]
struct Coupling {
    g_rad_per_s: f64,
    g_over_2pi_hz: f64,
    g_theory_over_2pi_hz: f64,
    g_exp_over_2pi_hz: Option<f64>,
}

#[derive(Serialize)]
struct Detection {
    placement: Option<SidebandPlacement>,
    #[serde(serialize_with = "extended_f64")]
    allowed_snr_db: f64,
}

#[derive(Serialize)]
struct Staged {
    stages: Vec<Stage>,
    final_efficiency: f64,
    total_multiplier: f64,
}

#[derive(Serialize)]
struct EfficiencyOutputs {
    process: ProcessOutcome,
    fluxes: ChannelFluxes,
    efficiency: Option<f64>,
    weak_coupling_margin: f64,
    weak_coupling_threshold: f64,
    full_solve_flux: f64,
    coupling: Coupling,
    #[serde(serialize_with = "extended_f64")]
    nonreciprocity_db: f64,
    #[serde(serialize_with = "extended_f64")]
    sideband_asymmetry_db: f64,
    detection: Detection,
    improved: Option<Staged>,
}

fn parse_improvements(flags: &[String]) -> Result<Vec<Improvement>, CliError> {
    let mut out = Vec::new();
    for flag in flags.iter().map(|f| f.trim()).filter(|f| !f.is_empty()) {
        if flag == "all" {
            out.extend(Improvement::ALL);
            continue;
        }
        let known = Improvement::ALL.map(|i| i.name()).join(", ");
        out.push(
            Improvement::parse(flag)
                .ok_or_else(|| CliError::Usage(format!("unknown improvement {flag:?} (known: {known}, all)")))?,
        );
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn ratio_db_or(s: omsim_core::Result<f64>) -> f64 {
    s.unwrap_or(f64::NAN)
}

fn efficiency(common: &Common, flags: &[String]) -> Result<Outcome, CliError> {
    let improvements = parse_improvements(flags)?;
    let loaded = load(common, "efficiency")?;
    let r = &loaded.resolved;
    let s = r.scenario;

    let result = evaluate(&s)?;
    let mut warnings = r.warnings.clone();
    warnings.extend(result.warnings.iter().cloned());

    let process = s.process();
    let steady = full_linear_steady_state_for(&s, process.sideband)?;
    let g_exp = match r.measured_sideband_flux {
        Some(flux) => Some(ordinary(g_exp_from_sideband(flux, &s)?)),
        None => None,
    };
    let placement = match sideband_observation_frequencies(&r.heterodyne, s.microwave.frequency_hz) {
        Ok(p) => Some(p),
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    let allowed_snr_db = snr_from_sideband_flux(result.fluxes.allowed_flux, r.heterodyne.resolution_bandwidth_hz)?;

    let (plan, improved) = if improvements.is_empty() {
        (None, None)
    } else {
        if result.efficiency.is_none() {
            return Err(ConfigError::single(
                "drive.microwave_power_dbm",
                "improvement stages need a nonzero microwave drive",
            )
            .into());
        }
        let plan = r.improvement_plan(&improvements)?;
        let staged = staged_efficiency(&s, &plan, &improvements)?;
        for stage in &staged.stages {
            if !stage.weak_coupling.ok {
                warnings.push(format!(
                    "after {}: weak-coupling margin {:.3e} exceeds {:.0e}",
                    stage.improvement.name(),
                    stage.weak_coupling.margin,
                    WEAK_COUPLING_THRESHOLD
                ));
            }
        }
        (
            Some(plan),
            Some(Staged {
                final_efficiency: staged.final_efficiency,
                total_multiplier: staged.total_multiplier,
                stages: staged.stages,
            }),
        )
    };

    let outputs = EfficiencyOutputs {
        process,
        fluxes: channel_fluxes(&s)?,
        efficiency: result.efficiency,
        weak_coupling_margin: result.weak_coupling_margin,
        weak_coupling_threshold: WEAK_COUPLING_THRESHOLD,
        full_solve_flux: steady.output_flux,
        coupling: Coupling {
            g_rad_per_s: s.coupling_g,
            g_over_2pi_hz: ordinary(s.coupling_g),
            g_theory_over_2pi_hz: ordinary(r.coupling_g_theory),
            g_exp_over_2pi_hz: g_exp,
        },
        nonreciprocity_db: ratio_db_or(nonreciprocity_ratio_db(&s)),
        sideband_asymmetry_db: ratio_db_or(sideband_asymmetry_db(&s)),
        detection: Detection {
            placement,
            allowed_snr_db,
        },
        improved,
    };

    let mut stdout = String::new();
    let side = match process.sideband {
        Sideband::Red => "red",
        Sideband::Blue => "blue",
    };
    writeln!(
        stdout,
        "{} {} input -> {side} sideband into {}",
        s.orbit, s.input_polarization, process.output_polarization
    )
    .unwrap();
    writeln!(stdout, "g / 2pi          {:.4} Hz", outputs.coupling.g_over_2pi_hz).unwrap();
    writeln!(stdout, "sideband flux    {:.4e} /s", outputs.fluxes.allowed_flux).unwrap();
    match outputs.efficiency {
        Some(eta) => writeln!(stdout, "efficiency       {eta:.4e}").unwrap(),
        None => writeln!(stdout, "efficiency       n/a (no microwave drive)").unwrap(),
    }
    writeln!(stdout, "weak coupling    {:.4e}", outputs.weak_coupling_margin).unwrap();
    if let Some(g) = g_exp {
        writeln!(stdout, "g_exp / 2pi      {g:.4} Hz").unwrap();
    }
    if let Some(st) = &outputs.improved {
        for stage in &st.stages {
            writeln!(
                stdout,
                "  {:<17} x{:<12.4e} -> {:.4e}",
                stage.improvement.name(),
                stage.multiplier,
                stage.efficiency
            )
            .unwrap();
        }
        writeln!(stdout, "improved         {:.4e}", st.final_efficiency).unwrap();
    }

    let inputs = EfficiencyInputs {
        scenario: s,
        improvements,
        plan,
    };
    let dir = out_dir(common, Some(r));
    let report = RunReport::new("efficiency", Some(&loaded.bytes), inputs, &outputs, warnings.clone());
    write_file(&dir, "efficiency.json", report.to_json().as_bytes())?;
    writeln!(stdout, "wrote {}", dir.display()).unwrap();
    Ok(Outcome {
        stdout,
        warnings,
        strict: false,
    })
}

// ----------------------------------------------------------------- validate

fn validate(common: &Common) -> Result<Outcome, CliError> {
    let loaded = load(common, "validate")?;
    Ok(Outcome {
        stdout: format!("ok: {}\n", loaded.path.display()),
        warnings: loaded.resolved.warnings,
        strict: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn improvement_flags() {
        let all = parse_improvements(&["all".into()]).unwrap();
        assert_eq!(all, Improvement::ALL);
        let some = parse_improvements(&["pump-power".into(), "q-limit".into(), "q-limit".into()]).unwrap();
        assert_eq!(some, [Improvement::QLimit, Improvement::PumpPower]);
        assert!(matches!(parse_improvements(&["warp".into()]), Err(CliError::Usage(_))));
    }
}
