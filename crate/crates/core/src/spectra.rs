//! Laser-frequency sweeps of the scattering strength and their
//! cross-correlation.
//!
//! Strengths are sums over TE/TM pairs of the same family and FSR order:
//!
//! ```text
//! I_TE→TM(ω) = Σ C_i ρ_TE(ω) ρ_TM(ω + ω_m)
//! I_TM→TE(ω) = Σ C_i ρ_TM(ω) ρ_TE(ω − ω_m)
//! ```
//!
//! so `I_TE→TM(ω) = I_TM→TE(ω + ω_m)` holds pointwise.
//!
//! The correlation integrals only run over the window where both spectra
//! are sampled after shifting; the trapezoid rule is applied on the first
//! spectrum's grid and the second is linearly interpolated onto it.

use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::magnonics::KittelMode;
use crate::resonator::ModeLadder;
use crate::units::format_f64;

/// Fewest overlapping grid points a correlation offset may use.
pub const MIN_OVERLAP_POINTS: usize = 10;

/// Grid points per narrowest linewidth used by [`FrequencyGrid::for_ladder`].
pub const POINTS_PER_LINEWIDTH: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    #[serde(rename = "TE->TM")]
    TeToTm,
    #[serde(rename = "TM->TE")]
    TmToTe,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::TeToTm => "TE->TM",
            Direction::TmToTe => "TM->TE",
        })
    }
}

pub fn strength_te_to_tm(ladder: &ModeLadder, kittel: &KittelMode, frequency_hz: f64) -> f64 {
    ladder
        .pairs()
        .iter()
        .map(|p| p.weight * p.te.dos(frequency_hz) * p.tm.dos(frequency_hz + kittel.frequency_hz))
        .sum()
}

pub fn strength_tm_to_te(ladder: &ModeLadder, kittel: &KittelMode, frequency_hz: f64) -> f64 {
    ladder
        .pairs()
        .iter()
        .map(|p| p.weight * p.tm.dos(frequency_hz) * p.te.dos(frequency_hz - kittel.frequency_hz))
        .sum()
}

pub fn strength(direction: Direction, ladder: &ModeLadder, kittel: &KittelMode, frequency_hz: f64) -> f64 {
    match direction {
        Direction::TeToTm => strength_te_to_tm(ladder, kittel, frequency_hz),
        Direction::TmToTe => strength_tm_to_te(ladder, kittel, frequency_hz),
    }
}

/// Uniform grid from `start` to `stop` inclusive (the last point may fall
/// short of `stop` by less than one step).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyGrid {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub step_hz: f64,
}

impl FrequencyGrid {
    pub fn new(start_hz: f64, stop_hz: f64, step_hz: f64) -> Result<Self> {
        positive("step_hz", step_hz)?;
        if !(start_hz.is_finite() && stop_hz.is_finite()) || stop_hz < start_hz {
            return Err(Error::EmptyGrid);
        }
        Ok(Self {
            start_hz,
            stop_hz,
            step_hz,
        })
    }

    /// Step of `Γ_min / 20` for the given ladder.
    pub fn for_ladder(ladder: &ModeLadder, start_hz: f64, stop_hz: f64) -> Result<Self> {
        let narrowest = ladder.min_linewidth_hz().ok_or(Error::EmptyGrid)?;
        Self::new(start_hz, stop_hz, narrowest / POINTS_PER_LINEWIDTH)
    }

    pub fn len(&self) -> usize {
        ((self.stop_hz - self.start_hz) / self.step_hz * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.start_hz + k as f64 * self.step_hz)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringSpectrum {
    pub frequencies_hz: Vec<f64>,
    pub values: Vec<f64>,
    pub direction: Direction,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (k, w) in grid.windows(2).enumerate() {
        if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::NonMonotoneGrid { index: k + 1 });
        }
    }
    Ok(())
}

impl ScatteringSpectrum {
    pub fn new(frequencies_hz: Vec<f64>, values: Vec<f64>, direction: Direction) -> Result<Self> {
        if frequencies_hz.len() != values.len() {
            return Err(Error::LengthMismatch {
                frequencies: frequencies_hz.len(),
                values: values.len(),
            });
        }
        check_grid(&frequencies_hz)?;
        for &v in &values {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "spectrum value",
                    value: v,
                    reason: "must be finite and >= 0",
                });
            }
        }
        Ok(Self {
            frequencies_hz,
            values,
            direction,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same values on a grid moved by `shift_hz`.
    pub fn shifted(&self, shift_hz: f64) -> Self {
        Self {
            frequencies_hz: self.frequencies_hz.iter().map(|f| f + shift_hz).collect(),
            values: self.values.clone(),
            direction: self.direction,
        }
    }

    /// Linear interpolation; `None` outside the sampled range. Points within
    /// 1e-9 of a grid step beyond either end snap to the end value.
    pub fn interpolate(&self, frequency_hz: f64) -> Option<f64> {
        let f = &self.frequencies_hz;
        let n = f.len();
        if n == 1 {
            return (frequency_hz == f[0]).then(|| self.values[0]);
        }
        let slack = 1e-9 * (f[1] - f[0]).min(f[n - 1] - f[n - 2]);
        if frequency_hz < f[0] - slack || frequency_hz > f[n - 1] + slack {
            return None;
        }
        let hi = f.partition_point(|&x| x < frequency_hz).clamp(1, n - 1);
        let lo = hi - 1;
        let t = ((frequency_hz - f[lo]) / (f[hi] - f[lo])).clamp(0.0, 1.0);
        Some(self.values[lo] + t * (self.values[hi] - self.values[lo]))
    }

    /// Two-column CSV, header `frequency_Hz,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_two_columns(writer, ("frequency_Hz", "value"), &self.frequencies_hz, &self.values)
    }

    /// Reads the format written by [`ScatteringSpectrum::write_csv`]. Any
    /// header text is accepted on the first line.
    pub fn read_csv<R: Read>(reader: R, direction: Direction) -> Result<Self> {
        let (frequencies, values) = read_two_columns(reader)?;
        Self::new(frequencies, values, direction).map_err(|e| match e {
            // +1 for the header, +1 for 1-based lines.
            Error::NonMonotoneGrid { index } => Error::Csv {
                line: index as u64 + 2,
                message: "frequencies must be strictly increasing".into(),
            },
            Error::EmptyGrid => Error::Csv {
                line: 1,
                message: "no data rows".into(),
            },
            other => other,
        })
    }
}

fn write_two_columns<W: Write>(writer: W, header: (&str, &str), xs: &[f64], ys: &[f64]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([header.0, header.1]).map_err(io)?;
    for (x, y) in xs.iter().zip(ys) {
        out.write_record([format_f64(*x), format_f64(*y)]).map_err(io)?;
    }
    out.flush().map_err(|e| Error::Io(e.to_string()))
}

fn read_two_columns<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Csv {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let parse = |k: usize| {
            record[k].parse::<f64>().map_err(|_| Error::Csv {
                line,
                message: format!("cannot parse {:?} as a number", &record[k]),
            })
        };
        xs.push(parse(0)?);
        ys.push(parse(1)?);
    }
    Ok((xs, ys))
}

/// Pointwise strength over `grid`.
pub fn sweep(ladder: &ModeLadder, kittel: &KittelMode, grid: &[f64], direction: Direction) -> Result<ScatteringSpectrum> {
    check_grid(grid)?;
    let pairs = ladder.pairs();
    let wm = kittel.frequency_hz;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&w| {
            pairs
                .iter()
                .map(|p| match direction {
                    Direction::TeToTm => p.weight * p.te.dos(w) * p.tm.dos(w + wm),
                    Direction::TmToTe => p.weight * p.tm.dos(w) * p.te.dos(w - wm),
                })
                .sum()
        })
        .collect();
    ScatteringSpectrum::new(grid.to_vec(), values, direction)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationCurve {
    pub offsets_hz: Vec<f64>,
    pub values: Vec<f64>,
}

impl CorrelationCurve {
    /// Two-column CSV, header `offset_Hz,R`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_two_columns(writer, ("offset_Hz", "R"), &self.offsets_hz, &self.values)
    }
}

fn correlation_at(a: &ScatteringSpectrum, b: &ScatteringSpectrum, offset_hz: f64) -> Result<f64> {
    // Contiguous run of a's grid where b(ω + Ω) is defined.
    let mut first = None;
    let mut last = 0;
    let mut shifted = Vec::with_capacity(a.len());
    for (k, &w) in a.frequencies_hz.iter().enumerate() {
        if let Some(v) = b.interpolate(w + offset_hz) {
            first.get_or_insert(k);
            last = k;
            shifted.push(v);
        } else if first.is_some() {
            break;
        }
    }
    let points = shifted.len();
    if points < MIN_OVERLAP_POINTS {
        return Err(Error::InsufficientOverlap {
            offset_hz,
            points,
            required: MIN_OVERLAP_POINTS,
        });
    }
    let first = first.unwrap_or(0);
    let xs = &a.frequencies_hz[first..=last];
    let ya = &a.values[first..=last];

    let (mut cross, mut norm_a, mut norm_b) = (0.0, 0.0, 0.0);
    for k in 0..points {
        let left = if k > 0 { xs[k] - xs[k - 1] } else { 0.0 };
        let right = if k + 1 < points { xs[k + 1] - xs[k] } else { 0.0 };
        let w = 0.5 * (left + right);
        cross += w * (ya[k] * shifted[k]).sqrt();
        norm_a += w * ya[k];
        norm_b += w * shifted[k];
    }
    let denominator = norm_a * norm_b;
    if denominator <= 0.0 {
        return Ok(0.0);
    }
    Ok(cross * cross / denominator)
}

/// `R(Ω) = (∫ sqrt(I_a(ω) I_b(ω+Ω)))² / (∫ I_a(ω) ∫ I_b(ω+Ω))` over the
/// overlap window, for every offset. `R` lies in `[0, 1]` and equals 1 when
/// the spectra are proportional after the shift.
pub fn cross_correlation(a: &ScatteringSpectrum, b: &ScatteringSpectrum, offsets_hz: &[f64]) -> Result<CorrelationCurve> {
    let values = offsets_hz
        .par_iter()
        .map(|&o| correlation_at(a, b, o))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationCurve {
        offsets_hz: offsets_hz.to_vec(),
        values,
    })
}

/// Offsets `k * step` for `k` in `-n..=n` where `n * step <= max_offset`.
pub fn symmetric_offsets(max_offset_hz: f64, step_hz: f64) -> Result<Vec<f64>> {
    positive("step_hz", step_hz)?;
    let n = (max_offset_hz.abs() / step_hz * (1.0 + 1e-12)).floor() as i64;
    Ok((-n..=n).map(|k| k as f64 * step_hz).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationPeak {
    pub offset_hz: f64,
    pub value: f64,
    pub prominence: f64,
}

/// Interior local maxima whose topographic prominence reaches
/// `min_prominence`, highest first.
///
/// Plateaus count once, at their first point.
pub fn correlation_peaks(curve: &CorrelationCurve, min_prominence: f64) -> Vec<CorrelationPeak> {
    let v = &curve.values;
    let n = v.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    let mut i = 1;
    while i + 1 < n {
        if v[i] > v[i - 1] {
            // Walk across a plateau.
            let mut j = i;
            while j + 1 < n && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < n && v[j + 1] < v[i] {
                let prominence = prominence(v, i, j);
                if prominence >= min_prominence {
                    peaks.push(CorrelationPeak {
                        offset_hz: curve.offsets_hz[i],
                        value: v[i],
                        prominence,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then(a.offset_hz.total_cmp(&b.offset_hz))
    });
    peaks
}

fn prominence(v: &[f64], start: usize, end: usize) -> f64 {
    let height = v[start];
    let mut left_min = height;
    for &x in v[..start].iter().rev() {
        if x > height {
            break;
        }
        left_min = left_min.min(x);
    }
    let mut right_min = height;
    for &x in &v[end + 1..] {
        if x > height {
            break;
        }
        right_min = right_min.min(x);
    }
    height - left_min.max(right_min)
}
