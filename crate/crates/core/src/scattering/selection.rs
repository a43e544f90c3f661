use std::fmt;

use serde::Serialize;

use crate::resonator::Polarization;

/// Circulation direction of the whispering-gallery orbit, viewed from the
/// side the magnetization points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Orbit {
    Ccw,
    Cw,
}

impl Orbit {
    pub fn reversed(self) -> Self {
        match self {
            Orbit::Ccw => Orbit::Cw,
            Orbit::Cw => Orbit::Ccw,
        }
    }
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orbit::Ccw => "CCW",
            Orbit::Cw => "CW",
        })
    }
}

/// Direction of the saturating field relative to the orbit normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnetization {
    #[default]
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sideband {
    /// `ω − ω_m`, a magnon is created.
    Red,
    /// `ω + ω_m`, a magnon is annihilated.
    Blue,
}

impl Sideband {
    pub fn other(self) -> Self {
        match self {
            Sideband::Red => Sideband::Blue,
            Sideband::Blue => Sideband::Red,
        }
    }

    /// Sign applied to the drive frequency to get the output frequency.
    pub fn shift_sign(self) -> f64 {
        match self {
            Sideband::Red => -1.0,
            Sideband::Blue => 1.0,
        }
    }

    pub fn magnon_change(self) -> i8 {
        match self {
            Sideband::Red => 1,
            Sideband::Blue => -1,
        }
    }
}

impl fmt::Display for Sideband {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sideband::Red => "red",
            Sideband::Blue => "blue",
        })
    }
}

/// Polarization of the intracavity light relative to the magnetization axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CavityPolarization {
    #[serde(rename = "sigma+")]
    SigmaPlus,
    #[serde(rename = "sigma-")]
    SigmaMinus,
    #[serde(rename = "pi")]
    Pi,
}

impl fmt::Display for CavityPolarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CavityPolarization::SigmaPlus => "σ+",
            CavityPolarization::SigmaMinus => "σ−",
            CavityPolarization::Pi => "π",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessOutcome {
    pub magnon_change: i8,
    pub sideband: Sideband,
    pub output_polarization: Polarization,
    pub intracavity_polarization: CavityPolarization,
    /// 1 for the allowed channel; the forbidden one carries `ε`.
    pub amplitude_weight: f64,
}

/// Allowed Brillouin process for light entering `orbit` with `input`
/// polarization, magnetization along +z.
///
/// TE light is π-polarized in either orbit; TM light is σ+ on the CCW orbit
/// and σ− on the CW orbit. Spin conservation then fixes whether the magnon
/// is created (red sideband) or annihilated (blue). The output always
/// lands in the other polarization family.
pub fn select_process(orbit: Orbit, input: Polarization) -> ProcessOutcome {
    let (cavity, sideband) = match (orbit, input) {
        (Orbit::Ccw, Polarization::TM) => (CavityPolarization::SigmaPlus, Sideband::Red),
        (Orbit::Ccw, Polarization::TE) => (CavityPolarization::Pi, Sideband::Blue),
        (Orbit::Cw, Polarization::TM) => (CavityPolarization::SigmaMinus, Sideband::Blue),
        (Orbit::Cw, Polarization::TE) => (CavityPolarization::Pi, Sideband::Red),
    };
    ProcessOutcome {
        magnon_change: sideband.magnon_change(),
        sideband,
        output_polarization: input.other(),
        intracavity_polarization: cavity,
        amplitude_weight: 1.0,
    }
}

/// [`select_process`] with an explicit magnetization direction. Flipping the
/// field is the same as reversing the orbit.
pub fn select_process_with(orbit: Orbit, input: Polarization, magnetization: Magnetization) -> ProcessOutcome {
    match magnetization {
        Magnetization::Up => select_process(orbit, input),
        Magnetization::Down => select_process(orbit.reversed(), input),
    }
}

/// All four `(orbit, input)` rows in display order.
pub fn selection_table() -> [(Orbit, Polarization, ProcessOutcome); 4] {
    let rows = [
        (Orbit::Ccw, Polarization::TM),
        (Orbit::Ccw, Polarization::TE),
        (Orbit::Cw, Polarization::TM),
        (Orbit::Cw, Polarization::TE),
    ];
    rows.map(|(o, p)| (o, p, select_process(o, p)))
}
