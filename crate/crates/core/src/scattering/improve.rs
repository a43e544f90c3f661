use serde::Serialize;

use super::{conversion_efficiency, ScatteringScenario, WeakCoupling};
use crate::error::{positive, Result};

/// Design changes that raise the conversion efficiency, applied in
/// declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Improvement {
    /// Mode split matched to the Kittel frequency, laser and microwaves on resonance.
    TripleResonance,
    /// Optical Q raised to the absorption limit, modes critically coupled.
    QLimit,
    /// Sample volume reduced (thin disk); `g²` scales inversely with volume.
    DiskVolume,
    /// Higher optical pump power.
    PumpPower,
}

impl Improvement {
    pub const ALL: [Improvement; 4] = [
        Improvement::TripleResonance,
        Improvement::QLimit,
        Improvement::DiskVolume,
        Improvement::PumpPower,
    ];

    /// Factor quoted alongside the prospective 3e-2 efficiency, where one exists.
    pub fn quoted_factor(self) -> Option<f64> {
        match self {
            Improvement::TripleResonance => Some(7_000.0),
            Improvement::QLimit => Some(3_500.0),
            Improvement::DiskVolume => Some(90.0),
            Improvement::PumpPower => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Improvement::TripleResonance => "triple-resonance",
            Improvement::QLimit => "q-limit",
            Improvement::DiskVolume => "disk-volume",
            Improvement::PumpPower => "pump-power",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementPlan {
    /// Optical quality factor reached by the q-limit stage.
    pub optical_q: f64,
    /// Old volume over new volume.
    pub volume_reduction: f64,
    /// New pump power over old pump power.
    pub pump_power_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stage {
    pub improvement: Improvement,
    pub multiplier: f64,
    pub quoted_factor: Option<f64>,
    pub efficiency: f64,
    pub weak_coupling: WeakCoupling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagedEfficiency {
    pub baseline: f64,
    pub stages: Vec<Stage>,
    pub final_efficiency: f64,
    pub total_multiplier: f64,
    pub final_scenario: ScatteringScenario,
}

fn apply(s: &mut ScatteringScenario, improvement: Improvement, plan: &ImprovementPlan) {
    match improvement {
        Improvement::TripleResonance => {
            let sideband = s.process().sideband;
            s.microwave.frequency_hz = s.kittel.frequency_hz;
            s.laser_frequency_hz = s.pumped_mode().frequency_hz;
            let target = s.sideband_frequency_hz(sideband);
            let out = s.input_polarization.other();
            s.mode_mut(out).frequency_hz = target;
        }
        Improvement::QLimit => {
            for mode in [&mut s.te_mode, &mut s.tm_mode] {
                let gamma = mode.frequency_hz / plan.optical_q;
                mode.gamma_hz = gamma;
                mode.kappa_hz = gamma;
            }
        }
        Improvement::DiskVolume => s.coupling_g *= plan.volume_reduction.sqrt(),
        Improvement::PumpPower => s.input_flux_per_s *= plan.pump_power_ratio,
    }
}

/// Applies each requested improvement in turn and reports the efficiency
/// after every stage together with its multiplier over the previous stage.
pub fn staged_efficiency(
    base: &ScatteringScenario,
    plan: &ImprovementPlan,
    improvements: &[Improvement],
) -> Result<StagedEfficiency> {
    positive("optical_q", plan.optical_q)?;
    positive("volume_reduction", plan.volume_reduction)?;
    positive("pump_power_ratio", plan.pump_power_ratio)?;

    let mut requested = improvements.to_vec();
    requested.sort();
    requested.dedup();

    let baseline = conversion_efficiency(base)?.value;
    let mut scenario = *base;
    let mut previous = baseline;
    let mut stages = Vec::with_capacity(requested.len());
    for improvement in requested {
        apply(&mut scenario, improvement, plan);
        let eff = conversion_efficiency(&scenario)?;
        stages.push(Stage {
            improvement,
            multiplier: eff.value / previous,
            quoted_factor: improvement.quoted_factor(),
            efficiency: eff.value,
            weak_coupling: eff.weak_coupling,
        });
        previous = eff.value;
    }
    Ok(StagedEfficiency {
        baseline,
        stages,
        final_efficiency: previous,
        total_multiplier: previous / baseline,
        final_scenario: scenario,
    })
}
