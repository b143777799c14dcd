use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

pub const DEFAULT_SLIDE_SPEED_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_NORMAL_FLOOR: f64 = 0.05;

/// Force sample at the rod contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceTraceSample {
    /// s
    #[serde(rename = "t")]
    pub time: f64,
    /// N
    #[serde(rename = "Ftau")]
    pub tangential: f64,
    /// N
    #[serde(rename = "Fn")]
    pub normal: f64,
    /// Relative tangential speed, m/s.
    #[serde(rename = "vt")]
    pub tangential_speed: f64,
}

impl ForceTraceSample {
    pub fn ratio(&self) -> f64 {
        self.tangential / self.normal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PusherMuEstimate {
    pub mu: f64,
    /// Fraction of sticking samples whose ratio lies strictly inside
    /// `(-mu, mu)`; `None` without sticking samples.
    pub stick_fraction: Option<f64>,
    pub sliding_samples: usize,
    pub sticking_samples: usize,
}

/// Median `|F_tau / F_n|` over sliding samples.
///
/// Samples with `F_n` below `normal_floor` are discarded first.
pub fn estimate_pusher_mu(
    trace: &[ForceTraceSample],
    slide_speed_threshold: f64,
    normal_floor: f64,
) -> Result<PusherMuEstimate> {
    let kept: Vec<&ForceTraceSample> = trace
        .iter()
        .filter(|s| s.normal >= normal_floor && s.normal > 0.0 && s.ratio().is_finite())
        .collect();
    let (sliding, sticking): (Vec<&ForceTraceSample>, Vec<&ForceTraceSample>) = kept
        .iter()
        .partition(|s| s.tangential_speed.abs() > slide_speed_threshold);
    if sliding.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no sliding samples above {slide_speed_threshold} m/s among {} retained",
            kept.len()
        )));
    }
    let mut ratios: Vec<f64> = sliding.iter().map(|s| s.ratio().abs()).collect();
    ratios.sort_by(f64::total_cmp);
    let mid = ratios.len() / 2;
    let mu = if ratios.len() % 2 == 1 {
        ratios[mid]
    } else {
        0.5 * (ratios[mid - 1] + ratios[mid])
    };
    let stick_fraction = (!sticking.is_empty()).then(|| {
        let inside = sticking.iter().filter(|s| s.ratio().abs() < mu).count();
        inside as f64 / sticking.len() as f64
    });
    Ok(PusherMuEstimate {
        mu,
        stick_fraction,
        sliding_samples: sliding.len(),
        sticking_samples: sticking.len(),
    })
}

/// Rod-contact force trace of a simulated push (samples in contact only).
pub fn trace_from_trajectory(traj: &Trajectory) -> Vec<ForceTraceSample> {
    traj.samples
        .iter()
        .filter(|s| s.normal_force > 0.0)
        .map(|s| ForceTraceSample {
            time: s.t,
            tangential: s.tangential_force,
            normal: s.normal_force,
            tangential_speed: s.tangential_speed,
        })
        .collect()
}
