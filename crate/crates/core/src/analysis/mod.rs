//! Empirical analysis of push records: IOF transforms, histograms, push-law
//! fitting and recreation, error tables, and cycle-map fixed points.

pub mod angles;
pub mod histogram;
pub mod iof;
pub mod law;
pub mod stable;
pub mod stats;

use serde::{Deserialize, Serialize};

pub use angles::{circular_distance, unwrap_degrees, wrap_360, wrap_signed};
pub use histogram::{aligned_histograms, histogram, total_variation, Histogram};
pub use iof::{from_iof, to_iof, trajectory_to_iof};
pub use law::{
    fit_fourier, fit_push_law, predict_histogram, predict_values, Component, FourierSeries, PushLaw,
    DEFAULT_FOURIER_ORDER,
};
pub use stable::{find_stable_directions, FixedPoint, MapSample, Stability};
pub use stats::{rmse_table, stddev_table, ErrorTable};

/// Initial orientation and IOF outcome of one push, internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushObservation {
    /// rad
    pub theta0: f64,
    /// m
    pub dx: f64,
    /// m
    pub dy: f64,
    /// rad
    pub dtheta: f64,
}
