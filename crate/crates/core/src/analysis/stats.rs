//! Spread and prediction-error tables over push outcomes.
//!
//! Standard deviations are population (divide by `n`). Percentages are
//! normalized by the absolute signed mean and are undefined when it is zero.

use serde::Serialize;

use super::law::PushLaw;
use super::PushObservation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEntry {
    /// In internal units (rad or m).
    pub value: f64,
    pub mean: f64,
    /// `100 * value / |mean|`; `None` when the mean is zero.
    pub percent: Option<f64>,
}

impl ErrorEntry {
    fn new(value: f64, mean: f64) -> Self {
        let percent = (mean != 0.0).then(|| 100.0 * value / mean.abs());
        Self { value, mean, percent }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorTable {
    pub dtheta: ErrorEntry,
    pub dx: ErrorEntry,
    pub dy: ErrorEntry,
}

impl ErrorTable {
    /// `(name, entry, factor to display units, unit)` rows in table order.
    pub fn rows(&self) -> [(&'static str, ErrorEntry, f64, &'static str); 3] {
        [
            ("dtheta", self.dtheta, 180.0 / std::f64::consts::PI, "deg"),
            ("dx", self.dx, 1e3, "mm"),
            ("dy", self.dy, 1e3, "mm"),
        ]
    }
}

fn mean(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    v.sum::<f64>() / n
}

fn std_entry(values: impl Iterator<Item = f64> + Clone) -> ErrorEntry {
    let m = mean(values.clone());
    let var = mean(values.map(|x| (x - m) * (x - m)));
    ErrorEntry::new(var.sqrt(), m)
}

pub fn stddev_table(records: &[PushObservation]) -> Result<ErrorTable> {
    if records.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "standard deviation needs >= 2 records, got {}",
            records.len()
        )));
    }
    Ok(ErrorTable {
        dtheta: std_entry(records.iter().map(|r| r.dtheta)),
        dx: std_entry(records.iter().map(|r| r.dx)),
        dy: std_entry(records.iter().map(|r| r.dy)),
    })
}

/// Root mean squared difference between `law` predictions and observations.
pub fn rmse_table(records: &[PushObservation], law: &PushLaw) -> Result<ErrorTable> {
    if records.is_empty() {
        return Err(Error::InsufficientData("RMSE needs >= 1 record".into()));
    }
    let preds: Vec<(f64, f64, f64)> = records.iter().map(|r| law.predict(r.theta0)).collect();
    let entry = |obs: fn(&PushObservation) -> f64, pred: fn(&(f64, f64, f64)) -> f64| {
        let mse = mean(records.iter().zip(&preds).map(|(r, p)| (obs(r) - pred(p)).powi(2)));
        ErrorEntry::new(mse.sqrt(), mean(records.iter().map(obs)))
    };
    Ok(ErrorTable {
        dtheta: entry(|r| r.dtheta, |p| p.2),
        dx: entry(|r| r.dx, |p| p.0),
        dy: entry(|r| r.dy, |p| p.1),
    })
}
