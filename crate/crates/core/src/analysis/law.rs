//! Periodic push law: truncated Fourier series in the initial orientation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::histogram::{histogram, Histogram};
use super::PushObservation;
use crate::error::{Error, Result};

pub const DEFAULT_FOURIER_ORDER: usize = 8;

/// `a0 + sum_k (a_k cos k t + b_k sin k t)` for `t` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.cos.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.constant;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (s, c) = ((k + 1) as f64 * t).sin_cos();
            acc += a * c + b * s;
        }
        acc
    }

    /// Derivative with respect to `t`.
    pub fn derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * t).sin_cos();
            acc += kf * (b * c - a * s);
        }
        acc
    }
}

/// Least-squares Fourier fit of `values` sampled at angles `t` (radians).
/// Returns the series and the residual RMSE.
pub fn fit_fourier(t: &[f64], values: &[f64], order: usize) -> Result<(FourierSeries, f64)> {
    assert_eq!(t.len(), values.len());
    let cols = 2 * order + 1;
    if t.len() < cols {
        return Err(Error::RankDeficient(format!(
            "{} samples cannot determine {cols} Fourier coefficients",
            t.len()
        )));
    }
    if values.iter().chain(t).any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("non-finite sample".into()));
    }
    let design = DMatrix::from_fn(t.len(), cols, |i, j| {
        if j == 0 {
            1.0
        } else {
            let k = j.div_ceil(2) as f64;
            if j % 2 == 1 {
                (k * t[i]).cos()
            } else {
                (k * t[i]).sin()
            }
        }
    });
    let rhs = DVector::from_column_slice(values);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::RankDeficient(format!(
            "angular coverage too sparse for order {order} (condition {:.3e})",
            smax / smin
        )));
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let resid = &design * &coef - rhs;
    let rmse = (resid.norm_squared() / t.len() as f64).sqrt();
    let series = FourierSeries {
        constant: coef[0],
        cos: (0..order).map(|k| coef[2 * k + 1]).collect(),
        sin: (0..order).map(|k| coef[2 * k + 2]).collect(),
    };
    Ok((series, rmse))
}

/// Fitted map from initial orientation to the IOF push outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushLaw {
    pub order: usize,
    /// m
    pub dx: FourierSeries,
    /// m
    pub dy: FourierSeries,
    /// rad
    pub dtheta: FourierSeries,
    /// Residual RMSE of `(dx, dy, dtheta)` on the training data.
    pub residual_rmse: [f64; 3],
}

impl PushLaw {
    /// Predicted `(dx, dy, dtheta)` for initial orientation `theta0` (rad).
    pub fn predict(&self, theta0: f64) -> (f64, f64, f64) {
        (self.dx.eval(theta0), self.dy.eval(theta0), self.dtheta.eval(theta0))
    }
}

pub fn fit_push_law(records: &[PushObservation], order: usize) -> Result<PushLaw> {
    let t: Vec<f64> = records.iter().map(|r| r.theta0).collect();
    let col = |f: fn(&PushObservation) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let (dx, rx) = fit_fourier(&t, &col(|r| r.dx), order)?;
    let (dy, ry) = fit_fourier(&t, &col(|r| r.dy), order)?;
    let (dtheta, rt) = fit_fourier(&t, &col(|r| r.dtheta), order)?;
    Ok(PushLaw {
        order,
        dx,
        dy,
        dtheta,
        residual_rmse: [rx, ry, rt],
    })
}

/// Which law component to project through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Dx,
    Dy,
    Dtheta,
}

/// Histogram of the law's predictions at the sampled initial orientations
/// (rad). Angles are binned in degrees and displacements in mm, over
/// `[lo, hi)` in those units.
pub fn predict_histogram(
    law: &PushLaw,
    component: Component,
    theta0_samples: &[f64],
    width: f64,
    lo: f64,
    hi: f64,
) -> Histogram {
    histogram(&predict_values(law, component, theta0_samples), width, lo, hi)
}

/// Predictions in display units (deg or mm).
pub fn predict_values(law: &PushLaw, component: Component, theta0_samples: &[f64]) -> Vec<f64> {
    theta0_samples
        .iter()
        .map(|&t| match component {
            Component::Dx => law.dx.eval(t) * 1e3,
            Component::Dy => law.dy.eval(t) * 1e3,
            Component::Dtheta => law.dtheta.eval(t).to_degrees(),
        })
        .collect()
}
