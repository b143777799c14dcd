//! End-to-end analysis of a cycle-record set.

use std::collections::BTreeSet;

use crate::analysis::{
    aligned_histograms, find_stable_directions, fit_fourier, fit_push_law, histogram, predict_values, rmse_table,
    stddev_table, total_variation, unwrap_degrees, wrap_360, Component, ErrorTable, FixedPoint, FourierSeries,
    Histogram, MapSample, PushLaw,
};
use crate::config::AnalysisOptions;
use crate::error::{Error, Result};
use crate::io::RecordRow;

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    /// Initial orientations in `[0, 360)` after the per-batch burn-in.
    pub theta0_histogram: Histogram,
    pub dtheta_histogram: Histogram,
    /// Law predictions at every recorded initial orientation, on the bins of
    /// `dtheta_histogram`.
    pub predicted_dtheta_histogram: Histogram,
    pub recreation_tv: f64,
    /// `(batch, k, theta0_deg)` with each batch unwrapped.
    pub unwrapped_theta0: Vec<(usize, usize, f64)>,
    pub law: PushLaw,
    pub stddev: ErrorTable,
    pub rmse: ErrorTable,
    /// Fourier order used: the configured one, or lower when the distinct
    /// initial orientations cannot support it.
    pub order: usize,
    /// Fitted cycle increment `theta_post - theta0` (deg) against
    /// `theta0` (rad).
    pub increment: FourierSeries,
    /// Map from the fitted increment on a 1 degree grid.
    pub map: Vec<MapSample>,
    pub fixed_points: Vec<FixedPoint>,
    /// Set when the fixed-point search could not run, e.g. for an identity map.
    pub map_note: Option<String>,
}

impl AnalysisReport {
    pub fn stable_directions(&self) -> impl Iterator<Item = &FixedPoint> {
        self.fixed_points.iter().filter(|p| p.is_stable())
    }
}

pub fn analyze_records(rows: &[RecordRow], opts: &AnalysisOptions) -> Result<AnalysisReport> {
    opts.validate()?;
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need >= 2 records, got {}",
            rows.len()
        )));
    }
    let obs: Vec<_> = rows.iter().map(RecordRow::observation).collect();

    let burned: Vec<f64> = rows
        .iter()
        .filter(|r| r.k >= opts.burn_in)
        .map(|r| wrap_360(r.theta0_deg_unwrapped))
        .collect();
    let theta0_histogram = histogram(&burned, opts.angle_bin_deg, 0.0, 360.0);

    let theta0: Vec<f64> = obs.iter().map(|o| o.theta0).collect();
    let order = supported_order(&theta0, opts.fourier_order)?;
    let law = fit_push_law(&obs, order)?;
    let actual: Vec<f64> = rows.iter().map(|r| r.dtheta_deg).collect();
    let predicted = predict_values(&law, Component::Dtheta, &theta0);
    let (dtheta_histogram, predicted_dtheta_histogram) = aligned_histograms(&actual, &predicted, opts.angle_bin_deg);
    let recreation_tv = total_variation(&dtheta_histogram, &predicted_dtheta_histogram);

    let mut unwrapped_theta0 = Vec::with_capacity(rows.len());
    let batches: BTreeSet<usize> = rows.iter().map(|r| r.batch).collect();
    for b in batches {
        let mut batch: Vec<&RecordRow> = rows.iter().filter(|r| r.batch == b).collect();
        batch.sort_by_key(|r| r.k);
        let wrapped: Vec<f64> = batch.iter().map(|r| wrap_360(r.theta0_deg_unwrapped)).collect();
        let un = unwrap_degrees(&wrapped);
        unwrapped_theta0.extend(batch.iter().zip(un).map(|(r, t)| (b, r.k, t)));
    }

    let increments: Vec<f64> = rows
        .iter()
        .map(|r| r.theta_post_deg_unwrapped - r.theta0_deg_unwrapped)
        .collect();
    let (increment, _) = fit_fourier(&theta0, &increments, order)?;
    let map: Vec<MapSample> = (0..360)
        .map(|d| {
            let deg = d as f64;
            MapSample {
                theta0_deg: deg,
                next_deg: deg + increment.eval(deg.to_radians()),
            }
        })
        .collect();
    let (fixed_points, map_note) = match find_stable_directions(&map) {
        Ok(p) => (p, None),
        Err(e @ Error::IdentityMap) => (Vec::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };

    Ok(AnalysisReport {
        theta0_histogram,
        dtheta_histogram,
        predicted_dtheta_histogram,
        recreation_tv,
        unwrapped_theta0,
        stddev: stddev_table(&obs)?,
        rmse: rmse_table(&obs, &law)?,
        law,
        order,
        increment,
        map,
        fixed_points,
        map_note,
    })
}

/// Highest order up to `max_order` the distinct sample angles support.
fn supported_order(t: &[f64], max_order: usize) -> Result<usize> {
    let zeros = vec![0.0; t.len()];
    let mut last_err = None;
    for order in (0..=max_order).rev() {
        match fit_fourier(t, &zeros, order) {
            Ok(_) => return Ok(order),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InsufficientData("no samples".into())))
}
