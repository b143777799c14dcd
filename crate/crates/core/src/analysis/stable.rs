//! Fixed points of a sampled cycle map `f(theta0) = theta0_next`.

use serde::{Deserialize, Serialize};

use super::angles::{wrap_360, wrap_signed};
use crate::error::{Error, Result};

/// One sample of the cycle map, degrees. `next` may carry windings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSample {
    pub theta0_deg: f64,
    pub next_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    /// In `[0, 360)`.
    pub theta_deg: f64,
    pub stability: Stability,
    /// `f'(theta*)` of the interpolated map.
    pub slope: f64,
}

impl FixedPoint {
    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }
}

const ZERO_TOL_DEG: f64 = 1e-12;

/// Locates fixed points of the periodic, linearly interpolated map modulo
/// 360 degrees. A fixed point is stable when `|f'| < 1`.
///
/// Returns an empty list when the increment `f - theta` never changes sign,
/// and [`Error::IdentityMap`] when it vanishes at every sample.
pub fn find_stable_directions(samples: &[MapSample]) -> Result<Vec<FixedPoint>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("empty cycle map".into()));
    }
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (wrap_360(s.theta0_deg), wrap_signed(s.next_deg - s.theta0_deg)))
        .collect();
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InsufficientData("non-finite cycle map sample".into()));
    }
    if pts.iter().all(|p| p.1.abs() <= ZERO_TOL_DEG) {
        return Err(Error::IdentityMap);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let n = pts.len();
    let at = |i: usize| -> (f64, f64) {
        let (t, d) = pts[i % n];
        (t + 360.0 * (i / n) as f64, d)
    };
    let seg_slope = |i: usize| -> f64 {
        let (t0, d0) = at(i);
        let (t1, d1) = at(i + 1);
        (d1 - d0) / (t1 - t0)
    };
    let is_zero = |d: f64| d.abs() <= ZERO_TOL_DEG;

    let mut out = Vec::new();
    for i in 0..n {
        let (t0, d0) = at(i);
        let (t1, d1) = at(i + 1);
        if is_zero(d0) {
            let slope = if n == 1 {
                1.0
            } else {
                1.0 + 0.5 * (seg_slope(i + n - 1) + seg_slope(i))
            };
            out.push(fixed_point(t0, slope));
            continue;
        }
        if is_zero(d1) || d0.signum() == d1.signum() {
            continue;
        }
        // A jump across +-180 is the wrap of the increment, not a root.
        if (d1 - d0).abs() >= 180.0 {
            continue;
        }
        let root = bisect(t0, d0, t1, d1);
        out.push(fixed_point(root, 1.0 + seg_slope(i)));
    }
    out.sort_by(|a, b| a.theta_deg.total_cmp(&b.theta_deg));
    Ok(out)
}

fn fixed_point(theta: f64, slope: f64) -> FixedPoint {
    FixedPoint {
        theta_deg: wrap_360(theta),
        stability: if slope.abs() < 1.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        },
        slope,
    }
}

/// Root of the linear interpolant through `(t0, d0)`, `(t1, d1)`, found by bisection.
fn bisect(mut lo: f64, d_lo: f64, mut hi: f64, d_hi: f64) -> f64 {
    let (t0, t1) = (lo, hi);
    let interp = |t: f64| d_lo + (d_hi - d_lo) * (t - t0) / (t1 - t0);
    let lo_sign = d_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = interp(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Value of the periodic linear interpolant of `f - theta` at `theta` (deg).
pub fn interpolated_increment(samples: &[MapSample], theta: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (wrap_360(s.theta0_deg), wrap_signed(s.next_deg - s.theta0_deg)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let th = wrap_360(theta);
    let n = pts.len();
    let idx = pts.partition_point(|p| p.0 <= th);
    let (i0, i1) = if idx == 0 { (n - 1, 0) } else { (idx - 1, idx % n) };
    let (t0, d0) = pts[i0];
    let (mut t1, d1) = pts[i1];
    let mut x = th;
    if t1 <= t0 {
        t1 += 360.0;
        if x < t0 {
            x += 360.0;
        }
    }
    if t1 == t0 {
        return d0;
    }
    d0 + (d1 - d0) * (x - t0) / (t1 - t0)
}
