//! Degree-valued angle helpers.

/// Reduces to `[0, 360)`.
pub fn wrap_360(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Reduces to `(-180, 180]`.
pub fn wrap_signed(deg: f64) -> f64 {
    let w = wrap_360(deg);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Smallest absolute separation of two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_signed(a - b).abs()
}

/// Restores cumulative winding: successive output differences lie in
/// `(-180, 180]` and the first element is kept as is.
pub fn unwrap_degrees(wrapped: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(wrapped.len());
    let mut iter = wrapped.iter();
    let Some(&first) = iter.next() else {
        return out;
    };
    out.push(first);
    let mut prev_raw = first;
    let mut acc = first;
    for &raw in iter {
        acc += wrap_signed(raw - prev_raw);
        out.push(acc);
        prev_raw = raw;
    }
    out
}
