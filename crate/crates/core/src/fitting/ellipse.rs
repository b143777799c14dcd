//! Direct least-squares ellipse fit of friction-coefficient samples.
//!
//! Conic `A x^2 + B xy + C y^2 + D x + E y + F = 0` under the ellipse
//! normalization `4AC - B^2 = 1`, solved with the block-reduced eigenproblem
//! of Halir and Flusser on centred, scaled data.

use nalgebra::{Matrix2, Matrix3, Matrix6, SymmetricEigen, Vector2, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::friction::LimitEllipse;

/// Relative semi-axis difference below which the fit is treated as a circle
/// and the axis angle is reported as zero.
const CIRCLE_TOL: f64 = 1e-9;

/// Fits a [`LimitEllipse`] to `(mu_x, mu_y)` samples. The result has
/// `mu_a >= mu_b` and `phi` in `[0, pi)`.
pub fn fit_limit_ellipse(samples: &[[f64; 2]]) -> Result<LimitEllipse> {
    let (a, b, m0, n0, phi) = fit_ellipse_params(samples)?;
    LimitEllipse::new(a, b, m0, n0, phi)
        .map_err(|_| Error::NotDissipative(LimitEllipse::new_unchecked(a, b, m0, n0, phi)))
}

/// Conic fit returning `(mu_a, mu_b, m0, n0, phi)` without the
/// dissipativity check.
pub fn fit_ellipse_params(samples: &[[f64; 2]]) -> Result<(f64, f64, f64, f64, f64)> {
    if samples.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "ellipse fit needs >= 5 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("non-finite sample".into()));
    }
    let n = samples.len() as f64;
    let mean = samples
        .iter()
        .fold(Vector2::zeros(), |acc: Vector2<f64>, s| acc + Vector2::from(*s))
        / n;
    let scale = (samples
        .iter()
        .map(|s| (Vector2::from(*s) - mean).norm_squared())
        .sum::<f64>()
        / n)
        .sqrt();
    if !(scale > 0.0) {
        return Err(Error::DegenerateFit("all samples coincide".into()));
    }
    let pts: Vec<Vector2<f64>> = samples.iter().map(|s| (Vector2::from(*s) - mean) / scale).collect();

    // Scatter blocks for quadratic [x^2, xy, y^2] and linear [x, y, 1] terms.
    let mut s1 = Matrix3::zeros();
    let mut s2 = Matrix3::zeros();
    let mut s3 = Matrix3::zeros();
    for p in &pts {
        let q = Vector3::new(p.x * p.x, p.x * p.y, p.y * p.y);
        let l = Vector3::new(p.x, p.y, 1.0);
        s1 += q * q.transpose();
        s2 += q * l.transpose();
        s3 += l * l.transpose();
    }
    if !unconstrained_conic_is_elliptic(&pts) {
        return Err(Error::DegenerateFit(
            "samples are best described by a hyperbola or parabola".into(),
        ));
    }
    let s3_inv = s3
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFit("samples are collinear".into()))?;
    let t = -s3_inv * s2.transpose();
    let m = s1 + s2 * t;
    // Premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]].
    let reduced = Matrix3::from_rows(&[
        (m.row(2) / 2.0).into_owned(),
        (-m.row(1)).into_owned(),
        (m.row(0) / 2.0).into_owned(),
    ]);

    let quad = ellipse_eigenvector(&reduced)
        .ok_or_else(|| Error::DegenerateFit("no elliptic solution (samples fit a hyperbola or parabola)".into()))?;
    let lin = t * quad;
    let conic = [quad.x, quad.y, quad.z, lin.x, lin.y, lin.z];
    let (center, semi_a, semi_b, phi) = conic_to_geometry(&conic)?;

    let center = mean + center * scale;
    let (semi_a, semi_b) = (semi_a * scale, semi_b * scale);
    let phi = if (semi_a - semi_b).abs() <= CIRCLE_TOL * semi_a {
        0.0
    } else {
        phi
    };
    let (s, c) = phi.sin_cos();
    let m0 = c * center.x + s * center.y;
    let n0 = -s * center.x + c * center.y;
    Ok((semi_a, semi_b, m0, n0, phi))
}

/// Whether the unconstrained algebraic least-squares conic is an ellipse.
/// The constrained fit always returns an ellipse, so this is what detects
/// hyperbolic data.
fn unconstrained_conic_is_elliptic(pts: &[Vector2<f64>]) -> bool {
    let mut scatter = Matrix6::zeros();
    for p in pts {
        let d = Vector6::new(p.x * p.x, p.x * p.y, p.y * p.y, p.x, p.y, 1.0);
        scatter += d * d.transpose();
    }
    let eig = SymmetricEigen::new(scatter);
    let v = eig.eigenvectors.column(eig.eigenvalues.imin());
    let quad_norm = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    4.0 * v[0] * v[2] - v[1] * v[1] > 1e-9 * quad_norm
}

/// Real eigenvector of the reduced 3x3 problem satisfying `4AC - B^2 > 0`.
fn ellipse_eigenvector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let eig = m.complex_eigenvalues();
    let scale = m.norm();
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in eig.iter() {
        if lambda.im.abs() > 1e-9 * (1.0 + lambda.re.abs()) {
            continue;
        }
        let Some(v) = null_vector(&(m - Matrix3::identity() * lambda.re)) else {
            continue;
        };
        // Near-defective pairs yield spurious vectors from the cross product.
        if (m * v - v * lambda.re).norm() > 1e-8 * (scale + lambda.re.abs()) {
            continue;
        }
        let cond = 4.0 * v.x * v.z - v.y * v.y;
        if cond > 0.0 && best.as_ref().is_none_or(|(c, _)| cond > *c) {
            best = Some((cond, v));
        }
    }
    best.map(|(_, v)| v)
}

/// Unit null vector of a (numerically) rank-2 matrix from the largest cross
/// product of its rows.
fn null_vector(a: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let r: Vec<Vector3<f64>> = (0..3).map(|i| a.row(i).transpose().into_owned()).collect();
    let candidates = [r[0].cross(&r[1]), r[0].cross(&r[2]), r[1].cross(&r[2])];
    let v = candidates.into_iter().max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}

/// Centre, semi-axes (major first) and major-axis angle in `[0, pi)`.
fn conic_to_geometry(c: &[f64; 6]) -> Result<(Vector2<f64>, f64, f64, f64)> {
    let [a, b, cc, d, e, f] = *c;
    let q = Matrix2::new(a, 0.5 * b, 0.5 * b, cc);
    let center = Matrix2::new(2.0 * a, b, b, 2.0 * cc)
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFit("conic has no centre".into()))?
        * Vector2::new(-d, -e);
    let f0 = f + 0.5 * (d * center.x + e * center.y);
    let eig = SymmetricEigen::new(q);
    let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let ax0 = -f0 / l0;
    let ax1 = -f0 / l1;
    if !(ax0 > 0.0 && ax1 > 0.0) {
        return Err(Error::DegenerateFit("conic is not a real ellipse".into()));
    }
    let (r0, r1) = (ax0.sqrt(), ax1.sqrt());
    let (major, minor, dir) = if r0 >= r1 {
        (r0, r1, eig.eigenvectors.column(0).into_owned())
    } else {
        (r1, r0, eig.eigenvectors.column(1).into_owned())
    };
    let phi = dir.y.atan2(dir.x).rem_euclid(std::f64::consts::PI);
    let phi = if phi >= std::f64::consts::PI { 0.0 } else { phi };
    Ok((center, major, minor, phi))
}
