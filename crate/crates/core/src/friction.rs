//! Point-contact friction laws and the patch friction wrench.
//!
//! The anisotropic law is an offset, rotated ellipse in friction-coefficient
//! space. Its axes `m`, `n` are rotated by `phi` from the surface `x`, `y`
//! axes and are fixed to the supporting surface, not to the sliding object.
//! For a sliding velocity `v` the admissible coefficient maximizing `mu . v`
//! is selected, and the force on the slider is `-N mu(v)`.

use nalgebra::{Matrix2, Matrix3, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose, Twist, Wrench};

/// Default regularization speed below which sliding friction ramps linearly to zero.
pub const DEFAULT_FRICTION_V_EPS: f64 = 1e-4;

/// Serialized form of [`LimitEllipse`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipseParams {
    pub mu_a: f64,
    pub mu_b: f64,
    pub m0: f64,
    pub n0: f64,
    pub phi_rad: f64,
}

impl EllipseParams {
    /// Steel on plywood, as identified for the experimental setup.
    pub const PLYWOOD: EllipseParams = EllipseParams {
        mu_a: 0.2545,
        mu_b: 0.2346,
        m0: 0.0325,
        n0: 0.0082,
        phi_rad: 2.6175,
    };
}

/// Anisotropic limit ellipse `((mu_m - m0)/mu_a)^2 + ((mu_n - n0)/mu_b)^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipseParams", into = "EllipseParams")]
pub struct LimitEllipse {
    mu_a: f64,
    mu_b: f64,
    m0: f64,
    n0: f64,
    phi: f64,
    cos_phi: f64,
    sin_phi: f64,
}

impl LimitEllipse {
    /// Builds an ellipse, rejecting non-positive semi-axes and an origin that
    /// is not strictly inside (which would allow non-dissipative forces).
    pub fn new(mu_a: f64, mu_b: f64, m0: f64, n0: f64, phi: f64) -> Result<Self> {
        let e = Self::new_unchecked(mu_a, mu_b, m0, n0, phi);
        e.validate()?;
        Ok(e)
    }

    pub(crate) fn new_unchecked(mu_a: f64, mu_b: f64, m0: f64, n0: f64, phi: f64) -> Self {
        let (sin_phi, cos_phi) = phi.sin_cos();
        Self {
            mu_a,
            mu_b,
            m0,
            n0,
            phi,
            cos_phi,
            sin_phi,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu_a", self.mu_a),
            ("mu_b", self.mu_b),
            ("m0", self.m0),
            ("n0", self.n0),
            ("phi_rad", self.phi),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.mu_a <= 0.0 {
            return Err(Error::param("mu_a", "must be > 0"));
        }
        if self.mu_b <= 0.0 {
            return Err(Error::param("mu_b", "must be > 0"));
        }
        let origin = (self.m0 / self.mu_a).powi(2) + (self.n0 / self.mu_b).powi(2);
        if origin >= 1.0 {
            return Err(Error::param(
                "m0/n0",
                format!("origin must lie strictly inside the ellipse (residual {origin})"),
            ));
        }
        Ok(())
    }

    /// Coulomb limit circle of radius `mu`.
    pub fn isotropic(mu: f64) -> Result<Self> {
        Self::new(mu, mu, 0.0, 0.0, 0.0)
    }

    pub fn plywood() -> Self {
        Self::try_from(EllipseParams::PLYWOOD).expect("plywood parameters are dissipative")
    }

    pub fn mu_a(&self) -> f64 {
        self.mu_a
    }
    pub fn mu_b(&self) -> f64 {
        self.mu_b
    }
    pub fn m0(&self) -> f64 {
        self.m0
    }
    pub fn n0(&self) -> f64 {
        self.n0
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn params(&self) -> EllipseParams {
        EllipseParams {
            mu_a: self.mu_a,
            mu_b: self.mu_b,
            m0: self.m0,
            n0: self.n0,
            phi_rad: self.phi,
        }
    }

    /// Surface `(x, y)` components to ellipse `(m, n)` components.
    #[inline]
    pub fn to_axes(&self, v: Vector2<f64>) -> Vector2<f64> {
        Vector2::new(
            self.cos_phi * v.x + self.sin_phi * v.y,
            -self.sin_phi * v.x + self.cos_phi * v.y,
        )
    }

    /// Ellipse `(m, n)` components to surface `(x, y)` components.
    #[inline]
    pub fn from_axes(&self, v: Vector2<f64>) -> Vector2<f64> {
        Vector2::new(
            self.cos_phi * v.x - self.sin_phi * v.y,
            self.sin_phi * v.x + self.cos_phi * v.y,
        )
    }

    /// Ellipse centre in surface components.
    pub fn center(&self) -> Vector2<f64> {
        self.from_axes(Vector2::new(self.m0, self.n0))
    }

    /// Boundary point at parametric angle `t`.
    pub fn boundary_point(&self, t: f64) -> FrictionCoefficientVector {
        let (s, c) = t.sin_cos();
        FrictionCoefficientVector::from_axes(self, self.m0 + self.mu_a * c, self.n0 + self.mu_b * s)
    }

    pub fn is_isotropic(&self) -> bool {
        self.mu_a == self.mu_b && self.m0 == 0.0 && self.n0 == 0.0
    }

    /// Force and its Jacobian with respect to the sliding velocity, both in
    /// surface components. Inputs are assumed valid.
    #[inline]
    pub(crate) fn force_and_jacobian(&self, v: Vector2<f64>, normal: f64, v_eps: f64) -> (Vector2<f64>, Matrix2<f64>) {
        let speed = v.norm();
        if speed == 0.0 {
            let k = -normal / v_eps * 0.5 * (self.mu_a + self.mu_b);
            return (Vector2::zeros(), Matrix2::new(k, 0.0, 0.0, k));
        }
        let a2 = self.mu_a * self.mu_a;
        let b2 = self.mu_b * self.mu_b;
        let vmn = self.to_axes(v);
        let s = (a2 * vmn.x * vmn.x + b2 * vmn.y * vmn.y).sqrt();
        let mu = Vector2::new(self.m0 + a2 * vmn.x / s, self.n0 + b2 * vmn.y / s);
        // d(mu)/dv in (m, n) components: (a^2 b^2 / s^3) p p^T, p = (v_n, -v_m).
        let p = Vector2::new(vmn.y, -vmn.x);
        let dmu = (a2 * b2 / (s * s * s)) * (p * p.transpose());
        let (f_mn, j_mn) = if speed >= v_eps {
            (-normal * mu, -normal * dmu)
        } else {
            let scale = speed / v_eps;
            let vhat = vmn / speed;
            (
                -normal * scale * mu,
                -(normal / v_eps) * (mu * vhat.transpose() + speed * dmu),
            )
        };
        let q = Matrix2::new(self.cos_phi, self.sin_phi, -self.sin_phi, self.cos_phi);
        (self.from_axes(f_mn), q.transpose() * j_mn * q)
    }
}

impl TryFrom<EllipseParams> for LimitEllipse {
    type Error = Error;

    fn try_from(p: EllipseParams) -> Result<Self> {
        Self::new(p.mu_a, p.mu_b, p.m0, p.n0, p.phi_rad)
    }
}

impl From<LimitEllipse> for EllipseParams {
    fn from(e: LimitEllipse) -> Self {
        e.params()
    }
}

/// Friction coefficient vector `mu = mu_m m + mu_n n`, carried with its
/// surface-frame components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionCoefficientVector {
    pub mu_m: f64,
    pub mu_n: f64,
    pub mu_x: f64,
    pub mu_y: f64,
}

impl FrictionCoefficientVector {
    pub fn from_axes(ellipse: &LimitEllipse, mu_m: f64, mu_n: f64) -> Self {
        let xy = ellipse.from_axes(Vector2::new(mu_m, mu_n));
        Self {
            mu_m,
            mu_n,
            mu_x: xy.x,
            mu_y: xy.y,
        }
    }

    pub fn from_surface(ellipse: &LimitEllipse, mu: Vector2<f64>) -> Self {
        let mn = ellipse.to_axes(mu);
        Self {
            mu_m: mn.x,
            mu_n: mn.y,
            mu_x: mu.x,
            mu_y: mu.y,
        }
    }

    pub fn surface(&self) -> Vector2<f64> {
        Vector2::new(self.mu_x, self.mu_y)
    }
}

/// `((mu_m - m0)/mu_a)^2 + ((mu_n - n0)/mu_b)^2`; 1 on the boundary.
pub fn ellipse_residual(ellipse: &LimitEllipse, mu: &FrictionCoefficientVector) -> f64 {
    ((mu.mu_m - ellipse.m0) / ellipse.mu_a).powi(2) + ((mu.mu_n - ellipse.n0) / ellipse.mu_b).powi(2)
}

/// Boundary coefficient maximizing `mu . v` for a nonzero surface velocity `v`.
pub fn max_dissipation_coefficient(ellipse: &LimitEllipse, v: Vector2<f64>) -> Result<FrictionCoefficientVector> {
    if !(v.x.is_finite() && v.y.is_finite()) {
        return Err(Error::param("v", "must be finite"));
    }
    if v.x == 0.0 && v.y == 0.0 {
        return Err(Error::ZeroVelocity);
    }
    let a2 = ellipse.mu_a * ellipse.mu_a;
    let b2 = ellipse.mu_b * ellipse.mu_b;
    let vmn = ellipse.to_axes(v);
    let s = (a2 * vmn.x * vmn.x + b2 * vmn.y * vmn.y).sqrt();
    Ok(FrictionCoefficientVector::from_axes(
        ellipse,
        ellipse.m0 + a2 * vmn.x / s,
        ellipse.n0 + b2 * vmn.y / s,
    ))
}

/// Friction force (N) on a point sliding at `v` under normal load `normal`.
///
/// Above `v_eps` this is `-N mu(v)`; below it the same force is scaled by
/// `|v| / v_eps`, so the force vanishes at rest.
pub fn point_friction_force(ellipse: &LimitEllipse, v: Vector2<f64>, normal: f64, v_eps: f64) -> Result<Vector2<f64>> {
    if !(normal >= 0.0) || !normal.is_finite() {
        return Err(Error::param(
            "normal",
            format!("load must be finite and >= 0, got {normal}"),
        ));
    }
    if !(v_eps > 0.0) || !v_eps.is_finite() {
        return Err(Error::param("v_eps", format!("must be finite and > 0, got {v_eps}")));
    }
    if !(v.x.is_finite() && v.y.is_finite()) {
        return Err(Error::param("v", "must be finite"));
    }
    Ok(ellipse.force_and_jacobian(v, normal, v_eps).0)
}

/// Rigidly connected point contacts under the object's footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPatch {
    points: Vec<Vector2<f64>>,
    normal_loads: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl ContactPatch {
    /// `rows x cols` points at the cell centres of a square of side `side`
    /// centred on the CoM, sharing `weight` equally.
    pub fn grid(rows: usize, cols: usize, side: f64, weight: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("patch", "grid must have at least one row and column"));
        }
        if !(side > 0.0) {
            return Err(Error::param("side", "must be > 0"));
        }
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::param("weight", "must be finite and >= 0"));
        }
        let n = rows * cols;
        let load = weight / n as f64;
        let mut points = Vec::with_capacity(n);
        for i in 0..rows {
            for j in 0..cols {
                let x = -0.5 * side + (j as f64 + 0.5) * side / cols as f64;
                let y = -0.5 * side + (i as f64 + 0.5) * side / rows as f64;
                points.push(Vector2::new(x, y));
            }
        }
        Ok(Self {
            points,
            normal_loads: vec![load; n],
            rows,
            cols,
        })
    }

    /// Arbitrary point set; `rows`/`cols` are reported as `1 x len`.
    pub fn from_points(points: Vec<Vector2<f64>>, normal_loads: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("patch", "must contain at least one point"));
        }
        if points.len() != normal_loads.len() {
            return Err(Error::param("patch", "one normal load per point required"));
        }
        if normal_loads.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::param("normal_loads", "loads must be finite and >= 0"));
        }
        let cols = points.len();
        Ok(Self {
            points,
            normal_loads,
            rows: 1,
            cols,
        })
    }

    pub fn points(&self) -> &[Vector2<f64>] {
        &self.points
    }
    pub fn normal_loads(&self) -> &[f64] {
        &self.normal_loads
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn total_load(&self) -> f64 {
        self.normal_loads.iter().sum()
    }
}

/// Net surface friction wrench about the CoM for the object moving with
/// `twist` at `pose`.
pub fn patch_friction_wrench(
    patch: &ContactPatch,
    ellipse: &LimitEllipse,
    twist: Twist,
    pose: Pose,
    v_eps: f64,
) -> Wrench {
    patch_friction_wrench_with_jacobian(patch, ellipse, twist, pose, v_eps).0
}

/// Patch wrench together with its Jacobian with respect to the twist.
pub fn patch_friction_wrench_with_jacobian(
    patch: &ContactPatch,
    ellipse: &LimitEllipse,
    twist: Twist,
    pose: Pose,
    v_eps: f64,
) -> (Wrench, Matrix3<f64>) {
    let rot = pose.rotation();
    let mut w = Wrench::ZERO;
    let mut jac = Matrix3::zeros();
    for (local, &load) in patch.points.iter().zip(&patch.normal_loads) {
        let r = rot * local;
        let v = twist.point_velocity(r);
        let (f, j) = ellipse.force_and_jacobian(v, load, v_eps);
        w += Wrench::from_force_at(f, r);
        accumulate_point_jacobian(&mut jac, &j, r);
    }
    (w, jac)
}

/// Adds `G^T J G` where `G` maps the twist to the velocity of the point at
/// world offset `r`.
#[inline]
pub(crate) fn accumulate_point_jacobian(acc: &mut Matrix3<f64>, j: &Matrix2<f64>, r: Vector2<f64>) {
    // G = [[1, 0, -r.y], [0, 1, r.x]]
    let jg_col2 = Vector2::new(-j[(0, 0)] * r.y + j[(0, 1)] * r.x, -j[(1, 0)] * r.y + j[(1, 1)] * r.x);
    acc[(0, 0)] += j[(0, 0)];
    acc[(0, 1)] += j[(0, 1)];
    acc[(1, 0)] += j[(1, 0)];
    acc[(1, 1)] += j[(1, 1)];
    acc[(0, 2)] += jg_col2.x;
    acc[(1, 2)] += jg_col2.y;
    // Torque row: -r.y * row0 + r.x * row1.
    acc[(2, 0)] += -r.y * j[(0, 0)] + r.x * j[(1, 0)];
    acc[(2, 1)] += -r.y * j[(0, 1)] + r.x * j[(1, 1)];
    acc[(2, 2)] += -r.y * jg_col2.x + r.x * jg_col2.y;
}
