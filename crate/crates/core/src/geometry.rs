//! Planar pose, twist and wrench primitives.

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

/// Planar pose `(x, y, theta)`; `theta` is never wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn rotation(&self) -> Matrix2<f64> {
        rotation(self.theta)
    }

    /// Maps a point given in this pose's body frame to the world frame.
    pub fn transform_point(&self, local: Vector2<f64>) -> Vector2<f64> {
        self.position() + self.rotation() * local
    }

    /// Maps a world point into this pose's body frame.
    pub fn inverse_transform_point(&self, world: Vector2<f64>) -> Vector2<f64> {
        self.rotation().transpose() * (world - self.position())
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.theta)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Planar twist `(vx, vy, omega)` of the centre of mass.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Twist {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl Twist {
    pub const fn new(vx: f64, vy: f64, omega: f64) -> Self {
        Self { vx, vy, omega }
    }

    pub fn linear(&self) -> Vector2<f64> {
        Vector2::new(self.vx, self.vy)
    }

    /// Velocity of a material point at world-oriented offset `r` from the CoM.
    pub fn point_velocity(&self, r: Vector2<f64>) -> Vector2<f64> {
        Vector2::new(self.vx - self.omega * r.y, self.vy + self.omega * r.x)
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.vx, self.vy, self.omega)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Planar wrench `(fx, fy, torque)` about the centre of mass.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wrench {
    pub fx: f64,
    pub fy: f64,
    pub torque: f64,
}

impl Wrench {
    pub const ZERO: Wrench = Wrench::new(0.0, 0.0, 0.0);

    pub const fn new(fx: f64, fy: f64, torque: f64) -> Self {
        Self { fx, fy, torque }
    }

    /// Wrench of force `f` applied at world-oriented offset `r` from the CoM.
    pub fn from_force_at(f: Vector2<f64>, r: Vector2<f64>) -> Self {
        Self::new(f.x, f.y, cross(r, f))
    }

    pub fn force(&self) -> Vector2<f64> {
        Vector2::new(self.fx, self.fy)
    }

    pub fn is_finite(&self) -> bool {
        self.fx.is_finite() && self.fy.is_finite() && self.torque.is_finite()
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.fx, self.fy, self.torque)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl std::ops::Add for Wrench {
    type Output = Wrench;

    fn add(self, rhs: Wrench) -> Wrench {
        Wrench::new(self.fx + rhs.fx, self.fy + rhs.fy, self.torque + rhs.torque)
    }
}

impl std::ops::AddAssign for Wrench {
    fn add_assign(&mut self, rhs: Wrench) {
        *self = *self + rhs;
    }
}

pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// z-component of the planar cross product.
#[inline]
pub fn cross(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counter-clockwise perpendicular.
#[inline]
pub fn perp(a: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-a.y, a.x)
}
