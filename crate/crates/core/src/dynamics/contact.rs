use nalgebra::{Matrix2, Matrix3, Vector2};

use super::{BodyState, PusherParams, RigidBody};
use crate::friction::accumulate_point_jacobian;
use crate::geometry::{perp, Wrench};

/// Rod-on-object contact force.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactForce {
    /// Penalty normal force, N (>= 0).
    pub normal_force: f64,
    /// Tangential force on the object along `perp(normal)`, N.
    pub tangential_force: f64,
    /// Contact point on the object's boundary, world frame.
    pub point: Vector2<f64>,
    /// Unit normal from the object towards the rod, world frame.
    pub normal: Vector2<f64>,
    /// Overlap depth, m (<= 0 when separated).
    pub penetration: f64,
    /// Relative tangential speed of the rod over the object, m/s.
    pub tangential_speed: f64,
    /// Wrench on the object about its CoM.
    pub wrench: Wrench,
}

impl ContactForce {
    pub fn is_active(&self) -> bool {
        self.normal_force > 0.0
    }
}

/// Penalty contact between a disc-shaped rod and the square footprint.
///
/// Returns zero forces when separated.
pub fn pusher_contact_force(
    object: &BodyState,
    body: &RigidBody,
    rod_center: Vector2<f64>,
    rod_velocity: Vector2<f64>,
    params: &PusherParams,
) -> ContactForce {
    pusher_contact_with_jacobian(object, body, rod_center, rod_velocity, params).0
}

pub(crate) fn pusher_contact_with_jacobian(
    object: &BodyState,
    body: &RigidBody,
    rod_center: Vector2<f64>,
    rod_velocity: Vector2<f64>,
    params: &PusherParams,
) -> (ContactForce, Matrix3<f64>) {
    let pose = object.pose;
    let half = 0.5 * body.side;
    let p = pose.inverse_transform_point(rod_center);
    let q = Vector2::new(p.x.clamp(-half, half), p.y.clamp(-half, half));
    let diff = p - q;
    let dist = diff.norm();
    let (q_local, n_local, penetration) = if dist > 0.0 {
        (q, diff / dist, params.radius - dist)
    } else {
        // Rod centre inside the square: push out through the nearest edge.
        let gaps = [half - p.x, p.x + half, half - p.y, p.y + half];
        let (edge, gap) =
            gaps.iter().copied().enumerate().fold(
                (0, f64::INFINITY),
                |best, (i, g)| if g < best.1 { (i, g) } else { best },
            );
        let (qe, ne) = match edge {
            0 => (Vector2::new(half, p.y), Vector2::new(1.0, 0.0)),
            1 => (Vector2::new(-half, p.y), Vector2::new(-1.0, 0.0)),
            2 => (Vector2::new(p.x, half), Vector2::new(0.0, 1.0)),
            _ => (Vector2::new(p.x, -half), Vector2::new(0.0, -1.0)),
        };
        (qe, ne, params.radius + gap)
    };

    let rot = pose.rotation();
    let normal = rot * n_local;
    let r = rot * q_local;
    let point = pose.position() + r;
    if penetration <= 0.0 {
        return (
            ContactForce {
                point,
                normal,
                penetration,
                ..ContactForce::default()
            },
            Matrix3::zeros(),
        );
    }

    let v_rel = rod_velocity - object.twist.point_velocity(r);
    let penetration_rate = -normal.dot(&v_rel);
    let fn_raw = params.stiffness * penetration + params.damping * penetration_rate;
    if fn_raw <= 0.0 {
        return (
            ContactForce {
                point,
                normal,
                penetration,
                ..ContactForce::default()
            },
            Matrix3::zeros(),
        );
    }
    let normal_force = fn_raw;
    let tangent = perp(normal);
    let v_t = tangent.dot(&v_rel);
    let limit = params.mu * normal_force;
    let sticking = v_t.abs() < params.v_eps;
    let tangential_force = if sticking {
        limit * v_t / params.v_eps
    } else {
        limit * v_t.signum()
    };
    let force = -normal_force * normal + tangential_force * tangent;

    // d(force)/d(object point velocity)
    let mut j = -params.damping * (normal * normal.transpose());
    if sticking {
        j -= (limit / params.v_eps) * (tangent * tangent.transpose());
    }
    let mut jac = Matrix3::zeros();
    accumulate_point_jacobian(&mut jac, &j, r);

    (
        ContactForce {
            normal_force,
            tangential_force,
            point,
            normal,
            penetration,
            tangential_speed: v_t,
            wrench: Wrench::from_force_at(force, r),
        },
        jac,
    )
}

/// Force of the rod pinned in the dragging ring.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PinForce {
    /// Spring stretch from ring point to rod centre, m.
    pub stretch: f64,
    pub force: Vector2<f64>,
    pub wrench: Wrench,
}

/// Torque-free spring-damper joining the rod centre to the ring point
/// `ring_local` (object frame).
pub fn pin_spring_force(
    object: &BodyState,
    ring_local: Vector2<f64>,
    rod_center: Vector2<f64>,
    rod_velocity: Vector2<f64>,
    params: &PusherParams,
) -> PinForce {
    pin_spring_with_jacobian(object, ring_local, rod_center, rod_velocity, params).0
}

pub(crate) fn pin_spring_with_jacobian(
    object: &BodyState,
    ring_local: Vector2<f64>,
    rod_center: Vector2<f64>,
    rod_velocity: Vector2<f64>,
    params: &PusherParams,
) -> (PinForce, Matrix3<f64>) {
    let r = object.pose.rotation() * ring_local;
    let ring = object.pose.position() + r;
    let delta = rod_center - ring;
    let v_rel = rod_velocity - object.twist.point_velocity(r);
    let force = params.stiffness * delta + params.damping * v_rel;
    let mut jac = Matrix3::zeros();
    accumulate_point_jacobian(&mut jac, &(-params.damping * Matrix2::identity()), r);
    (
        PinForce {
            stretch: delta.norm(),
            force,
            wrench: Wrench::from_force_at(force, r),
        },
        jac,
    )
}
