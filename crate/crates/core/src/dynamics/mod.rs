//! Planar Newton-Euler dynamics of the pushed square.

mod contact;
mod push;

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::friction::{ContactPatch, LimitEllipse, DEFAULT_FRICTION_V_EPS};
use crate::geometry::{Pose, Twist, Wrench};

pub(crate) use contact::pin_spring_with_jacobian;
pub use contact::{pin_spring_force, pusher_contact_force, ContactForce, PinForce};
pub use push::{simulate_push, RodProfile};

/// Inertial parameters of a uniform square slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigidBody {
    /// kg
    pub mass: f64,
    /// Side length of the square footprint, m.
    pub side: f64,
    /// m/s^2
    pub gravity: f64,
}

impl Default for RigidBody {
    fn default() -> Self {
        Self {
            mass: 0.8,
            side: 0.09,
            gravity: 9.81,
        }
    }
}

impl RigidBody {
    pub fn new(mass: f64, side: f64, gravity: f64) -> Result<Self> {
        let b = Self { mass, side, gravity };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::param("body.mass", "must be finite and > 0"));
        }
        if !(self.side > 0.0) || !self.side.is_finite() {
            return Err(Error::param("body.side", "must be finite and > 0"));
        }
        if !(self.gravity >= 0.0) || !self.gravity.is_finite() {
            return Err(Error::param("body.gravity", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// `m L^2 / 6`, the polar moment of a uniform square about its centre.
    pub fn inertia(&self) -> f64 {
        self.mass * self.side * self.side / 6.0
    }

    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    pub fn mass_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(self.mass, self.mass, self.inertia()))
    }
}

/// Pose and twist of the object. The orientation accumulates windings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyState {
    pub pose: Pose,
    pub twist: Twist,
}

impl BodyState {
    pub fn at_rest(pose: Pose) -> Self {
        Self {
            pose,
            twist: Twist::default(),
        }
    }
}

/// Rod geometry, penalty contact and rod/object Coulomb friction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PusherParams {
    /// m
    pub radius: f64,
    /// Penalty stiffness, N/m.
    pub stiffness: f64,
    /// Penalty damping, N s/m.
    pub damping: f64,
    /// Rod/object friction coefficient.
    pub mu: f64,
    /// Tangential regularization speed, m/s.
    pub v_eps: f64,
}

impl Default for PusherParams {
    fn default() -> Self {
        Self {
            radius: 0.005,
            stiffness: 1e4,
            damping: 100.0,
            mu: 0.15,
            v_eps: 1e-4,
        }
    }
}

impl PusherParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(Error::param("pusher.radius", "must be finite and >= 0"));
        }
        if !(self.stiffness > 0.0) || !self.stiffness.is_finite() {
            return Err(Error::param("pusher.stiffness", "must be finite and > 0"));
        }
        if !(self.damping >= 0.0) || !self.damping.is_finite() {
            return Err(Error::param("pusher.damping", "must be finite and >= 0"));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::param("pusher.mu", "must be finite and >= 0"));
        }
        if !(self.v_eps > 0.0) || !self.v_eps.is_finite() {
            return Err(Error::param("pusher.v_eps", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// A straight push defined in the object's frame at the start of the push.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushSpec {
    /// Contact point on the object's edge, object frame, m.
    pub contact: [f64; 2],
    /// Push direction, object frame. Normalized on validation.
    pub direction: [f64; 2],
    /// Rod travel, m.
    #[serde(default = "default_push_distance")]
    pub distance: f64,
    /// Cruise speed, m/s.
    #[serde(default = "default_push_speed")]
    pub speed: f64,
    /// Duration of the smooth speed ramps at either end, s.
    #[serde(default = "default_ramp_time")]
    pub ramp_time: f64,
}

fn default_push_distance() -> f64 {
    0.15
}
fn default_push_speed() -> f64 {
    0.02
}
fn default_ramp_time() -> f64 {
    2.0
}

impl PushSpec {
    /// Push orthogonal to the `-y` edge of a square of side `side`, at
    /// `offset` along the edge from its midpoint.
    pub fn orthogonal_to_bottom_edge(side: f64, offset: f64) -> Self {
        Self {
            contact: [offset, -0.5 * side],
            direction: [0.0, 1.0],
            distance: default_push_distance(),
            speed: default_push_speed(),
            ramp_time: default_ramp_time(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0) || !self.distance.is_finite() {
            return Err(Error::param("push.distance", "must be finite and > 0"));
        }
        if !(self.speed > 0.0) || !self.speed.is_finite() {
            return Err(Error::param("push.speed", "must be finite and > 0"));
        }
        if !(self.ramp_time >= 0.0) || !self.ramp_time.is_finite() {
            return Err(Error::param("push.ramp_time", "must be finite and >= 0"));
        }
        let d = Vector2::from(self.direction);
        if !(d.norm() > 0.0) || !d.norm().is_finite() {
            return Err(Error::param("push.direction", "must be a nonzero finite vector"));
        }
        if !self.contact.iter().all(|c| c.is_finite()) {
            return Err(Error::param("push.contact", "must be finite"));
        }
        Ok(())
    }

    pub fn unit_direction(&self) -> Vector2<f64> {
        Vector2::from(self.direction).normalize()
    }
}

/// Step size, regularization and termination settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorParams {
    /// s
    pub dt: f64,
    /// Surface friction regularization speed, m/s.
    pub friction_v_eps: f64,
    /// Rest when speed is below this, m/s ...
    pub rest_speed: f64,
    /// ... and spin below this, rad/s ...
    pub rest_spin: f64,
    /// ... for this many consecutive steps.
    pub rest_steps: usize,
    /// Hard cap on settling time after the rod stops, s.
    pub settle_cap: f64,
    /// Record every n-th integration step.
    pub sample_stride: usize,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            friction_v_eps: DEFAULT_FRICTION_V_EPS,
            rest_speed: 1e-5,
            rest_spin: 1e-4,
            rest_steps: 50,
            settle_cap: 30.0,
            sample_stride: 10,
        }
    }
}

impl IntegratorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("integrator.dt", "must be finite and > 0"));
        }
        if !(self.friction_v_eps > 0.0) || !self.friction_v_eps.is_finite() {
            return Err(Error::param("integrator.friction_v_eps", "must be finite and > 0"));
        }
        if !(self.rest_speed > 0.0) || !(self.rest_spin > 0.0) {
            return Err(Error::param("integrator.rest_speed", "rest thresholds must be > 0"));
        }
        if self.rest_steps == 0 {
            return Err(Error::param("integrator.rest_steps", "must be >= 1"));
        }
        if !(self.settle_cap > 0.0) {
            return Err(Error::param("integrator.settle_cap", "must be > 0"));
        }
        if self.sample_stride == 0 {
            return Err(Error::param("integrator.sample_stride", "must be >= 1"));
        }
        Ok(())
    }

    pub(crate) fn is_at_rest(&self, twist: &Twist) -> bool {
        twist.linear().norm() < self.rest_speed && twist.omega.abs() < self.rest_spin
    }
}

/// Everything the simulator needs besides the push and the start state.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub body: RigidBody,
    pub ellipse: LimitEllipse,
    pub patch: ContactPatch,
    pub pusher: PusherParams,
    pub integrator: IntegratorParams,
}

impl Model {
    /// Default body and rod, `8 x 8` patch, the given surface law.
    pub fn with_ellipse(ellipse: LimitEllipse) -> Self {
        let body = RigidBody::default();
        let patch = ContactPatch::grid(8, 8, body.side, body.weight()).expect("default patch is valid");
        Self {
            body,
            ellipse,
            patch,
            pusher: PusherParams::default(),
            integrator: IntegratorParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        self.pusher.validate()?;
        self.integrator.validate()
    }

    pub(crate) fn friction(&self, state: &BodyState) -> (Wrench, Matrix3<f64>) {
        crate::friction::patch_friction_wrench_with_jacobian(
            &self.patch,
            &self.ellipse,
            state.twist,
            state.pose,
            self.integrator.friction_v_eps,
        )
    }
}

/// One sample of a simulated trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: BodyState,
    /// Rod centre, world frame; NaN once the rod is withdrawn.
    pub pusher: Vector2<f64>,
    pub normal_force: f64,
    /// Tangential rod force on the object along the contact tangent.
    pub tangential_force: f64,
    /// Relative tangential speed at the rod contact.
    pub tangential_speed: f64,
    /// Net surface friction wrench at this sample.
    pub friction: Wrench,
    /// Inertial term `M qddot` over the step leading to this sample.
    pub inertial: Wrench,
}

/// Time-stamped states at a fixed sample stride.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub stride: usize,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<BodyState> {
        self.samples.last().map(|s| s.state)
    }

    pub fn poses(&self) -> impl Iterator<Item = Pose> + '_ {
        self.samples.iter().map(|s| s.state.pose)
    }
}

/// Semi-implicit Euler: `qdot+ = qdot + M^-1 F dt`, then `q+ = q + qdot+ dt`.
pub fn step(state: &BodyState, body: &RigidBody, wrench: Wrench, dt: f64) -> Result<BodyState> {
    step_linearized(state, body, wrench, &Matrix3::zeros(), dt)
}

/// Semi-implicit Euler with the velocity update taken implicitly through the
/// linearization `F(qdot+) ~ F + J (qdot+ - qdot)`:
/// `(M - dt J) (qdot+ - qdot) = dt F`. With `J = 0` this is [`step`].
pub fn step_linearized(
    state: &BodyState,
    body: &RigidBody,
    wrench: Wrench,
    jacobian: &Matrix3<f64>,
    dt: f64,
) -> Result<BodyState> {
    if !wrench.is_finite() {
        return Err(Error::NonFiniteWrench([wrench.fx, wrench.fy, wrench.torque]));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be finite and > 0"));
    }
    let f = wrench.to_vector() * dt;
    let dv = if jacobian.iter().all(|&x| x == 0.0) {
        nalgebra::Vector3::new(f.x / body.mass, f.y / body.mass, f.z / body.inertia())
    } else {
        let lhs = body.mass_matrix() - jacobian * dt;
        lhs.lu()
            .solve(&f)
            .ok_or(Error::NonFiniteWrench([wrench.fx, wrench.fy, wrench.torque]))?
    };
    let twist = state.twist.to_vector() + dv;
    let pose = state.pose.to_vector() + twist * dt;
    Ok(BodyState {
        pose: Pose::from_vector(pose),
        twist: Twist::from_vector(twist),
    })
}

/// Semi-implicit Euler with a fully implicit velocity update: solves
/// `M (qdot+ - qdot) = dt F(q, qdot+)` by damped Newton iteration using the
/// force Jacobian `dF/dqdot`, then `q+ = q + qdot+ dt`.
///
/// `forces` is evaluated at the current pose with trial twists. Returns the
/// new state and the force at the accepted twist.
pub fn step_implicit<F>(state: &BodyState, body: &RigidBody, dt: f64, mut forces: F) -> Result<(BodyState, Wrench)>
where
    F: FnMut(&BodyState) -> (Wrench, Matrix3<f64>),
{
    const MAX_ITERS: usize = 25;
    const TOL: f64 = 1e-11;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be finite and > 0"));
    }
    let mass = body.mass_matrix();
    let inv_mass = Vector3::new(1.0 / body.mass, 1.0 / body.mass, 1.0 / body.inertia());
    let v0 = state.twist.to_vector();
    let eval = |forces: &mut F, v: &Vector3<f64>| -> Result<(Wrench, Matrix3<f64>, Vector3<f64>)> {
        let (w, j) = forces(&BodyState {
            pose: state.pose,
            twist: Twist::from_vector(*v),
        });
        if !w.is_finite() {
            return Err(Error::NonFiniteWrench([w.fx, w.fy, w.torque]));
        }
        // Residual scaled to velocity units.
        let r = (mass * (v - v0) - w.to_vector() * dt).component_mul(&inv_mass);
        Ok((w, j, r))
    };

    let mut v = v0;
    let (mut w, mut j, mut r) = eval(&mut forces, &v)?;
    for _ in 0..MAX_ITERS {
        let norm = r.amax();
        if norm <= TOL {
            break;
        }
        let lhs = mass - j * dt;
        let Some(delta) = lhs.lu().solve(&-(mass * r)) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-4 {
            let trial = v + delta * lambda;
            let (tw, tj, tr) = eval(&mut forces, &trial)?;
            if tr.amax() < norm {
                (v, w, j, r) = (trial, tw, tj, tr);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let pose = state.pose.to_vector() + v * dt;
    Ok((
        BodyState {
            pose: Pose::from_vector(pose),
            twist: Twist::from_vector(v),
        },
        w,
    ))
}
