use nalgebra::Vector2;

use super::contact::{pusher_contact_with_jacobian, ContactForce};
use super::{step_implicit, BodyState, Model, PushSpec, Trajectory, TrajectorySample};
use crate::error::{Error, Result};
use crate::geometry::Wrench;

/// Straight-line rod motion with smooth speed ramps at both ends.
///
/// Speed rises as `V (3u^2 - 2u^3)` over `ramp` seconds, cruises at `V`, and
/// falls symmetrically, covering exactly `distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodProfile {
    pub start: Vector2<f64>,
    pub direction: Vector2<f64>,
    pub distance: f64,
    pub speed: f64,
    pub ramp: f64,
}

impl RodProfile {
    pub fn new(start: Vector2<f64>, direction: Vector2<f64>, distance: f64, speed: f64, ramp: f64) -> Self {
        // Ramps shrink when the path is too short to reach cruise speed.
        let ramp = ramp.min(distance / speed).max(0.0);
        Self {
            start,
            direction,
            distance,
            speed,
            ramp,
        }
    }

    pub fn duration(&self) -> f64 {
        self.distance / self.speed + self.ramp
    }

    /// Arc length and speed at time `t`.
    pub fn travel(&self, t: f64) -> (f64, f64) {
        let total = self.duration();
        let v = self.speed;
        let tau = self.ramp;
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        if t >= total {
            return (self.distance, 0.0);
        }
        let ramp_dist = |u: f64| v * tau * (u * u * u - 0.5 * u * u * u * u);
        let ramp_speed = |u: f64| v * u * u * (3.0 - 2.0 * u);
        if tau > 0.0 && t < tau {
            let u = t / tau;
            (ramp_dist(u), ramp_speed(u))
        } else if tau > 0.0 && t > total - tau {
            let u = (total - t) / tau;
            (self.distance - ramp_dist(u), ramp_speed(u))
        } else {
            (0.5 * v * tau + v * (t - tau), v)
        }
    }

    pub fn position(&self, t: f64) -> (Vector2<f64>, Vector2<f64>) {
        let (s, v) = self.travel(t);
        (self.start + self.direction * s, self.direction * v)
    }
}

/// Pushes the object with the rod along `spec` (object frame at `start`),
/// withdraws the rod, and integrates until the object is at rest.
pub fn simulate_push(start: &BodyState, spec: &PushSpec, model: &Model) -> Result<Trajectory> {
    spec.validate()?;
    model.validate()?;
    let ip = &model.integrator;
    let dt = ip.dt;

    let dir_local = spec.unit_direction();
    let contact_local = Vector2::from(spec.contact);
    let rod_start_local = contact_local - dir_local * model.pusher.radius;
    let rod = RodProfile::new(
        start.pose.transform_point(rod_start_local),
        start.pose.rotation() * dir_local,
        spec.distance,
        spec.speed,
        spec.ramp_time,
    );
    let push_steps = (rod.duration() / dt).ceil() as usize;
    let cap_steps = push_steps + (ip.settle_cap / dt).ceil() as usize;

    let mut traj = Trajectory {
        dt,
        stride: ip.sample_stride,
        samples: Vec::with_capacity(cap_steps / ip.sample_stride + 2),
    };
    let mut state = *start;
    let (f0, _) = model.friction(&state);
    let (rod0, _) = rod.position(0.0);
    let c0 = pusher_contact_with_jacobian(&state, &model.body, rod0, Vector2::zeros(), &model.pusher).0;
    traj.samples.push(TrajectorySample {
        t: 0.0,
        state,
        pusher: rod0,
        normal_force: c0.normal_force,
        tangential_force: c0.tangential_force,
        tangential_speed: c0.tangential_speed,
        friction: f0,
        inertial: Wrench::ZERO,
    });

    let mass = model.body.mass_matrix();
    let mut rest_run = 0usize;
    for k in 0..cap_steps {
        let t = k as f64 * dt;
        let rod_active = k < push_steps;
        let rod_now = rod_active.then(|| rod.position(t));
        let prev = state;
        let (next, _) = step_implicit(&prev, &model.body, dt, |trial| {
            let (mut w, mut j) = model.friction(trial);
            if let Some((pos, vel)) = rod_now {
                let (c, cj) = pusher_contact_with_jacobian(trial, &model.body, pos, vel, &model.pusher);
                w += c.wrench;
                j += cj;
            }
            (w, j)
        })?;
        let accel = (next.twist.to_vector() - prev.twist.to_vector()) / dt;
        state = next;

        let done = if rod_active {
            false
        } else if ip.is_at_rest(&state.twist) {
            rest_run += 1;
            rest_run >= ip.rest_steps
        } else {
            rest_run = 0;
            false
        };

        if (k + 1) % ip.sample_stride == 0 || done {
            // Forces as applied during this step: old pose, new twist.
            let applied = BodyState {
                pose: prev.pose,
                twist: next.twist,
            };
            let (friction, _) = model.friction(&applied);
            let (c, rod_pos) = match rod_now {
                Some((pos, vel)) => (
                    pusher_contact_with_jacobian(&applied, &model.body, pos, vel, &model.pusher).0,
                    pos,
                ),
                None => (ContactForce::default(), Vector2::new(f64::NAN, f64::NAN)),
            };
            traj.samples.push(TrajectorySample {
                t: (k + 1) as f64 * dt,
                state,
                pusher: rod_pos,
                normal_force: c.normal_force,
                tangential_force: c.tangential_force,
                tangential_speed: c.tangential_speed,
                friction,
                inertial: Wrench::from_vector(mass * accel),
            });
        }
        if done {
            return Ok(traj);
        }
    }
    Err(Error::NotConverged {
        phase: "push",
        cap_s: ip.settle_cap,
        speed: state.twist.linear().norm(),
        spin: state.twist.omega,
    })
}
