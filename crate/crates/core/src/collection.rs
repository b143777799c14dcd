//! The closed push / drag-back data-collection loop.
//!
//! Each cycle pushes the object in its own initial frame, then inserts the
//! rod in an off-centre ring and drags the object back towards a fixed
//! surface point. The orientation the drag leaves behind is the next cycle's
//! initial orientation, which defines the cycle map `f(theta0)`.

use nalgebra::Vector2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analysis::{to_iof, MapSample, PushObservation};
use crate::dynamics::{
    pin_spring_with_jacobian, simulate_push, step_implicit, BodyState, Model, PushSpec, RodProfile, Trajectory,
    TrajectorySample,
};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Wrench};

/// Default push contact offset from the pushed edge's midpoint, m.
pub const DEFAULT_PUSH_OFFSET: f64 = 0.01;

/// Default drag speed, m/s.
pub const DEFAULT_DRAG_SPEED: f64 = 0.05;

/// Seeded start-pose jitter applied after each drag. Off by default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Perturbation {
    /// Standard deviation of the position jitter per axis, m.
    pub position_std: f64,
    /// Standard deviation of the orientation jitter, degrees.
    pub angle_std_deg: f64,
}

impl Perturbation {
    pub fn is_off(&self) -> bool {
        self.position_std == 0.0 && self.angle_std_deg == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectionConfig {
    pub push: PushSpec,
    /// Ring position in the object frame, m.
    pub ring_offset: Vector2<f64>,
    /// World point the rod drags the ring to, m.
    pub drag_target: Vector2<f64>,
    /// m/s
    pub drag_speed: f64,
    /// s
    pub drag_ramp_time: f64,
    /// Cycles per batch.
    pub cycles: usize,
    /// Initial orientation of each batch, degrees.
    pub batch_starts_deg: Vec<f64>,
    pub seed: u64,
    pub perturbation: Perturbation,
    pub keep_trajectories: bool,
}

impl CollectionConfig {
    /// Defaults for a square of side `side`: push orthogonal to the `-y` edge
    /// at `push_offset` from its midpoint, ring at `(0, -side/4)`, drag to the
    /// origin at 50 mm/s, six batches of 100 cycles.
    pub fn with_defaults(side: f64, push_offset: f64, seed: u64) -> Self {
        Self {
            push: PushSpec::orthogonal_to_bottom_edge(side, push_offset),
            ring_offset: Vector2::new(0.0, -0.25 * side),
            drag_target: Vector2::zeros(),
            drag_speed: DEFAULT_DRAG_SPEED,
            drag_ramp_time: 0.5,
            cycles: 100,
            batch_starts_deg: vec![0.0, 60.0, 120.0, 180.0, 240.0, 300.0],
            seed,
            perturbation: Perturbation::default(),
            keep_trajectories: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.push.validate()?;
        if self.ring_offset == Vector2::zeros() {
            return Err(Error::param("collection.ring_offset", "the ring must be off-centre"));
        }
        self.validate_common()
    }

    /// Validation without the off-centre ring requirement.
    pub(crate) fn validate_common(&self) -> Result<()> {
        self.push.validate()?;
        if !(self.drag_speed > 0.0) || !self.drag_speed.is_finite() {
            return Err(Error::param("collection.drag_speed", "must be finite and > 0"));
        }
        if !(self.drag_ramp_time >= 0.0) {
            return Err(Error::param("collection.drag_ramp_time", "must be >= 0"));
        }
        if self.cycles == 0 {
            return Err(Error::param("collection.cycles", "must be >= 1"));
        }
        if self.batch_starts_deg.iter().any(|a| !a.is_finite()) {
            return Err(Error::param("collection.batch_starts_deg", "must be finite"));
        }
        if !(self.perturbation.position_std >= 0.0) || !(self.perturbation.angle_std_deg >= 0.0) {
            return Err(Error::param(
                "collection.perturbation",
                "standard deviations must be >= 0",
            ));
        }
        Ok(())
    }

    /// Rest pose with the ring on the drag target and orientation `theta`
    /// (rad), i.e. where a completed drag leaves the object.
    pub fn canonical_start(&self, theta: f64) -> Pose {
        let p = self.drag_target - crate::geometry::rotation(theta) * self.ring_offset;
        Pose::new(p.x, p.y, theta)
    }
}

/// One push plus drag-back.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub batch: usize,
    pub k: usize,
    pub initial: Pose,
    pub pushed: Pose,
    /// Push outcome in the initial object frame.
    pub delta: Pose,
    /// Pose after the drag; the next cycle's initial pose.
    pub post: Pose,
    pub push_trajectory: Option<Trajectory>,
    pub drag_trajectory: Option<Trajectory>,
}

impl CycleRecord {
    pub fn observation(&self) -> PushObservation {
        PushObservation {
            theta0: self.initial.theta,
            dx: self.delta.x,
            dy: self.delta.y,
            dtheta: self.delta.theta,
        }
    }
}

/// Drags the object by its ring to `target` and returns the rest pose.
pub fn reposition(
    state: &BodyState,
    ring_offset: Vector2<f64>,
    target: Vector2<f64>,
    drag_speed: f64,
    drag_ramp_time: f64,
    model: &Model,
) -> Result<BodyState> {
    Ok(drag(state, ring_offset, target, drag_speed, drag_ramp_time, model)?
        .final_state()
        .unwrap_or(*state))
}

/// [`reposition`] returning the full trajectory.
pub fn drag(
    state: &BodyState,
    ring_offset: Vector2<f64>,
    target: Vector2<f64>,
    drag_speed: f64,
    drag_ramp_time: f64,
    model: &Model,
) -> Result<Trajectory> {
    model.validate()?;
    let ip = &model.integrator;
    let dt = ip.dt;
    let ring_start = state.pose.transform_point(ring_offset);
    let path = target - ring_start;
    let distance = path.norm();
    let mut traj = Trajectory {
        dt,
        stride: ip.sample_stride,
        samples: vec![TrajectorySample {
            t: 0.0,
            state: *state,
            pusher: ring_start,
            ..TrajectorySample::default()
        }],
    };
    if distance == 0.0 && ip.is_at_rest(&state.twist) {
        return Ok(traj);
    }
    let direction = if distance > 0.0 {
        path / distance
    } else {
        Vector2::new(1.0, 0.0)
    };
    let rod = RodProfile::new(ring_start, direction, distance, drag_speed, drag_ramp_time);
    let move_steps = (rod.duration() / dt).ceil() as usize;
    let cap_steps = move_steps + (ip.settle_cap / dt).ceil() as usize;

    let mut s = *state;
    let mut rest_run = 0usize;
    for k in 0..cap_steps {
        let t = k as f64 * dt;
        let (rod_pos, rod_vel) = rod.position(t);
        let prev = s;
        (s, _) = step_implicit(&prev, &model.body, dt, |trial| {
            let (w, j) = model.friction(trial);
            let (pin, pj) = pin_spring_with_jacobian(trial, ring_offset, rod_pos, rod_vel, &model.pusher);
            (w + pin.wrench, j + pj)
        })?;

        let done = if k + 1 < move_steps {
            false
        } else if ip.is_at_rest(&s.twist) {
            rest_run += 1;
            rest_run >= ip.rest_steps
        } else {
            rest_run = 0;
            false
        };
        if (k + 1) % ip.sample_stride == 0 || done {
            let applied = BodyState {
                pose: prev.pose,
                twist: s.twist,
            };
            let (friction, _) = model.friction(&applied);
            let (pin, _) = pin_spring_with_jacobian(&applied, ring_offset, rod_pos, rod_vel, &model.pusher);
            traj.samples.push(TrajectorySample {
                t: (k + 1) as f64 * dt,
                state: s,
                pusher: rod_pos,
                normal_force: pin.force.norm(),
                friction,
                inertial: Wrench::ZERO,
                ..TrajectorySample::default()
            });
        }
        if done {
            // The rod is pulled out; the object is left at rest.
            if let Some(last) = traj.samples.last_mut() {
                last.state.twist = Default::default();
            }
            return Ok(traj);
        }
    }
    Err(Error::NotConverged {
        phase: "drag",
        cap_s: ip.settle_cap,
        speed: s.twist.linear().norm(),
        spin: s.twist.omega,
    })
}

/// Push from `initial`, then drag back. The record's `post` pose is the
/// start of the next cycle.
pub fn run_cycle(initial: Pose, cfg: &CollectionConfig, model: &Model) -> Result<CycleRecord> {
    let start = BodyState::at_rest(initial);
    let push = simulate_push(&start, &cfg.push, model)?;
    let pushed_state = push.final_state().unwrap_or(start);
    let pushed = pushed_state.pose;
    let pushed_rest = BodyState::at_rest(pushed);
    let drag_traj = drag(
        &pushed_rest,
        cfg.ring_offset,
        cfg.drag_target,
        cfg.drag_speed,
        cfg.drag_ramp_time,
        model,
    )?;
    let post = drag_traj.final_state().map_or(pushed, |s| s.pose);
    Ok(CycleRecord {
        batch: 0,
        k: 0,
        initial,
        pushed,
        delta: to_iof(pushed, initial),
        post,
        push_trajectory: cfg.keep_trajectories.then_some(push),
        drag_trajectory: cfg.keep_trajectories.then_some(drag_traj),
    })
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (batch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs `cycles` consecutive cycles of one batch from `start`.
pub fn run_batch(batch: usize, start: Pose, cfg: &CollectionConfig, model: &Model) -> Result<Vec<CycleRecord>> {
    let mut rng = batch_rng(cfg.seed, batch);
    let pos_noise =
        Normal::new(0.0, cfg.perturbation.position_std).map_err(|e| Error::param("perturbation", e.to_string()))?;
    let ang_noise = Normal::new(0.0, cfg.perturbation.angle_std_deg.to_radians())
        .map_err(|e| Error::param("perturbation", e.to_string()))?;
    let mut pose = start;
    let mut out = Vec::with_capacity(cfg.cycles);
    for k in 0..cfg.cycles {
        let mut rec = run_cycle(pose, cfg, model)?;
        rec.batch = batch;
        rec.k = k;
        if !cfg.perturbation.is_off() {
            rec.post.x += pos_noise.sample(&mut rng);
            rec.post.y += pos_noise.sample(&mut rng);
            rec.post.theta += ang_noise.sample(&mut rng);
        }
        pose = rec.post;
        out.push(rec);
    }
    Ok(out)
}

/// All batches in order, each started from [`CollectionConfig::canonical_start`]
/// at its initial orientation.
pub fn run_batches(cfg: &CollectionConfig, model: &Model) -> Result<Vec<CycleRecord>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.cycles * cfg.batch_starts_deg.len());
    for (b, &deg) in cfg.batch_starts_deg.iter().enumerate() {
        out.extend(run_batch(b, cfg.canonical_start(deg.to_radians()), cfg, model)?);
    }
    Ok(out)
}

/// Samples `f(theta0)` with one cycle per grid angle (degrees) from the
/// canonical start.
pub fn cycle_map_estimate(model: &Model, cfg: &CollectionConfig, grid_deg: &[f64]) -> Result<Vec<MapSample>> {
    cfg.validate_common()?;
    grid_deg
        .iter()
        .map(|&deg| {
            let rec = run_cycle(cfg.canonical_start(deg.to_radians()), cfg, model)?;
            Ok(MapSample {
                theta0_deg: deg,
                next_deg: deg + (rec.post.theta - rec.initial.theta).to_degrees(),
            })
        })
        .collect()
}
