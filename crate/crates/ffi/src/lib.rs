//! C interface to the planar-push simulator.
//!
//! Every fallible function returns a [`PpStatus`]. After a failure,
//! [`pp_last_error`] returns a message describing it; the message belongs to
//! the calling thread and stays valid until that thread's next call into this
//! library. Handles are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use planar_push::analysis::{find_stable_directions, FixedPoint, MapSample};
use planar_push::collection::{cycle_map_estimate, run_cycle, CollectionConfig};
use planar_push::config::RunConfig;
use planar_push::dynamics::Model;
use planar_push::fitting::fit_limit_ellipse;
use planar_push::friction::{max_dissipation_coefficient, point_friction_force, LimitEllipse};
use planar_push::geometry::Pose;
use planar_push::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    NotConverged = 4,
    Numerical = 5,
    InsufficientData = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Limit ellipse parameters; `phi` in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpEllipseParams {
    pub mu_a: f64,
    pub mu_b: f64,
    pub m0: f64,
    pub n0: f64,
    pub phi: f64,
}

/// Planar pose; metres and radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PpPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// One push and drag-back. `delta` is the push outcome in the initial
/// object frame; `post` starts the next cycle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PpCycle {
    pub initial: PpPose,
    pub pushed: PpPose,
    pub delta: PpPose,
    pub post: PpPose,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PpFixedPoint {
    /// In `[0, 360)`.
    pub theta_deg: f64,
    /// Slope of the interpolated map at the fixed point.
    pub slope: f64,
    pub stable: bool,
}

/// Surface friction law.
pub struct PpEllipse(LimitEllipse);

/// Simulation model and collection loop settings built from a configuration.
pub struct PpModel {
    model: Model,
    collection: CollectionConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: PpStatus,
    message: String,
}

impl Failure {
    fn new(status: PpStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

fn status_of(e: &Error) -> PpStatus {
    match e {
        Error::InvalidParameter { .. } | Error::ZeroVelocity | Error::NotDissipative(_) => PpStatus::InvalidArgument,
        Error::Config(_) | Error::Input { .. } | Error::Io(_) | Error::Csv(_) => PpStatus::Config,
        Error::NotConverged { .. } => PpStatus::NotConverged,
        Error::InsufficientData(_) => PpStatus::InsufficientData,
        Error::NonFiniteWrench(_) | Error::RankDeficient(_) | Error::DegenerateFit(_) | Error::IdentityMap => {
            PpStatus::Numerical
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure::new(PpStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("interior nul removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

/// Runs `f`, recording its failure (or panic) as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PpStatus {
    set_last_error(None);
    let failure = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return PpStatus::Ok,
        Ok(Err(failure)) => failure,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Failure::new(PpStatus::Panic, format!("internal panic: {what}"))
        }
    };
    set_last_error(Some(failure.message));
    failure.status
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

fn pose_out(p: Pose) -> PpPose {
    PpPose {
        x: p.x,
        y: p.y,
        theta: p.theta,
    }
}

/// Message of the calling thread's most recent failure, or null.
#[no_mangle]
pub extern "C" fn pp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a limit ellipse; fails unless the origin lies strictly inside.
///
/// # Safety
/// `out` must be null or valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn pp_ellipse_new(params: PpEllipseParams, out: *mut *mut PpEllipse) -> PpStatus {
    guard(|| {
        let e = LimitEllipse::new(params.mu_a, params.mu_b, params.m0, params.n0, params.phi)?;
        write(out, Box::into_raw(Box::new(PpEllipse(e))), "out")
    })
}

/// Creates the plywood limit ellipse.
///
/// # Safety
/// `out` must be null or valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn pp_ellipse_plywood(out: *mut *mut PpEllipse) -> PpStatus {
    guard(|| write(out, Box::into_raw(Box::new(PpEllipse(LimitEllipse::plywood()))), "out"))
}

/// # Safety
/// `ellipse` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_ellipse_free(ellipse: *mut PpEllipse) {
    if !ellipse.is_null() {
        drop(Box::from_raw(ellipse));
    }
}

/// # Safety
/// `ellipse` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_ellipse_params(ellipse: *const PpEllipse, out: *mut PpEllipseParams) -> PpStatus {
    guard(|| {
        let e = &handle(ellipse, "ellipse")?.0;
        write(
            out,
            PpEllipseParams {
                mu_a: e.mu_a(),
                mu_b: e.mu_b(),
                m0: e.m0(),
                n0: e.n0(),
                phi: e.phi(),
            },
            "out",
        )
    })
}

/// Boundary coefficient `(mu_x, mu_y)` maximizing dissipation for sliding
/// velocity `(vx, vy)`, which must be nonzero.
///
/// # Safety
/// `ellipse` must be null or a live handle; the outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_max_dissipation_coefficient(
    ellipse: *const PpEllipse,
    vx: f64,
    vy: f64,
    mu_x: *mut f64,
    mu_y: *mut f64,
) -> PpStatus {
    guard(|| {
        let e = &handle(ellipse, "ellipse")?.0;
        let mu = max_dissipation_coefficient(e, [vx, vy].into())?;
        write(mu_x, mu.mu_x, "mu_x")?;
        write(mu_y, mu.mu_y, "mu_y")
    })
}

/// Friction force (N) on a point sliding at `(vx, vy)` under `normal` N,
/// regularized below `v_eps`.
///
/// # Safety
/// `ellipse` must be null or a live handle; the outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_point_friction_force(
    ellipse: *const PpEllipse,
    vx: f64,
    vy: f64,
    normal: f64,
    v_eps: f64,
    fx: *mut f64,
    fy: *mut f64,
) -> PpStatus {
    guard(|| {
        let e = &handle(ellipse, "ellipse")?.0;
        let f = point_friction_force(e, [vx, vy].into(), normal, v_eps)?;
        write(fx, f.x, "fx")?;
        write(fy, f.y, "fy")
    })
}

/// Fits a limit ellipse to `count` samples stored as interleaved
/// `mu_x, mu_y` pairs.
///
/// # Safety
/// `samples` must point to `2 * count` readable doubles; `out` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pp_fit_limit_ellipse(samples: *const f64, count: usize, out: *mut *mut PpEllipse) -> PpStatus {
    guard(|| {
        let len = count
            .checked_mul(2)
            .ok_or_else(|| Failure::new(PpStatus::InvalidArgument, "sample count overflows"))?;
        let flat = slice(samples, len, "samples")?;
        let pairs: Vec<[f64; 2]> = flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let e = fit_limit_ellipse(&pairs)?;
        write(out, Box::into_raw(Box::new(PpEllipse(e))), "out")
    })
}

/// Builds a model from configuration text in the command-line tool's TOML
/// format, `seed` included.
///
/// # Safety
/// `toml` must be null or a nul-terminated string; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_model_from_toml(toml: *const c_char, out: *mut *mut PpModel) -> PpStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| Failure::new(PpStatus::InvalidArgument, format!("configuration is not UTF-8: {e}")))?;
        let cfg = RunConfig::from_toml_str(text)?;
        let m = PpModel {
            model: cfg.model()?,
            collection: cfg.collection_config()?,
        };
        write(out, Box::into_raw(Box::new(m)), "out")
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_model_free(model: *mut PpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Rest pose with the drag ring on the drag target at orientation `theta`.
///
/// # Safety
/// `model` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_model_canonical_start(model: *const PpModel, theta: f64, out: *mut PpPose) -> PpStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write(out, pose_out(m.collection.canonical_start(theta)), "out")
    })
}

/// Simulates one push and drag-back from `initial`.
///
/// # Safety
/// `model` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_model_run_cycle(model: *const PpModel, initial: PpPose, out: *mut PpCycle) -> PpStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let rec = run_cycle(Pose::new(initial.x, initial.y, initial.theta), &m.collection, &m.model)?;
        write(
            out,
            PpCycle {
                initial: pose_out(rec.initial),
                pushed: pose_out(rec.pushed),
                delta: pose_out(rec.delta),
                post: pose_out(rec.post),
            },
            "out",
        )
    })
}

/// Evaluates the cycle map at `count` initial orientations (degrees),
/// writing the next orientation of each to `next_deg`.
///
/// # Safety
/// `grid_deg` must point to `count` readable and `next_deg` to `count`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pp_model_cycle_map(
    model: *const PpModel,
    grid_deg: *const f64,
    count: usize,
    next_deg: *mut f64,
) -> PpStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let grid = slice(grid_deg, count, "grid_deg")?;
        if count > 0 && next_deg.is_null() {
            return Err(null("next_deg"));
        }
        let map = cycle_map_estimate(&m.model, &m.collection, grid)?;
        for (i, s) in map.iter().enumerate() {
            next_deg.add(i).write(s.next_deg);
        }
        Ok(())
    })
}

/// Fixed points of a sampled cycle map `theta0_deg[i] -> next_deg[i]`.
///
/// The number found is written to `found`. When it exceeds `capacity`, the
/// call fails with `BufferTooSmall` and nothing is written to `out`.
///
/// # Safety
/// `theta0_deg` and `next_deg` must point to `count` readable doubles,
/// `out` to `capacity` writable entries, `found` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_find_stable_directions(
    theta0_deg: *const f64,
    next_deg: *const f64,
    count: usize,
    out: *mut PpFixedPoint,
    capacity: usize,
    found: *mut usize,
) -> PpStatus {
    guard(|| {
        let t = slice(theta0_deg, count, "theta0_deg")?;
        let n = slice(next_deg, count, "next_deg")?;
        let samples: Vec<MapSample> = t
            .iter()
            .zip(n)
            .map(|(&theta0_deg, &next_deg)| MapSample { theta0_deg, next_deg })
            .collect();
        let points: Vec<FixedPoint> = find_stable_directions(&samples)?;
        write(found, points.len(), "found")?;
        if points.len() > capacity {
            return Err(Failure::new(
                PpStatus::BufferTooSmall,
                format!("{} fixed points, capacity {capacity}", points.len()),
            ));
        }
        if !points.is_empty() && out.is_null() {
            return Err(null("out"));
        }
        for (i, p) in points.iter().enumerate() {
            out.add(i).write(PpFixedPoint {
                theta_deg: p.theta_deg,
                slope: p.slope,
                stable: p.is_stable(),
            });
        }
        Ok(())
    })
}
