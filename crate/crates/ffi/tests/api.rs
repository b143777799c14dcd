use std::ffi::{CStr, CString};
use std::ptr;

use planar_push::friction::LimitEllipse;
use planar_push_ffi::*;

fn last_error() -> String {
    let p = pp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn plywood() -> *mut PpEllipse {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { pp_ellipse_plywood(&mut e) }, PpStatus::Ok);
    e
}

#[test]
fn ellipse_lifecycle_and_parameters() {
    let e = plywood();
    let mut p = PpEllipseParams {
        mu_a: 0.0,
        mu_b: 0.0,
        m0: 0.0,
        n0: 0.0,
        phi: 0.0,
    };
    assert_eq!(unsafe { pp_ellipse_params(e, &mut p) }, PpStatus::Ok);
    let truth = LimitEllipse::plywood();
    assert_eq!(
        (p.mu_a, p.mu_b, p.m0, p.n0, p.phi),
        (truth.mu_a(), truth.mu_b(), truth.m0(), truth.n0(), truth.phi())
    );
    unsafe { pp_ellipse_free(e) };
    unsafe { pp_ellipse_free(ptr::null_mut()) };
}

#[test]
fn non_dissipative_ellipse_is_rejected() {
    let mut e = ptr::null_mut();
    let params = PpEllipseParams {
        mu_a: 0.1,
        mu_b: 0.1,
        m0: 0.5,
        n0: 0.0,
        phi: 0.0,
    };
    assert_eq!(unsafe { pp_ellipse_new(params, &mut e) }, PpStatus::InvalidArgument);
    assert!(e.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn friction_matches_the_library() {
    let e = plywood();
    let truth = LimitEllipse::plywood();
    let (mut mx, mut my) = (0.0, 0.0);
    assert_eq!(
        unsafe { pp_max_dissipation_coefficient(e, 0.01, 0.015, &mut mx, &mut my) },
        PpStatus::Ok
    );
    let mu = planar_push::friction::max_dissipation_coefficient(&truth, [0.01, 0.015].into()).unwrap();
    assert_eq!((mx, my), (mu.mu_x, mu.mu_y));

    let (mut fx, mut fy) = (0.0, 0.0);
    assert_eq!(
        unsafe { pp_point_friction_force(e, 0.01, 0.015, 2.0, 1e-4, &mut fx, &mut fy) },
        PpStatus::Ok
    );
    assert!((fx + 2.0 * mx).abs() < 1e-15 && (fy + 2.0 * my).abs() < 1e-15);

    assert_eq!(
        unsafe { pp_max_dissipation_coefficient(e, 0.0, 0.0, &mut mx, &mut my) },
        PpStatus::InvalidArgument
    );
    assert!(last_error().contains("zero"));
    unsafe { pp_ellipse_free(e) };
}

#[test]
fn null_arguments_are_reported() {
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(
        unsafe { pp_max_dissipation_coefficient(ptr::null(), 1.0, 0.0, &mut a, &mut b) },
        PpStatus::NullPointer
    );
    assert!(last_error().contains("ellipse"));
    assert_eq!(unsafe { pp_ellipse_plywood(ptr::null_mut()) }, PpStatus::NullPointer);
    assert_eq!(
        unsafe { pp_model_from_toml(ptr::null(), ptr::null_mut()) },
        PpStatus::NullPointer
    );
}

#[test]
fn error_is_cleared_by_success() {
    assert_eq!(unsafe { pp_ellipse_plywood(ptr::null_mut()) }, PpStatus::NullPointer);
    assert!(!pp_last_error().is_null());
    let e = plywood();
    assert!(pp_last_error().is_null());
    unsafe { pp_ellipse_free(e) };
}

#[test]
fn fit_recovers_sampled_ellipse() {
    let truth = LimitEllipse::plywood();
    let flat: Vec<f64> = (0..50)
        .flat_map(|i| {
            let mu = truth.boundary_point(i as f64 * std::f64::consts::TAU / 50.0);
            [mu.mu_x, mu.mu_y]
        })
        .collect();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { pp_fit_limit_ellipse(flat.as_ptr(), 50, &mut e) }, PpStatus::Ok);
    let mut p = PpEllipseParams {
        mu_a: 0.0,
        mu_b: 0.0,
        m0: 0.0,
        n0: 0.0,
        phi: 0.0,
    };
    assert_eq!(unsafe { pp_ellipse_params(e, &mut p) }, PpStatus::Ok);
    assert!((p.mu_a - truth.mu_a()).abs() < 1e-9);
    assert!((p.n0 - truth.n0()).abs() < 1e-9);
    unsafe { pp_ellipse_free(e) };

    let mut e = ptr::null_mut();
    assert_eq!(
        unsafe { pp_fit_limit_ellipse(flat.as_ptr(), 3, &mut e) },
        PpStatus::InsufficientData
    );
}

fn model(text: &str) -> *mut PpModel {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    let status = unsafe { pp_model_from_toml(c.as_ptr(), &mut m) };
    assert_eq!(status, PpStatus::Ok, "{}", last_error());
    m
}

#[test]
fn model_configuration_errors() {
    for bad in ["", "seed = 1\nbogus = 2", "seed = 1\n[pusher]\nstiffness = -1.0"] {
        let c = CString::new(bad).unwrap();
        let mut m = ptr::null_mut();
        let status = unsafe { pp_model_from_toml(c.as_ptr(), &mut m) };
        assert!(
            matches!(status, PpStatus::Config | PpStatus::InvalidArgument),
            "{bad}: {status:?}"
        );
        assert!(m.is_null());
    }
}

#[test]
fn cycle_matches_the_library() {
    let m = model("seed = 1");
    let mut start = PpPose::default();
    assert_eq!(unsafe { pp_model_canonical_start(m, 0.5, &mut start) }, PpStatus::Ok);
    let mut cycle = PpCycle::default();
    assert_eq!(unsafe { pp_model_run_cycle(m, start, &mut cycle) }, PpStatus::Ok);

    let cfg = planar_push::config::RunConfig::with_seed(1);
    let cc = cfg.collection_config().unwrap();
    let rec = planar_push::collection::run_cycle(cc.canonical_start(0.5), &cc, &cfg.model().unwrap()).unwrap();
    assert_eq!(cycle.post.theta, rec.post.theta);
    assert_eq!(cycle.delta.x, rec.delta.x);
    assert_eq!(cycle.initial.theta, 0.5);
    unsafe { pp_model_free(m) };
}

#[test]
fn isotropic_map_has_no_fixed_points() {
    let m = model("seed = 1\n[ellipse]\nmu_a = 0.2443\nmu_b = 0.2443\nm0 = 0.0\nn0 = 0.0\nphi_rad = 0.0");
    let grid: Vec<f64> = (0..12).map(|i| i as f64 * 30.0).collect();
    let mut next = vec![0.0; grid.len()];
    assert_eq!(
        unsafe { pp_model_cycle_map(m, grid.as_ptr(), grid.len(), next.as_mut_ptr()) },
        PpStatus::Ok
    );
    let inc: Vec<f64> = grid.iter().zip(&next).map(|(g, n)| n - g).collect();
    assert!(inc.iter().all(|d| (d - inc[0]).abs() < 1e-3));

    let mut found = usize::MAX;
    let status =
        unsafe { pp_find_stable_directions(grid.as_ptr(), next.as_ptr(), grid.len(), ptr::null_mut(), 0, &mut found) };
    assert_eq!(status, PpStatus::Ok);
    assert_eq!(found, 0);
    unsafe { pp_model_free(m) };
}

#[test]
fn fixed_points_respect_capacity() {
    let theta: Vec<f64> = (0..72).map(|i| i as f64 * 5.0).collect();
    let next: Vec<f64> = theta.iter().map(|t| t + 10.0 * t.to_radians().sin()).collect();
    let mut found = 0;
    let mut small = [PpFixedPoint::default(); 1];
    let status =
        unsafe { pp_find_stable_directions(theta.as_ptr(), next.as_ptr(), 72, small.as_mut_ptr(), 1, &mut found) };
    assert_eq!(status, PpStatus::BufferTooSmall);
    assert_eq!(found, 2);
    assert_eq!(small[0], PpFixedPoint::default());

    let mut out = [PpFixedPoint::default(); 4];
    let status =
        unsafe { pp_find_stable_directions(theta.as_ptr(), next.as_ptr(), 72, out.as_mut_ptr(), 4, &mut found) };
    assert_eq!(status, PpStatus::Ok);
    let pts = &out[..found];
    let stable = pts.iter().find(|p| p.stable).unwrap();
    let unstable = pts.iter().find(|p| !p.stable).unwrap();
    assert!((stable.theta_deg - 180.0).abs() < 1e-6);
    assert!(unstable.theta_deg.abs() < 1e-6 || (unstable.theta_deg - 360.0).abs() < 1e-6);

    let same = theta.clone();
    let status =
        unsafe { pp_find_stable_directions(theta.as_ptr(), same.as_ptr(), 72, out.as_mut_ptr(), 4, &mut found) };
    assert_eq!(status, PpStatus::Numerical);
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(pp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
