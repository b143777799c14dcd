use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use planar_push::analysis::stable::interpolated_increment;
use planar_push::analysis::{
    find_stable_directions, fit_fourier, fit_push_law, from_iof, predict_histogram, to_iof, Component, MapSample,
    PushObservation,
};
use planar_push::config::RunConfig;
use planar_push::fitting::{estimate_pusher_mu, fit_limit_ellipse, ForceTraceSample};
use planar_push::friction::{
    ellipse_residual, max_dissipation_coefficient, patch_friction_wrench, point_friction_force, ContactPatch,
    LimitEllipse,
};
use planar_push::geometry::{rotation, Pose, Twist};
use proptest::prelude::*;

fn dissipative_ellipse() -> impl Strategy<Value = LimitEllipse> {
    (0.05..0.6f64, 0.05..0.6f64, 0.0..0.8f64, 0.0..TAU, -PI..PI)
        .prop_map(|(a, b, r, dir, phi)| LimitEllipse::new(a, b, r * a * dir.cos(), r * b * dir.sin(), phi).unwrap())
}

fn velocity() -> impl Strategy<Value = Vector2<f64>> {
    (1e-3..1.0f64, 0.0..TAU).prop_map(|(s, a)| Vector2::new(s * a.cos(), s * a.sin()))
}

/// Largest value of `mu . v` over `n` boundary points.
fn brute_force_support(e: &LimitEllipse, v: Vector2<f64>, n: usize) -> f64 {
    (0..n)
        .map(|i| e.boundary_point(i as f64 * TAU / n as f64).surface().dot(&v))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Residual of `q` against `e`, evaluated through surface coordinates.
fn residual_at(e: &LimitEllipse, q: Vector2<f64>) -> f64 {
    ellipse_residual(e, &planar_push::friction::FrictionCoefficientVector::from_surface(e, q))
}

fn same_ellipse(a: &LimitEllipse, b: &LimitEllipse, tol: f64) -> bool {
    (0..64).all(|i| {
        let q = b.boundary_point(i as f64 * TAU / 64.0).surface();
        (residual_at(a, q) - 1.0).abs() < tol
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn coefficient_lies_on_the_boundary(e in dissipative_ellipse(), v in velocity()) {
        let mu = max_dissipation_coefficient(&e, v).unwrap();
        prop_assert!((ellipse_residual(&e, &mu) - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn coefficient_maximizes_dissipation(e in dissipative_ellipse(), v in velocity()) {
        let mu = max_dissipation_coefficient(&e, v).unwrap();
        prop_assert!(mu.surface().dot(&v) >= brute_force_support(&e, v, 3600) - 1e-9);
    }

    #[test]
    fn friction_dissipates(e in dissipative_ellipse(), v in velocity(), n in 0.01..10.0f64) {
        let f = point_friction_force(&e, v, n, 1e-4).unwrap();
        prop_assert!(-f.dot(&v) > 0.0);
    }

    #[test]
    fn isotropic_reduction(mu in 0.01..1.0f64, phi in -10.0..10.0f64, v in velocity(), n in 0.01..10.0f64) {
        let e = LimitEllipse::new(mu, mu, 0.0, 0.0, phi).unwrap();
        let f = point_friction_force(&e, v, n, 1e-4).unwrap();
        prop_assert!((f + mu * n * v.normalize()).norm() < 1e-12);
    }

    #[test]
    fn friction_rotates_with_the_surface(e in dissipative_ellipse(), v in velocity(), alpha in -PI..PI) {
        let turned = LimitEllipse::new(e.mu_a(), e.mu_b(), e.m0(), e.n0(), e.phi() + alpha).unwrap();
        let r = rotation(alpha);
        let f = point_friction_force(&e, v, 1.0, 1e-4).unwrap();
        let g = point_friction_force(&turned, r * v, 1.0, 1e-4).unwrap();
        prop_assert!((g - r * f).norm() < 1e-12);
    }

    #[test]
    fn isotropic_translation_has_no_torque(
        mu in 0.05..0.8f64,
        v in velocity(),
        x in -1.0..1.0f64,
        y in -1.0..1.0f64,
        theta in -PI..PI,
    ) {
        let patch = ContactPatch::grid(8, 8, 0.09, 0.8 * 9.81).unwrap();
        let e = LimitEllipse::isotropic(mu).unwrap();
        let w = patch_friction_wrench(&patch, &e, Twist::new(v.x, v.y, 0.0), Pose::new(x, y, theta), 1e-4);
        prop_assert!(w.torque.abs() < 1e-12);
        prop_assert!((w.force() + mu * patch.total_load() * v.normalize()).norm() < 1e-9);
    }

    #[test]
    fn ellipse_fit_scales(e in dissipative_ellipse(), s in 0.1..10.0f64) {
        let pts: Vec<[f64; 2]> = (0..24)
            .map(|i| {
                let q = e.boundary_point(i as f64 * TAU / 24.0).surface();
                [q.x, q.y]
            })
            .collect();
        let scaled: Vec<[f64; 2]> = pts.iter().map(|p| [s * p[0], s * p[1]]).collect();
        let a = fit_limit_ellipse(&pts).unwrap();
        let b = fit_limit_ellipse(&scaled).unwrap();
        let expect = LimitEllipse::new(s * a.mu_a(), s * a.mu_b(), s * a.m0(), s * a.n0(), a.phi()).unwrap();
        prop_assert!(same_ellipse(&b, &expect, 1e-9));
        prop_assert!(same_ellipse(&a, &e, 1e-9));
    }

    #[test]
    fn ellipse_fit_rotates(e in dissipative_ellipse(), alpha in -PI..PI) {
        let r = rotation(alpha);
        let pts: Vec<[f64; 2]> = (0..24)
            .map(|i| {
                let q = r * e.boundary_point(i as f64 * TAU / 24.0).surface();
                [q.x, q.y]
            })
            .collect();
        let fitted = fit_limit_ellipse(&pts).unwrap();
        let expect = LimitEllipse::new(e.mu_a(), e.mu_b(), e.m0(), e.n0(), e.phi() + alpha).unwrap();
        prop_assert!(same_ellipse(&fitted, &expect, 1e-9));
    }

    #[test]
    fn pusher_mu_is_scale_invariant(
        mu in 0.01..1.0f64,
        normals in prop::collection::vec(0.1..5.0f64, 5..40),
        c in 0.01..100.0f64,
    ) {
        let trace: Vec<ForceTraceSample> = normals
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let sign = if i % 3 == 0 { -1.0 } else { 1.0 };
                ForceTraceSample { time: i as f64, tangential: sign * mu * n, normal: n, tangential_speed: sign * 0.01 }
            })
            .collect();
        let scaled: Vec<ForceTraceSample> = trace
            .iter()
            .map(|s| ForceTraceSample { tangential: c * s.tangential, normal: c * s.normal, ..*s })
            .collect();
        let a = estimate_pusher_mu(&trace, 1e-3, 0.0).unwrap().mu;
        let b = estimate_pusher_mu(&scaled, 1e-3, 0.0).unwrap().mu;
        prop_assert!((a - mu).abs() < 1e-12);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn iof_round_trip(
        x in -1.0..1.0f64, y in -1.0..1.0f64, t in -20.0..20.0f64,
        x0 in -1.0..1.0f64, y0 in -1.0..1.0f64, t0 in -20.0..20.0f64,
    ) {
        let p = Pose::new(x, y, t);
        let q = Pose::new(x0, y0, t0);
        let back = from_iof(to_iof(p, q), q);
        prop_assert!((back.x - p.x).abs() < 1e-9 && (back.y - p.y).abs() < 1e-9 && (back.theta - p.theta).abs() < 1e-9);
    }

    #[test]
    fn fourier_residual_does_not_grow_with_order(
        t in prop::collection::vec(0.0..TAU, 40..80),
        noise in prop::collection::vec(-1.0..1.0f64, 80),
    ) {
        let y: Vec<f64> = t.iter().zip(&noise).map(|(t, n)| (2.0 * t).sin() + 0.3 * t.cos() + n).collect();
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let (_, r) = fit_fourier(&t, &y, k).unwrap();
            prop_assert!(r <= last + 1e-9);
            last = r;
        }
    }

    #[test]
    fn predicted_histogram_keeps_every_sample(
        obs in prop::collection::vec((0.0..TAU, -0.02..0.02f64, -0.02..0.02f64, -0.5..0.5f64), 30..60),
        queries in prop::collection::vec(0.0..TAU, 1..200),
    ) {
        let obs: Vec<PushObservation> = obs
            .into_iter()
            .map(|(theta0, dx, dy, dtheta)| PushObservation { theta0, dx, dy, dtheta })
            .collect();
        let law = fit_push_law(&obs, 2).unwrap();
        for (c, bound) in [(Component::Dtheta, 1e4), (Component::Dx, 1e4), (Component::Dy, 1e4)] {
            let h = predict_histogram(&law, c, &queries, 1.0, -bound, bound);
            prop_assert_eq!(h.total(), queries.len());
            prop_assert_eq!(h.in_range(), queries.len());
        }
    }

    #[test]
    fn fixed_points_are_roots_of_the_interpolant(
        scale in 2.0..100.0f64,
        centre in 0.0..360.0f64,
        harmonic in 1..4usize,
        bias in -0.9..0.9f64,
    ) {
        // Keeps the map slope at the downward crossings inside (-1, 1).
        let amp = scale / harmonic as f64;
        let samples: Vec<MapSample> = (0..72)
            .map(|i| {
                let th = i as f64 * 5.0;
                let inc = amp * (bias + (harmonic as f64 * (th - centre).to_radians()).sin());
                MapSample { theta0_deg: th, next_deg: th + inc }
            })
            .collect();
        let points = find_stable_directions(&samples).unwrap();
        prop_assert!(!points.is_empty());
        prop_assert!(points.iter().any(|p| p.is_stable()));
        for p in points {
            prop_assert!(interpolated_increment(&samples, p.theta_deg).abs() < 1e-6);
        }
    }

    #[test]
    fn config_round_trips(
        seed in 0..i64::MAX as u64,
        mu in 0.05..0.5f64,
        cycles in 1..1000usize,
        radius in 0.001..0.02f64,
        bins in 0.5..10.0f64,
    ) {
        let mut cfg = RunConfig::with_seed(seed);
        cfg.ellipse.mu_a = mu;
        cfg.collection.cycles = cycles;
        cfg.pusher.radius = radius;
        cfg.analysis.angle_bin_deg = bins;
        let text = cfg.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml_string().unwrap(), text);
    }
}
