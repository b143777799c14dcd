//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use nalgebra::{Rotation2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use planar_push::analysis::{
    circular_distance, find_stable_directions, from_iof, histogram, rmse_table, stddev_table, to_iof,
    trajectory_to_iof, unwrap_degrees, wrap_360, FourierSeries, MapSample, PushLaw, PushObservation,
};
use planar_push::collection::{cycle_map_estimate, run_batches, CollectionConfig, CycleRecord};
use planar_push::config::{AnalysisOptions, RunConfig};
use planar_push::dynamics::{simulate_push, BodyState, Model};
use planar_push::fitting::{estimate_pusher_mu, fit_limit_ellipse, trace_from_trajectory};
use planar_push::friction::{
    ellipse_residual, max_dissipation_coefficient, point_friction_force, LimitEllipse, DEFAULT_FRICTION_V_EPS,
};
use planar_push::geometry::Pose;
use planar_push::io::{write_records, RecordRow};
use planar_push::pipeline::analyze_records;

const PLYWOOD: (f64, f64, f64, f64, f64) = (0.2545, 0.2346, 0.0325, 0.0082, 2.6175);
const ISOTROPIC_MU: f64 = 0.2443;
const BIN_DEG: f64 = 4.0;
const BURN_IN: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Surface-frame boundary point of an offset rotated ellipse, computed here
/// from the ellipse definition rather than through the library.
fn boundary(a: f64, b: f64, m0: f64, n0: f64, phi: f64, t: f64) -> Vector2<f64> {
    Rotation2::new(phi) * Vector2::new(m0 + a * t.cos(), n0 + b * t.sin())
}

fn c1_max_dissipation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = 100_000;
    let (mut worst_rel, mut worst_res) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let a = rng.random_range(0.05..0.6);
        let b = rng.random_range(0.05..0.6);
        let phi = rng.random_range(0.0..TAU);
        let (s, t) = (rng.random_range(0.0..0.9), rng.random_range(0.0..TAU));
        let (m0, n0) = (s * a * t.cos(), s * b * t.sin());
        let e = LimitEllipse::new(a, b, m0, n0, phi).unwrap();
        let ang = rng.random_range(0.0..TAU);
        let v = Vector2::new(ang.cos(), ang.sin()) * 10f64.powf(rng.random_range(-3.0..0.0));
        let mu = max_dissipation_coefficient(&e, v).unwrap();
        let closed = Vector2::new(mu.mu_x, mu.mu_y).dot(&v);
        let best = (0..samples)
            .map(|i| boundary(a, b, m0, n0, phi, i as f64 / samples as f64 * TAU).dot(&v))
            .fold(f64::NEG_INFINITY, f64::max);
        worst_rel = worst_rel.max((closed - best).abs() / best.abs());
        worst_res = worst_res.max((ellipse_residual(&e, &mu) - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_rel <= 1e-3 && worst_res <= 1e-9 && secs < 30.0,
        format!("max rel gap {worst_rel:.2e}, max boundary residual {worst_res:.2e}, {secs:.1} s"),
    )
}

fn c2_isotropic_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mu = rng.random_range(0.01..1.0);
        let phi = rng.random_range(0.0..TAU);
        let e = LimitEllipse::new(mu, mu, 0.0, 0.0, phi).unwrap();
        let n = rng.random_range(0.0..10.0);
        let ang = rng.random_range(0.0..TAU);
        let v = Vector2::new(ang.cos(), ang.sin()) * rng.random_range(1e-3..1.0);
        let f = point_friction_force(&e, v, n, DEFAULT_FRICTION_V_EPS).unwrap();
        let expected = -mu * n * v / v.norm();
        worst = worst.max((f - expected).amax());
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e} N"))
}

fn c3_rotation_invariance() -> Outcome {
    let start = Instant::now();
    let model = Model::with_ellipse(LimitEllipse::isotropic(ISOTROPIC_MU).unwrap());
    let cfg = RunConfig::with_seed(3).collection_config().unwrap();
    let runs: Vec<Vec<Pose>> = [0.0f64, 60.0, 120.0, 240.0]
        .iter()
        .map(|deg| {
            let initial = cfg.canonical_start(deg.to_radians());
            let traj = simulate_push(&BodyState::at_rest(initial), &cfg.push, &model).unwrap();
            trajectory_to_iof(traj.poses(), initial)
        })
        .collect();
    let (mut dpos, mut dang) = (0.0f64, 0.0f64);
    let reference = &runs[0];
    for run in &runs[1..] {
        let pairs = reference
            .iter()
            .zip(run)
            .chain([(reference.last().unwrap(), run.last().unwrap())]);
        for (p, q) in pairs {
            dpos = dpos.max((p.x - q.x).abs()).max((p.y - q.y).abs());
            dang = dang.max((p.theta - q.theta).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let lengths: Vec<usize> = runs.iter().map(Vec::len).collect();
    outcome(
        dpos <= 1e-6 && dang <= 1e-6 && secs < 60.0,
        format!("max deviation {dpos:.2e} m, {dang:.2e} rad over {lengths:?} samples, {secs:.1} s"),
    )
}

fn theta0_series(records: &[CycleRecord], batch: usize) -> Vec<f64> {
    let mut s: Vec<f64> = records
        .iter()
        .filter(|r| r.batch == batch)
        .map(|r| r.initial.theta.to_degrees())
        .collect();
    if let Some(last) = records.iter().rfind(|r| r.batch == batch) {
        s.push(last.post.theta.to_degrees());
    }
    s
}

fn burned_histogram(records: &[CycleRecord]) -> planar_push::analysis::Histogram {
    let vals: Vec<f64> = records
        .iter()
        .filter(|r| r.k >= BURN_IN)
        .map(|r| wrap_360(r.initial.theta.to_degrees()))
        .collect();
    histogram(&vals, BIN_DEG, 0.0, 360.0)
}

fn c4_convergence(records: &[CycleRecord], batches: usize, map: &[MapSample], secs: f64) -> Outcome {
    let mut worst_step = 0.0f64;
    let mut finals = Vec::new();
    for b in 0..batches {
        let s = theta0_series(records, b);
        for k in BURN_IN..s.len() - 1 {
            worst_step = worst_step.max((s[k + 1] - s[k]).abs());
        }
        finals.push(wrap_360(*s.last().unwrap()));
    }
    let spread = finals
        .iter()
        .flat_map(|a| finals.iter().map(move |b| circular_distance(*a, *b)))
        .fold(0.0, f64::max);
    let stable: Vec<f64> = find_stable_directions(map)
        .unwrap()
        .iter()
        .filter(|p| p.is_stable())
        .map(|p| p.theta_deg)
        .collect();
    let to_fixed = finals
        .iter()
        .map(|f| {
            stable
                .iter()
                .map(|s| circular_distance(*f, *s))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    outcome(
        worst_step < 2.0 && spread <= BIN_DEG && to_fixed <= BIN_DEG && secs < 600.0,
        format!(
            "max step after k=50 {worst_step:.4} deg, final spread {spread:.4} deg, \
             distance to stable map point {to_fixed:.3} deg, finals {:?}, {secs:.0} s",
            finals.iter().map(|f| (f * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn c5_bias_contrast(aniso: &[CycleRecord], iso: &[CycleRecord]) -> Outcome {
    let ha = burned_histogram(aniso);
    let hi = burned_histogram(iso);
    let top_a = ha.top_fraction();
    let occupied = hi.counts.iter().filter(|&&c| c > 0).count().max(1);
    let mean_occupied = hi.in_range() as f64 / occupied as f64;
    let mean_all = hi.in_range() as f64 / hi.counts.len() as f64;
    let top_i = *hi.counts.iter().max().unwrap() as f64;
    outcome(
        top_a > 0.25 && top_i < 3.0 * mean_occupied && top_i < 3.0 * mean_all,
        format!(
            "anisotropic top bin {:.1}%; isotropic top bin {top_i} vs mean {mean_occupied:.2} (occupied) / {mean_all:.2} (all bins)",
            100.0 * top_a
        ),
    )
}

fn c6_map_histogram(aniso: &[CycleRecord], map: &[MapSample]) -> Outcome {
    let h = burned_histogram(aniso);
    let peaks: Vec<f64> = h.circular_peaks(0.05).into_iter().map(|i| h.bin_center(i)).collect();
    let stable: Vec<f64> = find_stable_directions(map)
        .unwrap()
        .iter()
        .filter(|p| p.is_stable())
        .map(|p| p.theta_deg)
        .collect();
    let worst = stable
        .iter()
        .map(|s| {
            peaks
                .iter()
                .map(|p| circular_distance(*s, *p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    outcome(
        !stable.is_empty() && worst <= BIN_DEG,
        format!("stable {stable:.2?} deg, histogram peaks {peaks:?} deg, worst distance {worst:.2} deg"),
    )
}

fn rows(records: &[CycleRecord]) -> Vec<RecordRow> {
    records.iter().map(RecordRow::from).collect()
}

fn c7_c8_recreation(aniso: &[CycleRecord]) -> (Outcome, Outcome) {
    let report = analyze_records(&rows(aniso), &AnalysisOptions::default()).unwrap();
    let tv = report.recreation_tv;
    let ratio = report.rmse.dtheta.value / report.stddev.dtheta.value;
    (
        outcome(tv < 0.15, format!("total variation {tv:.4}")),
        outcome(
            ratio <= 0.6,
            format!(
                "RMSE {:.4} deg / sigma {:.4} deg = {ratio:.4}",
                report.rmse.dtheta.value.to_degrees(),
                report.stddev.dtheta.value.to_degrees()
            ),
        ),
    )
}

fn phi_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn c9_ellipse_fit() -> Outcome {
    let (a, b, m0, n0, phi) = PLYWOOD;
    let clean: Vec<[f64; 2]> = (0..100)
        .map(|i| boundary(a, b, m0, n0, phi, i as f64 / 100.0 * TAU).into())
        .collect();
    let f = fit_limit_ellipse(&clean).unwrap();
    let exact_err = [
        (f.mu_a() - a).abs(),
        (f.mu_b() - b).abs(),
        (f.m0() - m0).abs(),
        (f.n0() - n0).abs(),
        (f.phi() - phi.rem_euclid(PI)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = Normal::new(0.0, 0.005).unwrap();
    let noisy: Vec<[f64; 2]> = (0..500)
        .map(|i| {
            let p = boundary(a, b, m0, n0, phi, i as f64 / 500.0 * TAU);
            [p.x + noise.sample(&mut rng), p.y + noise.sample(&mut rng)]
        })
        .collect();
    let g = fit_limit_ellipse(&noisy).unwrap();
    let axes = ((g.mu_a() / a - 1.0).abs()).max((g.mu_b() / b - 1.0).abs());
    let offsets = (g.m0() - m0).abs().max((g.n0() - n0).abs());
    let angle = phi_gap(g.phi(), phi);
    outcome(
        exact_err <= 1e-6 && axes <= 0.02 && offsets <= 0.01 && angle <= 0.02,
        format!(
            "noiseless max error {exact_err:.2e}; noisy semi-axes {:.2}%, offsets {offsets:.4}, phi {angle:.4} rad",
            100.0 * axes
        ),
    )
}

fn c10_pusher_mu() -> Outcome {
    let model = Model::with_ellipse(LimitEllipse::plywood());
    let cfg = RunConfig::with_seed(10).collection_config().unwrap();
    let mut trace = Vec::new();
    for deg in [0.0f64, 90.0, 200.0] {
        let start = BodyState::at_rest(cfg.canonical_start(deg.to_radians()));
        trace.extend(trace_from_trajectory(
            &simulate_push(&start, &cfg.push, &model).unwrap(),
        ));
    }
    let est = estimate_pusher_mu(&trace, 1e-3, 0.05).unwrap();
    let bound = trace.iter().map(|s| s.ratio().abs()).fold(0.0, f64::max);
    outcome(
        (est.mu - model.pusher.mu).abs() <= 0.005 && bound <= model.pusher.mu + 1e-9,
        format!(
            "estimate {:.6} from {} sliding samples, max |Ftau/Fn| {bound:.12}",
            est.mu, est.sliding_samples
        ),
    )
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(
        &cfg_path,
        "seed = 11\n[collection]\ncycles = 4\nbatch_starts_deg = [0.0, 200.0]\n\
         [collection.perturbation]\nposition_std = 0.001\nangle_std_deg = 2.0\n",
    )
    .unwrap();
    let mut bytes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_planar-push"))
            .args(["simulate", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        bytes.push(std::fs::read(out.join("records.csv")).unwrap());
    }
    let lib_path = dir.path().join("lib.csv");
    let cfg = RunConfig::load(&[&cfg_path]).unwrap();
    let recs = run_batches(&cfg.collection_config().unwrap(), &cfg.model().unwrap()).unwrap();
    write_records(&lib_path, &recs).unwrap();
    let lib = std::fs::read(lib_path).unwrap();
    outcome(
        bytes[0] == bytes[1] && bytes[0] == lib && !lib.is_empty(),
        format!("two CLI runs and one library run, {} bytes each", lib.len()),
    )
}

fn c12_analysis_suites() -> Outcome {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let mut check = |name: &'static str, ok: bool| checks.push((name, ok));

    check(
        "unwrap branch cut",
        unwrap_degrees(&[170.0, -170.0]) == vec![170.0, 190.0],
    );
    check("unwrap constant", unwrap_degrees(&[42.0; 5]) == vec![42.0; 5]);
    let ramp: Vec<f64> = (0..=108).map(|i| i as f64 * 10.0).collect();
    let wrapped: Vec<f64> = ramp.iter().map(|&d| wrap_360(d)).collect();
    check("unwrap ramp", unwrap_degrees(&wrapped) == ramp);

    let p = Pose::new(0.3, -0.7, 2.1);
    check("iof identity", to_iof(p, Pose::default()) == p);
    let d = to_iof(Pose::new(1.0, 3.0, PI / 2.0), Pose::new(1.0, 2.0, PI / 2.0));
    check(
        "iof 90 deg",
        (d.x - 1.0).abs() < 1e-15 && d.y.abs() < 1e-15 && d.theta == 0.0,
    );
    let init = Pose::new(-0.4, 0.25, -1.3);
    let back = from_iof(to_iof(p, init), init);
    check(
        "iof round trip",
        (back.x - p.x).abs() < 1e-12 && (back.y - p.y).abs() < 1e-12 && (back.theta - p.theta).abs() < 1e-12,
    );

    check(
        "histogram small",
        histogram(&[0.0, 0.0, 1.0], 1.0, 0.0, 2.0).counts == vec![2, 1],
    );
    let empty = histogram(&[], 1.0, 0.0, 2.0);
    check("histogram empty", empty.counts == vec![0, 0] && empty.overflow == 0);
    let grid: Vec<f64> = (0..360).map(f64::from).collect();
    check(
        "histogram grid",
        histogram(&grid, 4.0, 0.0, 360.0).counts.iter().all(|&c| c == 4),
    );

    let obs = |dtheta: f64| PushObservation {
        theta0: 0.0,
        dx: dtheta,
        dy: dtheta,
        dtheta,
    };
    let sd = stddev_table(&[obs(0.0), obs(2.0)]).unwrap();
    check(
        "sigma two records",
        sd.dtheta.value == 1.0 && sd.dtheta.mean == 1.0 && sd.dtheta.percent == Some(100.0),
    );
    let same = stddev_table(&[obs(3.0), obs(3.0)]).unwrap();
    check("sigma identical", same.dx.value == 0.0 && same.dx.percent == Some(0.0));

    let recs: Vec<PushObservation> = [0.5, 1.5, 4.0, -2.0]
        .iter()
        .enumerate()
        .map(|(i, &v)| PushObservation {
            theta0: i as f64,
            dx: v,
            dy: 2.0 * v,
            dtheta: v / 3.0,
        })
        .collect();
    let sd = stddev_table(&recs).unwrap();
    let mean_law = PushLaw {
        order: 0,
        dx: FourierSeries::constant(sd.dx.mean),
        dy: FourierSeries::constant(sd.dy.mean),
        dtheta: FourierSeries::constant(sd.dtheta.mean),
        residual_rmse: [0.0; 3],
    };
    let rm = rmse_table(&recs, &mean_law).unwrap();
    check(
        "rmse of mean law equals sigma",
        (rm.dx.value - sd.dx.value).abs() < 1e-15
            && (rm.dy.value - sd.dy.value).abs() < 1e-15
            && (rm.dtheta.value - sd.dtheta.value).abs() < 1e-15,
    );

    let map: Vec<MapSample> = (0..360)
        .map(|d| {
            let t = f64::from(d).to_radians();
            MapSample {
                theta0_deg: f64::from(d),
                next_deg: (t - 0.5 * t.sin()).to_degrees(),
            }
        })
        .collect();
    let fps = find_stable_directions(&map).unwrap();
    let at = |target: f64| {
        fps.iter()
            .find(|p| circular_distance(p.theta_deg, target) < 1e-6)
            .copied()
    };
    check(
        "fixed points of theta - sin/2",
        fps.len() == 2 && at(0.0).is_some_and(|p| p.is_stable()) && at(180.0).is_some_and(|p| !p.is_stable()),
    );

    let failures: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} example checks exact", checks.len())
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "max-dissipation oracle", c1_max_dissipation()));
    results.push((2, "isotropic reduction", c2_isotropic_reduction()));
    results.push((3, "isotropic rotation invariance", c3_rotation_invariance()));

    let base = RunConfig::with_seed(2024);
    let cfg: CollectionConfig = base.collection_config().unwrap();
    let aniso_model = base.model().unwrap();
    let iso_model = Model::with_ellipse(LimitEllipse::isotropic(ISOTROPIC_MU).unwrap());

    let t = Instant::now();
    let aniso = run_batches(&cfg, &aniso_model).unwrap();
    let aniso_secs = t.elapsed().as_secs_f64();
    let iso = run_batches(&cfg, &iso_model).unwrap();
    let grid: Vec<f64> = (0..72).map(|i| i as f64 * 5.0).collect();
    let map = cycle_map_estimate(&aniso_model, &cfg, &grid).unwrap();

    results.push((
        4,
        "convergence to a stable direction",
        c4_convergence(&aniso, cfg.batch_starts_deg.len(), &map, aniso_secs),
    ));
    results.push((5, "bias contrast", c5_bias_contrast(&aniso, &iso)));
    results.push((6, "map / histogram correspondence", c6_map_histogram(&aniso, &map)));
    let (c7, c8) = c7_c8_recreation(&aniso);
    results.push((7, "histogram recreation", c7));
    results.push((8, "variance explanation", c8));
    results.push((9, "ellipse fit recovery", c9_ellipse_fit()));
    results.push((10, "pusher mu identification", c10_pusher_mu()));
    results.push((11, "determinism", c11_determinism()));
    results.push((12, "analysis suites", c12_analysis_suites()));

    let mut failed = 0;
    for (n, name, o) in &results {
        println!(
            "criterion {n:>2} {name}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
