//! The `planar-push` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::FixedPoint;
use crate::collection::{cycle_map_estimate, run_batches};
use crate::config::{grid_points, EllipseSection, RunConfig};
use crate::error::{Error, Result};
use crate::fitting::{estimate_pusher_mu, fit_limit_ellipse, DEFAULT_NORMAL_FLOOR, DEFAULT_SLIDE_SPEED_THRESHOLD};
use crate::io::{self, Manifest};
use crate::pipeline::{analyze_records, AnalysisReport};

#[derive(Debug, Parser)]
#[command(name = "planar-push", version, about = "Planar pushing with anisotropic friction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the push / drag-back collection loop and write cycle records.
    Simulate(RunArgs),
    /// Histograms, push law, error tables and stable directions of records.
    Analyze(AnalyzeArgs),
    /// Identify model parameters from measurements.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Sample the cycle map on a grid of initial orientations.
    CycleMap(CycleMapArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Configuration file; repeat to layer several, later ones win.
    #[arg(long = "config", value_name = "PATH", required = true)]
    pub config: Vec<PathBuf>,
    /// Output directory, overriding the configuration.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed, overriding the configuration.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Cycle-record CSV.
    pub records: PathBuf,
    /// Configuration supplying the `[analysis]` options.
    #[arg(long = "config", value_name = "PATH")]
    pub config: Vec<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = "analysis")]
    pub out: PathBuf,
    /// Orientation histogram bin width, degrees.
    #[arg(long, value_name = "W")]
    pub bins: Option<f64>,
    /// Cycles per batch left out of the orientation histogram.
    #[arg(long, value_name = "N")]
    pub burn_in: Option<usize>,
    /// Fourier order of the push law.
    #[arg(long, value_name = "K")]
    pub order: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum FitCommand {
    /// Fit a limit ellipse to `mu_x, mu_y` samples.
    Ellipse(FitArgs),
    /// Estimate the rod friction coefficient from a `t, Ftau, Fn, vt` trace.
    PusherMu(PusherMuArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub input: PathBuf,
    /// Directory for the configuration fragment; printed when omitted.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PusherMuArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Relative tangential speed above which a sample is sliding, m/s.
    #[arg(long, default_value_t = DEFAULT_SLIDE_SPEED_THRESHOLD)]
    pub slide_threshold: f64,
    /// Samples with a smaller normal force are discarded, N.
    #[arg(long, default_value_t = DEFAULT_NORMAL_FLOOR)]
    pub normal_floor: f64,
}

#[derive(Debug, Args)]
pub struct CycleMapArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Grid `START:STOP:STEP` in degrees, STOP exclusive.
    #[arg(long, value_name = "START:STOP:STEP")]
    pub grid: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 usage or configuration error, 2 runtime
/// or numerical failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Fit(FitCommand::Ellipse(a)) => cmd_fit_ellipse(a),
        Command::Fit(FitCommand::PusherMu(a)) => cmd_fit_pusher_mu(a),
        Command::CycleMap(a) => cmd_cycle_map(a),
    }
}

fn load_run_config(a: &RunArgs) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &a.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    let out = cfg.output_dir.clone();
    Ok((cfg, out))
}

fn manifest_for(command: &str, cfg: &RunConfig, inputs: &[PathBuf]) -> Result<Manifest> {
    let mut m = Manifest::new(command);
    m.seed = Some(cfg.seed);
    m.config = Some(serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?);
    m.inputs = inputs.iter().map(|p| p.display().to_string()).collect();
    Ok(m)
}

pub fn cmd_simulate(a: &RunArgs) -> Result<()> {
    let (cfg, out) = load_run_config(a)?;
    let model = cfg.model()?;
    let cc = cfg.collection_config()?;
    let records = run_batches(&cc, &model)?;

    let mut manifest = manifest_for("simulate", &cfg, &a.config)?;
    std::fs::create_dir_all(&out)?;
    io::write_records(&out.join("records.csv"), &records)?;
    manifest.outputs.push("records.csv".into());
    if cc.keep_trajectories {
        for r in &records {
            for (phase, traj) in [("push", &r.push_trajectory), ("drag", &r.drag_trajectory)] {
                if let Some(t) = traj {
                    let name = format!("trajectories/{phase}_b{}_k{:04}.csv", r.batch, r.k);
                    io::write_trajectory(&out.join(&name), t)?;
                    manifest.outputs.push(name);
                }
            }
        }
    }
    manifest.write(&out.join("manifest.json"))?;
    println!(
        "{} cycles in {} batches -> {}",
        records.len(),
        cc.batch_starts_deg.len(),
        out.join("records.csv").display()
    );
    Ok(())
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let mut opts = if a.config.is_empty() {
        Default::default()
    } else {
        RunConfig::load(&a.config)?.analysis
    };
    if let Some(w) = a.bins {
        opts.angle_bin_deg = w;
    }
    if let Some(b) = a.burn_in {
        opts.burn_in = b;
    }
    if let Some(k) = a.order {
        opts.fourier_order = k;
    }
    opts.validate()?;
    let rows = io::read_records(&a.records)?;
    let report = analyze_records(&rows, &opts)?;

    let out = &a.out;
    std::fs::create_dir_all(out)?;
    let mut manifest = Manifest::new("analyze");
    manifest.config = Some(serde_json::to_value(&opts).map_err(|e| Error::Config(e.to_string()))?);
    manifest.inputs.push(a.records.display().to_string());
    write_analysis(out, &report, &mut manifest.outputs)?;
    manifest.write(&out.join("manifest.json"))?;
    print_report(&report);
    Ok(())
}

fn write_analysis(out: &Path, r: &AnalysisReport, written: &mut Vec<String>) -> Result<()> {
    let mut emit = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        f(&out.join(name))?;
        written.push(name.to_string());
        Ok(())
    };
    emit("theta0_histogram.csv", &|p| io::write_histogram(p, &r.theta0_histogram))?;
    emit("dtheta_histogram.csv", &|p| io::write_histogram(p, &r.dtheta_histogram))?;
    emit("predicted_dtheta_histogram.csv", &|p| {
        io::write_histogram(p, &r.predicted_dtheta_histogram)
    })?;
    emit("theta0_unwrapped.csv", &|p| {
        io::write_numeric_csv(
            p,
            &["batch", "k", "theta0_deg_unwrapped"],
            r.unwrapped_theta0.iter().map(|&(b, k, t)| vec![b as f64, k as f64, t]),
        )
    })?;
    emit("push_law.csv", &|p| io::write_push_law(p, &r.law))?;
    emit("error_tables.csv", &|p| {
        io::write_error_tables(p, &[("stddev", &r.stddev), ("rmse", &r.rmse)])
    })?;
    emit("fitted_map.csv", &|p| io::write_map(p, &r.map))?;
    emit("stable_directions.csv", &|p| io::write_fixed_points(p, &r.fixed_points))?;
    Ok(())
}

fn print_report(r: &AnalysisReport) {
    println!("push law order {}", r.order);
    for (label, t) in [("std dev", &r.stddev), ("RMSE", &r.rmse)] {
        for (name, e, factor, unit) in t.rows() {
            let pct = e.percent.map_or("undefined".to_string(), |p| format!("{p:.1}%"));
            println!(
                "{label:>8} {name:<7} {:>10.4} {unit:<3} (mean {:.4} {unit}, {pct})",
                e.value * factor,
                e.mean * factor
            );
        }
    }
    println!("dtheta recreation total variation {:.4}", r.recreation_tv);
    println!(
        "theta0 histogram top bin {:.1}% of {} cycles",
        100.0 * r.theta0_histogram.top_fraction(),
        r.theta0_histogram.total()
    );
    print_fixed_points(&r.fixed_points, r.map_note.as_deref());
}

fn print_fixed_points(points: &[FixedPoint], note: Option<&str>) {
    if let Some(n) = note {
        println!("stable directions: none ({n})");
        return;
    }
    let stable: Vec<&FixedPoint> = points.iter().filter(|p| p.is_stable()).collect();
    if stable.is_empty() {
        println!("stable directions: none");
    }
    for p in points {
        println!(
            "{} fixed point at {:.2} deg (slope {:.3})",
            if p.is_stable() { "stable" } else { "unstable" },
            p.theta_deg,
            p.slope
        );
    }
}

#[derive(Serialize)]
struct EllipseFragment {
    ellipse: EllipseSection,
}

#[derive(Serialize)]
struct PusherFragment {
    pusher: PusherMu,
}

#[derive(Serialize)]
struct PusherMu {
    mu: f64,
}

fn emit_fragment(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_fit_ellipse(a: &FitArgs) -> Result<()> {
    let samples = io::read_mu_samples(&a.input)?;
    let ellipse = match fit_limit_ellipse(&samples) {
        Ok(e) => e,
        Err(Error::NotDissipative(e)) => {
            eprintln!(
                "fitted ellipse: mu_a {} mu_b {} m0 {} n0 {} phi {} deg",
                e.mu_a(),
                e.mu_b(),
                e.m0(),
                e.n0(),
                e.phi().to_degrees()
            );
            return Err(Error::NotDissipative(e));
        }
        Err(e) => return Err(e),
    };
    let text = toml::to_string(&EllipseFragment {
        ellipse: EllipseSection::from_ellipse_deg(&ellipse),
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    emit_fragment(a.out.as_deref(), "ellipse.toml", &text)
}

pub fn cmd_fit_pusher_mu(a: &PusherMuArgs) -> Result<()> {
    let trace = io::read_force_trace(&a.fit.input)?;
    let est = estimate_pusher_mu(&trace, a.slide_threshold, a.normal_floor)?;
    eprintln!(
        "mu_p {} from {} sliding samples; stick fraction {}",
        est.mu,
        est.sliding_samples,
        est.stick_fraction
            .map_or("n/a (no sticking samples)".to_string(), |f| format!("{f}"))
    );
    let text = toml::to_string(&PusherFragment {
        pusher: PusherMu { mu: est.mu },
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    emit_fragment(a.fit.out.as_deref(), "pusher.toml", &text)
}

/// Parses `START:STOP:STEP`.
pub fn parse_grid(spec: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::param("--grid", format!("expected START:STOP:STEP, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| bad())?;
    }
    grid_points(v)?;
    Ok(v)
}

pub fn cmd_cycle_map(a: &CycleMapArgs) -> Result<()> {
    let (mut cfg, out) = load_run_config(&a.run)?;
    if let Some(g) = &a.grid {
        cfg.analysis.map_grid_deg = parse_grid(g)?;
    }
    let grid = grid_points(cfg.analysis.map_grid_deg)?;
    let model = cfg.model()?;
    let cc = cfg.collection_config()?;
    let samples = cycle_map_estimate(&model, &cc, &grid)?;
    let (points, note) = match crate::analysis::find_stable_directions(&samples) {
        Ok(p) => (p, None),
        Err(e @ Error::IdentityMap) => (Vec::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let mut manifest = manifest_for("cycle-map", &cfg, &a.run.config)?;
    std::fs::create_dir_all(&out)?;
    io::write_map(&out.join("cycle_map.csv"), &samples)?;
    io::write_fixed_points(&out.join("stable_directions.csv"), &points)?;
    manifest.outputs = vec!["cycle_map.csv".into(), "stable_directions.csv".into()];
    manifest.write(&out.join("manifest.json"))?;
    println!(
        "{} map samples -> {}",
        samples.len(),
        out.join("cycle_map.csv").display()
    );
    print_fixed_points(&points, note.as_deref());
    Ok(())
}
