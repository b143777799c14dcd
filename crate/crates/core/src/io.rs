//! CSV and manifest files.
//!
//! Angles are written in degrees, lengths in metres, forces in newtons.
//! Numbers use the shortest decimal form that parses back to the same `f64`.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{ErrorTable, FixedPoint, Histogram, MapSample, PushLaw, PushObservation, Stability};
use crate::collection::CycleRecord;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::fitting::ForceTraceSample;

pub const RECORD_COLUMNS: [&str; 11] = [
    "batch",
    "k",
    "x0",
    "y0",
    "theta0_deg_unwrapped",
    "dx",
    "dy",
    "dtheta_deg",
    "x_post",
    "y_post",
    "theta_post_deg_unwrapped",
];

/// One row of the cycle-record CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub batch: usize,
    pub k: usize,
    pub x0: f64,
    pub y0: f64,
    pub theta0_deg_unwrapped: f64,
    pub dx: f64,
    pub dy: f64,
    pub dtheta_deg: f64,
    pub x_post: f64,
    pub y_post: f64,
    pub theta_post_deg_unwrapped: f64,
}

impl From<&CycleRecord> for RecordRow {
    fn from(r: &CycleRecord) -> Self {
        Self {
            batch: r.batch,
            k: r.k,
            x0: r.initial.x,
            y0: r.initial.y,
            theta0_deg_unwrapped: r.initial.theta.to_degrees(),
            dx: r.delta.x,
            dy: r.delta.y,
            dtheta_deg: r.delta.theta.to_degrees(),
            x_post: r.post.x,
            y_post: r.post.y,
            theta_post_deg_unwrapped: r.post.theta.to_degrees(),
        }
    }
}

impl RecordRow {
    pub fn observation(&self) -> PushObservation {
        PushObservation {
            theta0: self.theta0_deg_unwrapped.to_radians(),
            dx: self.dx,
            dy: self.dy,
            dtheta: self.dtheta_deg.to_radians(),
        }
    }
}

fn input_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Input {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Writes a header and rows of numbers.
pub fn write_numeric_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(num))?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed CSV with named-column access and row/column-specific errors.
struct Table {
    path: PathBuf,
    header: csv::StringRecord,
    columns: Vec<usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read(path: &Path, required: &[&str]) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| input_err(path, e.to_string()))?;
        let header = r.headers().map_err(|e| input_err(path, e.to_string()))?.clone();
        let mut columns = Vec::with_capacity(required.len());
        for name in required {
            let idx = header
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| input_err(path, format!("missing column '{name}'")))?;
            columns.push(idx);
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| input_err(path, e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec));
        }
        if rows.is_empty() {
            return Err(input_err(path, "no data rows"));
        }
        Ok(Self {
            path: path.to_path_buf(),
            header,
            columns,
            rows,
        })
    }

    fn get<T: FromStr>(&self, row: usize, col: usize) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let (line, rec) = &self.rows[row];
        let idx = self.columns[col];
        let name = &self.header[idx];
        let raw = rec
            .get(idx)
            .ok_or_else(|| input_err(&self.path, format!("row {line}, column '{name}': missing value")))?;
        raw.parse().map_err(|e| {
            input_err(
                &self.path,
                format!("row {line}, column '{name}': cannot parse '{raw}': {e}"),
            )
        })
    }

    fn get_finite(&self, row: usize, col: usize) -> Result<f64> {
        let v: f64 = self.get(row, col)?;
        if !v.is_finite() {
            let (line, _) = &self.rows[row];
            let name = &self.header[self.columns[col]];
            return Err(input_err(
                &self.path,
                format!("row {line}, column '{name}': value is not finite"),
            ));
        }
        Ok(v)
    }
}

pub fn write_records(path: &Path, records: &[CycleRecord]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        let row = RecordRow::from(r);
        let mut fields = vec![row.batch.to_string(), row.k.to_string()];
        fields.extend(
            [
                row.x0,
                row.y0,
                row.theta0_deg_unwrapped,
                row.dx,
                row.dy,
                row.dtheta_deg,
                row.x_post,
                row.y_post,
                row.theta_post_deg_unwrapped,
            ]
            .map(num),
        );
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RecordRow>> {
    let t = Table::read(path, &RECORD_COLUMNS)?;
    (0..t.rows.len())
        .map(|i| {
            let f = |c| t.get_finite(i, c);
            Ok(RecordRow {
                batch: t.get(i, 0)?,
                k: t.get(i, 1)?,
                x0: f(2)?,
                y0: f(3)?,
                theta0_deg_unwrapped: f(4)?,
                dx: f(5)?,
                dy: f(6)?,
                dtheta_deg: f(7)?,
                x_post: f(8)?,
                y_post: f(9)?,
                theta_post_deg_unwrapped: f(10)?,
            })
        })
        .collect()
}

/// Trajectory samples; the rod columns are NaN once it is withdrawn.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let header = [
        "t",
        "x",
        "y",
        "theta_deg",
        "vx",
        "vy",
        "omega_deg_s",
        "pusher_x",
        "pusher_y",
        "Fn",
        "Ftau",
        "vt",
    ];
    write_numeric_csv(
        path,
        &header,
        traj.samples.iter().map(|s| {
            let (p, v) = (s.state.pose, s.state.twist);
            vec![
                s.t,
                p.x,
                p.y,
                p.theta.to_degrees(),
                v.vx,
                v.vy,
                v.omega.to_degrees(),
                s.pusher.x,
                s.pusher.y,
                s.normal_force,
                s.tangential_force,
                s.tangential_speed,
            ]
        }),
    )
}

pub const FORCE_TRACE_COLUMNS: [&str; 4] = ["t", "Ftau", "Fn", "vt"];

pub fn write_force_trace(path: &Path, trace: &[ForceTraceSample]) -> Result<()> {
    write_numeric_csv(
        path,
        &FORCE_TRACE_COLUMNS,
        trace
            .iter()
            .map(|s| vec![s.time, s.tangential, s.normal, s.tangential_speed]),
    )
}

pub fn read_force_trace(path: &Path) -> Result<Vec<ForceTraceSample>> {
    let t = Table::read(path, &FORCE_TRACE_COLUMNS)?;
    (0..t.rows.len())
        .map(|i| {
            Ok(ForceTraceSample {
                time: t.get_finite(i, 0)?,
                tangential: t.get_finite(i, 1)?,
                normal: t.get_finite(i, 2)?,
                tangential_speed: t.get_finite(i, 3)?,
            })
        })
        .collect()
}

pub fn write_mu_samples(path: &Path, samples: &[[f64; 2]]) -> Result<()> {
    write_numeric_csv(path, &["mu_x", "mu_y"], samples.iter().map(|s| s.to_vec()))
}

pub fn read_mu_samples(path: &Path) -> Result<Vec<[f64; 2]>> {
    let t = Table::read(path, &["mu_x", "mu_y"])?;
    (0..t.rows.len())
        .map(|i| Ok([t.get_finite(i, 0)?, t.get_finite(i, 1)?]))
        .collect()
}

pub fn write_map(path: &Path, samples: &[MapSample]) -> Result<()> {
    write_numeric_csv(
        path,
        &["theta0_deg", "next_deg", "increment_deg"],
        samples
            .iter()
            .map(|s| vec![s.theta0_deg, s.next_deg, s.next_deg - s.theta0_deg]),
    )
}

pub fn read_map(path: &Path) -> Result<Vec<MapSample>> {
    let t = Table::read(path, &["theta0_deg", "next_deg"])?;
    (0..t.rows.len())
        .map(|i| {
            Ok(MapSample {
                theta0_deg: t.get_finite(i, 0)?,
                next_deg: t.get_finite(i, 1)?,
            })
        })
        .collect()
}

pub fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    let fractions = h.fractions();
    write_numeric_csv(
        path,
        &["lo", "hi", "count", "fraction"],
        (0..h.counts.len()).map(|i| vec![h.edges[i], h.edges[i + 1], h.counts[i] as f64, fractions[i]]),
    )
}

pub fn write_fixed_points(path: &Path, points: &[FixedPoint]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["theta_deg", "stability", "slope"])?;
    for p in points {
        let kind = match p.stability {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        };
        w.write_record([num(p.theta_deg), kind.to_string(), num(p.slope)])?;
    }
    w.flush()?;
    Ok(())
}

/// Coefficients as `component, term, index, value` with angles in degrees
/// and displacements in metres.
pub fn write_push_law(path: &Path, law: &PushLaw) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["component", "term", "index", "value"])?;
    for (name, series, scale) in [
        ("dtheta_deg", &law.dtheta, 180.0 / std::f64::consts::PI),
        ("dx", &law.dx, 1.0),
        ("dy", &law.dy, 1.0),
    ] {
        w.write_record([name, "constant", "0", &num(series.constant * scale)])?;
        for (i, c) in series.cos.iter().enumerate() {
            w.write_record([name, "cos", &(i + 1).to_string(), &num(c * scale)])?;
        }
        for (i, s) in series.sin.iter().enumerate() {
            w.write_record([name, "sin", &(i + 1).to_string(), &num(s * scale)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `table, quantity, value, mean, percent, unit` in display units; an
/// undefined percentage is left empty.
pub fn write_error_tables(path: &Path, tables: &[(&str, &ErrorTable)]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["table", "quantity", "value", "mean", "percent", "unit"])?;
    for (label, t) in tables {
        for (name, e, factor, unit) in t.rows() {
            w.write_record([
                label.to_string(),
                name.to_string(),
                num(e.value * factor),
                num(e.mean * factor),
                e.percent.map_or(String::new(), num),
                unit.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Enough to repeat a run: the resolved configuration, tool version and
/// inputs. No timestamps, so identical runs give identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: None,
            config: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut f = File::create(path)?;
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}
