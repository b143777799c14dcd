//! TOML run configuration.
//!
//! Every section is optional and falls back to the documented defaults
//! except `seed`, which must be given. Several files can be layered: later
//! files override earlier ones key by key, which is how fitted parameter
//! fragments are applied on top of a base configuration.

use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_FOURIER_ORDER;
use crate::collection::{CollectionConfig, Perturbation, DEFAULT_DRAG_SPEED, DEFAULT_PUSH_OFFSET};
use crate::dynamics::{IntegratorParams, Model, PushSpec, PusherParams, RigidBody};
use crate::error::{Error, Result};
use crate::friction::{ContactPatch, EllipseParams, LimitEllipse};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds every random draw of the run.
    pub seed: u64,
    /// Where `simulate` and `cycle-map` write their files.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub body: RigidBody,
    #[serde(default)]
    pub ellipse: EllipseSection,
    #[serde(default)]
    pub patch: PatchSection,
    #[serde(default)]
    pub pusher: PusherParams,
    #[serde(default)]
    pub push: PushSection,
    #[serde(default)]
    pub collection: CollectionSection,
    #[serde(default)]
    pub integrator: IntegratorParams,
    #[serde(default)]
    pub analysis: AnalysisOptions,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Surface friction law. Exactly one of `phi_deg` and `phi_rad` is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipseSection {
    pub mu_a: f64,
    pub mu_b: f64,
    #[serde(default)]
    pub m0: f64,
    #[serde(default)]
    pub n0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_rad: Option<f64>,
}

impl Default for EllipseSection {
    /// Steel on plywood.
    fn default() -> Self {
        let p = EllipseParams::PLYWOOD;
        Self {
            mu_a: p.mu_a,
            mu_b: p.mu_b,
            m0: p.m0,
            n0: p.n0,
            phi_deg: None,
            phi_rad: Some(p.phi_rad),
        }
    }
}

impl EllipseSection {
    pub fn from_ellipse_deg(e: &LimitEllipse) -> Self {
        Self {
            mu_a: e.mu_a(),
            mu_b: e.mu_b(),
            m0: e.m0(),
            n0: e.n0(),
            phi_deg: Some(e.phi().to_degrees()),
            phi_rad: None,
        }
    }

    pub fn ellipse(&self) -> Result<LimitEllipse> {
        let phi = match (self.phi_deg, self.phi_rad) {
            (Some(d), None) => d.to_radians(),
            (None, Some(r)) => r,
            (None, None) => 0.0,
            (Some(_), Some(_)) => {
                return Err(Error::param("ellipse", "give either phi_deg or phi_rad, not both"));
            }
        };
        LimitEllipse::new(self.mu_a, self.mu_b, self.m0, self.n0, phi)
    }
}

/// Point-contact grid under the object; the load is split evenly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatchSection {
    pub rows: usize,
    pub cols: usize,
}

impl Default for PatchSection {
    fn default() -> Self {
        Self { rows: 8, cols: 8 }
    }
}

/// Push in the object frame. Without `contact` the push is orthogonal to
/// the `-y` edge at `offset` from its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PushSection {
    /// m
    pub offset: f64,
    /// m, object frame
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contact: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 2]>,
    /// m
    pub distance: f64,
    /// m/s
    pub speed: f64,
    /// s
    pub ramp_time: f64,
}

impl Default for PushSection {
    fn default() -> Self {
        let spec = PushSpec::orthogonal_to_bottom_edge(RigidBody::default().side, DEFAULT_PUSH_OFFSET);
        Self {
            offset: DEFAULT_PUSH_OFFSET,
            contact: None,
            direction: None,
            distance: spec.distance,
            speed: spec.speed,
            ramp_time: spec.ramp_time,
        }
    }
}

impl PushSection {
    pub fn spec(&self, side: f64) -> PushSpec {
        let base = PushSpec::orthogonal_to_bottom_edge(side, self.offset);
        PushSpec {
            contact: self.contact.unwrap_or(base.contact),
            direction: self.direction.unwrap_or(base.direction),
            distance: self.distance,
            speed: self.speed,
            ramp_time: self.ramp_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollectionSection {
    /// Object frame, m. Defaults to `(0, -side/4)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring_offset: Option<[f64; 2]>,
    /// World frame, m.
    pub drag_target: [f64; 2],
    /// m/s
    pub drag_speed: f64,
    /// s
    pub drag_ramp_time: f64,
    pub cycles: usize,
    pub batch_starts_deg: Vec<f64>,
    pub keep_trajectories: bool,
    pub perturbation: Perturbation,
}

impl Default for CollectionSection {
    fn default() -> Self {
        let d = CollectionConfig::with_defaults(RigidBody::default().side, DEFAULT_PUSH_OFFSET, 0);
        Self {
            ring_offset: None,
            drag_target: [d.drag_target.x, d.drag_target.y],
            drag_speed: DEFAULT_DRAG_SPEED,
            drag_ramp_time: d.drag_ramp_time,
            cycles: d.cycles,
            batch_starts_deg: d.batch_starts_deg,
            keep_trajectories: false,
            perturbation: Perturbation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    /// Orientation histogram bin width, degrees.
    pub angle_bin_deg: f64,
    /// Displacement histogram bin width, mm.
    pub displacement_bin_mm: f64,
    pub fourier_order: usize,
    /// Cycles dropped from the start of each batch in the orientation
    /// histogram.
    pub burn_in: usize,
    /// Cycle-map grid `[start, stop, step]` in degrees, stop exclusive.
    pub map_grid_deg: [f64; 3],
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            angle_bin_deg: 4.0,
            displacement_bin_mm: 1.0,
            fourier_order: DEFAULT_FOURIER_ORDER,
            burn_in: 50,
            map_grid_deg: [0.0, 360.0, 5.0],
        }
    }
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.angle_bin_deg > 0.0) || !self.angle_bin_deg.is_finite() {
            return Err(Error::param("analysis.angle_bin_deg", "must be finite and > 0"));
        }
        if !(self.displacement_bin_mm > 0.0) || !self.displacement_bin_mm.is_finite() {
            return Err(Error::param("analysis.displacement_bin_mm", "must be finite and > 0"));
        }
        grid_points(self.map_grid_deg).map(|_| ())
    }
}

/// Angles `start, start + step, ...` strictly below `stop`.
pub fn grid_points([start, stop, step]: [f64; 3]) -> Result<Vec<f64>> {
    if ![start, stop, step].iter().all(|v| v.is_finite()) || !(step > 0.0) || !(stop > start) {
        return Err(Error::param("grid", "need finite START < STOP and STEP > 0"));
    }
    let n = ((stop - start) / step - 1e-9).ceil() as usize;
    if n > 1_000_000 {
        return Err(Error::param("grid", "more than 10^6 points"));
    }
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

impl RunConfig {
    /// Defaults everywhere, with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            output_dir: default_output_dir(),
            body: RigidBody::default(),
            ellipse: EllipseSection::default(),
            patch: PatchSection::default(),
            pusher: PusherParams::default(),
            push: PushSection::default(),
            collection: CollectionSection::default(),
            integrator: IntegratorParams::default(),
            analysis: AnalysisOptions::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and layers `paths` in order.
    pub fn load(paths: &[impl AsRef<Path>]) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::Config("no configuration file given".into()));
        }
        let mut merged = toml::Table::new();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|e| Error::Input {
                path: p.to_path_buf(),
                message: e.to_string(),
            })?;
            let mut table: toml::Table = text
                .parse()
                .map_err(|e: toml::de::Error| Error::Config(format!("{}: {e}", p.display())))?;
            if let (Some(toml::Value::Table(base)), Some(toml::Value::Table(over))) =
                (merged.get_mut("ellipse"), table.get_mut("ellipse"))
            {
                for (set, other) in [("phi_deg", "phi_rad"), ("phi_rad", "phi_deg")] {
                    if over.contains_key(set) && !over.contains_key(other) {
                        base.remove(other);
                    }
                }
            }
            merge_tables(&mut merged, table);
        }
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed > i64::MAX as u64 {
            return Err(Error::param("seed", "must fit in a signed 64-bit integer"));
        }
        self.model()?;
        self.collection_config()?.validate()?;
        self.analysis.validate()
    }

    pub fn model(&self) -> Result<Model> {
        self.body.validate()?;
        if self.patch.rows == 0 || self.patch.cols == 0 {
            return Err(Error::param("patch", "rows and cols must be >= 1"));
        }
        let model = Model {
            body: self.body,
            ellipse: self.ellipse.ellipse()?,
            patch: ContactPatch::grid(self.patch.rows, self.patch.cols, self.body.side, self.body.weight())?,
            pusher: self.pusher,
            integrator: self.integrator,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn collection_config(&self) -> Result<CollectionConfig> {
        let c = &self.collection;
        let side = self.body.side;
        let cfg = CollectionConfig {
            push: self.push.spec(side),
            ring_offset: Vector2::from(c.ring_offset.unwrap_or([0.0, -0.25 * side])),
            drag_target: Vector2::from(c.drag_target),
            drag_speed: c.drag_speed,
            drag_ramp_time: c.drag_ramp_time,
            cycles: c.cycles,
            batch_starts_deg: c.batch_starts_deg.clone(),
            seed: self.seed,
            perturbation: c.perturbation,
            keep_trajectories: c.keep_trajectories,
        };
        if !cfg
            .ring_offset
            .iter()
            .chain(cfg.drag_target.iter())
            .all(|v| v.is_finite())
        {
            return Err(Error::param("collection", "ring_offset and drag_target must be finite"));
        }
        Ok(cfg)
    }
}

/// Recursive key-wise override of `base` by `over`.
fn merge_tables(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
