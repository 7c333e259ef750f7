//! Scene files: tiles, sampling sets and output settings, as JSON.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use cyltile::{magnetization_from_tesla, EvalPoint, Tile};
use nalgebra::Vector3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCENE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> SceneError {
    SceneError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Mm,
    M,
}

impl LengthUnit {
    pub fn to_meters(self) -> f64 {
        match self {
            LengthUnit::Mm => 1e-3,
            LengthUnit::M => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Deg,
    Rad,
}

impl AngleUnit {
    pub fn to_radians(self) -> f64 {
        match self {
            AngleUnit::Deg => PI / 180.0,
            AngleUnit::Rad => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileSpec {
    /// `[r1, r2]`.
    pub r: [f64; 2],
    /// `[theta1, theta2]`.
    pub theta: [f64; 2],
    /// `[z1, z2]`.
    pub z: [f64; 2],
    #[serde(default)]
    pub offset: [f64; 3],
    /// μ0·M in tesla.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0_m_tesla: Option<[f64; 3]>,
    /// M in A/m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_amps_per_meter: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Sampling {
    /// `count` evenly spaced points from `start` to `end` inclusive.
    Line {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        start: [f64; 3],
        end: [f64; 3],
        count: usize,
    },
    /// `origin + Σ (i_k / (n_k − 1)) axes[k]`, first axis varying fastest.
    Grid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        origin: [f64; 3],
        axes: Vec<[f64; 3]>,
        counts: Vec<usize>,
    },
    Points {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        points: Vec<[f64; 3]>,
    },
    /// Uniform points in the box `center ± half_extent`.
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        center: [f64; 3],
        half_extent: [f64; 3],
        count: usize,
        seed: u64,
    },
}

impl Sampling {
    pub fn name(&self) -> Option<&str> {
        match self {
            Sampling::Line { name, .. }
            | Sampling::Grid { name, .. }
            | Sampling::Points { name, .. }
            | Sampling::Random { name, .. } => name.as_deref(),
        }
    }

    /// Points in scene units.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let v = Vector3::from;
        match self {
            Sampling::Line { start, end, count, .. } => {
                let (a, b) = (v(*start), v(*end));
                (0..*count)
                    .map(|k| {
                        let t = if *count == 1 { 0.0 } else { k as f64 / (*count - 1) as f64 };
                        (a + (b - a) * t).into()
                    })
                    .collect()
            }
            Sampling::Grid { origin, axes, counts, .. } => {
                let mut out = vec![v(*origin)];
                for (axis, &n) in axes.iter().zip(counts) {
                    let step = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    out = (0..n)
                        .flat_map(|i| out.iter().map(move |p| p + v(*axis) * step(i)))
                        .collect();
                }
                out.into_iter().map(Into::into).collect()
            }
            Sampling::Points { points, .. } => points.clone(),
            Sampling::Random {
                center,
                half_extent,
                count,
                seed,
                ..
            } => {
                let mut rng = StdRng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| std::array::from_fn(|i| center[i] + half_extent[i] * rng.gen_range(-1.0..=1.0)))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub version: u32,
    /// Length unit of every coordinate in the file.
    pub units: LengthUnit,
    #[serde(default)]
    pub angles: AngleUnit,
    pub tiles: Vec<TileSpec>,
    pub sampling: Vec<Sampling>,
    pub output: Output,
}

impl Scene {
    pub fn load(path: &Path) -> Result<Scene, SceneError> {
        let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
            path: path.to_owned(),
            source,
        })?;
        let scene: Scene = serde_json::from_str(&text).map_err(|source| SceneError::Parse {
            path: path.to_owned(),
            source,
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.version != SCENE_VERSION {
            return Err(invalid("version", format!("unsupported version {}, expected {SCENE_VERSION}", self.version)));
        }
        if self.tiles.is_empty() {
            return Err(invalid("tiles", "at least one tile is required"));
        }
        for (i, t) in self.tiles.iter().enumerate() {
            let field = format!("tiles[{i}]");
            match (t.mu0_m_tesla, t.m_amps_per_meter) {
                (Some(_), Some(_)) => {
                    return Err(invalid(&field, "give either mu0_m_tesla or m_amps_per_meter, not both"))
                }
                (None, None) => return Err(invalid(&field, "missing mu0_m_tesla or m_amps_per_meter")),
                _ => {}
            }
            self.tile(i).map_err(|e| invalid(&field, e.to_string()))?;
        }
        if self.sampling.is_empty() {
            return Err(invalid("sampling", "at least one sampling set is required"));
        }
        for (i, s) in self.sampling.iter().enumerate() {
            let field = format!("sampling[{i}]");
            match s {
                Sampling::Line { count, .. } | Sampling::Random { count, .. } if *count < 1 => {
                    return Err(invalid(format!("{field}.count"), "must be at least 1"));
                }
                Sampling::Grid { axes, counts, .. } => {
                    if axes.is_empty() || axes.len() > 3 || axes.len() != counts.len() {
                        return Err(invalid(field, "grid needs 1 to 3 axes and one count per axis"));
                    }
                    if counts.iter().any(|&n| n < 1) {
                        return Err(invalid(format!("{field}.counts"), "every count must be at least 1"));
                    }
                }
                Sampling::Points { points, .. } if points.is_empty() => {
                    return Err(invalid(format!("{field}.points"), "must not be empty"));
                }
                _ => {}
            }
            if s.points().iter().flatten().any(|c| !c.is_finite()) {
                return Err(invalid(field, "non-finite coordinate"));
            }
        }
        if self.sampling.len() > 1 {
            let mut names: Vec<String> = (0..self.sampling.len()).map(|i| self.set_name(i)).collect();
            names.sort();
            if names.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("sampling", "sampling set names must be unique"));
            }
        }
        Ok(())
    }

    /// Tile `i` in SI units.
    pub fn tile(&self, i: usize) -> Result<Tile, cyltile::TileError> {
        let t = &self.tiles[i];
        let l = self.units.to_meters();
        let a = self.angles.to_radians();
        let m = match (t.mu0_m_tesla, t.m_amps_per_meter) {
            (Some(b), _) => magnetization_from_tesla(Vector3::from(b)),
            (None, Some(m)) => Vector3::from(m),
            (None, None) => Vector3::zeros(),
        };
        Tile::new((t.r[0] * l, t.r[1] * l), (t.theta[0] * a, t.theta[1] * a), (t.z[0] * l, t.z[1] * l))?
            .with_offset(Vector3::from(t.offset) * l)?
            .with_magnetization(m)
    }

    /// All tiles in SI units; call after [`Scene::validate`].
    pub fn tiles_si(&self) -> Vec<Tile> {
        (0..self.tiles.len()).map(|i| self.tile(i).expect("validated tile")).collect()
    }

    pub fn to_si(&self, p: &[f64; 3]) -> EvalPoint {
        Vector3::from(*p) * self.units.to_meters()
    }

    pub fn set_name(&self, i: usize) -> String {
        self.sampling[i].name().map(str::to_owned).unwrap_or_else(|| format!("set{i}"))
    }

    /// Output path for sampling set `i`: the configured path when there is
    /// a single set, `stem_name.ext` otherwise.
    pub fn output_path(&self, base: &Path, i: usize) -> PathBuf {
        if self.sampling.len() == 1 {
            return base.to_owned();
        }
        let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let file = match base.extension() {
            Some(ext) => format!("{stem}_{}.{}", self.set_name(i), ext.to_string_lossy()),
            None => format!("{stem}_{}", self.set_name(i)),
        };
        base.with_file_name(file)
    }
}
