//! Scene files: versioned JSON descriptions of a configuration.

use hmeasure::geometry::{
    extremal_points, star_continuum, CircularArc, Configuration, Continuum, Point, Segment,
};
use hmeasure::search::{perturbation_configuration, StarPerturbation, DEFAULT_JOINT_RADII};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema_version: u32,
    pub n: usize,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Marked points; defaults to the sector midpoints rotated by `-theta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuum: Option<ContinuumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumSpec {
    #[serde(default)]
    pub segments: Vec<[[f64; 2]; 2]>,
    #[serde(default)]
    pub arcs: Vec<ArcSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub angle0: f64,
    pub angle1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Star {
        n: usize,
        #[serde(default)]
        theta: f64,
    },
    PerturbedStar {
        spoke_angle_offsets: Vec<f64>,
        #[serde(default)]
        joint_radii: Option<Vec<f64>>,
        joint_lateral_offsets: Vec<Vec<f64>>,
        #[serde(default)]
        theta: f64,
    },
}

/// A parsed and validated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub file: SceneFile,
    pub configuration: Configuration,
}

fn point(field: &str, [re, im]: [f64; 2]) -> Result<Point, CliError> {
    Point::new(re, im).map_err(|e| CliError::validation(field, e))
}

impl SceneFile {
    /// Parses JSON, reporting the path of the offending field on failure.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: SceneFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let field = if path == "." || path == "?" {
                field_from_message(&inner.to_string())
            } else {
                Some(path)
            };
            CliError::Parse {
                field,
                message: inner.to_string(),
            }
        })?;
        Ok(file)
    }

    /// Serializes a configuration with an explicit continuum.
    pub fn from_configuration(cfg: &Configuration) -> Self {
        let e = cfg.continuum();
        SceneFile {
            schema_version: SCHEMA_VERSION,
            n: cfg.n(),
            rho: cfg.rho(),
            theta: None,
            points: Some(cfg.points().iter().map(|p| [p.re(), p.im()]).collect()),
            continuum: Some(ContinuumSpec {
                segments: e
                    .segments()
                    .iter()
                    .map(|s| [[s.p0().re(), s.p0().im()], [s.p1().re(), s.p1().im()]])
                    .collect(),
                arcs: e
                    .arcs()
                    .iter()
                    .map(|a| ArcSpec {
                        center: [a.center().re(), a.center().im()],
                        radius: a.radius(),
                        angle0: a.angle0(),
                        angle1: a.angle1(),
                    })
                    .collect(),
            }),
            generator: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn resolve(self) -> Result<Scene, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::validation(
                "schema_version",
                format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if self.n < 2 {
            return Err(CliError::validation(
                "n",
                format!("n = {} must be at least 2", self.n),
            ));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(CliError::validation(
                "rho",
                format!("rho = {} must lie in (0, 1)", self.rho),
            ));
        }
        // Default points follow the generator's rotation unless overridden.
        let theta = self
            .theta
            .or(match &self.generator {
                Some(Generator::Star { theta, .. } | Generator::PerturbedStar { theta, .. }) => {
                    Some(*theta)
                }
                None => None,
            })
            .unwrap_or(0.0);
        if !theta.is_finite() {
            return Err(CliError::validation("theta", "theta must be finite"));
        }
        let points = match &self.points {
            Some(list) => {
                if list.len() != self.n {
                    return Err(CliError::validation(
                        "points",
                        format!("expected {} points, got {}", self.n, list.len()),
                    ));
                }
                list.iter()
                    .enumerate()
                    .map(|(i, p)| point(&format!("points[{i}]"), *p))
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => extremal_points(self.n, self.rho, theta),
        };
        let continuum = match (&self.continuum, &self.generator) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation(
                    "generator",
                    "give either `continuum` or `generator`, not both",
                ))
            }
            (None, None) => {
                return Err(CliError::validation(
                    "continuum",
                    "missing `continuum` or `generator`",
                ))
            }
            (Some(spec), None) => build_continuum(spec)?,
            (None, Some(Generator::Star { n, theta })) => {
                if *n != self.n {
                    return Err(CliError::validation(
                        "generator.n",
                        format!("generator n = {n} differs from scene n = {}", self.n),
                    ));
                }
                if *n < 2 || !theta.is_finite() {
                    return Err(CliError::validation(
                        "generator",
                        "star needs n >= 2 and finite theta",
                    ));
                }
                star_continuum(*n, *theta)
            }
            (None, Some(Generator::PerturbedStar { .. })) => {
                let p = self.perturbation().expect("perturbed star generator");
                if p.n != self.n {
                    return Err(CliError::validation(
                        "generator.spoke_angle_offsets",
                        format!("{} spokes but scene n = {}", p.n, self.n),
                    ));
                }
                if self.points.is_none() {
                    // Points ride the generator's rotation.
                    let cfg = perturbation_configuration(&p, self.rho)
                        .map_err(|e| CliError::validation("generator", e))?;
                    return Ok(Scene {
                        file: self,
                        configuration: cfg,
                    });
                }
                hmeasure::search::realize(&p).map_err(|e| CliError::validation("generator", e))?
            }
        };
        let configuration = Configuration::new(self.rho, points, continuum)
            .map_err(|e| CliError::validation("points", e))?;
        Ok(Scene {
            file: self,
            configuration,
        })
    }

    fn perturbation(&self) -> Option<StarPerturbation> {
        match &self.generator {
            Some(Generator::PerturbedStar {
                spoke_angle_offsets,
                joint_radii,
                joint_lateral_offsets,
                theta,
            }) => Some(StarPerturbation {
                n: spoke_angle_offsets.len(),
                spoke_angle_offsets: spoke_angle_offsets.clone(),
                joint_radii: joint_radii
                    .clone()
                    .unwrap_or_else(|| DEFAULT_JOINT_RADII.to_vec()),
                joint_lateral_offsets: joint_lateral_offsets.clone(),
                theta: *theta,
            }),
            _ => None,
        }
    }
}

fn field_from_message(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn build_continuum(spec: &ContinuumSpec) -> Result<Continuum, CliError> {
    let segments = spec
        .segments
        .iter()
        .enumerate()
        .map(|(i, [a, b])| {
            let field = format!("continuum.segments[{i}]");
            Segment::new(point(&field, *a)?, point(&field, *b)?)
                .map_err(|e| CliError::validation(&field, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let arcs = spec
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let field = format!("continuum.arcs[{i}]");
            CircularArc::new(point(&field, a.center)?, a.radius, a.angle0, a.angle1)
                .map_err(|e| CliError::validation(&field, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Continuum::new(segments, arcs).map_err(|e| CliError::validation("continuum", e))
}

/// Reads and resolves a scene file.
pub fn load(path: &std::path::Path) -> Result<Scene, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    SceneFile::parse(&text)?.resolve()
}
