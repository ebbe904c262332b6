//! Scenario files: UTF-8 JSON describing a world, bounds, a query and
//! optional parameter overrides.
//!
//! ```json
//! {
//!   "name": "gap_wall",
//!   "environment": { "kind": "polygon_world", "obstacles": [[[4.5, 0], [5.5, 0], [5.5, 4], [4.5, 4]]] },
//!   "bounds": { "lower": [0, 0], "upper": [10, 10] },
//!   "start": [1, 1],
//!   "goal": [9, 9],
//!   "params": { "resolution": 0.05 }
//! }
//! ```
//!
//! Environment kinds: `polygon_world`, `rigid_rectangle`, `planar_arm` and
//! `occupancy_grid` (inline `rows` of `#`/`.` top row first, or a `pgm` path
//! relative to the scenario file).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cspace::{Bounds, Config, Metric};
use crate::env::{ArmWorld, Environment, OccupancyGrid, PolygonWorld, RectangleWorld, World};
use crate::error::{invalid, Error, Result};
use crate::geom::{Circle, Polygon, Vec2};
use crate::planner::{PlannerParams, Variant};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    PolygonWorld {
        obstacles: Vec<Vec<[f64; 2]>>,
    },
    RigidRectangle {
        half_extents: [f64; 2],
        obstacles: Vec<Vec<[f64; 2]>>,
    },
    PlanarArm {
        base: [f64; 2],
        link_lengths: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        polygons: Vec<Vec<[f64; 2]>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        circles: Vec<Circle>,
    },
    OccupancyGrid {
        cell_size: f64,
        origin: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pgm: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Per-scenario parameter overrides; unset fields take the planner defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rrt_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, params: &mut PlannerParams) {
        if let Some(m) = self.metric {
            params.metric = m;
        }
        if let Some(v) = self.resolution {
            params.resolution = v;
        }
        if let Some(v) = self.r0 {
            params.r0 = v;
        }
        if let Some(v) = self.delta {
            params.delta = v;
        }
        if let Some(v) = self.rrt_step {
            params.rrt_step = v;
        }
        if let Some(v) = self.max_iterations {
            params.max_iterations = v;
        }
        if let Some(v) = self.time_budget {
            params.time_budget = v;
        }
    }

    /// Fields set in `other` win.
    pub fn merged(&self, other: &ParamOverrides) -> ParamOverrides {
        ParamOverrides {
            metric: other.metric.or(self.metric),
            resolution: other.resolution.or(self.resolution),
            r0: other.r0.or(self.r0),
            delta: other.delta.or(self.delta),
            rrt_step: other.rrt_step.or(self.rrt_step),
            max_iterations: other.max_iterations.or(self.max_iterations),
            time_budget: other.time_budget.or(self.time_budget),
        }
    }
}

/// Serialized scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub environment: EnvironmentSpec,
    pub bounds: BoundsSpec,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub params: ParamOverrides,
}

fn is_default(p: &ParamOverrides) -> bool {
    *p == ParamOverrides::default()
}

/// A validated scenario ready for planning.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub env: Environment,
    pub start: Config,
    pub goal: Config,
}

fn field(name: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::InvalidArgument(m) => invalid(format!("{name}: {m}")),
        other => other,
    }
}

fn polygons(raw: &[Vec<[f64; 2]>], name: &str) -> Result<Vec<Polygon>> {
    raw.iter()
        .enumerate()
        .map(|(i, pts)| {
            Polygon::new(pts.iter().map(|p| Vec2::from(*p)).collect())
                .map_err(field(&format!("{name}[{i}]")))
        })
        .collect()
}

impl EnvironmentSpec {
    fn build(&self, bounds: Bounds, base_dir: &Path) -> Result<Environment> {
        let world = match self {
            EnvironmentSpec::PolygonWorld { obstacles } => {
                World::Polygon(PolygonWorld::new(polygons(obstacles, "environment.obstacles")?))
            }
            EnvironmentSpec::RigidRectangle {
                half_extents,
                obstacles,
            } => World::Rectangle(
                RectangleWorld::new(
                    polygons(obstacles, "environment.obstacles")?,
                    Vec2::from(*half_extents),
                )
                .map_err(field("environment.half_extents"))?,
            ),
            EnvironmentSpec::PlanarArm {
                base,
                link_lengths,
                polygons: polys,
                circles,
            } => World::Arm(
                ArmWorld::new(
                    Vec2::from(*base),
                    link_lengths.clone(),
                    polygons(polys, "environment.polygons")?,
                    circles.clone(),
                )
                .map_err(field("environment"))?,
            ),
            EnvironmentSpec::OccupancyGrid {
                cell_size,
                origin,
                rows,
                pgm,
            } => {
                let origin = Vec2::from(*origin);
                let grid = match (rows, pgm) {
                    (Some(rows), None) => OccupancyGrid::from_rows(rows, *cell_size, origin)
                        .map_err(field("environment.rows"))?,
                    (None, Some(file)) => {
                        OccupancyGrid::load_pgm(&base_dir.join(file), *cell_size, origin)
                            .map_err(field("environment.pgm"))?
                    }
                    _ => return Err(invalid("environment: give exactly one of `rows` or `pgm`")),
                };
                World::Grid(grid)
            }
        };
        Environment::new(bounds, world).map_err(field("bounds"))
    }
}

impl Scenario {
    /// Validates a spec. Relative PGM paths resolve against `base_dir`.
    pub fn from_spec(spec: ScenarioSpec, base_dir: &Path) -> Result<Self> {
        let bounds = Bounds::new(spec.bounds.lower.clone(), spec.bounds.upper.clone()).map_err(field("bounds"))?;
        let env = spec.environment.build(bounds, base_dir)?;
        let start = Config::new(spec.start.clone()).map_err(field("start"))?;
        let goal = Config::new(spec.goal.clone()).map_err(field("goal"))?;
        for (name, q) in [("start", &start), ("goal", &goal)] {
            if q.dim() != env.dim() {
                return Err(invalid(format!(
                    "{name}: dimension {} does not match environment dimension {}",
                    q.dim(),
                    env.dim()
                )));
            }
            if env.collides(q) {
                return Err(invalid(format!("{name}: configuration is in collision or out of bounds")));
            }
        }
        let mut check = PlannerParams::defaults(Variant::InexactBall, env.bounds());
        spec.params.apply(&mut check);
        check.validate().map_err(field("params"))?;
        Ok(Self {
            spec,
            env,
            start,
            goal,
        })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Planner parameters for `variant`: defaults, then scenario overrides,
    /// then `extra`.
    pub fn params(&self, variant: Variant, extra: &ParamOverrides) -> PlannerParams {
        let mut p = PlannerParams::defaults(variant, self.env.bounds());
        self.spec.params.merged(extra).apply(&mut p);
        p
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_spec(&self.spec, path)
    }
}

pub fn save_spec(spec: &ScenarioSpec, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(spec)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    let spec: ScenarioSpec = serde_json::from_str(text)?;
    Scenario::from_spec(spec, base_dir)
}

/// Reads and validates a scenario file; errors name the file and field.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let wrap = |message: String| Error::Scenario {
        path: PathBuf::from(path),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| wrap(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base).map_err(|e| match e {
        Error::InvalidArgument(m) => wrap(m),
        Error::Json(j) => wrap(format!("parse error: {j}")),
        other => wrap(other.to_string()),
    })
}
