//! Collision worlds and segment validation.

mod arm;
mod grid;
mod polygon;
mod rectangle;

use std::fmt;
use std::sync::Arc;

pub use arm::{forward_kinematics, ArmWorld};
pub use grid::OccupancyGrid;
pub use polygon::PolygonWorld;
pub use rectangle::RectangleWorld;

use crate::cspace::{Bounds, Config};
use crate::error::{invalid, Result};

/// A user-supplied collision predicate with no clearance oracle.
pub trait CollisionPredicate: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn collides(&self, q: &[f64]) -> bool;
}

#[derive(Clone, Debug)]
pub enum World {
    Polygon(PolygonWorld),
    Rectangle(RectangleWorld),
    Arm(ArmWorld),
    Grid(OccupancyGrid),
    Custom(Arc<dyn CollisionPredicate>),
}

impl World {
    fn dim(&self) -> usize {
        match self {
            World::Polygon(_) | World::Grid(_) => 2,
            World::Rectangle(_) => 3,
            World::Arm(a) => a.link_lengths().len(),
            World::Custom(c) => c.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            World::Polygon(_) => "polygon_world",
            World::Rectangle(_) => "rigid_rectangle",
            World::Arm(_) => "planar_arm",
            World::Grid(_) => "occupancy_grid",
            World::Custom(_) => "custom",
        }
    }
}

/// A collision world together with its sampling bounds.
///
/// Configurations outside the bounds are reported as colliding, so no
/// certified ball ever reaches past them.
#[derive(Clone, Debug)]
pub struct Environment {
    bounds: Bounds,
    world: World,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentStatus {
    Free,
    Blocked,
}

/// Outcome of probing a straight segment.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentResult {
    pub status: SegmentStatus,
    /// Last collision-free probe; the segment end when `Free`.
    pub last_free: Config,
    /// Arc length from the segment start to the first colliding probe.
    pub collision_dist: Option<f64>,
    pub collision_point: Option<Config>,
    /// Free probes in order, starting with the segment start.
    pub polyline: Vec<Config>,
    /// Number of collision queries spent, including the start check.
    pub checks: usize,
}

impl Environment {
    pub fn new(bounds: Bounds, world: World) -> Result<Self> {
        if bounds.dim() != world.dim() {
            return Err(invalid(format!(
                "{} world has dimension {} but bounds have {}",
                world.kind_name(),
                world.dim(),
                bounds.dim()
            )));
        }
        Ok(Self { bounds, world })
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn has_clearance(&self) -> bool {
        !matches!(self.world, World::Custom(_))
    }

    fn check_dim(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim() {
            return Err(invalid(format!(
                "configuration has dimension {}, environment expects {}",
                q.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Collision test without the dimension check.
    #[inline]
    pub fn collides(&self, q: &[f64]) -> bool {
        if !self.bounds.contains(q) {
            return true;
        }
        match &self.world {
            World::Polygon(w) => w.collides(q),
            World::Rectangle(w) => w.collides(q),
            World::Arm(w) => w.collides(q),
            World::Grid(w) => w.collides(q),
            World::Custom(c) => c.collides(q),
        }
    }

    pub fn is_collision(&self, q: &[f64]) -> Result<bool> {
        self.check_dim(q)?;
        Ok(self.collides(q))
    }

    /// Conservative configuration-space clearance: every `q'` with
    /// `‖q − q'‖₂ < d` is collision-free. `None` when the world has no oracle.
    pub fn clearance(&self, q: &[f64]) -> Result<Option<f64>> {
        self.check_dim(q)?;
        if self.collides(q) {
            return Err(invalid("clearance queried at a colliding configuration"));
        }
        Ok(self.free_clearance(q))
    }

    /// World clearance of a free configuration, bounds included.
    fn free_clearance(&self, q: &[f64]) -> Option<f64> {
        let world = match &self.world {
            World::Polygon(w) => w.clearance(q),
            World::Rectangle(w) => w.clearance(q),
            World::Arm(w) => w.clearance(q),
            World::Grid(w) => w.clearance(q),
            World::Custom(_) => return None,
        };
        Some(world.min(self.bounds.distance_to_boundary(q)))
    }

    /// Probes `a → b` at spacing at most `resolution`, the end point included.
    ///
    /// Where a clearance oracle exists, the gap between two free probes is
    /// also certified: it is free when the probes' clearance balls cover it,
    /// and is bisected otherwise, down to `resolution / 1024`. This catches
    /// corners and thin obstacles that fall between probes.
    pub fn validate_segment(&self, a: &Config, b: &Config, resolution: f64) -> Result<SegmentResult> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(invalid("resolution must be positive"));
        }
        if self.collides(a) {
            return Err(invalid("segment starts in collision"));
        }
        let length = crate::cspace::Metric::L2.dist(a, b);
        let steps = ((length / resolution).ceil() as usize).max(1);
        let step = length / steps as f64;
        let floor = resolution / 1024.0;
        let mut checks = 1;
        let mut polyline = Vec::with_capacity(steps + 1);
        polyline.push(a.clone());
        let mut prev_clearance = self.free_clearance(a);
        for k in 1..=steps {
            let s = k as f64 / steps as f64;
            let probe = a.lerp(b, s);
            checks += 1;
            let mut hit = if self.collides(&probe) {
                Some((probe.clone(), length * s))
            } else {
                None
            };
            let mut clearance = None;
            if hit.is_none() {
                clearance = self.free_clearance(&probe);
                if let (Some(cp), Some(cq)) = (prev_clearance, clearance) {
                    let prev = polyline.last().expect("polyline starts with a");
                    let start = length * (k - 1) as f64 / steps as f64;
                    let mut gap = Gap { floor, checks: &mut checks };
                    hit = gap.bisect(self, (prev, cp, start), (&probe, cq), step);
                }
            }
            if let Some((point, dist)) = hit {
                return Ok(SegmentResult {
                    status: SegmentStatus::Blocked,
                    last_free: polyline.last().cloned().unwrap_or_else(|| a.clone()),
                    collision_dist: Some(dist),
                    collision_point: Some(point),
                    polyline,
                    checks,
                });
            }
            prev_clearance = clearance;
            polyline.push(probe);
        }
        Ok(SegmentResult {
            status: SegmentStatus::Free,
            last_free: b.clone(),
            collision_dist: None,
            collision_point: None,
            polyline,
            checks,
        })
    }
}

/// Bisection of the stretch between two free probes.
struct Gap<'a> {
    floor: f64,
    checks: &'a mut usize,
}

impl Gap<'_> {
    /// First colliding point strictly between `p` (clearance, arc length)
    /// and `q` (clearance), or `None` when the stretch is certified or
    /// shorter than the floor.
    fn bisect(
        &mut self,
        env: &Environment,
        (p, cp, sp): (&Config, f64, f64),
        (q, cq): (&Config, f64),
        len: f64,
    ) -> Option<(Config, f64)> {
        if cp + cq > len || len <= self.floor {
            return None;
        }
        let m = p.lerp(q, 0.5);
        let half = len / 2.0;
        *self.checks += 1;
        if env.collides(&m) {
            // an earlier hit may still sit in the first half
            return self.bisect(env, (p, cp, sp), (&m, 0.0), half).or(Some((m, sp + half)));
        }
        let cm = env.free_clearance(&m).unwrap_or(0.0);
        self.bisect(env, (p, cp, sp), (&m, cm), half)
            .or_else(|| self.bisect(env, (&m, cm, sp + half), (q, cq), half))
    }
}

pub fn is_collision(env: &Environment, q: &[f64]) -> Result<bool> {
    env.is_collision(q)
}

pub fn clearance(env: &Environment, q: &[f64]) -> Result<Option<f64>> {
    env.clearance(q)
}

pub fn validate_segment(env: &Environment, a: &Config, b: &Config, resolution: f64) -> Result<SegmentResult> {
    env.validate_segment(a, b, resolution)
}
