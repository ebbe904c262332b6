use crate::error::{invalid, Result};
use crate::geom::{Circle, Polygon, Vec2};

/// Serial planar arm with revolute joints. Joint `i` is relative to link
/// `i - 1`; self-collision is not modeled.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmWorld {
    base: Vec2,
    link_lengths: Vec<f64>,
    polygons: Vec<Polygon>,
    circles: Vec<Circle>,
    lipschitz: f64,
}

impl ArmWorld {
    pub fn new(base: Vec2, link_lengths: Vec<f64>, polygons: Vec<Polygon>, circles: Vec<Circle>) -> Result<Self> {
        if link_lengths.is_empty() {
            return Err(invalid("arm needs at least one link"));
        }
        if link_lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(invalid("link lengths must be positive"));
        }
        if circles.iter().any(|c| !(c.radius > 0.0)) {
            return Err(invalid("circle radius must be positive"));
        }
        // Rotating joint i moves any arm point by at most the reach beyond
        // joint i, so the sum of reaches bounds workspace speed per unit of
        // joint motion.
        let mut reach = 0.0;
        let mut lipschitz = 0.0;
        for l in link_lengths.iter().rev() {
            reach += l;
            lipschitz += reach;
        }
        Ok(Self {
            base,
            link_lengths,
            polygons,
            circles,
            lipschitz,
        })
    }

    pub fn base(&self) -> Vec2 {
        self.base
    }

    pub fn link_lengths(&self) -> &[f64] {
        &self.link_lengths
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn reach(&self) -> f64 {
        self.link_lengths.iter().sum()
    }

    /// Joint positions from the base to the end effector.
    pub fn joints(&self, q: &[f64]) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(self.link_lengths.len() + 1);
        let mut p = self.base;
        let mut heading = 0.0;
        out.push(p);
        for (l, a) in self.link_lengths.iter().zip(q) {
            heading += a;
            p = p + Vec2::new(heading.cos(), heading.sin()) * *l;
            out.push(p);
        }
        out
    }

    pub fn end_effector(&self, q: &[f64]) -> Vec2 {
        *self.joints(q).last().expect("arm has links")
    }

    pub(crate) fn collides(&self, q: &[f64]) -> bool {
        let joints = self.joints(q);
        joints.windows(2).any(|w| {
            self.circles.iter().any(|c| c.intersects_segment(w[0], w[1]))
                || self.polygons.iter().any(|p| p.intersects_segment(w[0], w[1]))
        })
    }

    /// Smallest workspace distance between any link and any obstacle.
    pub fn workspace_clearance(&self, q: &[f64]) -> f64 {
        let joints = self.joints(q);
        let mut best = f64::INFINITY;
        for w in joints.windows(2) {
            for c in &self.circles {
                best = best.min(c.distance_to_segment(w[0], w[1]));
            }
            for p in &self.polygons {
                best = best.min(p.distance_to_segment(w[0], w[1]));
            }
        }
        best
    }

    pub(crate) fn clearance(&self, q: &[f64]) -> f64 {
        self.workspace_clearance(q) / self.lipschitz
    }
}

/// Joint positions of `world` at `q`, base first and end effector last.
pub fn forward_kinematics(world: &ArmWorld, q: &[f64]) -> Result<Vec<Vec2>> {
    if q.len() != world.link_lengths.len() {
        return Err(invalid(format!(
            "arm has {} joints, configuration has {}",
            world.link_lengths.len(),
            q.len()
        )));
    }
    Ok(world.joints(q))
}
