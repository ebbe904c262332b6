use crate::geom::{Polygon, Vec2};

/// Point robot among polygonal obstacles.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonWorld {
    obstacles: Vec<Polygon>,
}

impl PolygonWorld {
    pub fn new(obstacles: Vec<Polygon>) -> Self {
        Self { obstacles }
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub(crate) fn collides(&self, q: &[f64]) -> bool {
        let p = Vec2::new(q[0], q[1]);
        self.obstacles.iter().any(|o| o.contains(p))
    }

    /// For a point robot the configuration-space clearance is the workspace
    /// distance to the nearest obstacle.
    pub(crate) fn clearance(&self, q: &[f64]) -> f64 {
        let p = Vec2::new(q[0], q[1]);
        self.obstacles
            .iter()
            .map(|o| o.distance_to_point(p))
            .fold(f64::INFINITY, f64::min)
    }
}
