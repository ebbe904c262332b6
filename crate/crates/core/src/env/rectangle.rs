use crate::error::{invalid, Result};
use crate::geom::{Polygon, Vec2};

/// Rigid rectangle translating and rotating in the plane; configurations are
/// `(x, y, θ)` with the rectangle centered at `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RectangleWorld {
    obstacles: Vec<Polygon>,
    half_extents: Vec2,
    lipschitz: f64,
}

impl RectangleWorld {
    pub fn new(obstacles: Vec<Polygon>, half_extents: Vec2) -> Result<Self> {
        if !(half_extents.x > 0.0 && half_extents.y > 0.0) {
            return Err(invalid("rectangle half-extents must be positive"));
        }
        // A body point at radius ≤ ρ moves at most |Δt| + ρ|Δθ| ≤ √(1+ρ²)·‖Δq‖.
        let rho = half_extents.norm();
        Ok(Self {
            obstacles,
            half_extents,
            lipschitz: (1.0 + rho * rho).sqrt(),
        })
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn half_extents(&self) -> Vec2 {
        self.half_extents
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Robot footprint at `q`.
    pub fn body(&self, q: &[f64]) -> Polygon {
        let c = Vec2::new(q[0], q[1]);
        let (hx, hy) = (self.half_extents.x, self.half_extents.y);
        let corners = [
            Vec2::new(-hx, -hy),
            Vec2::new(hx, -hy),
            Vec2::new(hx, hy),
            Vec2::new(-hx, hy),
        ];
        Polygon::from_ccw_unchecked(corners.iter().map(|v| c + v.rotate(q[2])).collect())
    }

    pub(crate) fn collides(&self, q: &[f64]) -> bool {
        let body = self.body(q);
        self.obstacles.iter().any(|o| o.intersects_polygon(&body))
    }

    /// Workspace distance between the footprint and the nearest obstacle.
    pub fn workspace_clearance(&self, q: &[f64]) -> f64 {
        let body = self.body(q);
        self.obstacles
            .iter()
            .map(|o| o.distance_to_polygon(&body))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn clearance(&self, q: &[f64]) -> f64 {
        self.workspace_clearance(q) / self.lipschitz
    }
}
