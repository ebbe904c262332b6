//! Volumetric search tree: nodes carry a center configuration and a ball
//! radius, and samples inside any ball are treated as already reached.

use serde::{Deserialize, Serialize};

use crate::cspace::{Config, Metric};
use crate::error::{invalid, Result};

/// How node radii behave.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusMode {
    /// Radius-zero nodes; the tree degenerates to a plain RRT tree.
    Point,
    /// Certified radii; zero is allowed when a node touches an obstacle.
    Exact,
    /// Optimistic radii trimmed on contact, never below `delta`.
    Inexact { delta: f64 },
}

impl RadiusMode {
    pub fn floor(self) -> f64 {
        match self {
            RadiusMode::Inexact { delta } => delta,
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallNode {
    pub center: Config,
    pub radius: f64,
    pub parent: Option<usize>,
    /// Probe polyline from the parent center to this center; empty at the root.
    pub edge: Vec<Config>,
}

#[derive(Clone, Debug)]
pub struct BallTree {
    nodes: Vec<BallNode>,
    metric: Metric,
    mode: RadiusMode,
    trims: usize,
}

impl BallTree {
    pub fn new(root: Config, radius: f64, metric: Metric, mode: RadiusMode) -> Result<Self> {
        match mode {
            RadiusMode::Point if radius != 0.0 => {
                return Err(invalid("point trees use zero radii"));
            }
            RadiusMode::Exact if !(radius >= 0.0) => {
                return Err(invalid("exact radius must be non-negative"));
            }
            RadiusMode::Inexact { delta } => {
                if !(delta >= 0.0) {
                    return Err(invalid("delta must be non-negative"));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(invalid("initial radius must be positive"));
                }
                if radius < delta {
                    return Err(invalid("initial radius must be at least delta"));
                }
            }
            _ => {}
        }
        Ok(Self {
            nodes: vec![BallNode {
                center: root,
                radius,
                parent: None,
                edge: Vec::new(),
            }],
            metric,
            mode,
            trims: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn mode(&self) -> RadiusMode {
        self.mode
    }

    pub fn trims(&self) -> usize {
        self.trims
    }

    pub fn nodes(&self) -> &[BallNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &BallNode {
        &self.nodes[idx]
    }

    pub fn root(&self) -> &Config {
        &self.nodes[0].center
    }

    /// Node minimizing `dist(x, center) − radius`; ties go to the lowest index.
    ///
    /// Linear scan: trees stay small and the pseudo-distance is not a metric,
    /// so metric indexes do not apply directly.
    pub fn nearest_volume(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, n) in self.nodes.iter().enumerate() {
            let d = self.metric.dist(x, &n.center) - n.radius;
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Strictly inside some ball; points on a sphere surface are outside.
    pub fn inside(&self, x: &[f64]) -> bool {
        self.nearest_volume(x).1 < 0.0
    }

    /// Appends a node. The edge must run from the parent center to `center`.
    pub fn add_node(&mut self, parent: usize, center: Config, radius: f64, edge: Vec<Config>) -> Result<usize> {
        let Some(p) = self.nodes.get(parent) else {
            return Err(invalid(format!("unknown parent node {parent}")));
        };
        if center.dim() != p.center.dim() {
            return Err(invalid("node dimension mismatch"));
        }
        if edge.first() != Some(&p.center) || edge.last() != Some(&center) {
            return Err(invalid("edge endpoints must match parent and node centers"));
        }
        let floor = self.mode.floor();
        if !(radius >= floor) || (self.mode == RadiusMode::Point && radius != 0.0) {
            return Err(invalid(format!("radius {radius} violates the tree's radius floor")));
        }
        self.nodes.push(BallNode {
            center,
            radius,
            parent: Some(parent),
            edge,
        });
        Ok(self.nodes.len() - 1)
    }

    /// Whether `parent` already has a child centered at `center`.
    pub fn has_child_at(&self, parent: usize, center: &[f64]) -> bool {
        self.nodes
            .iter()
            .any(|n| n.parent == Some(parent) && n.center.coords() == center)
    }

    /// Shrinks a ball after a collision was found `collision_dist` from its
    /// center: `r ← max(δ, min(r, collision_dist + δ))`, applied only when the
    /// collision lies inside the current ball. Returns the resulting radius.
    pub fn trim(&mut self, idx: usize, collision_dist: f64, delta: f64) -> f64 {
        let node = &mut self.nodes[idx];
        let old = node.radius;
        if collision_dist < old {
            let new = delta.max(old.min(collision_dist + delta));
            if new < old {
                node.radius = new;
                self.trims += 1;
            }
        }
        node.radius
    }

    /// Probe polyline from the root to `idx`, root first.
    pub fn path_to_root(&self, idx: usize) -> Result<Vec<Config>> {
        if idx >= self.nodes.len() {
            return Err(invalid(format!("node index {idx} out of range")));
        }
        let mut chain = vec![idx];
        let mut cur = idx;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(p);
            cur = p;
        }
        let mut path = vec![self.nodes[0].center.clone()];
        for &i in chain.iter().rev().skip(1) {
            path.extend(self.nodes[i].edge.iter().skip(1).cloned());
        }
        Ok(path)
    }

    pub fn snapshot(&self) -> TreeSnapshot {
        TreeSnapshot {
            nodes: self
                .nodes
                .iter()
                .map(|n| SnapshotNode {
                    center: n.center.to_vec(),
                    radius: n.radius,
                    parent: n.parent,
                })
                .collect(),
        }
    }
}

/// Serializable view of a tree: centers, radii and parent links.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSnapshot {
    pub nodes: Vec<SnapshotNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub center: Vec<f64>,
    pub radius: f64,
    pub parent: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{Bounds, SampleRng};
    use proptest::prelude::*;

    fn cfg(v: &[f64]) -> Config {
        Config::new(v.to_vec()).unwrap()
    }

    fn inexact(delta: f64) -> RadiusMode {
        RadiusMode::Inexact { delta }
    }

    fn straight_edge(a: &Config, b: &Config, steps: usize) -> Vec<Config> {
        (0..=steps).map(|k| a.lerp(b, k as f64 / steps as f64)).collect()
    }

    #[test]
    fn init_tree() {
        let t = BallTree::new(cfg(&[0.0, 0.0]), 1.0, Metric::L2, inexact(0.0)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.node(0).radius, 1.0);
        assert_eq!(t.node(0).parent, None);
        assert_eq!(t.path_to_root(0).unwrap(), vec![cfg(&[0.0, 0.0])]);
        assert!(BallTree::new(cfg(&[0.0, 0.0]), 0.0, Metric::L2, inexact(0.0)).is_err());
        assert!(BallTree::new(cfg(&[0.0, 0.0]), 0.1, Metric::L2, inexact(0.2)).is_err());
        assert!(BallTree::new(cfg(&[0.0, 0.0]), 0.0, Metric::L2, RadiusMode::Exact).is_ok());
    }

    #[test]
    fn nearest_volume_examples() {
        let t = BallTree::new(cfg(&[0.0, 0.0]), 1.0, Metric::L2, RadiusMode::Exact).unwrap();
        assert_eq!(t.nearest_volume(&[3.0, 0.0]), (0, 2.0));

        let mut t = BallTree::new(cfg(&[0.0, 0.0]), 2.0, Metric::L2, RadiusMode::Exact).unwrap();
        let b = cfg(&[4.0, 0.0]);
        let edge = straight_edge(t.root(), &b, 4);
        let idx = t.add_node(0, b, 0.5, edge).unwrap();
        // brute force: A gives 3 − 2 = 1, B gives 1 − 0.5 = 0.5
        assert_eq!(t.nearest_volume(&[3.0, 0.0]), (idx, 0.5));
        assert_eq!(t.nearest_volume(&[4.0, 0.0]), (idx, -0.5));
    }

    #[test]
    fn surface_points_are_outside() {
        let t = BallTree::new(cfg(&[0.0, 0.0]), 1.0, Metric::L2, inexact(0.0)).unwrap();
        assert!(!t.inside(&[1.0, 0.0]));
        assert!(t.inside(&[0.0, 0.0]));
        assert!(t.inside(&[0.5, 0.5]));
    }

    #[test]
    fn trim_examples() {
        let mut t = BallTree::new(cfg(&[0.0, 0.0]), 5.0, Metric::L2, inexact(0.0)).unwrap();
        assert_eq!(t.trim(0, 2.0, 0.0), 2.0);
        assert_eq!(t.trims(), 1);

        let mut t = BallTree::new(cfg(&[0.0, 0.0]), 5.0, Metric::L2, inexact(0.0)).unwrap();
        assert_eq!(t.trim(0, 7.0, 0.0), 5.0);
        assert_eq!(t.trims(), 0);

        let mut t = BallTree::new(cfg(&[0.0, 0.0]), 5.0, Metric::L2, inexact(0.25)).unwrap();
        assert!((t.trim(0, 0.1, 0.25) - 0.35).abs() < 1e-12);
        assert_eq!(t.trim(0, 0.0, 0.25), 0.25);
        assert_eq!(t.trim(0, 0.0, 0.25), 0.25);
        assert_eq!(t.trims(), 2);
    }

    #[test]
    fn add_node_and_paths() {
        let mut t = BallTree::new(cfg(&[0.0, 0.0]), 1.0, Metric::L2, inexact(0.0)).unwrap();
        let mut prev = t.root().clone();
        for k in 1..=10 {
            let next = cfg(&[k as f64, 0.0]);
            let edge = straight_edge(&prev, &next, 5);
            let idx = t.add_node(k - 1, next.clone(), 1.0, edge).unwrap();
            assert_eq!(idx, k);
            assert_eq!(t.node(idx).parent, Some(k - 1));
            prev = next;
        }
        let path = t.path_to_root(10).unwrap();
        assert_eq!(path.first(), Some(t.root()));
        assert_eq!(path.last(), Some(&cfg(&[10.0, 0.0])));
        assert_eq!(path.len(), 51);
        for w in path.windows(2) {
            assert!(Metric::L2.dist(&w[0], &w[1]) <= 0.2 + 1e-12);
        }
        let bad = vec![cfg(&[5.0, 5.0]), cfg(&[1.0, 1.0])];
        assert!(t.add_node(0, cfg(&[1.0, 1.0]), 1.0, bad).is_err());
        let ok = straight_edge(t.root(), &cfg(&[1.0, 1.0]), 3);
        assert!(t.add_node(99, cfg(&[1.0, 1.0]), 1.0, ok).is_err());
        assert!(t.path_to_root(99).is_err());
    }

    fn random_tree(rng: &mut SampleRng, n: usize, metric: Metric) -> BallTree {
        let bounds = Bounds::new(vec![-10.0, -10.0, -10.0], vec![10.0, 10.0, 10.0]).unwrap();
        let root = rng.sample_uniform(&bounds);
        let mut t = BallTree::new(root, 0.0, metric, RadiusMode::Exact).unwrap();
        for _ in 1..n {
            let parent = (rng.unit() * t.len() as f64) as usize;
            let c = rng.sample_uniform(&bounds);
            // quantized radii provoke ties
            let r = (rng.unit() * 4.0).floor();
            let edge = vec![t.node(parent).center.clone(), c.clone()];
            t.add_node(parent, c, r, edge).unwrap();
        }
        t
    }

    #[test]
    fn nearest_volume_matches_linear_scan() {
        let mut rng = SampleRng::new(1234);
        let bounds = Bounds::new(vec![-12.0; 3], vec![12.0; 3]).unwrap();
        for n in [1, 2, 10, 200, 1000] {
            for metric in [Metric::L2, Metric::Linf] {
                let t = random_tree(&mut rng, n, metric);
                for _ in 0..50 {
                    let x = rng.sample_uniform(&bounds);
                    let scores: Vec<f64> = t
                        .nodes()
                        .iter()
                        .map(|n| metric.dist(&x, &n.center) - n.radius)
                        .collect();
                    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
                    let first = scores.iter().position(|s| *s == min).unwrap();
                    assert_eq!(t.nearest_volume(&x), (first, min));
                    let any = t.nodes().iter().any(|n| metric.dist(&x, &n.center) < n.radius);
                    assert_eq!(t.inside(&x), any);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn trims_never_grow_or_pass_floor(
            r0 in 0.5f64..10.0,
            delta in 0.0f64..0.5,
            dists in proptest::collection::vec(0.0f64..12.0, 1..30),
        ) {
            let mut t = BallTree::new(cfg(&[0.0]), r0, Metric::L2, inexact(delta)).unwrap();
            let mut prev = r0;
            for d in dists {
                let r = t.trim(0, d, delta);
                prop_assert!(r <= prev);
                prop_assert!(r >= delta);
                if delta == 0.0 {
                    prop_assert!(d >= r);
                }
                prev = r;
            }
        }
    }
}
