//! Bidirectional planners: RRT-Connect and the exact and inexact Ball Trees.
//!
//! All three share one loop. A sample is drawn, rejected if it falls inside a
//! ball of either tree (ball variants only), and used to extend tree A. On
//! progress, tree B tries to connect to the new node, then the trees swap
//! roles. The inexact variant additionally checks every new ball against the
//! other tree and either bridges the trees or trims the offending balls.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cspace::{Bounds, Config, Metric, SampleRng};
use crate::env::{Environment, SegmentStatus};
use crate::error::{invalid, Error, Result};
use crate::tree::{BallTree, RadiusMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "rrt")]
    RrtConnect,
    #[serde(rename = "exact")]
    ExactBall,
    #[serde(rename = "inexact")]
    InexactBall,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::RrtConnect, Variant::ExactBall, Variant::InexactBall];

    /// Short name used on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Variant::RrtConnect => "rrt",
            Variant::ExactBall => "exact",
            Variant::InexactBall => "inexact",
        }
    }

    /// Display name used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            Variant::RrtConnect => "RRT-Connect",
            Variant::ExactBall => "Exact Ball Tree",
            Variant::InexactBall => "Inexact Ball Tree",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rrt" | "rrt-connect" => Ok(Variant::RrtConnect),
            "exact" => Ok(Variant::ExactBall),
            "inexact" => Ok(Variant::InexactBall),
            other => Err(invalid(format!("unknown planner variant {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub variant: Variant,
    pub metric: Metric,
    /// Probe spacing for segment validation.
    pub resolution: f64,
    /// Initial ball radius for the inexact variant.
    pub r0: f64,
    /// Permitted obstacle penetration of inexact balls; also the radius floor.
    pub delta: f64,
    /// Per-extend step cap for RRT-Connect.
    pub rrt_step: f64,
    /// Sample budget, counting rejected samples.
    pub max_iterations: usize,
    /// Wall-clock budget in seconds.
    pub time_budget: f64,
    pub seed: u64,
}

impl PlannerParams {
    /// Defaults scaled to the bounds diagonal: r0 = 25 %, resolution = 0.5 %,
    /// δ = resolution, RRT step = 5 %.
    pub fn defaults(variant: Variant, bounds: &Bounds) -> Self {
        let diag = bounds.diagonal();
        let resolution = 0.005 * diag;
        Self {
            variant,
            metric: Metric::L2,
            resolution,
            r0: 0.25 * diag,
            delta: resolution,
            rrt_step: 0.05 * diag,
            max_iterations: 100_000,
            time_budget: 120.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive and finite")))
            }
        };
        positive(self.resolution, "resolution")?;
        positive(self.rrt_step, "rrt_step")?;
        positive(self.r0, "r0")?;
        if !(self.time_budget > 0.0) {
            return Err(invalid("time_budget must be positive"));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta must be non-negative"));
        }
        if self.delta > self.r0 {
            return Err(invalid("delta must not exceed r0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtendStatus {
    Reached,
    Advanced,
    Trapped,
    PlanFound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    IterationLimit,
    TimeLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub outcome: Outcome,
    pub path: Option<Vec<Config>>,
    pub nodes_start: usize,
    pub nodes_goal: usize,
    pub samples_drawn: usize,
    pub samples_rejected: usize,
    pub collision_checks: usize,
    pub trims: usize,
    pub iterations: usize,
    /// Seconds spent planning.
    pub wall_time: f64,
}

impl PlanResult {
    pub fn total_nodes(&self) -> usize {
        self.nodes_start + self.nodes_goal
    }

    pub fn solved(&self) -> bool {
        self.outcome == Outcome::Solved
    }

    /// Equality ignoring wall time.
    pub fn same_search(&self, other: &PlanResult) -> bool {
        PlanResult {
            wall_time: 0.0,
            ..self.clone()
        } == PlanResult {
            wall_time: 0.0,
            ..other.clone()
        }
    }
}

/// Result of [`new_state`]: how far a straight motion got.
#[derive(Clone, Debug, PartialEq)]
pub struct NewState {
    pub reached: Config,
    pub status: ExtendStatus,
    pub collision_dist: Option<f64>,
    pub collision_point: Option<Config>,
    /// Free probes from the start to `reached`.
    pub polyline: Vec<Config>,
    pub checks: usize,
}

/// Moves from `from` toward `toward`, optionally capped at `cap` (metric
/// length), probing at `resolution`.
///
/// `Reached` means `toward` itself was attained. `Advanced` needs at least one
/// full resolution step of free progress; otherwise the motion is `Trapped`.
pub fn new_state(
    env: &Environment,
    metric: Metric,
    from: &Config,
    toward: &Config,
    resolution: f64,
    cap: Option<f64>,
) -> Result<NewState> {
    let target = match cap {
        Some(cap) => {
            let d = metric.dist(from, toward);
            if d > cap {
                from.lerp(toward, cap / d)
            } else {
                toward.clone()
            }
        }
        None => toward.clone(),
    };
    let seg = env.validate_segment(from, &target, resolution)?;
    let status = if seg.status == SegmentStatus::Free && target == *toward {
        ExtendStatus::Reached
    } else if seg.polyline.len() > 1 && l2(from, &seg.last_free) >= resolution * (1.0 - 1e-9) {
        ExtendStatus::Advanced
    } else {
        ExtendStatus::Trapped
    };
    Ok(NewState {
        reached: seg.last_free,
        status,
        collision_dist: seg.collision_dist,
        collision_point: seg.collision_point,
        polyline: seg.polyline,
        checks: seg.checks,
    })
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    Metric::L2.dist(a, b)
}

/// A validated straight connection between a node of one tree and a node of
/// the other. `polyline` runs from the `a_node` center to the `b_node` center.
#[derive(Clone, Debug, PartialEq)]
pub struct Bridge {
    pub a_node: usize,
    pub b_node: usize,
    pub polyline: Vec<Config>,
    verified: bool,
}

impl Bridge {
    /// An unverified bridge; see [`Bridge::verify`].
    pub fn new(a_node: usize, b_node: usize, polyline: Vec<Config>) -> Self {
        Self {
            a_node,
            b_node,
            polyline,
            verified: false,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Checks every polyline step and endpoint against the trees and the
    /// environment.
    pub fn verify(mut self, env: &Environment, a: &BallTree, b: &BallTree, resolution: f64) -> Result<Self> {
        self.check_endpoints(a, b)?;
        for w in self.polyline.windows(2) {
            let seg = env.validate_segment(&w[0], &w[1], resolution)?;
            if seg.status != SegmentStatus::Free {
                return Err(invalid("bridge polyline is blocked"));
            }
        }
        if env.collides(&self.polyline[0]) {
            return Err(invalid("bridge starts in collision"));
        }
        self.verified = true;
        Ok(self)
    }

    fn check_endpoints(&self, a: &BallTree, b: &BallTree) -> Result<()> {
        if self.a_node >= a.len() || self.b_node >= b.len() {
            return Err(invalid("bridge references a missing node"));
        }
        if self.polyline.first() != Some(&a.node(self.a_node).center)
            || self.polyline.last() != Some(&b.node(self.b_node).center)
        {
            return Err(invalid("bridge endpoints do not match node centers"));
        }
        Ok(())
    }

    fn reversed(mut self) -> Self {
        std::mem::swap(&mut self.a_node, &mut self.b_node);
        self.polyline.reverse();
        self
    }
}

/// Joins the start-tree branch, the bridge and the goal-tree branch into a
/// start→goal path. `bridge.a_node` indexes the start tree.
pub fn extract_path(start_tree: &BallTree, goal_tree: &BallTree, bridge: &Bridge) -> Result<Vec<Config>> {
    if !bridge.verified {
        return Err(invalid("bridge has not been verified"));
    }
    bridge.check_endpoints(start_tree, goal_tree)?;
    let mut path = start_tree.path_to_root(bridge.a_node)?;
    path.extend(bridge.polyline.iter().cloned());
    let mut tail = goal_tree.path_to_root(bridge.b_node)?;
    tail.reverse();
    path.extend(tail);
    path.dedup();
    Ok(path)
}

/// A trim applied during planning.
#[derive(Clone, Debug, PartialEq)]
pub struct TrimEvent {
    /// 0 for the start tree, 1 for the goal tree.
    pub tree: usize,
    pub node: usize,
    pub center: Config,
    /// The colliding probe that triggered the trim.
    pub probe: Config,
    pub distance: f64,
    pub old_radius: f64,
    pub new_radius: f64,
}

/// Hooks for instrumenting a planning run.
pub trait PlanObserver {
    /// Called for every drawn sample before it is used or rejected.
    /// `trees` is `[start, goal]`.
    fn on_sample(&mut self, _sample: &Config, _rejected: bool, _trees: [&BallTree; 2]) {}

    fn on_trim(&mut self, _event: &TrimEvent) {}
}

/// Outcome of one extend call.
#[derive(Clone, Debug, PartialEq)]
pub struct Extension {
    pub status: ExtendStatus,
    pub node: Option<usize>,
    /// Set with `PlanFound`; oriented from the extended tree to the other.
    pub bridge: Option<Bridge>,
}

impl Extension {
    fn trapped() -> Self {
        Self {
            status: ExtendStatus::Trapped,
            node: None,
            bridge: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Overlap {
    PlanFound(Bridge),
    NoOverlap,
}

/// A finished run with both trees.
#[derive(Clone, Debug)]
pub struct PlanRun {
    pub result: PlanResult,
    pub start_tree: BallTree,
    pub goal_tree: BallTree,
}

#[derive(Default)]
struct Counters {
    collision_checks: usize,
    trims: usize,
}

/// Planning context: environment, parameters, counters and an optional
/// observer. The per-variant operations are exposed for testing and reuse.
pub struct Planner<'a> {
    env: &'a Environment,
    params: PlannerParams,
    counters: Counters,
    observer: Option<&'a mut dyn PlanObserver>,
}

impl<'a> Planner<'a> {
    pub fn new(env: &'a Environment, params: PlannerParams) -> Result<Self> {
        params.validate()?;
        if params.variant == Variant::ExactBall && !env.has_clearance() {
            return Err(Error::Unsupported(format!(
                "the exact ball tree needs a clearance oracle, which the {} world does not provide",
                env.world().kind_name()
            )));
        }
        Ok(Self {
            env,
            params,
            counters: Counters::default(),
            observer: None,
        })
    }

    pub fn with_observer(mut self, observer: &'a mut dyn PlanObserver) -> Self {
        self.observer = Some(observer);
        self
    }

    pub fn params(&self) -> &PlannerParams {
        &self.params
    }

    pub fn collision_checks(&self) -> usize {
        self.counters.collision_checks
    }

    /// Creates a single-node tree of the kind this planner grows.
    pub fn init_tree(&mut self, root: Config) -> Result<BallTree> {
        let metric = self.params.metric;
        match self.params.variant {
            Variant::RrtConnect => BallTree::new(root, 0.0, metric, RadiusMode::Point),
            Variant::ExactBall => {
                let r = self.exact_radius(&root)?;
                BallTree::new(root, r, metric, RadiusMode::Exact)
            }
            Variant::InexactBall => BallTree::new(
                root,
                self.params.r0,
                metric,
                RadiusMode::Inexact {
                    delta: self.params.delta,
                },
            ),
        }
    }

    /// Certified radius in the planner metric at a free configuration.
    fn exact_radius(&self, q: &Config) -> Result<f64> {
        let clearance = self.env.clearance(q)?.ok_or_else(|| {
            Error::Unsupported(format!(
                "no clearance oracle for the {} world",
                self.env.world().kind_name()
            ))
        })?;
        Ok(clearance / self.params.metric.l2_containment_factor(q.dim()))
    }

    pub fn new_state(&mut self, from: &Config, toward: &Config, cap: Option<f64>) -> Result<NewState> {
        let ns = new_state(self.env, self.params.metric, from, toward, self.params.resolution, cap)?;
        self.counters.collision_checks += ns.checks;
        Ok(ns)
    }

    /// Applies a trim for a colliding `probe` and reports whether the radius changed.
    fn trim(&mut self, tree: &mut BallTree, tree_id: usize, idx: usize, probe: &Config) -> bool {
        let center = tree.node(idx).center.clone();
        let distance = self.params.metric.dist(&center, probe);
        let old_radius = tree.node(idx).radius;
        let new_radius = tree.trim(idx, distance, self.params.delta);
        if new_radius == old_radius {
            return false;
        }
        self.counters.trims += 1;
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.on_trim(&TrimEvent {
                tree: tree_id,
                node: idx,
                center,
                probe: probe.clone(),
                distance,
                old_radius,
                new_radius,
            });
        }
        true
    }

    /// Variant-specific extend. `ids` are the start/goal roles of
    /// `(tree, other)`, used only for trim reporting.
    pub fn extend(&mut self, tree: &mut BallTree, x: &Config, other: &mut BallTree, ids: (usize, usize)) -> Result<Extension> {
        match self.params.variant {
            Variant::RrtConnect => self.rrt_extend(tree, x),
            Variant::ExactBall => self.exact_extend(tree, x),
            Variant::InexactBall => self.inexact_extend(tree, x, other, ids),
        }
    }

    pub fn rrt_extend(&mut self, tree: &mut BallTree, x: &Config) -> Result<Extension> {
        let (near, _) = tree.nearest_volume(x);
        let from = tree.node(near).center.clone();
        let ns = self.new_state(&from, x, Some(self.params.rrt_step))?;
        self.grow(tree, near, ns, |_, _| Ok(0.0))
    }

    pub fn exact_extend(&mut self, tree: &mut BallTree, x: &Config) -> Result<Extension> {
        let (near, _) = tree.nearest_volume(x);
        let from = tree.node(near).center.clone();
        let ns = self.new_state(&from, x, None)?;
        self.grow(tree, near, ns, |planner, q| planner.exact_radius(q))
    }

    fn grow(
        &mut self,
        tree: &mut BallTree,
        near: usize,
        ns: NewState,
        radius: impl FnOnce(&Self, &Config) -> Result<f64>,
    ) -> Result<Extension> {
        if ns.status == ExtendStatus::Trapped || tree.has_child_at(near, &ns.reached) {
            return Ok(Extension::trapped());
        }
        let r = radius(self, &ns.reached)?;
        let idx = tree.add_node(near, ns.reached, r, ns.polyline)?;
        Ok(Extension {
            status: ns.status,
            node: Some(idx),
            bridge: None,
        })
    }

    pub fn inexact_extend(
        &mut self,
        tree: &mut BallTree,
        x: &Config,
        other: &mut BallTree,
        ids: (usize, usize),
    ) -> Result<Extension> {
        let (near, _) = tree.nearest_volume(x);
        let from = tree.node(near).center.clone();
        let ns = self.new_state(&from, x, None)?;
        if let Some(probe) = &ns.collision_point {
            self.trim(tree, ids.0, near, probe);
        }
        // Repeating an expansion that already exists would add a duplicate
        // ball and let `connect` spin without progress.
        if ns.status == ExtendStatus::Trapped || tree.has_child_at(near, &ns.reached) {
            return Ok(Extension::trapped());
        }
        let status = ns.status;
        let idx = tree.add_node(near, ns.reached, self.params.r0, ns.polyline)?;
        if let Overlap::PlanFound(bridge) = self.check_overlap(idx, tree, other, ids)? {
            return Ok(Extension {
                status: ExtendStatus::PlanFound,
                node: Some(idx),
                bridge: Some(bridge),
            });
        }
        Ok(Extension {
            status,
            node: Some(idx),
            bridge: None,
        })
    }

    /// Resolves overlap between the ball of `new_node` and the other tree.
    ///
    /// While the new ball intersects some ball of `other`, tries a straight
    /// connection between the two centers. A free connection bridges the
    /// trees; a blocked one trims each ball that contains the colliding probe.
    /// Stops early when a blocked attempt changes no radius, which can only
    /// happen at the δ floor.
    pub fn check_overlap(
        &mut self,
        new_node: usize,
        tree: &mut BallTree,
        other: &mut BallTree,
        ids: (usize, usize),
    ) -> Result<Overlap> {
        if new_node >= tree.len() {
            return Err(invalid(format!("node {new_node} is not in the tree")));
        }
        loop {
            let center = tree.node(new_node).center.clone();
            let radius = tree.node(new_node).radius;
            let (close, mindist) = other.nearest_volume(&center);
            if mindist >= radius {
                return Ok(Overlap::NoOverlap);
            }
            let target = other.node(close).center.clone();
            let ns = self.new_state(&center, &target, None)?;
            if ns.status == ExtendStatus::Reached {
                return Ok(Overlap::PlanFound(Bridge {
                    a_node: new_node,
                    b_node: close,
                    polyline: ns.polyline,
                    verified: true,
                }));
            }
            let probe = ns
                .collision_point
                .expect("a blocked connection reports its colliding probe");
            let mut changed = self.trim(tree, ids.0, new_node, &probe);
            changed |= self.trim(other, ids.1, close, &probe);
            if !changed {
                return Ok(Overlap::NoOverlap);
            }
        }
    }

    /// Extends `tree` toward `x` until the status is no longer `Advanced`, or
    /// until an advance fails to end strictly closer to `x` than every earlier
    /// advance of this call.
    pub fn connect(&mut self, tree: &mut BallTree, x: &Config, other: &mut BallTree, ids: (usize, usize)) -> Result<Extension> {
        let mut best = f64::INFINITY;
        loop {
            let ext = self.extend(tree, x, other, ids)?;
            if ext.status != ExtendStatus::Advanced {
                return Ok(ext);
            }
            let node = ext.node.expect("an advance adds a node");
            let d = self.params.metric.dist(&tree.node(node).center, x);
            if d >= best {
                return Ok(ext);
            }
            best = d;
        }
    }

    /// Plans from `start` to `goal`.
    pub fn run(mut self, start: &Config, goal: &Config) -> Result<PlanRun> {
        let clock = Instant::now();
        let env = self.env;
        for (name, q) in [("start", start), ("goal", goal)] {
            if q.dim() != env.dim() {
                return Err(invalid(format!("{name} has dimension {}, expected {}", q.dim(), env.dim())));
            }
            self.counters.collision_checks += 1;
            if env.collides(q) {
                return Err(invalid(format!("{name} configuration is in collision or out of bounds")));
            }
        }
        let mut trees = [self.init_tree(start.clone())?, self.init_tree(goal.clone())?];
        let mut rng = SampleRng::new(self.params.seed);
        let mut samples_drawn = 0;
        let mut samples_rejected = 0;
        let mut iterations = 0;
        let mut bridge: Option<Bridge> = None;
        let outcome;

        if start == goal {
            bridge = Some(Bridge {
                a_node: 0,
                b_node: 0,
                polyline: vec![start.clone()],
                verified: true,
            });
        } else if self.params.variant == Variant::InexactBall {
            let [s, g] = &mut trees;
            if let Overlap::PlanFound(b) = self.check_overlap(0, s, g, (0, 1))? {
                bridge = Some(b);
            }
        }

        // `a` is the role (0 = start, 1 = goal) of the tree being extended.
        let mut a = 0usize;
        let use_rejection = self.params.variant != Variant::RrtConnect;
        loop {
            if bridge.is_some() {
                outcome = Outcome::Solved;
                break;
            }
            if iterations >= self.params.max_iterations {
                outcome = Outcome::IterationLimit;
                break;
            }
            if clock.elapsed().as_secs_f64() > self.params.time_budget {
                outcome = Outcome::TimeLimit;
                break;
            }
            iterations += 1;
            let x = rng.sample_uniform(env.bounds());
            samples_drawn += 1;
            let rejected = use_rejection && (trees[0].inside(&x) || trees[1].inside(&x));
            if let Some(obs) = self.observer.as_deref_mut() {
                obs.on_sample(&x, rejected, [&trees[0], &trees[1]]);
            }
            if rejected {
                samples_rejected += 1;
                continue;
            }
            let b = 1 - a;
            let (ta, tb) = split_pair(&mut trees, a);
            let ext = self.extend(ta, &x, tb, (a, b))?;
            match ext.status {
                ExtendStatus::PlanFound => {
                    bridge = ext.bridge.map(|br| orient(br, a));
                }
                ExtendStatus::Reached | ExtendStatus::Advanced => {
                    let v = ext.node.expect("progress adds a node");
                    let target = ta.node(v).center.clone();
                    let con = self.connect(tb, &target, ta, (b, a))?;
                    match con.status {
                        ExtendStatus::Reached => {
                            let w = con.node.expect("reaching adds a node");
                            let br = Bridge {
                                a_node: v,
                                b_node: w,
                                polyline: vec![target],
                                verified: true,
                            };
                            bridge = Some(orient(br, a));
                        }
                        ExtendStatus::PlanFound => {
                            bridge = con.bridge.map(|br| orient(br, b));
                        }
                        _ => {}
                    }
                }
                ExtendStatus::Trapped => {}
            }
            if bridge.is_none() {
                a = 1 - a;
            }
        }

        let path = match &bridge {
            Some(br) => Some(extract_path(&trees[0], &trees[1], br)?),
            None => None,
        };
        let [start_tree, goal_tree] = trees;
        let result = PlanResult {
            outcome,
            path,
            nodes_start: start_tree.len(),
            nodes_goal: goal_tree.len(),
            samples_drawn,
            samples_rejected,
            collision_checks: self.counters.collision_checks,
            trims: self.counters.trims,
            iterations,
            wall_time: clock.elapsed().as_secs_f64(),
        };
        Ok(PlanRun {
            result,
            start_tree,
            goal_tree,
        })
    }
}

/// Orients a bridge found while extending the tree with role `role` so that
/// `a_node` refers to the start tree.
fn orient(bridge: Bridge, role: usize) -> Bridge {
    if role == 0 {
        bridge
    } else {
        bridge.reversed()
    }
}

fn split_pair(trees: &mut [BallTree; 2], a: usize) -> (&mut BallTree, &mut BallTree) {
    let [t0, t1] = trees;
    if a == 0 {
        (t0, t1)
    } else {
        (t1, t0)
    }
}

/// Runs the planner selected by `params.variant`.
pub fn plan(env: &Environment, start: &Config, goal: &Config, params: &PlannerParams) -> Result<PlanResult> {
    Ok(Planner::new(env, params.clone())?.run(start, goal)?.result)
}

/// Ball Tree planning; `params.variant` must be a ball variant.
pub fn ball_tree_plan(env: &Environment, start: &Config, goal: &Config, params: &PlannerParams) -> Result<PlanResult> {
    if params.variant == Variant::RrtConnect {
        return Err(invalid("ball_tree_plan needs the exact or inexact variant"));
    }
    plan(env, start, goal, params)
}

pub fn rrt_connect_plan(env: &Environment, start: &Config, goal: &Config, params: &PlannerParams) -> Result<PlanResult> {
    let params = PlannerParams {
        variant: Variant::RrtConnect,
        ..params.clone()
    };
    plan(env, start, goal, &params)
}
