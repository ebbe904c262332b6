//! Sampling-based motion planning with volumetric trees.
//!
//! The Ball Tree planners grow two trees whose nodes are balls of
//! (approximately) free configuration space. Samples that land inside a ball
//! are rejected, which pushes exploration toward obstacle boundaries and
//! narrow passages. An RRT-Connect baseline shares the same machinery.

pub mod bench;
pub mod cspace;
pub mod env;
mod error;
pub mod geom;
pub mod planner;
pub mod tree;

pub use cspace::{distance, interpolate, sample_uniform, Bounds, Config, Metric, SampleRng};
pub use env::{Environment, SegmentResult, SegmentStatus, World};
pub use error::{Error, Result};
pub use planner::{
    ball_tree_plan, extract_path, new_state, plan, rrt_connect_plan, Bridge, ExtendStatus, Extension, NewState,
    Outcome, Overlap, PlanObserver, PlanResult, PlanRun, Planner, PlannerParams, TrimEvent, Variant,
};
pub use tree::{BallNode, BallTree, RadiusMode};
