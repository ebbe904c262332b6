//! Tree dump files: JSON with both trees (nodes carry center, radius and
//! parent index) and the solution path if one was found.
//!
//! ```json
//! {
//!   "scenario": "empty",
//!   "variant": "inexact",
//!   "seed": 7,
//!   "metric": "l2",
//!   "start_tree": { "nodes": [ { "center": [1.0, 1.0], "radius": 3.5, "parent": null } ] },
//!   "goal_tree": { "nodes": [ ... ] },
//!   "path": [[1.0, 1.0], [9.0, 9.0]]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cspace::{Config, Metric};
use crate::error::Result;
use crate::planner::{PlanRun, Variant};
use crate::tree::TreeSnapshot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDump {
    pub scenario: String,
    pub variant: Variant,
    pub seed: u64,
    pub metric: Metric,
    pub start_tree: TreeSnapshot,
    pub goal_tree: TreeSnapshot,
    pub path: Option<Vec<Config>>,
}

impl TreeDump {
    pub fn from_run(scenario: &str, variant: Variant, seed: u64, run: &PlanRun) -> Self {
        Self {
            scenario: scenario.to_string(),
            variant,
            seed,
            metric: run.start_tree.metric(),
            start_tree: run.start_tree.snapshot(),
            goal_tree: run.goal_tree.snapshot(),
            path: run.result.path.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
