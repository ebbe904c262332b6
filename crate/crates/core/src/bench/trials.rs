use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{ParamOverrides, Scenario};
use crate::error::{invalid, Result};
use crate::planner::{plan, PlanResult, Planner, Variant};

/// One seeded planner run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub variant: Variant,
    pub result: PlanResult,
}

/// Worker count: `BALLTREE_THREADS` if set and positive, otherwise the
/// number of available cores.
pub fn worker_threads() -> usize {
    std::env::var("BALLTREE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `n_trials` independent plans with seeds `base_seed + i`. Records come
/// back in seed order regardless of how the pool schedules them.
pub fn run_trials(
    scenario: &Scenario,
    variant: Variant,
    n_trials: usize,
    base_seed: u64,
    overrides: &ParamOverrides,
) -> Result<Vec<TrialRecord>> {
    if n_trials == 0 {
        return Err(invalid("n_trials must be at least 1"));
    }
    let params = scenario.params(variant, overrides);
    params.validate()?;
    // capability errors surface once, before fanning out
    Planner::new(&scenario.env, params.clone())?;
    let one = |i: usize| -> Result<TrialRecord> {
        let seed = base_seed.wrapping_add(i as u64);
        let mut p = params.clone();
        p.seed = seed;
        let result = plan(&scenario.env, &scenario.start, &scenario.goal, &p)?;
        Ok(TrialRecord { seed, variant, result })
    };
    let threads = worker_threads().min(n_trials);
    if threads <= 1 {
        return (0..n_trials).map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    pool.install(|| (0..n_trials).into_par_iter().map(one).collect())
}
