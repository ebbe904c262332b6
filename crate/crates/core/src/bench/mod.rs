//! Scenario files, seeded multi-trial runs, summary statistics and SVG output.

pub mod catalog;
mod dump;
mod scenario;
mod stats;
mod svg;
mod trials;

pub use dump::TreeDump;
pub use scenario::{
    load_scenario, parse_scenario, save_spec, BoundsSpec, EnvironmentSpec, ParamOverrides, Scenario, ScenarioSpec,
};
pub use stats::{emit_results, from_json, summarize, to_csv, to_json, Format, StatsRow, CSV_HEADER};
pub use svg::{render_svg, RenderOptions};
pub use trials::{run_trials, worker_threads, TrialRecord};
