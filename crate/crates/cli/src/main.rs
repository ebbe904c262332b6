use std::path::{Path, PathBuf};
use std::process::ExitCode;

use balltree::bench::{
    emit_results, load_scenario, render_svg, run_trials, summarize, Format, ParamOverrides, RenderOptions, Scenario,
    TreeDump,
};
use balltree::{Error, Metric, Planner, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_UNSOLVED: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;

/// Ball Tree and RRT-Connect motion planners.
#[derive(Parser)]
#[command(name = "balltree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario with one planner.
    Plan {
        scenario: PathBuf,
        /// rrt, exact or inexact.
        #[arg(long, default_value = "inexact")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
        /// Write a drawing of the trees and path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write both trees and the path as JSON.
        #[arg(long)]
        dump_tree: Option<PathBuf>,
    },
    /// Run seeded trials and write summary statistics.
    Bench {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Comma-separated planner variants.
        #[arg(long, value_delimiter = ',', default_value = "rrt,exact,inexact")]
        variants: Vec<Variant>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        /// Trial i uses seed base_seed + i.
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// `off` leaves the time columns empty so output depends only on seeds.
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        timing: Toggle,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Draw a tree dump over its scenario.
    Render {
        dump: PathBuf,
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    /// Initial radius of inexact balls.
    #[arg(long)]
    r0: Option<f64>,
    /// Permitted obstacle penetration of inexact balls.
    #[arg(long)]
    delta: Option<f64>,
    /// Segment validation step.
    #[arg(long)]
    resolution: Option<f64>,
    /// RRT-Connect step cap.
    #[arg(long)]
    rrt_step: Option<f64>,
    /// Sample budget, rejected samples included.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
}

impl ParamArgs {
    fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            metric: self.metric.map(|m| match m {
                MetricArg::L2 => Metric::L2,
                MetricArg::Linf => Metric::Linf,
            }),
            resolution: self.resolution,
            r0: self.r0,
            delta: self.delta,
            rrt_step: self.rrt_step,
            max_iterations: self.max_iter,
            time_budget: self.time_budget,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    L2,
    Linf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        _ => EXIT_INVALID,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn plan(
    scenario: &Path,
    variant: Variant,
    seed: u64,
    params: &ParamArgs,
    svg: Option<&Path>,
    dump_tree: Option<&Path>,
) -> Result<u8, Error> {
    let s = load_scenario(scenario)?;
    let mut p = s.params(variant, &params.overrides());
    p.seed = seed;
    let run = Planner::new(&s.env, p)?.run(&s.start, &s.goal)?;
    let r = &run.result;
    println!("scenario: {}", s.name());
    println!("variant: {}", variant.key());
    println!("seed: {seed}");
    println!("outcome: {:?}", r.outcome);
    println!("nodes: {} ({} start, {} goal)", r.total_nodes(), r.nodes_start, r.nodes_goal);
    println!("iterations: {}", r.iterations);
    println!("samples rejected: {}/{}", r.samples_rejected, r.samples_drawn);
    println!("collision checks: {}", r.collision_checks);
    println!("time_s: {}", r.wall_time);
    if let Some(path) = &r.path {
        println!("path waypoints: {}", path.len());
    }

    let dump = TreeDump::from_run(s.name(), variant, seed, &run);
    if let Some(out) = dump_tree {
        write_file(out, &dump.to_json()?)?;
    }
    if let Some(out) = svg {
        write_file(out, &draw(&s, &dump)?)?;
    }
    Ok(if r.solved() { 0 } else { EXIT_UNSOLVED })
}

fn draw(s: &Scenario, dump: &TreeDump) -> Result<String, Error> {
    render_svg(
        s,
        &[&dump.start_tree, &dump.goal_tree],
        dump.metric,
        dump.path.as_deref(),
        &RenderOptions::default(),
    )
}

#[allow(clippy::too_many_arguments)]
fn bench(
    scenarios: &[PathBuf],
    variants: &[Variant],
    trials: usize,
    base_seed: u64,
    out: &Path,
    format: OutputFormat,
    timing: Toggle,
    params: &ParamArgs,
) -> Result<u8, Error> {
    let loaded = scenarios.iter().map(|p| load_scenario(p)).collect::<Result<Vec<_>, _>>()?;
    let overrides = params.overrides();
    let mut rows = Vec::new();
    for s in &loaded {
        for &v in variants {
            let records = run_trials(s, v, trials, base_seed, &overrides)?;
            let row = summarize(s.name(), &records, timing == Toggle::On)?;
            eprintln!(
                "{} {}: success {} mean nodes {}",
                row.problem,
                row.algorithm,
                row.success_rate,
                row.mean_nodes.map_or("-".into(), |n| n.to_string())
            );
            rows.push(row);
        }
    }
    let format = match format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    emit_results(&rows, format, out)?;
    Ok(0)
}

fn render(dump: &Path, scenario: &Path, out: &Path) -> Result<u8, Error> {
    let s = load_scenario(scenario)?;
    let d = TreeDump::load(dump).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dump.display())))?;
    write_file(out, &draw(&s, &d)?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Plan {
            scenario,
            variant,
            seed,
            params,
            svg,
            dump_tree,
        } => plan(scenario, *variant, *seed, params, svg.as_deref(), dump_tree.as_deref()),
        Command::Bench {
            scenarios,
            variants,
            trials,
            base_seed,
            out,
            format,
            timing,
            params,
        } => bench(scenarios, variants, *trials, *base_seed, out, *format, *timing, params),
        Command::Render { dump, scenario, out } => render(dump, scenario, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
