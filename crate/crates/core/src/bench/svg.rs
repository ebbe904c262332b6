//! SVG rendering of scenarios, trees and paths.
//!
//! Point-robot worlds are drawn as they are. The rectangle world shows the
//! x-y disc of each ball and the robot body at start and goal. The arm world
//! shows the end-effector position of every node and the arm at start and
//! goal. Projected views are labeled as such.

use std::fmt::Write;

use crate::cspace::{Config, Metric};
use crate::env::World;
use crate::error::{Error, Result};
use crate::geom::{Polygon, Vec2};
use crate::tree::TreeSnapshot;

use super::scenario::Scenario;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    /// Width of the drawing in pixels; height follows the aspect ratio.
    pub width_px: f64,
    pub balls: bool,
    pub edges: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width_px: 800.0,
            balls: true,
            edges: true,
        }
    }
}

const TREE_COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

struct View {
    min: Vec2,
    max: Vec2,
    scale: f64,
}

impl View {
    fn x(&self, x: f64) -> f64 {
        (x - self.min.x) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        (self.max.y - y) * self.scale
    }

    fn len(&self, l: f64) -> f64 {
        l * self.scale
    }
}

/// Fixed-precision number formatting keeps output byte-stable.
fn n(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn polygon(out: &mut String, view: &View, p: &Polygon, style: &str) {
    let pts: Vec<String> = p
        .vertices()
        .iter()
        .map(|v| format!("{},{}", n(view.x(v.x)), n(view.y(v.y))))
        .collect();
    let _ = writeln!(out, r#"<polygon points="{}" {style}/>"#, pts.join(" "));
}

fn polyline(out: &mut String, view: &View, pts: &[Vec2], style: &str) {
    let pts: Vec<String> = pts
        .iter()
        .map(|v| format!("{},{}", n(view.x(v.x)), n(view.y(v.y))))
        .collect();
    let _ = writeln!(out, r#"<polyline points="{}" fill="none" {style}/>"#, pts.join(" "));
}

fn marker(out: &mut String, view: &View, p: Vec2, color: &str, label: &str) {
    let _ = writeln!(
        out,
        r#"<circle class="{label}" cx="{}" cy="{}" r="5" fill="{color}" stroke="black"/>"#,
        n(view.x(p.x)),
        n(view.y(p.y))
    );
}

/// Maps a configuration to the drawing plane.
fn project(world: &World, q: &[f64]) -> Vec2 {
    match world {
        World::Arm(arm) => arm.end_effector(q),
        _ => Vec2::new(q[0], q[1]),
    }
}

/// Renders `scenario` with `trees` (start tree first) and an optional path.
pub fn render_svg(
    scenario: &Scenario,
    trees: &[&TreeSnapshot],
    metric: Metric,
    path: Option<&[Config]>,
    options: &RenderOptions,
) -> Result<String> {
    let env = &scenario.env;
    let world = env.world();
    let (min, max, projected) = match world {
        World::Polygon(_) | World::Grid(_) => {
            let b = env.bounds();
            (Vec2::new(b.lower()[0], b.lower()[1]), Vec2::new(b.upper()[0], b.upper()[1]), false)
        }
        World::Rectangle(_) => {
            let b = env.bounds();
            (Vec2::new(b.lower()[0], b.lower()[1]), Vec2::new(b.upper()[0], b.upper()[1]), true)
        }
        World::Arm(arm) => {
            let r = arm.reach() * 1.05;
            (arm.base() - Vec2::new(r, r), arm.base() + Vec2::new(r, r), true)
        }
        World::Custom(_) => {
            return Err(Error::Unsupported(
                "custom collision predicates have no drawable projection".into(),
            ))
        }
    };
    let span = max - min;
    let view = View {
        min,
        max,
        scale: options.width_px / span.x,
    };
    let width = options.width_px;
    let height = view.len(span.y);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        n(width),
        n(height),
        n(width),
        n(height)
    );
    let _ = writeln!(out, "<title>{}</title>", scenario.name());
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // obstacles
    let _ = writeln!(out, r##"<g class="obstacles" fill="#555" stroke="none">"##);
    match world {
        World::Polygon(w) => w.obstacles().iter().for_each(|p| polygon(&mut out, &view, p, "")),
        World::Rectangle(w) => w.obstacles().iter().for_each(|p| polygon(&mut out, &view, p, "")),
        World::Arm(arm) => {
            arm.polygons().iter().for_each(|p| polygon(&mut out, &view, p, ""));
            for c in arm.circles() {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                    n(view.x(c.center.x)),
                    n(view.y(c.center.y)),
                    n(view.len(c.radius))
                );
            }
        }
        World::Grid(g) => {
            let cs = g.cell_size();
            let o = g.origin();
            for j in 0..g.height() {
                let mut i = 0;
                while i < g.width() {
                    if !g.is_occupied(i, j) {
                        i += 1;
                        continue;
                    }
                    let start = i;
                    while i < g.width() && g.is_occupied(i, j) {
                        i += 1;
                    }
                    let x0 = o.x + start as f64 * cs;
                    let y1 = o.y + (j + 1) as f64 * cs;
                    let _ = writeln!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                        n(view.x(x0)),
                        n(view.y(y1)),
                        n(view.len((i - start) as f64 * cs)),
                        n(view.len(cs))
                    );
                }
            }
        }
        World::Custom(_) => unreachable!(),
    }
    let _ = writeln!(out, "</g>");

    let draw_balls = options.balls && !matches!(world, World::Arm(_));
    for (t, tree) in trees.iter().enumerate() {
        let color = TREE_COLORS[t % 2];
        if draw_balls {
            let _ = writeln!(
                out,
                r#"<g class="balls" fill="{color}" fill-opacity="0.08" stroke="{color}" stroke-opacity="0.5" stroke-width="0.5">"#
            );
            for node in &tree.nodes {
                if node.radius <= 0.0 {
                    continue;
                }
                let c = project(world, &node.center);
                match metric {
                    Metric::L2 => {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                            n(view.x(c.x)),
                            n(view.y(c.y)),
                            n(view.len(node.radius))
                        );
                    }
                    Metric::Linf => {
                        let _ = writeln!(
                            out,
                            r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                            n(view.x(c.x - node.radius)),
                            n(view.y(c.y + node.radius)),
                            n(view.len(2.0 * node.radius)),
                            n(view.len(2.0 * node.radius))
                        );
                    }
                }
            }
            let _ = writeln!(out, "</g>");
        }
        if options.edges {
            let _ = writeln!(out, r#"<g class="edges" stroke="{color}" stroke-width="1">"#);
            for node in &tree.nodes {
                if let Some(p) = node.parent {
                    let a = project(world, &tree.nodes[p].center);
                    let b = project(world, &node.center);
                    let _ = writeln!(
                        out,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                        n(view.x(a.x)),
                        n(view.y(a.y)),
                        n(view.x(b.x)),
                        n(view.y(b.y))
                    );
                }
            }
            let _ = writeln!(out, "</g>");
        }
        if matches!(world, World::Arm(_)) {
            let _ = writeln!(out, r#"<g class="nodes" fill="{color}">"#);
            for node in &tree.nodes {
                let c = project(world, &node.center);
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="1.5"/>"#, n(view.x(c.x)), n(view.y(c.y)));
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if let Some(path) = path {
        let pts: Vec<Vec2> = path.iter().map(|q| project(world, q)).collect();
        polyline(
            &mut out,
            &view,
            &pts,
            r##"class="path" stroke="#2ca02c" stroke-width="3""##,
        );
    }

    // robot bodies at the query
    for (q, color) in [(&scenario.start, "#1f77b4"), (&scenario.goal, "#d62728")] {
        match world {
            World::Rectangle(w) => polygon(
                &mut out,
                &view,
                &w.body(q),
                &format!(r#"fill="none" stroke="{color}" stroke-width="2""#),
            ),
            World::Arm(arm) => polyline(
                &mut out,
                &view,
                &arm.joints(q),
                &format!(r#"stroke="{color}" stroke-width="2""#),
            ),
            _ => {}
        }
    }
    marker(&mut out, &view, project(world, &scenario.start), "#1f77b4", "start");
    marker(&mut out, &view, project(world, &scenario.goal), "#d62728", "goal");

    if projected {
        let text = match world {
            World::Arm(_) => "projection: end-effector positions",
            _ => "projection: x-y slice of each ball",
        };
        let _ = writeln!(out, r#"<text x="8" y="18" font-family="sans-serif" font-size="14">{text}</text>"#);
    }
    out.push_str("</svg>\n");
    Ok(out)
}
