//! Builders for the bundled scenarios. The JSON files under `scenarios/` are
//! generated from these (see the `gen_scenarios` example).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::{BoundsSpec, EnvironmentSpec, ParamOverrides, ScenarioSpec};
use crate::geom::Circle;
use crate::geom::Vec2;

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<[f64; 2]> {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
}

fn bounds(lower: &[f64], upper: &[f64]) -> BoundsSpec {
    BoundsSpec {
        lower: lower.to_vec(),
        upper: upper.to_vec(),
    }
}

/// Point robot in an empty 10 × 10 square.
pub fn empty_world() -> ScenarioSpec {
    ScenarioSpec {
        name: "empty".into(),
        environment: EnvironmentSpec::PolygonWorld { obstacles: vec![] },
        bounds: bounds(&[0.0, 0.0], &[10.0, 10.0]),
        start: vec![1.0, 1.0],
        goal: vec![9.0, 9.0],
        params: ParamOverrides::default(),
    }
}

/// Point robot; a wall across the square with a 1-unit gap.
pub fn gap_wall() -> ScenarioSpec {
    ScenarioSpec {
        name: "gap_wall".into(),
        environment: EnvironmentSpec::PolygonWorld {
            obstacles: vec![rect(4.5, 0.0, 5.5, 4.5), rect(4.5, 5.5, 5.5, 10.0)],
        },
        bounds: bounds(&[0.0, 0.0], &[10.0, 10.0]),
        start: vec![1.0, 5.0],
        goal: vec![9.0, 5.0],
        params: ParamOverrides::default(),
    }
}

/// Point robot; a straight corridor of `width` between two open halls, with
/// start and goal in opposite corners.
pub fn corridor(width: f64) -> ScenarioSpec {
    let h = width / 2.0;
    ScenarioSpec {
        name: format!("corridor_w{width}"),
        environment: EnvironmentSpec::PolygonWorld {
            obstacles: vec![rect(6.0, 0.0, 14.0, 5.0 - h), rect(6.0, 5.0 + h, 14.0, 10.0)],
        },
        bounds: bounds(&[0.0, 0.0], &[20.0, 10.0]),
        start: vec![2.0, 1.0],
        goal: vec![18.0, 9.0],
        params: ParamOverrides::default(),
    }
}

/// Rectangular 2 × 1 robot (x, y, θ) in a 20 × 20 walled room whose only exit
/// is a tunnel of `tunnel_width` through the right wall. The sampling region
/// ends at the outer faces of the room walls except on the right, where an
/// open yard holds the goal.
pub fn bug_trap(tunnel_width: f64) -> ScenarioSpec {
    let h = tunnel_width / 2.0;
    let t = 1.0;
    let obstacles = vec![
        // room walls, opening on the right at |y| <= h
        rect(-11.0, -11.0, 11.0, -10.0),
        rect(-11.0, 10.0, 11.0, 11.0),
        rect(-11.0, -10.0, -10.0, 10.0),
        rect(10.0, -10.0, 11.0, -h),
        rect(10.0, h, 11.0, 10.0),
        // tunnel lips reaching into the room
        rect(4.0, h, 10.0, h + t),
        rect(4.0, -h - t, 10.0, -h),
    ];
    ScenarioSpec {
        name: "bugtrap".into(),
        environment: EnvironmentSpec::RigidRectangle {
            half_extents: [1.0, 0.5],
            obstacles,
        },
        bounds: bounds(&[-11.0, -11.0, -PI], &[25.0, 11.0, PI]),
        start: vec![-5.0, 0.0, 0.0],
        goal: vec![18.0, 5.0, PI / 2.0],
        params: ParamOverrides {
            resolution: Some(0.05),
            delta: Some(0.1),
            ..Default::default()
        },
    }
}

/// Ten unit links on a fixed base; the arm has to swing from one side of a
/// post to the other, threading past a pair of discs.
pub fn arm10() -> ScenarioSpec {
    let n = 10;
    let mut start = vec![0.0; n];
    start[0] = -PI / 2.0 + 0.3;
    let mut goal = vec![0.0; n];
    goal[0] = PI / 2.0 - 0.3;
    ScenarioSpec {
        name: "arm10".into(),
        environment: EnvironmentSpec::PlanarArm {
            base: [0.0, 0.0],
            link_lengths: vec![1.0; n],
            polygons: vec![rect(3.0, -0.5, 11.0, 0.5)],
            circles: vec![
                Circle {
                    center: Vec2::new(-5.0, 5.0),
                    radius: 1.5,
                },
                Circle {
                    center: Vec2::new(-5.0, -5.0),
                    radius: 1.5,
                },
            ],
        },
        bounds: bounds(&vec![-PI; n], &vec![PI; n]),
        start,
        goal,
        params: ParamOverrides::default(),
    }
}

/// Synthetic city map: a grid of blocks separated by streets, with a few
/// parks and scattered debris. Fully determined by `seed`.
pub fn urban_rows(seed: u64) -> Vec<String> {
    let size = 160usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occ = vec![vec![false; size]; size];
    let block = 20usize;
    let street = 6usize;
    let mut by = 0;
    while by < size {
        let mut bx = 0;
        while bx < size {
            let park = rng.gen::<f64>() < 0.2;
            let x0 = bx + street / 2;
            let y0 = by + street / 2;
            let x1 = (bx + block - street / 2).min(size);
            let y1 = (by + block - street / 2).min(size);
            if !park {
                // a building footprint, sometimes split by an alley
                let alley = rng.gen::<f64>() < 0.4;
                let ax = x0 + rng.gen_range(3..(x1 - x0 - 3).max(4));
                for row in occ.iter_mut().take(y1).skip(y0) {
                    for (x, cell) in row.iter_mut().enumerate().take(x1).skip(x0) {
                        if !(alley && x >= ax && x < ax + 2) {
                            *cell = true;
                        }
                    }
                }
            }
            bx += block;
        }
        by += block;
    }
    for _ in 0..120 {
        let x = rng.gen_range(0..size);
        let y = rng.gen_range(0..size);
        occ[y][x] = true;
    }
    // keep the start and goal corners clear
    for (cx, cy) in [(2usize, 2usize), (size - 3, size - 3)] {
        for row in occ.iter_mut().take(cy + 3).skip(cy - 2) {
            for cell in row.iter_mut().take(cx + 3).skip(cx - 2) {
                *cell = false;
            }
        }
    }
    // row 0 is the top of the map
    occ.iter()
        .rev()
        .map(|row| row.iter().map(|&o| if o { '#' } else { '.' }).collect())
        .collect()
}

/// Point robot on the synthetic city map, 0.5 m cells, corner to corner.
pub fn urban() -> ScenarioSpec {
    let cell = 0.5;
    let size = 160.0 * cell;
    ScenarioSpec {
        name: "urban".into(),
        environment: EnvironmentSpec::OccupancyGrid {
            cell_size: cell,
            origin: [0.0, 0.0],
            rows: Some(urban_rows(11)),
            pgm: None,
        },
        bounds: bounds(&[0.0, 0.0], &[size, size]),
        start: vec![1.25, 1.25],
        goal: vec![size - 1.25, size - 1.25],
        params: ParamOverrides::default(),
    }
}

/// Every bundled scenario with its file stem.
pub fn bundled() -> Vec<(&'static str, ScenarioSpec)> {
    vec![
        ("empty", empty_world()),
        ("gap_wall", gap_wall()),
        ("corridor", corridor(1.0)),
        ("bugtrap", bug_trap(1.5)),
        ("arm10", arm10()),
        ("urban", urban()),
    ]
}
