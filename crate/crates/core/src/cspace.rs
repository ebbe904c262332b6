//! Configuration-space primitives: configurations, sampling bounds, metrics
//! and the seeded sample generator.
//!
//! Joint angles are treated as plain bounded reals. There is no wrap-around
//! at ±π, so a straight segment between two configurations is always the
//! segment the collision checker probes.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point in configuration space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Config(Vec<f64>);

impl Config {
    /// Builds a configuration, rejecting non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("coordinate {i} is not finite")));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `self + s * (other - self)` without argument checks. The endpoint
    /// `s == 1` returns an exact copy of `other`.
    pub(crate) fn lerp(&self, other: &[f64], s: f64) -> Config {
        if s >= 1.0 {
            return Config(other.to_vec());
        }
        Config(
            self.0
                .iter()
                .zip(other)
                .map(|(a, b)| a + s * (b - a))
                .collect(),
        )
    }
}

impl Deref for Config {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Config {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Config::new(v)
    }
}

impl From<Config> for Vec<f64> {
    fn from(c: Config) -> Self {
        c.0
    }
}

/// Axis-aligned sampling domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(invalid(format!(
                "bounds dimension mismatch: lower has {}, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(invalid("bounds must have at least one dimension"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("bounds axis {i}: need finite lower < upper")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, q: &[f64]) -> bool {
        q.len() == self.dim()
            && q
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Euclidean length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior point to the nearest face of the box, which
    /// bounds the radius of any ball around `q` that stays inside.
    pub fn distance_to_boundary(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(x, (lo, hi))| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

/// Distance function used for nearest-volume queries and ball radii.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    L2,
    Linf,
}

impl Metric {
    /// Unchecked distance; callers guarantee equal lengths.
    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Linf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Factor `k` such that the metric ball of radius `r / k` fits inside the
    /// Euclidean ball of radius `r` in dimension `dim`.
    pub fn l2_containment_factor(self, dim: usize) -> f64 {
        match self {
            Metric::L2 => 1.0,
            Metric::Linf => (dim as f64).sqrt(),
        }
    }
}

pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(metric.dist(a, b))
}

/// Returns `a + s·(b − a)` for `s ∈ [0, 1]`.
pub fn interpolate(a: &Config, b: &Config, s: f64) -> Result<Config> {
    if a.dim() != b.dim() {
        return Err(invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid(format!("interpolation parameter {s} outside [0, 1]")));
    }
    if s == 0.0 {
        return Ok(a.clone());
    }
    Ok(a.lerp(b, s))
}

/// Seeded uniform sampler.
///
/// Backed by ChaCha8 seeded through `SeedableRng::seed_from_u64`; both the
/// seed expansion and the stream are fixed by the algorithm, so a seed
/// reproduces the same samples on every platform. Each coordinate is drawn
/// from a 53-bit uniform in `[0, 1)` and scaled onto its axis.
#[derive(Clone, Debug)]
pub struct SampleRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    pub fn sample_uniform(&mut self, bounds: &Bounds) -> Config {
        Config(
            bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(lo, hi)| {
                    let u = self.unit();
                    (lo + u * (hi - lo)).min(*hi)
                })
                .collect(),
        )
    }
}

pub fn sample_uniform(rng: &mut SampleRng, bounds: &Bounds) -> Config {
    rng.sample_uniform(bounds)
}
