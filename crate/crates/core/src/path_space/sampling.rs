//! Seeded samplers for Brownian paths and approximate Brownian loops.
//!
//! Every sampler draws from a ChaCha20 stream seeded with `seed_from_u64`,
//! so outputs are reproducible given `(group, N, seed)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lie_group::{AlgebraElement, Group};

use super::{DiscreteLoop, DiscretePath, EmpiricalMeasure};

/// How a Brownian path is turned into a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoopMethod {
    /// Exact Gaussian bridge of the unwrapped angles; torus only.
    TorusBridge,
    /// `γ(t) · exp(-t log γ(1))`; any group, approximate law.
    GeodesicCorrection,
}

impl LoopMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            LoopMethod::TorusBridge => "torus-bridge",
            LoopMethod::GeodesicCorrection => "geodesic-correction",
        }
    }
}

impl fmt::Display for LoopMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LoopMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus-bridge" => Ok(LoopMethod::TorusBridge),
            "geodesic-correction" => Ok(LoopMethod::GeodesicCorrection),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

/// A stream of paths sharing one generator.
#[derive(Debug, Clone)]
pub struct BrownianSampler {
    group: Group,
    grid: usize,
    rng: ChaCha20Rng,
}

impl BrownianSampler {
    pub fn new(group: Group, grid: usize, seed: u64) -> Result<Self> {
        group.validate()?;
        if grid == 0 {
            return Err(Error::InvalidArgument("grid must be at least 1".into()));
        }
        Ok(Self {
            group,
            grid,
            rng: ChaCha20Rng::seed_from_u64(seed),
        })
    }

    fn gaussian(&mut self) -> AlgebraElement {
        let d = self.group.dim();
        AlgebraElement::new((0..d).map(|_| self.rng.sample(StandardNormal)).collect())
    }

    /// Increments `sqrt(1/N) ξ_k`, `k = 0..N`.
    fn increments(&mut self) -> Vec<AlgebraElement> {
        let scale = (1.0 / self.grid as f64).sqrt();
        (0..self.grid)
            .map(|_| self.gaussian().scale(scale))
            .collect()
    }

    /// `γ(t_{k+1}) = γ(t_k) · exp(sqrt(1/N) ξ_k)`.
    pub fn next_path(&mut self) -> DiscretePath {
        let inc = self.increments();
        path_from_increments(self.group, &inc)
    }

    pub fn next_loop(&mut self, method: LoopMethod) -> Result<DiscreteLoop> {
        if self.grid < 2 {
            return Err(Error::InvalidArgument(
                "loops need a grid of at least 2".into(),
            ));
        }
        match method {
            LoopMethod::TorusBridge => {
                if !matches!(self.group, Group::Torus(_)) {
                    return Err(Error::Unsupported {
                        op: "torus-bridge",
                        group: self.group,
                    });
                }
                let inc = self.increments();
                torus_bridge(self.group, &inc)
            }
            LoopMethod::GeodesicCorrection => geodesic_correction(&self.next_path()),
        }
    }

    /// Draws a random piecewise-geodesic path: `pieces` segments of equal
    /// duration, each a one-parameter subgroup whose generator is Gaussian
    /// with standard deviation `step` per coordinate.
    pub fn next_piecewise_geodesic(&mut self, pieces: usize, step: f64) -> Result<DiscretePath> {
        if pieces == 0 || !(step.is_finite() && step >= 0.0) {
            return Err(Error::InvalidArgument(
                "need pieces >= 1 and finite step >= 0".into(),
            ));
        }
        let gens: Vec<_> = (0..pieces).map(|_| self.gaussian().scale(step)).collect();
        let mut knots = vec![self.group.identity()];
        for x in &gens {
            let next = knots.last().unwrap().retract(x);
            knots.push(next);
        }
        let mut points = Vec::with_capacity(self.grid + 1);
        points.push(self.group.identity());
        for k in 1..=self.grid {
            let s = k as f64 / self.grid as f64 * pieces as f64;
            let j = (s.floor() as usize).min(pieces - 1);
            points.push(knots[j].retract(&gens[j].scale(s - j as f64)));
        }
        DiscretePath::new(points)
    }
}

/// Builds the path `γ(t_{k+1}) = γ(t_k) · exp(x_k)`.
pub fn path_from_increments(group: Group, increments: &[AlgebraElement]) -> DiscretePath {
    let mut points = Vec::with_capacity(increments.len() + 1);
    points.push(group.identity());
    for x in increments {
        let next = points.last().unwrap().retract(x);
        points.push(next);
    }
    DiscretePath::new(points).expect("increments keep the group tag")
}

fn torus_bridge(group: Group, increments: &[AlgebraElement]) -> Result<DiscreteLoop> {
    let d = group.dim();
    let n = increments.len();
    let mut walk = vec![vec![0.0; d]; n + 1];
    for (k, x) in increments.iter().enumerate() {
        for i in 0..d {
            walk[k + 1][i] = walk[k][i] + x.coords()[i];
        }
    }
    let end = walk[n].clone();
    let mut points = Vec::with_capacity(n + 1);
    for (k, w) in walk.iter().enumerate() {
        let t = k as f64 / n as f64;
        let angles: Vec<f64> = w.iter().zip(&end).map(|(a, b)| a - t * b).collect();
        points.push(group.exp(&AlgebraElement::new(angles)));
    }
    points[0] = group.identity();
    points[n] = group.identity();
    DiscreteLoop::new(points)
}

/// `γ̃(t_k) = γ(t_k) · exp(-t_k log γ(1))`.
pub fn geodesic_correction(path: &DiscretePath) -> Result<DiscreteLoop> {
    let n = path.grid();
    let end_log = path.point(n).log();
    let mut points = Vec::with_capacity(n + 1);
    points.push(path.point(0).clone());
    for k in 1..=n {
        points.push(path.point(k).retract(&end_log.scale(-path.time(k))));
    }
    DiscreteLoop::new(points)
}

pub fn sample_brownian_path(group: Group, grid: usize, seed: u64) -> Result<DiscretePath> {
    Ok(BrownianSampler::new(group, grid, seed)?.next_path())
}

pub fn sample_loop(
    group: Group,
    grid: usize,
    seed: u64,
    method: LoopMethod,
) -> Result<DiscreteLoop> {
    BrownianSampler::new(group, grid, seed)?.next_loop(method)
}

/// A path drawn from a piecewise-geodesic family; see
/// [`BrownianSampler::next_piecewise_geodesic`].
pub fn sample_piecewise_geodesic(
    group: Group,
    grid: usize,
    pieces: usize,
    step: f64,
    seed: u64,
) -> Result<DiscretePath> {
    BrownianSampler::new(group, grid, seed)?.next_piecewise_geodesic(pieces, step)
}

/// `atoms` Brownian paths from one generator, uniform weights.
pub fn sample_brownian_measure(
    group: Group,
    grid: usize,
    atoms: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    let mut sampler = BrownianSampler::new(group, grid, seed)?;
    EmpiricalMeasure::uniform((0..atoms).map(|_| sampler.next_path()).collect())
}

/// `atoms` loops from one generator, uniform weights.
pub fn sample_loop_measure(
    group: Group,
    grid: usize,
    atoms: usize,
    seed: u64,
    method: LoopMethod,
) -> Result<EmpiricalMeasure> {
    let mut sampler = BrownianSampler::new(group, grid, seed)?;
    let support = (0..atoms)
        .map(|_| sampler.next_loop(method).map(DiscreteLoop::into_path))
        .collect::<Result<Vec<_>>>()?;
    EmpiricalMeasure::uniform(support)
}
