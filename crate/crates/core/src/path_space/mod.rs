//! Paths and loops on the structure group, sampled on the uniform grid
//! `t_k = k / N`, `k = 0..=N`.
//!
//! Integrals over `[0, 1]` use the trapezoid rule ([`trapezoid_weights`]).
//! Cameron–Martin vectors are algebra-valued paths vanishing at `t = 0`
//! (and at `t = 1` for loops) with the discrete energy inner product
//! `<a, b>_H = N Σ_k <a_{k+1} - a_k, b_{k+1} - b_k>`.

mod cylindrical;
mod distance;
mod sampling;

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::lie_group::{AlgebraElement, Group, GroupElement};

pub use cylindrical::{
    cylindrical_gradient, green_kernel, CylindricalFunction, FnCylindrical, FD_STEP,
};
pub use distance::{d_cm, d_l2, d_uniform, pointwise_distances, trapezoid_weights};
pub use sampling::{
    geodesic_correction, path_from_increments, sample_brownian_measure, sample_brownian_path,
    sample_loop, sample_loop_measure, sample_piecewise_geodesic, BrownianSampler, LoopMethod,
};

/// Endpoint tolerance accepted by [`DiscreteLoop::new`].
pub const LOOP_ENDPOINT_TOL: f64 = 1e-12;

/// Tolerance on the total mass of an [`EmpiricalMeasure`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A path `γ: [0, 1] → G` with `γ(0) = e`, sampled at `N + 1` grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    points: Vec<GroupElement>,
}

impl DiscretePath {
    /// Requires at least two points, `points[0]` exactly the identity and a
    /// single group throughout.
    pub fn new(points: Vec<GroupElement>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        let group = points[0].group();
        if let Some(bad) = points.iter().find(|p| p.group() != group) {
            return Err(Error::GroupMismatch {
                left: group,
                right: bad.group(),
            });
        }
        if !points[0].is_identity() {
            return Err(Error::InvalidPath("path must start at the identity".into()));
        }
        Ok(Self { points })
    }

    /// The constant path at the identity.
    pub fn identity(group: Group, grid: usize) -> Self {
        assert!(grid >= 1, "grid must be positive");
        Self {
            points: vec![group.identity(); grid + 1],
        }
    }

    /// `t ↦ exp(t X)`.
    pub fn one_parameter(group: Group, grid: usize, x: &AlgebraElement) -> Self {
        assert!(grid >= 1, "grid must be positive");
        let mut points: Vec<_> = (0..=grid)
            .map(|k| group.exp(&x.scale(k as f64 / grid as f64)))
            .collect();
        points[0] = group.identity();
        Self { points }
    }

    pub fn grid(&self) -> usize {
        self.points.len() - 1
    }

    pub fn group(&self) -> Group {
        self.points[0].group()
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &GroupElement {
        &self.points[k]
    }

    pub fn into_points(self) -> Vec<GroupElement> {
        self.points
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.grid() as f64
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch(self.grid(), other.grid()));
        }
        if self.group() != other.group() {
            return Err(Error::GroupMismatch {
                left: self.group(),
                right: other.group(),
            });
        }
        Ok(())
    }

    /// Pointwise product `t ↦ self(t) · other(t)`.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let points = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Right perturbation `t_k ↦ γ(t_k) · exp(ε h(t_k))`.
    pub fn perturb(&self, h: &CameronMartinVector, eps: f64) -> Result<Self> {
        if h.grid() != self.grid() {
            return Err(Error::GridMismatch(self.grid(), h.grid()));
        }
        if h.dim() != self.group().dim() {
            return Err(Error::InvalidArgument(format!(
                "perturbation has dimension {}, algebra has {}",
                h.dim(),
                self.group().dim()
            )));
        }
        let mut points = Vec::with_capacity(self.points.len());
        points.push(self.points[0].clone());
        for (p, v) in self.points.iter().zip(h.values()).skip(1) {
            points.push(p.retract(&v.scale(eps)));
        }
        Ok(Self { points })
    }

    /// Largest node-wise coordinate difference.
    pub fn max_coord_diff(&self, other: &Self) -> f64 {
        if self.points.len() != other.points.len() {
            return f64::INFINITY;
        }
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.max_coord_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn ends_at_identity(&self, tol: f64) -> bool {
        let last = &self.points[self.grid()];
        last.max_coord_diff(&self.group().identity()) <= tol
    }
}

/// A path that also returns to the identity at `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLoop {
    path: DiscretePath,
}

impl DiscreteLoop {
    pub fn new(points: Vec<GroupElement>) -> Result<Self> {
        Self::from_path(DiscretePath::new(points)?)
    }

    /// Accepts the path when its endpoint is within [`LOOP_ENDPOINT_TOL`]
    /// of the identity in coordinates.
    pub fn from_path(path: DiscretePath) -> Result<Self> {
        if !path.ends_at_identity(LOOP_ENDPOINT_TOL) {
            return Err(Error::InvalidPath("loop must end at the identity".into()));
        }
        Ok(Self { path })
    }

    pub fn as_path(&self) -> &DiscretePath {
        &self.path
    }

    pub fn into_path(self) -> DiscretePath {
        self.path
    }
}

impl Deref for DiscreteLoop {
    type Target = DiscretePath;

    fn deref(&self) -> &DiscretePath {
        &self.path
    }
}

/// An algebra-valued path `h` on the grid with `h(0) = 0`, and `h(1) = 0`
/// in loop mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CameronMartinVector {
    values: Vec<AlgebraElement>,
    loop_flag: bool,
}

impl CameronMartinVector {
    pub fn new(values: Vec<AlgebraElement>, loop_flag: bool) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "Cameron–Martin vector needs at least 2 nodes".into(),
            ));
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim || !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "values must be finite with a common dimension".into(),
            ));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidArgument("h(0) must vanish".into()));
        }
        if loop_flag && !values[values.len() - 1].is_zero() {
            return Err(Error::InvalidArgument(
                "h(1) must vanish for a loop direction".into(),
            ));
        }
        Ok(Self { values, loop_flag })
    }

    pub fn zeros(dim: usize, grid: usize, loop_flag: bool) -> Self {
        assert!(grid >= 1, "grid must be positive");
        Self {
            values: vec![AlgebraElement::zeros(dim); grid + 1],
            loop_flag,
        }
    }

    /// Hat function at interior node `node` along algebra axis `axis`: the
    /// piecewise-linear path equal to `e_axis` at `t_node` and zero at every
    /// other node.
    pub fn hat(dim: usize, grid: usize, node: usize, axis: usize, loop_flag: bool) -> Self {
        assert!(node >= 1 && node < grid, "hat node must be interior");
        let mut out = Self::zeros(dim, grid, loop_flag);
        out.values[node] = AlgebraElement::basis(dim, axis);
        out
    }

    /// The `(N - 1) d` interior hats, ordered node-major:
    /// index `(node - 1) d + axis`.
    pub fn hat_basis(group: Group, grid: usize, loop_flag: bool) -> Vec<Self> {
        let d = group.dim();
        (1..grid)
            .flat_map(|node| (0..d).map(move |axis| (node, axis)))
            .map(|(node, axis)| Self::hat(d, grid, node, axis, loop_flag))
            .collect()
    }

    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn is_loop(&self) -> bool {
        self.loop_flag
    }

    pub fn values(&self) -> &[AlgebraElement] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &AlgebraElement {
        &self.values[k]
    }

    pub fn into_values(self) -> Vec<AlgebraElement> {
        self.values
    }

    /// `N Σ_k <Δa_k, Δb_k>`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch(self.grid(), other.grid()));
        }
        if self.dim() != other.dim() {
            return Err(Error::InvalidArgument(
                "dimension mismatch in H inner product".into(),
            ));
        }
        let n = self.grid();
        let mut sum = 0.0;
        for k in 0..n {
            let da = &self.values[k + 1] - &self.values[k];
            let db = &other.values[k + 1] - &other.values[k];
            sum += da.dot(&db);
        }
        Ok(n as f64 * sum)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("self-compatible").sqrt()
    }

    /// `self + factor · other`; the loop flag is kept only if both carry it.
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        if self.grid() != other.grid() || self.dim() != other.dim() {
            return Err(Error::GridMismatch(self.grid(), other.grid()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.add_scaled(factor, b))
            .collect();
        Ok(Self {
            values,
            loop_flag: self.loop_flag && other.loop_flag,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.scale(factor)).collect(),
            loop_flag: self.loop_flag,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// A probability measure on paths with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    support: Vec<DiscretePath>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(support: Vec<DiscretePath>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidArgument(
                "empirical measure needs at least one atom".into(),
            ));
        }
        if support.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} atoms but {} weights",
                support.len(),
                weights.len()
            )));
        }
        for path in &support[1..] {
            support[0].check_compatible(path)?;
        }
        check_weights(&weights)?;
        Ok(Self { support, weights })
    }

    pub fn uniform(support: Vec<DiscretePath>) -> Result<Self> {
        let n = support.len().max(1);
        let weights = vec![1.0 / n as f64; support.len()];
        Self::new(support, weights)
    }

    pub fn dirac(path: DiscretePath) -> Self {
        Self {
            support: vec![path],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn grid(&self) -> usize {
        self.support[0].grid()
    }

    pub fn group(&self) -> Group {
        self.support[0].group()
    }

    pub fn support(&self) -> &[DiscretePath] {
        &self.support
    }

    pub fn path(&self, i: usize) -> &DiscretePath {
        &self.support[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&x| x == w)
    }

    /// Whether every atom is a loop within [`LOOP_ENDPOINT_TOL`].
    pub fn is_loop_measure(&self) -> bool {
        self.support
            .iter()
            .all(|p| p.ends_at_identity(LOOP_ENDPOINT_TOL))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        self.support[0].check_compatible(&other.support[0])
    }
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InfeasibleMarginals(format!(
            "weights must be positive and finite, got {w}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InfeasibleMarginals(format!(
            "weights sum to {total}, not 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
