//! Displacement fields, displacement interpolation, gradients of
//! c-concave potentials and the transport map recovered from them.
//!
//! Sign convention: for matched paths `γ₁, γ₂` the displacement at `t_k` is
//! `V_k = log(γ₁(t_k)⁻¹ γ₂(t_k))`, so that `γ₂(t_k) = γ₁(t_k) exp(V_k)`. It is
//! the constant body velocity of the geodesic `v` with `v(0) = γ₂⁻¹γ₁` and
//! `v(1) = e`.

mod potential;
mod reconstruct;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_group::AlgebraElement;
use crate::ot_solver::{cost_matrix, solve_exact, Coupling, MARGINAL_TOL};
use crate::path_space::{trapezoid_weights, DiscretePath, EmpiricalMeasure};

pub use potential::{
    directional_derivative, potential_gradient, predicted_directional_derivative,
    CTransformPotential, FiniteDifference, DEFAULT_STEP, MIN_STEP,
};
pub use reconstruct::{
    mollifier_extract, reconstruct_displacement, reconstruct_geodesic_from_v, reconstruct_map,
    MollifierEstimate,
};

/// Node pairs closer than this to the cut locus are flagged.
pub const CUT_TOL: f64 = 1e-6;

/// Per-node displacement between two paths on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    vectors: Vec<AlgebraElement>,
    cut_margins: Vec<f64>,
}

impl DisplacementField {
    pub fn new(g1: &DiscretePath, g2: &DiscretePath) -> Result<Self> {
        if g1.grid() != g2.grid() {
            return Err(Error::GridMismatch(g1.grid(), g2.grid()));
        }
        let mut vectors = Vec::with_capacity(g1.grid() + 1);
        let mut cut_margins = Vec::with_capacity(g1.grid() + 1);
        for (a, b) in g1.points().iter().zip(g2.points()) {
            let v = a.between(b)?;
            cut_margins.push(v.cut_margin());
            vectors.push(v.log());
        }
        Ok(Self {
            vectors,
            cut_margins,
        })
    }

    /// A field given directly by its vectors (no cut information).
    pub fn from_vectors(vectors: Vec<AlgebraElement>) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::InvalidArgument(
                "a field needs at least 2 nodes".into(),
            ));
        }
        let dim = vectors[0].dim();
        if vectors.iter().any(|v| v.dim() != dim || !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "field vectors must be finite with a common dimension".into(),
            ));
        }
        let cut_margins = vec![f64::INFINITY; vectors.len()];
        Ok(Self {
            vectors,
            cut_margins,
        })
    }

    pub fn grid(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn vectors(&self) -> &[AlgebraElement] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &AlgebraElement {
        &self.vectors[k]
    }

    pub fn cut_margins(&self) -> &[f64] {
        &self.cut_margins
    }

    /// Nodes whose pair lies within [`CUT_TOL`] of the cut locus.
    pub fn cut_nodes(&self) -> Vec<usize> {
        (0..self.cut_margins.len())
            .filter(|&k| self.cut_margins[k] < CUT_TOL)
            .collect()
    }

    pub fn has_cut_pair(&self) -> bool {
        self.cut_margins.iter().any(|&m| m < CUT_TOL)
    }

    /// `(Σ_k w_k |V_k|²)^{1/2}`; equals `d_L2(γ₁, γ₂)` for a field built
    /// from two paths.
    pub fn l2_norm(&self) -> f64 {
        let w = trapezoid_weights(self.grid());
        self.vectors
            .iter()
            .zip(&w)
            .map(|(v, w)| w * v.norm_squared())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn displacement_field(g1: &DiscretePath, g2: &DiscretePath) -> Result<DisplacementField> {
    DisplacementField::new(g1, g2)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "λ must lie in [0, 1], got {lambda}"
        )))
    }
}

/// `u^λ(t_k) = γ₁(t_k) exp(λ V_k)`.
pub fn interpolate_path(g1: &DiscretePath, g2: &DiscretePath, lambda: f64) -> Result<DiscretePath> {
    check_lambda(lambda)?;
    let field = DisplacementField::new(g1, g2)?;
    let points = g1
        .points()
        .iter()
        .zip(field.vectors())
        .map(|(p, v)| p.retract(&v.scale(lambda)))
        .collect();
    DiscretePath::new(points)
}

/// `ν_λ`: every cell `(i, j)` of the plan with positive mass contributes the
/// interpolated path `u^λ(γ_i, σ_j)` with weight `π_ij` (row-major order).
pub fn interpolate_measure(
    src: &EmpiricalMeasure,
    tgt: &EmpiricalMeasure,
    plan: &Coupling,
    lambda: f64,
) -> Result<EmpiricalMeasure> {
    check_lambda(lambda)?;
    if plan.rows() != src.len() || plan.cols() != tgt.len() {
        return Err(Error::InfeasibleMarginals(
            "plan shape does not match the measures".into(),
        ));
    }
    let off = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    if off(plan.source_weights(), src.weights()) > MARGINAL_TOL
        || off(plan.target_weights(), tgt.weights()) > MARGINAL_TOL
    {
        return Err(Error::InfeasibleMarginals(
            "plan marginals differ from the measures".into(),
        ));
    }
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (i, j, mass) in plan.support() {
        support.push(interpolate_path(src.path(i), tgt.path(j), lambda)?);
        weights.push(mass);
    }
    EmpiricalMeasure::new(support, weights)
}

/// Displacement interpolation `λ ↦ ν_λ` with measured `W₂(ν₀, ν_λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationResult {
    pub lambdas: Vec<f64>,
    pub measures: Vec<EmpiricalMeasure>,
    /// `W₂(ν₀, ν_λ)`.
    pub distances: Vec<f64>,
    /// `W₂(ν_λ, ν₁)`.
    pub remaining: Vec<f64>,
    /// `W₂(ν₀, ν₁)`.
    pub total: f64,
    pub plan: Coupling,
}

/// One row of a scaling report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub lambda: f64,
    pub distance: f64,
    /// `W₂(ν₀, ν_λ) / (λ W₂(ν₀, ν₁))`, defined as 1 at `λ = 0`.
    pub ratio: f64,
    pub remaining: f64,
    /// `W₂(ν_λ, ν₁) / ((1 - λ) W₂(ν₀, ν₁))`, defined as 1 at `λ = 1`.
    pub remaining_ratio: f64,
}

impl InterpolationResult {
    pub fn scaling_rows(&self) -> Vec<ScalingRow> {
        let ratio = |num: f64, den: f64| if den == 0.0 { 1.0 } else { num / den };
        self.lambdas
            .iter()
            .zip(self.distances.iter().zip(&self.remaining))
            .map(|(&lambda, (&distance, &remaining))| ScalingRow {
                lambda,
                distance,
                ratio: ratio(distance, lambda * self.total),
                remaining,
                remaining_ratio: ratio(remaining, (1.0 - lambda) * self.total),
            })
            .collect()
    }

    /// Whether any matched pair of the plan meets the cut locus.
    pub fn has_cut_pair(&self, src: &EmpiricalMeasure, tgt: &EmpiricalMeasure) -> Result<bool> {
        for (i, j, _) in self.plan.support() {
            if DisplacementField::new(src.path(i), tgt.path(j))?.has_cut_pair() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn w2(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    let cost = cost_matrix(a, b, 2.0)?;
    Ok(solve_exact(&cost, a.weights(), b.weights())?.1.sqrt())
}

/// Solves the exact `W₂` problem between `src` and `tgt`, then builds `ν_λ`
/// for every `λ` (sorted ascending) and measures both distances with the
/// exact solver.
pub fn displacement_interpolation(
    src: &EmpiricalMeasure,
    tgt: &EmpiricalMeasure,
    lambdas: &[f64],
) -> Result<InterpolationResult> {
    let mut lambdas = lambdas.to_vec();
    for &l in &lambdas {
        check_lambda(l)?;
    }
    lambdas.sort_by(f64::total_cmp);
    let cost = cost_matrix(src, tgt, 2.0)?;
    let (plan, value) = solve_exact(&cost, src.weights(), tgt.weights())?;
    let total = value.sqrt();
    let mut measures = Vec::with_capacity(lambdas.len());
    let mut distances = Vec::with_capacity(lambdas.len());
    let mut remaining = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        let nu = interpolate_measure(src, tgt, &plan, l)?;
        distances.push(w2(src, &nu)?);
        remaining.push(w2(&nu, tgt)?);
        measures.push(nu);
    }
    Ok(InterpolationResult {
        lambdas,
        measures,
        distances,
        remaining,
        total,
        plan,
    })
}
