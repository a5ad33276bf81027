//! Kantorovich problems between empirical path measures with cost
//! `c(γ, σ) = d_L2(γ, σ)^p`.
//!
//! * [`solve_exact`]: Hungarian method for uniform square instances,
//!   transportation simplex otherwise.
//! * [`solve_sinkhorn`]: log-domain entropic solver.
//! * [`c_transform`], [`dual_from_primal`], [`lipschitz_check`]: dual side.

mod duals;
mod hungarian;
mod simplex;
mod sinkhorn;

use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_space::{check_weights, d_l2, EmpiricalMeasure};

pub use duals::{dual_from_primal, lipschitz_bound, lipschitz_check, LipschitzReport};
pub use hungarian::{assignment_margin, solve_assignment};
pub use sinkhorn::{solve_sinkhorn, SinkhornOptions};

/// Marginal tolerance of a [`Coupling`].
pub const MARGINAL_TOL: f64 = 1e-9;

/// Largest accepted cost exponent.
pub const MAX_EXPONENT: f64 = 10.0;

pub fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p <= MAX_EXPONENT {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "exponent p must lie in (1, {MAX_EXPONENT}], got {p}"
        )))
    }
}

/// Row-major `n × m` matrix of nonnegative transport costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    p: f64,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "cost matrix {rows}×{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(c) = entries.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "costs must be finite and nonnegative, got {c}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
            p,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], p: f64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged cost rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat(), p)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
            p: self.p,
        }
    }
}

/// `c_ij = d_L2(src_i, tgt_j)^p`.
pub fn cost_matrix(src: &EmpiricalMeasure, tgt: &EmpiricalMeasure, p: f64) -> Result<CostMatrix> {
    cost_matrix_threaded(src, tgt, p, 1)
}

/// [`cost_matrix`] with rows split across up to `threads` workers. Each
/// entry is computed independently, so the result does not depend on the
/// thread count.
pub fn cost_matrix_threaded(
    src: &EmpiricalMeasure,
    tgt: &EmpiricalMeasure,
    p: f64,
    threads: usize,
) -> Result<CostMatrix> {
    check_exponent(p)?;
    src.check_compatible(tgt)?;
    let (n, m) = (src.len(), tgt.len());
    let row = |i: usize| -> Result<Vec<f64>> {
        tgt.support()
            .iter()
            .map(|t| d_l2(src.path(i), t).map(|d| d.powf(p)))
            .collect()
    };
    let threads = threads.clamp(1, n);
    let rows: Vec<Result<Vec<f64>>> = if threads == 1 {
        (0..n).map(row).collect()
    } else {
        let chunk = n.div_ceil(threads);
        thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|start| {
                    let row = &row;
                    s.spawn(move || (start..(start + chunk).min(n)).map(row).collect::<Vec<_>>())
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("cost worker panicked"))
                .collect()
        })
    };
    let mut entries = Vec::with_capacity(n * m);
    for r in rows {
        entries.extend(r?);
    }
    CostMatrix::new(n, m, entries, p)
}

/// A transport plan together with the marginals it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    plan: Vec<f64>,
    source_weights: Vec<f64>,
    target_weights: Vec<f64>,
}

impl Coupling {
    /// Validates nonnegativity and the marginals within [`MARGINAL_TOL`].
    pub fn new(plan: Vec<f64>, source_weights: Vec<f64>, target_weights: Vec<f64>) -> Result<Self> {
        let (rows, cols) = (source_weights.len(), target_weights.len());
        if plan.len() != rows * cols {
            return Err(Error::InvalidArgument(
                "plan shape does not match the marginals".into(),
            ));
        }
        if plan.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument(
                "plan entries must be finite and nonnegative".into(),
            ));
        }
        let out = Self {
            rows,
            cols,
            plan,
            source_weights,
            target_weights,
        };
        let violation = out.marginal_violation();
        if violation > MARGINAL_TOL {
            return Err(Error::InfeasibleMarginals(format!(
                "plan marginals off by {violation:e}"
            )));
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.plan[i * self.cols + j]
    }

    pub fn plan(&self) -> &[f64] {
        &self.plan
    }

    pub fn source_weights(&self) -> &[f64] {
        &self.source_weights
    }

    pub fn target_weights(&self) -> &[f64] {
        &self.target_weights
    }

    /// Cells with positive mass, row-major.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.plan
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(move |(k, m)| (k / self.cols, k % self.cols, *m))
    }

    /// Largest absolute deviation of a row or column sum from its weight.
    pub fn marginal_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            let s: f64 = self.plan[i * self.cols..(i + 1) * self.cols].iter().sum();
            worst = worst.max((s - self.source_weights[i]).abs());
        }
        for j in 0..self.cols {
            let s: f64 = (0..self.rows).map(|i| self.mass(i, j)).sum();
            worst = worst.max((s - self.target_weights[j]).abs());
        }
        worst
    }

    /// `Σ_ij π_ij c_ij`, accumulated row-major.
    pub fn cost(&self, cost: &CostMatrix) -> f64 {
        self.plan
            .iter()
            .zip(cost.entries())
            .map(|(m, c)| m * c)
            .sum()
    }

    /// The map `i ↦ j` when every row has exactly one positive cell.
    pub fn as_assignment(&self) -> Option<Vec<usize>> {
        (0..self.rows)
            .map(|i| {
                let mut cells = (0..self.cols).filter(|&j| self.mass(i, j) > 0.0);
                match (cells.next(), cells.next()) {
                    (Some(j), None) => Some(j),
                    _ => None,
                }
            })
            .collect()
    }
}

/// Kantorovich potentials on the two supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPotentials {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub p: f64,
}

impl DualPotentials {
    /// `Σ_i φ_i a_i + Σ_j ψ_j b_j`.
    pub fn value(&self, source_weights: &[f64], target_weights: &[f64]) -> f64 {
        let a: f64 = self
            .phi
            .iter()
            .zip(source_weights)
            .map(|(x, w)| x * w)
            .sum();
        let b: f64 = self
            .psi
            .iter()
            .zip(target_weights)
            .map(|(x, w)| x * w)
            .sum();
        a + b
    }

    /// `max_ij (φ_i + ψ_j - c_ij)`; feasible when `<= 0` up to rounding.
    pub fn max_violation(&self, cost: &CostMatrix) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (i, phi) in self.phi.iter().enumerate() {
            for (j, psi) in self.psi.iter().enumerate() {
                worst = worst.max(phi + psi - cost.get(i, j));
            }
        }
        worst
    }
}

/// Which side a c-transform produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// From target values `ψ` to `φ_i = min_j c_ij - ψ_j`.
    ToSource,
    /// From source values `φ` to `ψ_j = min_i c_ij - φ_i`.
    ToTarget,
}

pub fn c_transform(values: &[f64], cost: &CostMatrix, direction: Direction) -> Result<Vec<f64>> {
    let (expect, out_len) = match direction {
        Direction::ToSource => (cost.cols(), cost.rows()),
        Direction::ToTarget => (cost.rows(), cost.cols()),
    };
    if values.len() != expect {
        return Err(Error::InvalidArgument(format!(
            "c-transform expects {expect} values, got {}",
            values.len()
        )));
    }
    Ok((0..out_len)
        .map(|a| {
            (0..expect)
                .map(|b| {
                    let c = match direction {
                        Direction::ToSource => cost.get(a, b),
                        Direction::ToTarget => cost.get(b, a),
                    };
                    c - values[b]
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

fn check_marginals(
    cost: &CostMatrix,
    source_weights: &[f64],
    target_weights: &[f64],
) -> Result<()> {
    if source_weights.len() != cost.rows() || target_weights.len() != cost.cols() {
        return Err(Error::InfeasibleMarginals(format!(
            "cost is {}×{} but weights have lengths {} and {}",
            cost.rows(),
            cost.cols(),
            source_weights.len(),
            target_weights.len()
        )));
    }
    check_weights(source_weights)?;
    check_weights(target_weights)
}

fn is_uniform(weights: &[f64]) -> bool {
    let w = 1.0 / weights.len() as f64;
    weights.iter().all(|&x| x == w)
}

/// Exact optimum of the Kantorovich linear program. Returns the plan and
/// `Σ π_ij c_ij`.
///
/// Uniform square instances are solved as assignment problems (ties broken
/// toward the lowest column), so the plan is a permutation scaled by `1/n`.
pub fn solve_exact(
    cost: &CostMatrix,
    source_weights: &[f64],
    target_weights: &[f64],
) -> Result<(Coupling, f64)> {
    check_marginals(cost, source_weights, target_weights)?;
    let n = cost.rows();
    let plan = if n == cost.cols() && is_uniform(source_weights) && is_uniform(target_weights) {
        let assignment = solve_assignment(cost);
        let mut plan = vec![0.0; n * n];
        for (i, j) in assignment.into_iter().enumerate() {
            plan[i * n + j] = 1.0 / n as f64;
        }
        plan
    } else {
        simplex::transportation_simplex(cost, source_weights, target_weights)?
    };
    let coupling = Coupling::new(plan, source_weights.to_vec(), target_weights.to_vec())?;
    let value = coupling.cost(cost);
    Ok((coupling, value))
}
