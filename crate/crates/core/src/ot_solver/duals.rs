use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_space::{d_l2, EmpiricalMeasure};

use super::{c_transform, CostMatrix, Coupling, Direction, DualPotentials};

/// Optimal potentials from an optimal plan.
///
/// Complementary slackness asks for `φ_i + ψ_j = c_ij` on the support of
/// the plan and `φ_i + ψ_j <= c_ij` everywhere. With `χ_j = -ψ_j` these are
/// difference constraints
///
/// ```text
/// φ_i - χ_j <= c_ij - δ  (cells off the support)
/// φ_i - χ_j <= c_ij      (support cells)
/// χ_j - φ_i <= -c_ij     (support cells)
/// ```
///
/// solved by Bellman–Ford shortest paths from a virtual source, which also
/// covers disconnected supports. A negative cycle at `δ = 0` means the plan
/// is not optimal. The slack `δ` is half the largest feasible value found by
/// bisection, so when the optimum is unique every cell off the support is
/// strictly slack and `ψ^c` has a unique minimizer on each source atom. The
/// result is tightened by `φ = ψ^c`, `ψ = φ^c̄` and shifted so `φ_0 = 0`.
pub fn dual_from_primal(cost: &CostMatrix, coupling: &Coupling) -> Result<DualPotentials> {
    let (n, m) = (cost.rows(), cost.cols());
    if coupling.rows() != n || coupling.cols() != m {
        return Err(Error::InvalidArgument(
            "coupling and cost shapes differ".into(),
        ));
    }
    let tol = 1e-12 * (1.0 + cost.max());
    let Some(mut dist) = difference_constraints(cost, coupling, 0.0, tol) else {
        return Err(Error::NotOptimal(
            "negative cycle in the slackness constraints".into(),
        ));
    };
    let (mut lo, mut hi) = (0.0, 2.0 * cost.max() + 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if difference_constraints(cost, coupling, mid, tol).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 {
        dist = difference_constraints(cost, coupling, 0.5 * lo, tol)
            .expect("smaller slack stays feasible");
    }
    let chi = dist.split_off(n);
    let psi: Vec<f64> = chi.iter().map(|x| -x).collect();
    let phi = c_transform(&psi, cost, Direction::ToSource)?;
    let mut psi = c_transform(&phi, cost, Direction::ToTarget)?;
    let mut phi = phi;
    let shift = phi[0];
    phi.iter_mut().for_each(|x| *x -= shift);
    psi.iter_mut().for_each(|x| *x += shift);
    Ok(DualPotentials {
        phi,
        psi,
        p: cost.p(),
    })
}

/// Bellman–Ford on the slackness constraints with slack `delta` off the
/// support. Nodes `0..n` carry `φ`, `n..n + m` carry `χ`. `None` on a
/// negative cycle.
fn difference_constraints(
    cost: &CostMatrix,
    coupling: &Coupling,
    delta: f64,
    tol: f64,
) -> Option<Vec<f64>> {
    let (n, m) = (cost.rows(), cost.cols());
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(n * m * 2);
    for i in 0..n {
        for j in 0..m {
            let c = cost.get(i, j);
            if coupling.mass(i, j) > 0.0 {
                edges.push((n + j, i, c));
                edges.push((i, n + j, -c));
            } else {
                edges.push((n + j, i, c - delta));
            }
        }
    }
    let mut dist = vec![0.0; n + m];
    for _ in 0..=(n + m) {
        let mut changed = false;
        for &(a, b, w) in &edges {
            if dist[a] + w < dist[b] - tol {
                dist[b] = dist[a] + w;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
    }
    None
}

/// `K = p D^{p-1}`, the Lipschitz constant of a c-concave potential for
/// the cost `d^p` on a space of diameter `D` (`2D` when `p = 2`).
pub fn lipschitz_bound(p: f64, diameter: f64) -> f64 {
    p * diameter.powf(p - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub bound: f64,
    /// Largest `|φ_i - φ_k| / d_L2(γ_i, γ_k)` over pairs at positive distance.
    pub max_ratio: f64,
    /// Largest `|φ_i - φ_k| - K d_L2(γ_i, γ_k)`.
    pub max_excess: f64,
    pub pairs: usize,
    pub passed: bool,
}

/// Checks `|φ_i - φ_k| <= K d_L2(γ_i, γ_k) + 1e-9` over all pairs of the
/// source support.
pub fn lipschitz_check(
    phi: &[f64],
    src: &EmpiricalMeasure,
    p: f64,
    diameter: f64,
) -> Result<LipschitzReport> {
    if phi.len() != src.len() {
        return Err(Error::InvalidArgument(
            "one potential value per atom is required".into(),
        ));
    }
    let bound = lipschitz_bound(p, diameter);
    let mut max_ratio: f64 = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..phi.len() {
        for k in i + 1..phi.len() {
            let d = d_l2(src.path(i), src.path(k))?;
            let diff = (phi[i] - phi[k]).abs();
            if d > 0.0 {
                max_ratio = max_ratio.max(diff / d);
            }
            max_excess = max_excess.max(diff - bound * d);
            pairs += 1;
        }
    }
    let max_excess = if pairs == 0 { 0.0 } else { max_excess };
    Ok(LipschitzReport {
        bound,
        max_ratio,
        max_excess,
        pairs,
        passed: max_excess <= 1e-9,
    })
}
