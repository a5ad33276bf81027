//! Entropic optimal transport by alternating log-domain updates
//!
//! ```text
//! f_i = ε log a_i - ε LSE_j((g_j - c_ij) / ε)
//! g_j = ε log b_j - ε LSE_i((f_i - c_ij) / ε)
//! ```
//!
//! with plan `π_ij = exp((f_i + g_j - c_ij) / ε)`.

use crate::error::{Error, Result};

use super::{c_transform, check_marginals, CostMatrix, Coupling, Direction, DualPotentials};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornOptions {
    pub epsilon: f64,
    pub max_iter: usize,
    /// Bound on the L1 violation of the source marginal.
    pub tol: f64,
    /// Warm-start from a geometric sequence of larger ε.
    pub epsilon_scaling: bool,
}

impl SinkhornOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            max_iter: 10_000,
            tol: 1e-6,
            epsilon_scaling: true,
        }
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|x| (x - max).exp()).sum::<f64>().ln()
}

struct State<'a> {
    cost: &'a CostMatrix,
    log_a: Vec<f64>,
    log_b: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl State<'_> {
    fn update_f(&mut self, eps: f64) {
        let (cost, g) = (self.cost, &self.g);
        for (i, f) in self.f.iter_mut().enumerate() {
            let lse = log_sum_exp((0..cost.cols()).map(|j| (g[j] - cost.get(i, j)) / eps));
            *f = eps * (self.log_a[i] - lse);
        }
    }

    fn update_g(&mut self, eps: f64) {
        let (cost, f) = (self.cost, &self.f);
        for (j, g) in self.g.iter_mut().enumerate() {
            let lse = log_sum_exp((0..cost.rows()).map(|i| (f[i] - cost.get(i, j)) / eps));
            *g = eps * (self.log_b[j] - lse);
        }
    }

    fn plan(&self, eps: f64) -> Vec<f64> {
        let (n, m) = (self.cost.rows(), self.cost.cols());
        let mut plan = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                plan.push(((self.f[i] + self.g[j] - self.cost.get(i, j)) / eps).exp());
            }
        }
        plan
    }

    /// L1 distance of the plan's row sums from the source weights.
    fn row_violation(&self, eps: f64) -> f64 {
        let m = self.cost.cols();
        self.plan(eps)
            .chunks(m)
            .zip(&self.log_a)
            .map(|(row, la)| (row.iter().sum::<f64>() - la.exp()).abs())
            .sum()
    }

    /// Runs until the row violation is below `tol`; returns the last
    /// violation and whether it converged.
    fn run(&mut self, eps: f64, max_iter: usize, tol: f64) -> (f64, bool) {
        let mut violation = f64::INFINITY;
        for it in 0..max_iter {
            self.update_f(eps);
            self.update_g(eps);
            if it % 10 == 9 || it + 1 == max_iter {
                violation = self.row_violation(eps);
                if violation <= tol {
                    return (violation, true);
                }
            }
        }
        (violation, false)
    }
}

/// Moves a nearly feasible plan onto the exact marginals: scale rows and
/// columns down to their weights, then add the outer product of the
/// deficits.
fn round_to_marginals(plan: &mut [f64], a: &[f64], b: &[f64]) {
    let m = b.len();
    for (row, &ai) in plan.chunks_mut(m).zip(a) {
        let s: f64 = row.iter().sum();
        if s > ai {
            row.iter_mut().for_each(|x| *x *= ai / s);
        }
    }
    for (j, &bj) in b.iter().enumerate() {
        let s: f64 = plan.iter().skip(j).step_by(m).sum();
        if s > bj {
            plan.iter_mut()
                .skip(j)
                .step_by(m)
                .for_each(|x| *x *= bj / s);
        }
    }
    let da: Vec<f64> = plan
        .chunks(m)
        .zip(a)
        .map(|(row, ai)| (ai - row.iter().sum::<f64>()).max(0.0))
        .collect();
    let db: Vec<f64> = (0..m)
        .map(|j| (b[j] - plan.iter().skip(j).step_by(m).sum::<f64>()).max(0.0))
        .collect();
    let total: f64 = da.iter().sum();
    if total > 0.0 {
        for (i, row) in plan.chunks_mut(m).enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += da[i] * db[j] / total;
            }
        }
    }
}

/// Entropic optimum. Returns the plan (rounded onto the exact marginals),
/// its transport cost `Σ π_ij c_ij`, and feasible potentials: the scaled
/// potential `g` is kept as `ψ`, `φ = ψ^c`, then both are shifted so that
/// `φ_0 = 0`.
pub fn solve_sinkhorn(
    cost: &CostMatrix,
    source_weights: &[f64],
    target_weights: &[f64],
    options: &SinkhornOptions,
) -> Result<(Coupling, f64, DualPotentials)> {
    check_marginals(cost, source_weights, target_weights)?;
    let eps = options.epsilon;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    if options.max_iter == 0 || options.tol.is_nan() || options.tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "need max_iter >= 1 and tol > 0".into(),
        ));
    }
    let mut state = State {
        cost,
        log_a: source_weights.iter().map(|w| w.ln()).collect(),
        log_b: target_weights.iter().map(|w| w.ln()).collect(),
        f: vec![0.0; cost.rows()],
        g: vec![0.0; cost.cols()],
    };
    if options.epsilon_scaling {
        let mut stage = cost.max().max(eps);
        while stage > eps * 10.0 {
            state.run(stage, options.max_iter, options.tol.max(1e-4));
            stage /= 10.0;
        }
    }
    let (violation, converged) = state.run(eps, options.max_iter, options.tol);
    if !converged {
        return Err(Error::NotConverged {
            iterations: options.max_iter,
            violation,
        });
    }
    let mut plan = state.plan(eps);
    round_to_marginals(&mut plan, source_weights, target_weights);
    let coupling = Coupling::new(plan, source_weights.to_vec(), target_weights.to_vec())?;
    let value = coupling.cost(cost);

    let mut phi = c_transform(&state.g, cost, Direction::ToSource)?;
    let mut psi = state.g;
    let shift = phi[0];
    phi.iter_mut().for_each(|x| *x -= shift);
    psi.iter_mut().for_each(|x| *x += shift);
    Ok((
        coupling,
        value,
        DualPotentials {
            phi,
            psi,
            p: cost.p(),
        },
    ))
}
