//! Transportation simplex (MODI) on the complete bipartite graph.
//!
//! The basis is a spanning tree of `n + m - 1` cells over the row and
//! column nodes, started from the northwest-corner rule. Entering and
//! leaving cells follow Bland's rule (lowest row-major index), which rules
//! out cycling on degenerate instances.

use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::CostMatrix;

pub(crate) fn transportation_simplex(
    cost: &CostMatrix,
    supply: &[f64],
    demand: &[f64],
) -> Result<Vec<f64>> {
    let (n, m) = (cost.rows(), cost.cols());
    let mut flow = vec![0.0; n * m];
    let mut basic = vec![false; n * m];
    northwest_corner(supply, demand, &mut flow, &mut basic);

    let tol = 1e-12 * (1.0 + cost.max());
    let max_iter = 50 * (n + m) * (n + m) + 1000;
    for _ in 0..max_iter {
        let (u, v) = potentials(cost, &basic);
        let entering =
            (0..n * m).find(|&k| !basic[k] && cost.entries()[k] - u[k / m] - v[k % m] < -tol);
        let Some(enter) = entering else {
            return Ok(flow);
        };
        let cycle = tree_path(n, m, &basic, enter / m, enter % m);
        // Cells along the tree path from the entering row to its column
        // alternate -, +, -, ...
        let theta = cycle
            .iter()
            .step_by(2)
            .map(|&k| flow[k])
            .fold(f64::INFINITY, f64::min);
        let leave = cycle
            .iter()
            .step_by(2)
            .copied()
            .filter(|&k| flow[k] == theta)
            .min()
            .expect("cycle has a decreasing cell");
        for (idx, &k) in cycle.iter().enumerate() {
            if idx % 2 == 0 {
                flow[k] -= theta;
            } else {
                flow[k] += theta;
            }
        }
        flow[enter] = theta;
        flow[leave] = 0.0;
        basic[enter] = true;
        basic[leave] = false;
    }
    Err(Error::NotOptimal(format!(
        "transportation simplex exceeded {max_iter} pivots"
    )))
}

fn northwest_corner(supply: &[f64], demand: &[f64], flow: &mut [f64], basic: &mut [bool]) {
    let (n, m) = (supply.len(), demand.len());
    let (mut i, mut j) = (0, 0);
    let mut ra = supply[0];
    let mut rb = demand[0];
    loop {
        let x = ra.min(rb);
        flow[i * m + j] = x;
        basic[i * m + j] = true;
        ra -= x;
        rb -= x;
        if i == n - 1 && j == m - 1 {
            // Absorb rounding left over from the unequal float totals.
            break;
        }
        if j == m - 1 || (i < n - 1 && ra <= rb) {
            i += 1;
            ra = supply[i];
        } else {
            j += 1;
            rb = demand[j];
        }
    }
}

/// Node ids: rows `0..n`, columns `n..n + m`.
fn adjacency(n: usize, m: usize, basic: &[bool]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n + m];
    for (k, _) in basic.iter().enumerate().filter(|(_, b)| **b) {
        let (i, j) = (k / m, k % m);
        adj[i].push(n + j);
        adj[n + j].push(i);
    }
    adj
}

/// Solves `u_i + v_j = c_ij` on the basis tree with `u_0 = 0`.
fn potentials(cost: &CostMatrix, basic: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (cost.rows(), cost.cols());
    let adj = adjacency(n, m, basic);
    let mut value = vec![f64::NAN; n + m];
    value[0] = 0.0;
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !value[b].is_nan() {
                continue;
            }
            value[b] = if a < n {
                cost.get(a, b - n) - value[a]
            } else {
                cost.get(b, a - n) - value[a]
            };
            queue.push_back(b);
        }
    }
    let v = value.split_off(n);
    (value, v)
}

/// Cells on the tree path from row `i` to column `j`, in path order.
fn tree_path(n: usize, m: usize, basic: &[bool], i: usize, j: usize) -> Vec<usize> {
    let adj = adjacency(n, m, basic);
    let mut parent = vec![usize::MAX; n + m];
    parent[i] = i;
    let mut queue = VecDeque::from([i]);
    while let Some(a) = queue.pop_front() {
        if a == n + j {
            break;
        }
        for &b in &adj[a] {
            if parent[b] == usize::MAX {
                parent[b] = a;
                queue.push_back(b);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = n + j;
    while node != i {
        let prev = parent[node];
        let (r, c) = if prev < n {
            (prev, node - n)
        } else {
            (node, prev - n)
        };
        cells.push(r * m + c);
        node = prev;
    }
    cells.reverse();
    cells
}
