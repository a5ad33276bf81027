use super::CostMatrix;

/// Minimum-cost perfect matching of a square cost matrix by the
/// shortest-augmenting-path Hungarian method, O(n³). Returns `j = σ(i)`.
///
/// Columns are scanned in increasing order and only strict improvements
/// are taken, so ties resolve toward the lowest column index.
pub fn solve_assignment(cost: &CostMatrix) -> Vec<usize> {
    assert_eq!(
        cost.rows(),
        cost.cols(),
        "assignment needs a square cost matrix"
    );
    hungarian(cost.rows(), |i, j| cost.get(i, j))
}

fn hungarian(n: usize, c: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based potentials; index 0 is the virtual row/column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut sigma = vec![0; n];
    for j in 1..=n {
        sigma[owner[j] - 1] = j - 1;
    }
    sigma
}

/// Gap between the best and second-best assignment values (each scaled by
/// `1/n`, matching the uniform-plan objective). Zero when the optimum is not
/// unique; `+∞` for `n = 1`.
///
/// Every other permutation avoids at least one optimal cell, so the second
/// best is the best optimum over the problems with one optimal cell removed.
pub fn assignment_margin(cost: &CostMatrix) -> f64 {
    let n = cost.rows();
    assert_eq!(n, cost.cols(), "assignment needs a square cost matrix");
    if n == 1 {
        return f64::INFINITY;
    }
    let value = |sigma: &[usize]| -> f64 {
        sigma
            .iter()
            .enumerate()
            .map(|(i, &j)| cost.get(i, j) / n as f64)
            .sum()
    };
    let best = solve_assignment(cost);
    let best_value = value(&best);
    // Large enough that a forbidden cell is never chosen while an
    // alternative exists.
    let big = (cost.max() + 1.0) * (n as f64 + 1.0) * 4.0;
    let mut second = f64::INFINITY;
    for (bi, &bj) in best.iter().enumerate() {
        let sigma = hungarian(n, |i, j| {
            if i == bi && j == bj {
                big
            } else {
                cost.get(i, j)
            }
        });
        second = second.min(value(&sigma));
    }
    (second - best_value).max(0.0)
}
