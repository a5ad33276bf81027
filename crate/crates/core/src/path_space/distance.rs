use std::cmp::Ordering;

use crate::error::Result;

use super::DiscretePath;

/// Trapezoid weights on `N + 1` nodes: `1/(2N)` at the ends, `1/N` inside.
pub fn trapezoid_weights(grid: usize) -> Vec<f64> {
    assert!(grid >= 1, "grid must be positive");
    let n = grid as f64;
    let mut w = vec![1.0 / n; grid + 1];
    w[0] = 0.5 / n;
    w[grid] = 0.5 / n;
    w
}

/// `ρ(γ₁(t_k), γ₂(t_k))` for every node.
pub fn pointwise_distances(g1: &DiscretePath, g2: &DiscretePath) -> Result<Vec<f64>> {
    g1.check_compatible(g2)?;
    g1.points()
        .iter()
        .zip(g2.points())
        .map(|(a, b)| a.distance(b))
        .collect()
}

/// Uniform distance `max_k ρ(γ₁(t_k), γ₂(t_k))`.
pub fn d_uniform(g1: &DiscretePath, g2: &DiscretePath) -> Result<f64> {
    Ok(pointwise_distances(g1, g2)?.into_iter().fold(0.0, f64::max))
}

/// L² distance `(Σ_k w_k ρ(γ₁(t_k), γ₂(t_k))²)^{1/2}` with trapezoid weights.
pub fn d_l2(g1: &DiscretePath, g2: &DiscretePath) -> Result<f64> {
    let rho = pointwise_distances(g1, g2)?;
    let w = trapezoid_weights(g1.grid());
    Ok(rho
        .iter()
        .zip(&w)
        .map(|(r, w)| w * r * r)
        .sum::<f64>()
        .sqrt())
}

/// Cameron–Martin distance: discrete energy of `v = γ₁⁻¹γ₂`,
/// `(N Σ_k |log(v_k⁻¹ v_{k+1})|²)^{1/2}`.
///
/// Finite for every pair of discrete paths, although its continuum limit
/// is infinite for rough paths.
pub fn d_cm(g1: &DiscretePath, g2: &DiscretePath) -> Result<f64> {
    g1.check_compatible(g2)?;
    // Swapping the arguments conjugates every increment, which changes the
    // rounding on SO(3); a canonical order keeps the result symmetric.
    let (g1, g2) = if coords_cmp(g1, g2).is_gt() {
        (g2, g1)
    } else {
        (g1, g2)
    };
    let v = g1
        .points()
        .iter()
        .zip(g2.points())
        .map(|(a, b)| a.between(b))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = 0.0;
    for pair in v.windows(2) {
        sum += pair[0].between(&pair[1])?.log().norm_squared();
    }
    // Overflow surfaces as +inf rather than an error.
    Ok((g1.grid() as f64 * sum).sqrt())
}

fn coords_cmp(a: &DiscretePath, b: &DiscretePath) -> Ordering {
    for (p, q) in a.points().iter().zip(b.points()) {
        for (x, y) in p.to_coords().iter().zip(q.to_coords()) {
            match x.total_cmp(&y) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
    }
    Ordering::Equal
}
