use crate::error::{Error, Result};
use crate::lie_group::{AlgebraElement, Group, GroupElement};
use crate::path_space::{CameronMartinVector, DiscretePath};

use super::DisplacementField;

/// `Ṽ_k = ½ N² (g_{k+1} - 2 g_k + g_{k-1})` at the interior nodes
/// `k = 1..N-1` of a gradient field `g = ∇φ(γ₁)`.
///
/// The hat-basis gradient vanishes at both ends, so the central stencil is
/// available at every interior node.
pub fn reconstruct_displacement(gradient: &CameronMartinVector) -> Result<Vec<AlgebraElement>> {
    let n = gradient.grid();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "map reconstruction needs N >= 4, got {n}"
        )));
    }
    let scale = 0.5 * (n * n) as f64;
    let g = gradient.values();
    Ok((1..n)
        .map(|k| {
            let second = &(&g[k + 1] - &g[k].scale(2.0)) + &g[k - 1];
            second.scale(scale)
        })
        .collect())
}

/// The explicit map `T(γ₁)(t_k) = γ₁(t_k) exp(Ṽ_k)` for `p = 2`.
///
/// Interior nodes use [`reconstruct_displacement`]; `t_0` stays at the
/// identity and `t_N` reuses `Ṽ_{N-1}`, so only interior nodes carry the
/// recovered information.
pub fn reconstruct_map(gradient: &CameronMartinVector, g1: &DiscretePath) -> Result<DiscretePath> {
    if gradient.grid() != g1.grid() {
        return Err(Error::GridMismatch(g1.grid(), gradient.grid()));
    }
    if gradient.dim() != g1.group().dim() {
        return Err(Error::InvalidArgument(
            "gradient and path live on different algebras".into(),
        ));
    }
    let v = reconstruct_displacement(gradient)?;
    let n = g1.grid();
    let mut points = Vec::with_capacity(n + 1);
    points.push(g1.point(0).clone());
    for k in 1..n {
        points.push(g1.point(k).retract(&v[k - 1]));
    }
    points.push(g1.point(n).retract(&v[n - 2]));
    DiscretePath::new(points)
}

/// The geodesic `s ↦ v(s)` with constant body velocity `V` and `v(1) = e`,
/// integrated backward in `steps` exact flow steps `v(s - h) = v(s) exp(-hV)`.
/// Returns `v(k / steps)` for `k = 0..=steps`; `v(0) = exp(V)⁻¹`.
pub fn reconstruct_geodesic_from_v(
    group: Group,
    v: &AlgebraElement,
    steps: usize,
) -> Result<Vec<GroupElement>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if v.dim() != group.dim() || !v.is_finite() {
        return Err(Error::InvalidArgument(
            "V must be finite and match the algebra".into(),
        ));
    }
    let back = group.exp(&v.scale(-1.0 / steps as f64));
    let mut curve = vec![group.identity(); steps + 1];
    for k in (0..steps).rev() {
        curve[k] = curve[k + 1].mul(&back)?;
    }
    Ok(curve)
}

/// Window averages of a displacement field and their small-window limit.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierEstimate {
    pub eps: Vec<f64>,
    pub estimates: Vec<AlgebraElement>,
    /// The estimate at the smallest window.
    pub limit: AlgebraElement,
}

/// Averages the piecewise-linear interpolant of the field over the windows
/// `[t₀ - ε, t₀ + ε] ∩ [0, 1]`, exactly, for each `ε` in `eps`.
pub fn mollifier_extract(
    field: &DisplacementField,
    t0: f64,
    eps: &[f64],
) -> Result<MollifierEstimate> {
    if !(0.0..=1.0).contains(&t0) {
        return Err(Error::InvalidArgument(format!(
            "t₀ = {t0} lies outside [0, 1]"
        )));
    }
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(
            "window sizes must be positive".into(),
        ));
    }
    let estimates: Vec<AlgebraElement> = eps
        .iter()
        .map(|&e| window_average(field, (t0 - e).max(0.0), (t0 + e).min(1.0)))
        .collect();
    let smallest = (0..eps.len())
        .min_by(|&a, &b| eps[a].total_cmp(&eps[b]))
        .expect("nonempty");
    let limit = estimates[smallest].clone();
    Ok(MollifierEstimate {
        eps: eps.to_vec(),
        estimates,
        limit,
    })
}

/// `(1 / (b - a)) ∫_a^b V(t) dt` for the piecewise-linear interpolant.
fn window_average(field: &DisplacementField, a: f64, b: f64) -> AlgebraElement {
    let n = field.grid();
    let nf = n as f64;
    let at = |t: f64| -> AlgebraElement {
        let k = ((t * nf).floor() as usize).min(n - 1);
        let s = t * nf - k as f64;
        field
            .vector(k)
            .scale(1.0 - s)
            .add_scaled(s, field.vector(k + 1))
    };
    let mut total = AlgebraElement::zeros(field.vector(0).dim());
    for k in 0..n {
        let lo = a.max(k as f64 / nf);
        let hi = b.min((k + 1) as f64 / nf);
        if hi > lo {
            // Midpoint rule is exact for linear pieces.
            total = total.add_scaled(hi - lo, &at(0.5 * (lo + hi)));
        }
    }
    total.scale(1.0 / (b - a))
}
