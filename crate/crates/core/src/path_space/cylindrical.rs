//! Gradients of cylindrical functions `F(ℓ) = f(ℓ(θ_1), ..., ℓ(θ_m))` on
//! loops, represented in the Cameron–Martin space through the Green kernel
//! `G(θ, t) = min(θ, t) - θ t` of `-d²/dt²` with Dirichlet ends.

use crate::error::{Error, Result};
use crate::lie_group::{AlgebraElement, GroupElement};

use super::{CameronMartinVector, DiscreteLoop};

/// Step of the central-difference fallback for slot gradients.
pub const FD_STEP: f64 = 1e-5;

/// Tolerance for `θ N` to count as an integer.
const GRID_TOL: f64 = 1e-9;

pub fn green_kernel(theta: f64, t: f64) -> f64 {
    theta.min(t) - theta * t
}

/// A smooth function of `m` group points.
pub trait CylindricalFunction {
    fn value(&self, points: &[GroupElement]) -> f64;

    /// Left-trivialized gradient in slot `slot`: the algebra vector `g` with
    /// `d/dε f(.., x_slot exp(ε X), ..) = <g, X>`. `None` selects the
    /// central-difference fallback.
    fn slot_gradient(&self, _points: &[GroupElement], _slot: usize) -> Option<AlgebraElement> {
        None
    }
}

/// A cylindrical function given by a closure, gradients by finite differences.
pub struct FnCylindrical<F>(pub F);

impl<F: Fn(&[GroupElement]) -> f64> CylindricalFunction for FnCylindrical<F> {
    fn value(&self, points: &[GroupElement]) -> f64 {
        (self.0)(points)
    }
}

fn fd_slot_gradient(
    f: &dyn CylindricalFunction,
    points: &[GroupElement],
    slot: usize,
) -> AlgebraElement {
    let d = points[slot].group().dim();
    let mut grad = vec![0.0; d];
    let mut moved = points.to_vec();
    for (i, g) in grad.iter_mut().enumerate() {
        let e = AlgebraElement::basis(d, i);
        moved[slot] = points[slot].retract(&e.scale(FD_STEP));
        let up = f.value(&moved);
        moved[slot] = points[slot].retract(&e.scale(-FD_STEP));
        let down = f.value(&moved);
        *g = (up - down) / (2.0 * FD_STEP);
    }
    AlgebraElement::new(grad)
}

/// `∇F(ℓ)(t_k) = Σ_i G(θ_i, t_k) ∂_i f`, with `∂_i f` left-trivialized at
/// `ℓ(θ_i)`. Every `θ_i` must be a grid time and the `θ_i` strictly
/// increasing in `[0, 1]`.
pub fn cylindrical_gradient(
    f: &dyn CylindricalFunction,
    thetas: &[f64],
    ell: &DiscreteLoop,
) -> Result<CameronMartinVector> {
    let n = ell.grid();
    let mut nodes = Vec::with_capacity(thetas.len());
    for (i, &theta) in thetas.iter().enumerate() {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "θ = {theta} lies outside [0, 1]"
            )));
        }
        if i > 0 && theta <= thetas[i - 1] {
            return Err(Error::InvalidArgument(
                "θ values must be strictly increasing".into(),
            ));
        }
        let scaled = theta * n as f64;
        let k = scaled.round();
        if (scaled - k).abs() > GRID_TOL {
            return Err(Error::InvalidArgument(format!(
                "θ = {theta} is not a grid time for N = {n}"
            )));
        }
        nodes.push(k as usize);
    }
    let points: Vec<GroupElement> = nodes.iter().map(|&k| ell.point(k).clone()).collect();
    let d = ell.group().dim();
    let mut values = vec![AlgebraElement::zeros(d); n + 1];
    for (slot, &theta) in thetas.iter().enumerate() {
        let grad = f
            .slot_gradient(&points, slot)
            .unwrap_or_else(|| fd_slot_gradient(f, &points, slot));
        if grad.dim() != d {
            return Err(Error::InvalidArgument(
                "slot gradient has the wrong dimension".into(),
            ));
        }
        for (k, v) in values.iter_mut().enumerate().skip(1).take(n - 1) {
            *v = v.add_scaled(green_kernel(theta, k as f64 / n as f64), &grad);
        }
    }
    CameronMartinVector::new(values, true)
}
