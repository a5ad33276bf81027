//! The Heisenberg group `H^n ≅ C^n × R` in exponential coordinates.
//!
//! A point is `[ζ, t]` with `ζ_j = ξ_j + i η_j`; the group law is
//!
//! ```text
//! [ζ, t] · [ζ', t'] = [ζ + ζ', t + t' + 2 Σ_j Im(ζ_j conj(ζ'_j))]
//! ```
//!
//! In these coordinates the exponential map is the identity on coordinates
//! and the bracket is `[(ζ, s), (ω, u)] = (0, 4 Σ_j Im(ζ_j conj(ω_j)))`.
//! The algebra basis is ordered `(ξ_1..ξ_n, η_1..η_n, t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Σ_j Im(ζ_j conj(ω_j))` for `ζ = ξ + iη`, `ω = x + iy`.
pub(crate) fn im_hermitian(xi: &[f64], eta: &[f64], x: &[f64], y: &[f64]) -> f64 {
    xi.iter()
        .zip(eta)
        .zip(x.iter().zip(y))
        .map(|((a, b), (c, d))| b * c - a * d)
        .sum()
}

/// Parameters `(a + ib, v, r)` of a sub-Riemannian geodesic leaving the
/// identity with unit horizontal speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergGeodesicParams {
    a: Vec<f64>,
    b: Vec<f64>,
    v: f64,
    r: f64,
}

impl HeisenbergGeodesicParams {
    pub const UNIT_TOL: f64 = 1e-12;

    pub fn new(a: Vec<f64>, b: Vec<f64>, v: f64, r: f64) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "a and b must be nonempty of equal length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if !(r > 0.0 && r.is_finite()) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite v and r > 0, got v={v}, r={r}"
            )));
        }
        let norm_sq: f64 = a.iter().chain(&b).map(|x| x * x).sum();
        if (norm_sq.sqrt() - 1.0).abs() > Self::UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "|a + ib| must be 1, got {}",
                norm_sq.sqrt()
            )));
        }
        Ok(Self { a, b, v, r })
    }

    /// The minimal geodesic from `[0, 0]` to the vertical point `[0, t]`:
    /// parameter `(a + ib, ±2π, sqrt(π|t|))`, with the sign of `v` following
    /// the sign of `t`.
    pub fn to_vertical(a: Vec<f64>, b: Vec<f64>, t: f64) -> Result<Self> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::InvalidArgument(
                "vertical target must be finite and nonzero".into(),
            ));
        }
        let v = 2.0 * std::f64::consts::PI * t.signum();
        Self::new(a, b, v, (std::f64::consts::PI * t.abs()).sqrt())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Point `(ξ(s), η(s), t(s))` of the curve with the given parameters.
pub(crate) fn geodesic(params: &HeisenbergGeodesicParams, s: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let HeisenbergGeodesicParams { a, b, v, r } = params;
    let (v, r) = (*v, *r);
    if v == 0.0 {
        let xi = a.iter().map(|aj| aj * s).collect();
        let eta = b.iter().map(|bj| bj * s).collect();
        return (xi, eta, 0.0);
    }
    let phase = v * s / r;
    let (sin, cos) = phase.sin_cos();
    let scale = r / v;
    let xi = a
        .iter()
        .zip(b)
        .map(|(aj, bj)| scale * (bj * (1.0 - cos) + aj * sin))
        .collect();
    let eta = a
        .iter()
        .zip(b)
        .map(|(aj, bj)| scale * (-aj * (1.0 - cos) + bj * sin))
        .collect();
    let t = 2.0 * r * r / (v * v) * (phase - sin);
    (xi, eta, t)
}

/// Coordinate velocity `(ξ'(s), η'(s), t'(s))`.
pub(crate) fn geodesic_velocity(
    params: &HeisenbergGeodesicParams,
    s: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let HeisenbergGeodesicParams { a, b, v, r } = params;
    let (v, r) = (*v, *r);
    if v == 0.0 {
        return (a.clone(), b.clone(), 0.0);
    }
    let phase = v * s / r;
    let (sin, cos) = phase.sin_cos();
    let xi = a
        .iter()
        .zip(b)
        .map(|(aj, bj)| bj * sin + aj * cos)
        .collect();
    let eta = a
        .iter()
        .zip(b)
        .map(|(aj, bj)| -aj * sin + bj * cos)
        .collect();
    let t = 2.0 * r / v * (1.0 - cos);
    (xi, eta, t)
}
