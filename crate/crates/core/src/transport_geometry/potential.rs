use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ot_solver::check_exponent;
use crate::path_space::{
    d_l2, trapezoid_weights, CameronMartinVector, DiscretePath, EmpiricalMeasure,
};

use super::DisplacementField;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Smallest accepted finite-difference step.
pub const MIN_STEP: f64 = 1e-12;

/// `φ = ψ^c` on all paths: `φ(γ) = min_j (d_L2(γ, σ_j)^p - ψ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CTransformPotential {
    target: EmpiricalMeasure,
    psi: Vec<f64>,
    p: f64,
}

impl CTransformPotential {
    pub fn new(target: EmpiricalMeasure, psi: Vec<f64>, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if psi.len() != target.len() || psi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "one finite ψ value per target atom is required".into(),
            ));
        }
        Ok(Self { target, psi, p })
    }

    pub fn target(&self) -> &EmpiricalMeasure {
        &self.target
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `(argmin, φ(γ))`, the lowest index winning ties.
    pub fn evaluate(&self, path: &DiscretePath) -> Result<(usize, f64)> {
        let mut best = (0, f64::INFINITY);
        for (j, (sigma, psi)) in self.target.support().iter().zip(&self.psi).enumerate() {
            let value = d_l2(path, sigma)?.powf(self.p) - psi;
            if value < best.1 {
                best = (j, value);
            }
        }
        Ok(best)
    }

    pub fn value(&self, path: &DiscretePath) -> Result<f64> {
        Ok(self.evaluate(path)?.1)
    }

    /// Target indices attaining the minimum within `tol`.
    pub fn c_subdifferential(&self, path: &DiscretePath, tol: f64) -> Result<Vec<usize>> {
        let values = self
            .target
            .support()
            .iter()
            .zip(&self.psi)
            .map(|(sigma, psi)| Ok(d_l2(path, sigma)?.powf(self.p) - psi))
            .collect::<Result<Vec<f64>>>()?;
        let best = values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((0..values.len())
            .filter(|&j| values[j] <= best + tol)
            .collect())
    }
}

/// Finite-difference scheme for directional derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiniteDifference {
    /// `(φ(γ e^{εh}) - φ(γ e^{-εh})) / 2ε`.
    #[default]
    Central,
    /// `(φ(γ e^{εh}) - φ(γ)) / ε`.
    Forward,
}

/// `<∇φ(γ), h>_H` by finite differences of `φ` under `γ(t_k) exp(±ε h(t_k))`.
pub fn directional_derivative(
    potential: &CTransformPotential,
    path: &DiscretePath,
    h: &CameronMartinVector,
    step: f64,
    scheme: FiniteDifference,
) -> Result<f64> {
    if !(step >= MIN_STEP && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be >= {MIN_STEP:e}, got {step}"
        )));
    }
    let up = potential.value(&path.perturb(h, step)?)?;
    Ok(match scheme {
        FiniteDifference::Central => {
            (up - potential.value(&path.perturb(h, -step)?)?) / (2.0 * step)
        }
        FiniteDifference::Forward => (up - potential.value(path)?) / step,
    })
}

/// H-gradient of `φ` at `path` within the span of `basis`.
///
/// Each directional derivative `D_b = <∇φ, h_b>_H` is a finite difference
/// of `φ` under the right perturbation `γ(t_k) exp(ε h_b(t_k))`; the
/// coefficients `α` of `∇φ = Σ_b α_b h_b` solve the Gram system
/// `<h_b, h_b'>_H α = D`.
pub fn potential_gradient(
    potential: &CTransformPotential,
    path: &DiscretePath,
    basis: &[CameronMartinVector],
    step: f64,
    scheme: FiniteDifference,
) -> Result<CameronMartinVector> {
    if !(step >= MIN_STEP && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be >= {MIN_STEP:e}, got {step}"
        )));
    }
    let Some(first) = basis.first() else {
        return Err(Error::InvalidArgument("gradient basis is empty".into()));
    };
    if basis
        .iter()
        .any(|h| h.grid() != path.grid() || h.dim() != path.group().dim())
    {
        return Err(Error::InvalidArgument(
            "basis vectors must match the path grid and algebra".into(),
        ));
    }
    let b = basis.len();
    let mut gram = DMatrix::zeros(b, b);
    for r in 0..b {
        for c in r..b {
            let g = basis[r].inner(&basis[c])?;
            gram[(r, c)] = g;
            gram[(c, r)] = g;
        }
    }
    let derivatives = basis
        .iter()
        .map(|h| directional_derivative(potential, path, h, step, scheme))
        .collect::<Result<Vec<f64>>>()?;
    let alpha = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("gradient basis is linearly dependent".into()))?
        .solve(&DVector::from_vec(derivatives));
    let mut out =
        CameronMartinVector::zeros(first.dim(), first.grid(), basis.iter().all(|h| h.is_loop()));
    for (h, a) in basis.iter().zip(alpha.iter()) {
        out = out.add_scaled(*a, h)?;
    }
    Ok(out)
}

/// First variation of `d_L2(γ₁, γ₂)^p` along the right perturbation by `h`:
/// `-p d^{p-2} Σ_k w_k <V_k, h(t_k)>`.
pub fn predicted_directional_derivative(
    g1: &DiscretePath,
    g2: &DiscretePath,
    h: &CameronMartinVector,
    p: f64,
) -> Result<f64> {
    let field = DisplacementField::new(g1, g2)?;
    if h.grid() != g1.grid() {
        return Err(Error::GridMismatch(g1.grid(), h.grid()));
    }
    let d = field.l2_norm();
    let w = trapezoid_weights(g1.grid());
    let pairing: f64 = field
        .vectors()
        .iter()
        .zip(h.values())
        .zip(&w)
        .map(|((v, hk), w)| w * v.dot(hk))
        .sum();
    Ok(-p * d.powf(p - 2.0) * pairing)
}
