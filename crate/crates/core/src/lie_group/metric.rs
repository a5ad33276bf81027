use crate::error::{Error, Result};

use super::{AlgebraElement, Group, GroupElement};

/// Left-invariant metric data in the orthonormal basis `e_1..e_d`.
///
/// * `c[i][j][k] = <[e_i, e_j], e_k>` (structure constants)
/// * `Γ[i][j][k] = <∇_{e_i} e_j, e_k>
///              = ½ (c[i][j][k] - c[i][k][j] - c[j][k][i])`
#[derive(Debug, Clone, PartialEq)]
pub struct MetricData {
    group: Group,
    dim: usize,
    structure: Vec<f64>,
    christoffel: Vec<f64>,
    ad_invariant: bool,
}

impl MetricData {
    pub fn new(group: Group) -> Self {
        let d = group.dim();
        let mut structure = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                let bracket =
                    group.bracket(&AlgebraElement::basis(d, i), &AlgebraElement::basis(d, j));
                for (k, value) in bracket.coords().iter().enumerate() {
                    structure[(i * d + j) * d + k] = *value;
                }
            }
        }
        let at = |i: usize, j: usize, k: usize| structure[(i * d + j) * d + k];
        let mut christoffel = vec![0.0; d * d * d];
        let mut ad_invariant = true;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    christoffel[(i * d + j) * d + k] =
                        0.5 * (at(i, j, k) - at(i, k, j) - at(j, k, i));
                    if at(i, j, k) != -at(i, k, j) {
                        ad_invariant = false;
                    }
                }
            }
        }
        Self {
            group,
            dim: d,
            structure,
            christoffel,
            ad_invariant,
        }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn christoffel(&self, i: usize, j: usize, k: usize) -> f64 {
        self.christoffel[(i * self.dim + j) * self.dim + k]
    }

    /// True when the structure constants are totally antisymmetric, i.e.
    /// the metric is Ad-invariant.
    pub fn is_ad_invariant(&self) -> bool {
        self.ad_invariant
    }

    /// `ad_X Y = [X, Y]` through the structure constants.
    pub fn ad(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let d = self.dim;
        let (a, b) = (x.coords(), y.coords());
        let mut out = vec![0.0; d];
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = a[i] * b[j];
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.structure_constant(i, j, k);
                }
            }
        }
        AlgebraElement::new(out)
    }

    /// `ad_X^* Y`, the metric adjoint: `<ad_X^* Y, Z> = <Y, [X, Z]>`.
    pub fn ad_star(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let d = self.dim;
        let (a, b) = (x.coords(), y.coords());
        let mut out = vec![0.0; d];
        for i in 0..d {
            for (j, o) in out.iter_mut().enumerate() {
                for k in 0..d {
                    *o += a[i] * b[k] * self.structure_constant(i, j, k);
                }
            }
        }
        AlgebraElement::new(out)
    }

    /// Levi-Civita connection on left-invariant fields:
    /// `∇_A B = ½ (ad_A B - ad_A^* B - ad_B^* A)`.
    pub fn levi_civita(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out = self.ad(a, b);
        out = out.add_scaled(-1.0, &self.ad_star(a, b));
        out = out.add_scaled(-1.0, &self.ad_star(b, a));
        out.scale(0.5)
    }

    /// Right-hand side of the geodesic equation in body coordinates,
    /// `dω_k/dt = -Σ_{ij} Γ[i][j][k] ω_i ω_j`.
    pub fn geodesic_acceleration(&self, omega: &AlgebraElement) -> AlgebraElement {
        let d = self.dim;
        let w = omega.coords();
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                let ww = w[i] * w[j];
                if ww == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o -= self.christoffel(i, j, k) * ww;
                }
            }
        }
        AlgebraElement::new(out)
    }

    /// Truncated inverse differential of exp for left-trivialized
    /// velocities: `y = y0 exp(u)`, `y⁻¹y' = w` gives
    /// `u' = dexp⁻¹_{-u}(w) ≈ w + ½[u, w] + 1/12 [u, [u, w]]`.
    fn dexp_inv(&self, u: &AlgebraElement, w: &AlgebraElement) -> AlgebraElement {
        let uw = self.ad(u, w);
        let uuw = self.ad(u, &uw);
        w.add_scaled(0.5, &uw).add_scaled(1.0 / 12.0, &uuw)
    }
}

/// Integrates the geodesic leaving `start` with body velocity `x0` over unit
/// time, returning `steps + 1` points at `t = k / steps`.
///
/// The body velocity follows the Christoffel ODE and the group point is
/// reconstructed with one exponential per step (a fourth-order
/// Runge–Kutta–Munthe-Kaas scheme). For an Ad-invariant metric the body
/// velocity is constant and the output is `start · exp(t x0)`.
pub fn integrate_geodesic(
    start: &GroupElement,
    x0: &AlgebraElement,
    steps: usize,
) -> Result<Vec<GroupElement>> {
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "integrate_geodesic needs steps >= 1".into(),
        ));
    }
    let group = start.group();
    if x0.dim() != group.dim() || !x0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "initial velocity must be finite with dimension {}",
            group.dim()
        )));
    }
    let metric = group.metric();
    let h = 1.0 / steps as f64;
    let mut point = start.clone();
    let mut omega = x0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(point.clone());
    for _ in 0..steps {
        let f1 = metric.geodesic_acceleration(&omega);
        let k1 = omega.clone();

        let w2 = omega.add_scaled(0.5 * h, &f1);
        let f2 = metric.geodesic_acceleration(&w2);
        let k2 = metric.dexp_inv(&k1.scale(0.5 * h), &w2);

        let w3 = omega.add_scaled(0.5 * h, &f2);
        let f3 = metric.geodesic_acceleration(&w3);
        let k3 = metric.dexp_inv(&k2.scale(0.5 * h), &w3);

        let w4 = omega.add_scaled(h, &f3);
        let f4 = metric.geodesic_acceleration(&w4);
        let k4 = metric.dexp_inv(&k3.scale(h), &w4);

        let mut u = k1;
        u = u
            .add_scaled(2.0, &k2)
            .add_scaled(2.0, &k3)
            .add_scaled(1.0, &k4);
        point = point.retract(&u.scale(h / 6.0));

        let mut df = f1;
        df = df
            .add_scaled(2.0, &f2)
            .add_scaled(2.0, &f3)
            .add_scaled(1.0, &f4);
        omega = omega.add_scaled(h / 6.0, &df);
        out.push(point.clone());
    }
    Ok(out)
}
