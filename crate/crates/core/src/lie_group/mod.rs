//! Geometry of the structure group.
//!
//! Three groups are supported: the torus `T^d`, SO(3) with its bi-invariant
//! metric, and the Heisenberg group `H^n`. The first two carry the full
//! Riemannian toolkit (minimizing logarithm, distance, geodesic
//! interpolation). `H^n` is available for its group law, exponential
//! coordinates, left-invariant Riemannian connection and the explicit
//! sub-Riemannian geodesics; it has no distance.
//!
//! Cut-locus policy: on the torus an angle of π logs to `+π`; on SO(3) a
//! rotation by π about `±u` logs to `π u` with `u` the lexicographically
//! larger of the two axes.

mod algebra;
pub mod heisenberg;
mod metric;
pub mod so3;
pub mod torus;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use algebra::AlgebraElement;
pub use heisenberg::HeisenbergGeodesicParams;
pub use metric::{integrate_geodesic, MetricData};

/// Which structure group a value lives on.
///
/// Serialized as `{"tag": "torus" | "so3" | "heisenberg", "dim": k}` where
/// `k` is `d` for `T^d`, 3 for SO(3) (optional on input) and `n` for `H^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub enum Group {
    /// `T^d`, `d >= 1`.
    Torus(usize),
    So3,
    /// `H^n`, algebra dimension `2n + 1`.
    Heisenberg(usize),
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Torus(d) => write!(f, "torus({d})"),
            Group::So3 => write!(f, "so3"),
            Group::Heisenberg(n) => write!(f, "heisenberg({n})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    tag: String,
    #[serde(default)]
    dim: Option<usize>,
}

impl From<Group> for GroupRepr {
    fn from(group: Group) -> Self {
        let (tag, dim) = match group {
            Group::Torus(d) => ("torus", d),
            Group::So3 => ("so3", 3),
            Group::Heisenberg(n) => ("heisenberg", n),
        };
        GroupRepr {
            tag: tag.into(),
            dim: Some(dim),
        }
    }
}

impl TryFrom<GroupRepr> for Group {
    type Error = Error;

    fn try_from(repr: GroupRepr) -> Result<Self> {
        Group::from_tag(&repr.tag, repr.dim)
    }
}

impl Group {
    /// Parses `torus` / `so3` / `heisenberg` with the dimension convention
    /// of the serialized form.
    pub fn from_tag(tag: &str, dim: Option<usize>) -> Result<Self> {
        let group = match (tag, dim) {
            ("torus", Some(d)) => Group::Torus(d),
            ("so3", None | Some(3)) => Group::So3,
            ("heisenberg", Some(n)) => Group::Heisenberg(n),
            ("torus" | "heisenberg", None) => {
                return Err(Error::InvalidArgument(format!("{tag} needs a dimension")))
            }
            ("so3", Some(d)) => {
                return Err(Error::InvalidArgument(format!(
                    "so3 has dimension 3, got {d}"
                )))
            }
            (other, _) => {
                return Err(Error::InvalidArgument(format!(
                    "unknown group tag {other:?}"
                )))
            }
        };
        group.validate()?;
        Ok(group)
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        match *self {
            Group::Torus(d) => d,
            Group::So3 => 3,
            Group::Heisenberg(n) => 2 * n + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Group::Torus(0) | Group::Heisenberg(0) => {
                Err(Error::InvalidArgument(format!("{self} has dimension zero")))
            }
            _ => Ok(()),
        }
    }

    /// Diameter of the group: `π sqrt(d)` for `T^d`, `π` for SO(3).
    pub fn diameter(&self) -> Option<f64> {
        match *self {
            Group::Torus(d) => Some(PI * (d as f64).sqrt()),
            Group::So3 => Some(PI),
            Group::Heisenberg(_) => None,
        }
    }

    /// Whether the group has a Riemannian distance in this crate.
    pub fn has_distance(&self) -> bool {
        !matches!(self, Group::Heisenberg(_))
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            Group::Torus(d) => GroupElement::Torus(vec![0.0; d]),
            Group::So3 => GroupElement::So3(Matrix3::identity()),
            Group::Heisenberg(n) => GroupElement::Heisenberg {
                xi: vec![0.0; n],
                eta: vec![0.0; n],
                t: 0.0,
            },
        }
    }

    /// One-parameter subgroup exponential `exp X`.
    ///
    /// # Panics
    ///
    /// If `x` does not have the algebra dimension of the group.
    pub fn exp(&self, x: &AlgebraElement) -> GroupElement {
        assert_eq!(x.dim(), self.dim(), "algebra dimension mismatch for {self}");
        let c = x.coords();
        match *self {
            Group::Torus(_) => GroupElement::Torus(torus::exp(c)),
            Group::So3 => GroupElement::So3(so3::exp(&Vector3::new(c[0], c[1], c[2]))),
            Group::Heisenberg(n) => GroupElement::Heisenberg {
                xi: c[..n].to_vec(),
                eta: c[n..2 * n].to_vec(),
                t: c[2 * n],
            },
        }
    }

    /// Lie bracket `[X, Y]` computed from the group's closed form.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        assert_eq!(x.dim(), self.dim(), "algebra dimension mismatch for {self}");
        assert_eq!(y.dim(), self.dim(), "algebra dimension mismatch for {self}");
        match *self {
            Group::Torus(d) => AlgebraElement::zeros(d),
            Group::So3 => {
                let a = Vector3::from_column_slice(x.coords());
                let b = Vector3::from_column_slice(y.coords());
                AlgebraElement::new(a.cross(&b).as_slice().to_vec())
            }
            Group::Heisenberg(n) => {
                let (a, b) = (x.coords(), y.coords());
                let mut out = vec![0.0; 2 * n + 1];
                out[2 * n] =
                    4.0 * heisenberg::im_hermitian(&a[..n], &a[n..2 * n], &b[..n], &b[n..2 * n]);
                AlgebraElement::new(out)
            }
        }
    }

    /// Structure constants, Christoffel symbols and Ad-invariance of the
    /// left-invariant metric on this group.
    pub fn metric(&self) -> MetricData {
        MetricData::new(*self)
    }

    pub fn element_from_coords(&self, coords: &[f64]) -> Result<GroupElement> {
        let expected = match *self {
            Group::Torus(d) => d,
            Group::So3 => 9,
            Group::Heisenberg(n) => 2 * n + 1,
        };
        if coords.len() != expected {
            return Err(Error::InvalidElement(format!(
                "{self} points need {expected} coordinates, got {}",
                coords.len()
            )));
        }
        match *self {
            Group::Torus(_) => GroupElement::torus(coords.to_vec()),
            Group::So3 => GroupElement::so3(Matrix3::from_row_slice(coords)),
            Group::Heisenberg(n) => GroupElement::heisenberg(
                coords[..n].to_vec(),
                coords[n..2 * n].to_vec(),
                coords[2 * n],
            ),
        }
    }
}

/// A point of the structure group.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    /// Angles in `[-π, π)`.
    Torus(Vec<f64>),
    So3(Matrix3<f64>),
    Heisenberg {
        xi: Vec<f64>,
        eta: Vec<f64>,
        t: f64,
    },
}

impl GroupElement {
    /// Torus element from arbitrary finite angles (wrapped into `[-π, π)`).
    pub fn torus(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || !angles.iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidElement(
                "torus angles must be finite and nonempty".into(),
            ));
        }
        Ok(GroupElement::Torus(torus::exp(&angles)))
    }

    pub fn so3(r: Matrix3<f64>) -> Result<Self> {
        so3::check_rotation(&r).map_err(Error::InvalidElement)?;
        Ok(GroupElement::So3(r))
    }

    pub fn heisenberg(xi: Vec<f64>, eta: Vec<f64>, t: f64) -> Result<Self> {
        if xi.is_empty() || xi.len() != eta.len() {
            return Err(Error::InvalidElement(
                "heisenberg ξ and η must have equal nonzero length".into(),
            ));
        }
        if !xi.iter().chain(&eta).all(|x| x.is_finite()) || !t.is_finite() {
            return Err(Error::InvalidElement(
                "heisenberg coordinates must be finite".into(),
            ));
        }
        Ok(GroupElement::Heisenberg { xi, eta, t })
    }

    pub fn group(&self) -> Group {
        match self {
            GroupElement::Torus(a) => Group::Torus(a.len()),
            GroupElement::So3(_) => Group::So3,
            GroupElement::Heisenberg { xi, .. } => Group::Heisenberg(xi.len()),
        }
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        let (left, right) = (self.group(), other.group());
        if left == right {
            Ok(())
        } else {
            Err(Error::GroupMismatch { left, right })
        }
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) => {
                GroupElement::Torus(torus::mul(a, b))
            }
            (GroupElement::So3(a), GroupElement::So3(b)) => GroupElement::So3(a * b),
            (
                GroupElement::Heisenberg { xi, eta, t },
                GroupElement::Heisenberg {
                    xi: xi2,
                    eta: eta2,
                    t: t2,
                },
            ) => GroupElement::Heisenberg {
                xi: xi.iter().zip(xi2).map(|(a, b)| a + b).collect(),
                eta: eta.iter().zip(eta2).map(|(a, b)| a + b).collect(),
                t: t + t2 + 2.0 * heisenberg::im_hermitian(xi, eta, xi2, eta2),
            },
            _ => unreachable!("group tags already compared"),
        })
    }

    pub fn inv(&self) -> Self {
        match self {
            GroupElement::Torus(a) => GroupElement::Torus(torus::inv(a)),
            GroupElement::So3(r) => GroupElement::So3(r.transpose()),
            GroupElement::Heisenberg { xi, eta, t } => GroupElement::Heisenberg {
                xi: xi.iter().map(|x| -x).collect(),
                eta: eta.iter().map(|x| -x).collect(),
                t: -t,
            },
        }
    }

    /// `self⁻¹ · other`; exactly the identity when the arguments are equal.
    pub fn between(&self, other: &Self) -> Result<Self> {
        if self == other {
            return Ok(self.group().identity());
        }
        self.inv().mul(other)
    }

    /// `self · exp(x)`.
    pub fn retract(&self, x: &AlgebraElement) -> Self {
        let step = self.group().exp(x);
        self.mul(&step).expect("exp preserves the group tag")
    }

    /// Minimizing logarithm, with the cut-locus tie-break of the module docs.
    ///
    /// On `H^n` this is the inverse of the exponential coordinates.
    pub fn log(&self) -> AlgebraElement {
        match self {
            GroupElement::Torus(a) => AlgebraElement::new(torus::log(a)),
            GroupElement::So3(r) => AlgebraElement::new(so3::log(r).as_slice().to_vec()),
            GroupElement::Heisenberg { xi, eta, t } => {
                let mut coords = xi.clone();
                coords.extend_from_slice(eta);
                coords.push(*t);
                AlgebraElement::new(coords)
            }
        }
    }

    /// Riemannian distance `ρ(self, other) = |log(self⁻¹ other)|`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.same_group(other)?;
        if !self.group().has_distance() {
            return Err(Error::Unsupported {
                op: "distance",
                group: self.group(),
            });
        }
        Ok(self.between(other)?.norm_from_identity())
    }

    /// `ρ(e, self)`. Only meaningful on groups with a distance.
    fn norm_from_identity(&self) -> f64 {
        match self {
            GroupElement::So3(r) => so3::angle(r),
            _ => self.log().norm(),
        }
    }

    /// Point at fraction `lambda` along the minimizing geodesic from `self`
    /// to `other`: `self · exp(λ log(self⁻¹ other))`.
    pub fn geodesic_point(&self, other: &Self, lambda: f64) -> Result<Self> {
        if !self.group().has_distance() {
            return Err(Error::Unsupported {
                op: "geodesic_point",
                group: self.group(),
            });
        }
        let v = self.between(other)?.log();
        Ok(self.retract(&v.scale(lambda)))
    }

    /// Adjoint action `Ad_g X = d/dt g exp(tX) g⁻¹ |_{t=0}`.
    pub fn adjoint(&self, x: &AlgebraElement) -> AlgebraElement {
        assert_eq!(x.dim(), self.group().dim(), "algebra dimension mismatch");
        match self {
            GroupElement::Torus(_) => x.clone(),
            GroupElement::So3(r) => {
                let w = r * Vector3::from_column_slice(x.coords());
                AlgebraElement::new(w.as_slice().to_vec())
            }
            GroupElement::Heisenberg { xi, eta, .. } => {
                let n = xi.len();
                let c = x.coords();
                let mut out = c.to_vec();
                out[2 * n] += 4.0 * heisenberg::im_hermitian(xi, eta, &c[..n], &c[n..2 * n]);
                AlgebraElement::new(out)
            }
        }
    }

    /// How far the element is from the cut locus of the identity, measured
    /// in the group metric. `+∞` on `H^n`, where this notion is not used.
    pub fn cut_margin(&self) -> f64 {
        match self {
            GroupElement::Torus(a) => torus::cut_margin(a),
            GroupElement::So3(r) => so3::cut_margin(r),
            GroupElement::Heisenberg { .. } => f64::INFINITY,
        }
    }

    /// Flat coordinate list as used in bundles: angles, row-major matrix, or
    /// `(ξ, η, t)`.
    pub fn to_coords(&self) -> Vec<f64> {
        match self {
            GroupElement::Torus(a) => a.clone(),
            GroupElement::So3(r) => r.transpose().as_slice().to_vec(),
            GroupElement::Heisenberg { .. } => self.log().into_coords(),
        }
    }

    /// Largest absolute coordinate difference; a representation-level
    /// comparison, not a distance (torus angles are compared modulo 2π).
    pub fn max_coord_diff(&self, other: &Self) -> f64 {
        match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| torus::log_angle(x - y).abs())
                .fold(0.0, f64::max),
            (GroupElement::So3(a), GroupElement::So3(b)) => (a - b).amax(),
            (GroupElement::Heisenberg { .. }, GroupElement::Heisenberg { .. })
                if self.group() == other.group() =>
            {
                self.log().max_abs_diff(&other.log())
            }
            _ => f64::INFINITY,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == self.group().identity()
    }
}

/// Evaluates the curve with parameter `(a + ib, v, r)` at arclength `s`.
pub fn heisenberg_geodesic(params: &HeisenbergGeodesicParams, s: f64) -> GroupElement {
    let (xi, eta, t) = heisenberg::geodesic(params, s);
    GroupElement::Heisenberg { xi, eta, t }
}

/// Coordinate velocity of [`heisenberg_geodesic`], ordered `(ξ', η', t')`.
pub fn heisenberg_geodesic_velocity(params: &HeisenbergGeodesicParams, s: f64) -> AlgebraElement {
    let (mut xi, eta, t) = heisenberg::geodesic_velocity(params, s);
    xi.extend(eta);
    xi.push(t);
    AlgebraElement::new(xi)
}

/// Left-trivialized velocity `γ(s)⁻¹ γ'(s)` of the Heisenberg curve. Its
/// last coordinate vanishes exactly when the curve is horizontal.
pub fn heisenberg_body_velocity(params: &HeisenbergGeodesicParams, s: f64) -> AlgebraElement {
    let n = params.n();
    let (xi, eta, _) = heisenberg::geodesic(params, s);
    let mut vel = heisenberg_geodesic_velocity(params, s).into_coords();
    let c = vel.clone();
    vel[2 * n] = c[2 * n] - 2.0 * heisenberg::im_hermitian(&xi, &eta, &c[..n], &c[n..2 * n]);
    AlgebraElement::new(vel)
}

/// Horizontal speed `|(ξ', η')|`.
pub fn heisenberg_horizontal_speed(params: &HeisenbergGeodesicParams, s: f64) -> f64 {
    let n = params.n();
    let vel = heisenberg_geodesic_velocity(params, s);
    vel.coords()[..2 * n]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests;
