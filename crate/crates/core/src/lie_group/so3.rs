//! SO(3) with the bi-invariant metric in which the hat images of the standard
//! basis of R³ are orthonormal.
//!
//! With this normalization `|ω|` is the rotation angle, so the distance from
//! the identity is the angle of the rotation and the diameter is π.
//! Exponential and logarithm use the closed forms (Rodrigues and axis-angle
//! extraction) with Taylor guards near θ = 0 and a symmetric-part extraction
//! near θ = π.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

/// Below this angle the closed forms switch to second-order Taylor expansions.
const SMALL_ANGLE: f64 = 1e-4;

/// Skew-part norm under which a rotation by π is treated as a cut point and
/// the axis sign is chosen by the tie-break.
const CUT_SKEW_TOL: f64 = 1e-12;

pub const ORTHOGONALITY_TOL: f64 = 1e-10;

pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

pub fn exp(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta_sq = w.norm_squared();
    let theta = theta_sq.sqrt();
    let k = hat(w);
    let k2 = k * k;
    let (a, b) = if theta < SMALL_ANGLE {
        (1.0 - theta_sq / 6.0, 0.5 - theta_sq / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta_sq)
    };
    Matrix3::identity() + k * a + k2 * b
}

/// Rotation angle in `[0, π]` together with the skew vector `sin θ · u`.
fn angle_and_skew(r: &Matrix3<f64>) -> (f64, Vector3<f64>) {
    let skew = vee(&(r - r.transpose())) * 0.5;
    let cos_theta = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = skew.norm().atan2(cos_theta);
    (theta, skew)
}

pub fn angle(r: &Matrix3<f64>) -> f64 {
    angle_and_skew(r).0
}

/// Of `u` and `-u`, the lexicographically larger vector: the first
/// coordinate that is clearly nonzero is made positive.
fn lexicographic_representative(u: Vector3<f64>) -> Vector3<f64> {
    for i in 0..3 {
        if u[i].abs() > 1e-12 {
            return if u[i] > 0.0 { u } else { -u };
        }
    }
    u
}

pub fn log(r: &Matrix3<f64>) -> Vector3<f64> {
    let (theta, skew) = angle_and_skew(r);
    if theta < SMALL_ANGLE {
        // θ / sin θ = 1 + θ²/6 + O(θ⁴)
        return skew * (1.0 + theta * theta / 6.0);
    }
    if PI - theta > SMALL_ANGLE {
        return skew * (theta / theta.sin());
    }
    // Near π the skew part carries no usable magnitude; recover the axis from
    // the symmetric part (1 - cos θ) u uᵀ and take the sign from the skew part.
    let cos_theta = theta.cos();
    let sym = (r + r.transpose()) * 0.5 - Matrix3::identity() * cos_theta;
    let k = (0..3)
        .max_by(|&i, &j| sym[(i, i)].total_cmp(&sym[(j, j)]))
        .unwrap_or(0);
    let column = sym.column(k).into_owned();
    let mut axis = column / column.norm();
    if skew.norm() > CUT_SKEW_TOL {
        if axis.dot(&skew) < 0.0 {
            axis = -axis;
        }
    } else {
        axis = lexicographic_representative(axis);
    }
    axis * theta
}

/// `π - θ`: distance to the cut locus of the identity (rotations by π).
pub fn cut_margin(r: &Matrix3<f64>) -> f64 {
    PI - angle(r)
}

pub fn check_rotation(r: &Matrix3<f64>) -> Result<(), String> {
    if !r.iter().all(|x| x.is_finite()) {
        return Err("non-finite rotation entry".into());
    }
    let gram = r.transpose() * r - Matrix3::identity();
    let worst = gram.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if worst > ORTHOGONALITY_TOL {
        return Err(format!("RᵀR deviates from identity by {worst:e}"));
    }
    let det = r.determinant();
    if (det - 1.0).abs() > ORTHOGONALITY_TOL {
        return Err(format!("determinant {det} is not 1"));
    }
    Ok(())
}
