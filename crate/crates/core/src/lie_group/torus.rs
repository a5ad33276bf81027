//! The flat torus `T^d = (S^1)^d`, angles stored in `[-π, π)`.

use std::f64::consts::{PI, TAU};

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    if (-PI..PI).contains(&angle) {
        return angle;
    }
    let mut wrapped = angle - TAU * ((angle + PI) / TAU).floor();
    // floor() can leave the value on the wrong side of the half-open interval
    // by one rounding step.
    if wrapped >= PI {
        wrapped -= TAU;
    }
    if wrapped < -PI {
        wrapped += TAU;
    }
    wrapped
}

/// Minimizing logarithm of a single angle: the representative in `(-π, π]`.
///
/// The antipodal point is the only cut point of the identity on a circle;
/// it maps to `+π`.
pub fn log_angle(angle: f64) -> f64 {
    let wrapped = wrap_angle(angle);
    if wrapped == -PI {
        PI
    } else {
        wrapped
    }
}

pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wrap_angle(x + y)).collect()
}

pub(crate) fn inv(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| wrap_angle(-x)).collect()
}

pub(crate) fn exp(x: &[f64]) -> Vec<f64> {
    x.iter().copied().map(wrap_angle).collect()
}

pub(crate) fn log(a: &[f64]) -> Vec<f64> {
    a.iter().copied().map(log_angle).collect()
}

/// Distance from the identity to the nearest cut point, i.e. how far the
/// element is from having an ambiguous logarithm.
pub(crate) fn cut_margin(a: &[f64]) -> f64 {
    a.iter()
        .map(|&x| PI - log_angle(x).abs())
        .fold(f64::INFINITY, f64::min)
}
