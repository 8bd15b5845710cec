//! Angles modulo 2π with canonical representatives in (−π, π].

use std::f64::consts::{PI, TAU};

/// Tolerance for angle comparisons modulo 2π.
pub const ANGLE_TOL: f64 = 1e-12;

/// Reduces `theta` to its representative in (−π, π].
pub fn normalize(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// min over k of |a − b − 2πk|.
pub fn distance(a: f64, b: f64) -> f64 {
    normalize(a - b).abs()
}

pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    distance(a, b) <= tol
}
