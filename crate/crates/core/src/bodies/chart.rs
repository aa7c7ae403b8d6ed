//! The north-pole chart identifying `∂K` with the extended complex plane.
//!
//! `h⁻¹(z)` is the second intersection of the chord from `N` towards
//! `(Re z, Im z, -1)` with `∂K`, and `h(N) = ∞`. For the unit ball this is
//! the standard stereographic projection scaled by 2.

use nalgebra::Vector3;
use num_complex::Complex64;

use super::{north_pole, BodyError, ConvexBody, Point3};
use crate::mobius::ExtComplex;

/// A body together with its chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyChart {
    pub body: ConvexBody,
}

impl BodyChart {
    pub fn new(body: ConvexBody) -> Self {
        BodyChart { body }
    }

    pub fn forward(&self, p: &Point3) -> ExtComplex {
        chart_forward(p)
    }

    pub fn inverse(&self, z: ExtComplex) -> Result<Point3, BodyError> {
        chart_inverse(&self.body, z)
    }
}

/// Projects a boundary point from `N` onto the plane `z = -1`.
pub fn chart_forward(p: &Point3) -> ExtComplex {
    let denom = 1.0 - p.z;
    if denom <= 0.0 || (p - north_pole()).norm() == 0.0 {
        return ExtComplex::Infinity;
    }
    let t = 2.0 / denom;
    ExtComplex::Finite(Complex64::new(t * p.x, t * p.y))
}

/// Inverse chart by bracketed bisection along the chord, then Newton polish.
pub fn chart_inverse(body: &ConvexBody, z: ExtComplex) -> Result<Point3, BodyError> {
    let Some(z) = z.finite() else {
        return Ok(north_pole());
    };
    let n = north_pole();
    let d = Vector3::new(z.re, z.im, -2.0);
    let phi = |t: f64| body.value(&(n + d * t));
    // F(N + t d) / t is nondecreasing in t for convex F with F(N) = 0, and
    // negative near 0 because d points into the body.
    let slope0 = body.gradient(&n).dot(&d);
    if !(slope0 < 0.0) {
        return Err(BodyError::RootNotFound(format!("{z}")));
    }
    let mut hi = 1.0;
    let mut grow = 0;
    while phi(hi) <= 0.0 {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(BodyError::RootNotFound(format!("{z}")));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-14 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) / mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..2 {
        let e = body.eval(&(n + d * t));
        let slope = e.gradient.dot(&d);
        if slope == 0.0 {
            break;
        }
        let next = t - e.value / slope;
        if phi(next).abs() < e.value.abs() {
            t = next;
        }
    }
    let p = n + d * t;
    if body.value(&p).abs() < 1e-12 {
        Ok(p)
    } else {
        Err(BodyError::RootNotFound(format!("{z}")))
    }
}
