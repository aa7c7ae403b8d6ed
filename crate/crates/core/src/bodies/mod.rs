//! Smooth strictly convex bodies given by implicit gauge functions.
//!
//! A body is `{x : F(x) <= 0}` and must be tangent to the plane `z = 1` at
//! the north pole `N = (0, 0, 1)` from below. Every body here is a convex
//! blend `(1 - w) (|x|² - 1) + w F₁(x)` of the unit ball with a primitive
//! shape, which makes the homotopy family closed under evaluation.

mod chart;
mod path;

pub use chart::{chart_forward, chart_inverse, BodyChart};
pub use path::BodyPath;

use nalgebra::{Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::ExtComplex;

pub type Point3 = Vector3<f64>;

pub const NORTH_POLE: [f64; 3] = [0.0, 0.0, 1.0];

pub fn north_pole() -> Point3 {
    Vector3::from(NORTH_POLE)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("invalid body descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("body is not strictly convex: {0}")]
    NotStrictlyConvex(String),
    #[error("north pole (0,0,1) is not a horizontal tangency point: {0}")]
    PoleViolation(String),
    #[error("no boundary crossing found along chord for z = {0}")]
    RootNotFound(String),
    #[error("homotopy path fails convexity at s = {0}")]
    PathConvexityFailure(f64),
}

/// The primitive shapes accepted by [`ConvexBody::parse`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Ball,
    /// `x²/a² + y²/b² + z²/c² - 1`
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// `(x/a)^p + (y/b)^p + (z/c)^p - 1`, `p` even.
    Superellipsoid { p: u32, a: f64, b: f64, c: f64 },
}

impl Shape {
    fn eval(&self, x: &Point3) -> (f64, Point3, Matrix3<f64>) {
        match *self {
            Shape::Ball => (x.norm_squared() - 1.0, 2.0 * x, Matrix3::identity() * 2.0),
            Shape::Ellipsoid { a, b, c } => {
                let s = Vector3::new(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
                let v = x.component_mul(x).dot(&s) - 1.0;
                (v, 2.0 * x.component_mul(&s), Matrix3::from_diagonal(&(2.0 * s)))
            }
            Shape::Superellipsoid { p, a, b, c } => {
                let scale = [a, b, c];
                let pf = p as f64;
                let mut v = -1.0;
                let mut g = Vector3::zeros();
                let mut h = Matrix3::zeros();
                for i in 0..3 {
                    let u = x[i] / scale[i];
                    let up2 = u.powi(p as i32 - 2);
                    v += up2 * u * u;
                    g[i] = pf * up2 * u / scale[i];
                    h[(i, i)] = pf * (pf - 1.0) * up2 / (scale[i] * scale[i]);
                }
                (v, g, h)
            }
        }
    }

    fn descriptor(&self) -> String {
        match *self {
            Shape::Ball => "ball".into(),
            Shape::Ellipsoid { a, b, c } if c == 1.0 => format!("ellipsoid:a={a},b={b}"),
            Shape::Ellipsoid { a, b, c } => format!("ellipsoid:a={a},b={b},c={c}"),
            Shape::Superellipsoid { p, a, b, c } if c == 1.0 => {
                format!("superellipsoid:p={p},a={a},b={b}")
            }
            Shape::Superellipsoid { p, a, b, c } => format!("superellipsoid:p={p},a={a},b={b},c={c}"),
        }
    }
}

/// Gauge value, gradient and Hessian at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeEval {
    pub value: f64,
    pub gradient: Point3,
    pub hessian: Matrix3<f64>,
}

/// A smooth strictly convex body `{F <= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    pub shape: Shape,
    /// Blend weight of `shape` against the unit ball, in `[0, 1]`.
    pub weight: f64,
}

impl ConvexBody {
    pub fn ball() -> Self {
        ConvexBody { shape: Shape::Ball, weight: 1.0 }
    }

    /// Builds a body from a shape and checks the pole and convexity invariants.
    pub fn new(shape: Shape) -> Result<Self, BodyError> {
        let check_axis = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(BodyError::InvalidDescriptor(format!("{name} must be positive, got {v}")))
            }
        };
        match shape {
            Shape::Ball => {}
            Shape::Ellipsoid { a, b, c } => {
                check_axis("a", a)?;
                check_axis("b", b)?;
                check_axis("c", c)?;
            }
            Shape::Superellipsoid { p, a, b, c } => {
                if p < 2 || p % 2 != 0 {
                    return Err(BodyError::InvalidDescriptor(format!(
                        "superellipsoid exponent must be an even integer >= 2, got {p}"
                    )));
                }
                check_axis("a", a)?;
                check_axis("b", b)?;
                check_axis("c", c)?;
            }
        }
        let body = ConvexBody { shape, weight: 1.0 };
        body.check_pole()?;
        body.check_convexity()
            .map_err(BodyError::NotStrictlyConvex)?;
        Ok(body)
    }

    /// Parses `ball`, `ellipsoid:a=<f>,b=<f>[,c=<f>]` or
    /// `superellipsoid:p=<even int>,a=<f>,b=<f>[,c=<f>]`. The positional
    /// forms `ellipsoid a b [c]` and `superellipsoid p a b [c]` are accepted too.
    pub fn parse(descriptor: &str) -> Result<Self, BodyError> {
        let bad = || BodyError::InvalidDescriptor(descriptor.to_string());
        let d = descriptor.trim();
        let (kind, rest) = match d.split_once([':', ' ']) {
            Some((k, r)) => (k, r.trim()),
            None => (d, ""),
        };
        let mut named: Vec<(String, f64)> = Vec::new();
        let mut positional: Vec<f64> = Vec::new();
        for item in rest.split([',', ' ']).filter(|s| !s.is_empty()) {
            match item.split_once('=') {
                Some((k, v)) => named.push((k.trim().to_string(), v.trim().parse().map_err(|_| bad())?)),
                None => positional.push(item.parse().map_err(|_| bad())?),
            }
        }
        if !named.is_empty() && !positional.is_empty() {
            return Err(bad());
        }
        let names: &[&str] = match kind {
            "ball" => &[],
            "ellipsoid" => &["a", "b", "c"],
            "superellipsoid" => &["p", "a", "b", "c"],
            _ => return Err(bad()),
        };
        let mut values = [f64::NAN; 4];
        if positional.is_empty() {
            for (k, v) in named {
                let i = names.iter().position(|n| *n == k).ok_or_else(bad)?;
                values[i] = v;
            }
        } else {
            if positional.len() > names.len() {
                return Err(bad());
            }
            values[..positional.len()].copy_from_slice(&positional);
        }
        // The z semi-axis defaults to 1; everything else is required.
        let c_idx = names.len().saturating_sub(1);
        if !names.is_empty() && values[c_idx].is_nan() {
            values[c_idx] = 1.0;
        }
        if values[..names.len()].iter().any(|v| v.is_nan()) {
            return Err(bad());
        }
        let shape = match kind {
            "ball" => Shape::Ball,
            "ellipsoid" => Shape::Ellipsoid { a: values[0], b: values[1], c: values[2] },
            _ => {
                let p = values[0];
                if p.fract() != 0.0 || p < 0.0 {
                    return Err(BodyError::InvalidDescriptor(format!("exponent {p} is not an integer")));
                }
                Shape::Superellipsoid { p: p as u32, a: values[1], b: values[2], c: values[3] }
            }
        };
        ConvexBody::new(shape)
    }

    pub fn descriptor(&self) -> String {
        if self.weight == 1.0 {
            self.shape.descriptor()
        } else {
            format!("blend(w={},{})", self.weight, self.shape.descriptor())
        }
    }

    /// The blend `(1 - s) · ball + s · self`.
    pub fn blended(&self, s: f64) -> Self {
        ConvexBody { shape: self.shape, weight: s * self.weight }
    }

    pub fn eval(&self, x: &Point3) -> GaugeEval {
        let (v1, g1, h1) = self.shape.eval(x);
        if self.weight == 1.0 {
            return GaugeEval { value: v1, gradient: g1, hessian: h1 };
        }
        let (v0, g0, h0) = Shape::Ball.eval(x);
        let w = self.weight;
        GaugeEval {
            value: (1.0 - w) * v0 + w * v1,
            gradient: g0 * (1.0 - w) + g1 * w,
            hessian: h0 * (1.0 - w) + h1 * w,
        }
    }

    pub fn value(&self, x: &Point3) -> f64 {
        self.eval(x).value
    }

    pub fn gradient(&self, x: &Point3) -> Point3 {
        self.eval(x).gradient
    }

    fn check_pole(&self) -> Result<(), BodyError> {
        let e = self.eval(&north_pole());
        let g = e.gradient;
        if e.value.abs() > 1e-12 {
            return Err(BodyError::PoleViolation(format!("F(N) = {}", e.value)));
        }
        if !(g.z > 0.0) || g.x.hypot(g.y) > 1e-12 * g.z {
            return Err(BodyError::PoleViolation(format!("gradient at N is {:?}", g.as_slice())));
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hessian restricted to the tangent plane of
    /// the level set through `x`.
    pub fn tangential_min_eigenvalue(&self, x: &Point3) -> f64 {
        let e = self.eval(x);
        let n = e.gradient.normalize();
        let seed = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let t1 = n.cross(&seed).normalize();
        let t2 = n.cross(&t1);
        let h = &e.hessian;
        let m = Matrix2::new(
            t1.dot(&(h * t1)),
            t1.dot(&(h * t2)),
            t2.dot(&(h * t1)),
            t2.dot(&(h * t2)),
        );
        let tr = m.trace();
        let det = m.determinant();
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        0.5 * tr - disc
    }

    /// Where the ray `origin + t·dir`, `t > 0`, leaves the body; `origin` must be interior.
    pub fn ray_exit(&self, origin: &Point3, dir: &Point3) -> Point3 {
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.value(&(origin + dir * hi)) < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(&(origin + dir * mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        origin + dir * (0.5 * (lo + hi))
    }

    /// Deterministic boundary samples, avoiding the coordinate axes.
    pub fn boundary_samples(&self, count: usize) -> Result<Vec<Point3>, BodyError> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|k| {
                // Chart radii spread from near the south pole out towards N.
                let r = 0.05 + 8.0 * ((k as f64 + 0.5) / count as f64).powi(2);
                let theta = golden * k as f64 + 0.1;
                chart_inverse(self, ExtComplex::new(r * theta.cos(), r * theta.sin()))
            })
            .collect()
    }

    fn check_convexity(&self) -> Result<(), String> {
        let samples = self.boundary_samples(200).map_err(|e| e.to_string())?;
        for p in &samples {
            let g = self.gradient(p);
            if g.norm() == 0.0 {
                return Err(format!("vanishing gradient at {:?}", p.as_slice()));
            }
            let m = self.tangential_min_eigenvalue(p);
            if !(m > 0.0) {
                return Err(format!("tangential hessian eigenvalue {m} at {:?}", p.as_slice()));
            }
        }
        Ok(())
    }

    /// Checks the strict-convexity invariant on sampled boundary points.
    pub fn is_strictly_convex(&self) -> bool {
        self.check_convexity().is_ok()
    }
}
