use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lift::ball_chart_inverse;
use crate::bodies::chart_forward;
use crate::mobius::{ExtComplex, Mobius};

/// An oriented circle of the extended plane; the variant names the side
/// that is the disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanarCircle {
    Disk { center: Complex64, radius: f64 },
    Exterior { center: Complex64, radius: f64 },
    /// `{z : Re((z - point) · conj(normal)) > 0}`, `normal` of unit length.
    HalfPlane { point: Complex64, normal: Complex64 },
}

impl PlanarCircle {
    pub fn boundary_points(&self) -> [ExtComplex; 3] {
        match *self {
            PlanarCircle::Disk { center, radius } | PlanarCircle::Exterior { center, radius } => {
                std::array::from_fn(|k| {
                    let th = std::f64::consts::TAU * k as f64 / 3.0;
                    ExtComplex::Finite(center + Complex64::from_polar(radius, th))
                })
            }
            PlanarCircle::HalfPlane { point, normal } => [
                ExtComplex::Finite(point),
                ExtComplex::Finite(point + normal * Complex64::i()),
                ExtComplex::Infinity,
            ],
        }
    }

    pub fn interior_point(&self) -> ExtComplex {
        match *self {
            PlanarCircle::Disk { center, .. } => ExtComplex::Finite(center),
            PlanarCircle::Exterior { .. } => ExtComplex::Infinity,
            PlanarCircle::HalfPlane { point, normal } => ExtComplex::Finite(point + normal),
        }
    }

    /// The oriented circle through three boundary points whose disk contains `interior`.
    pub fn from_points(b: [ExtComplex; 3], interior: ExtComplex) -> PlanarCircle {
        let finite: Vec<Complex64> = b.iter().filter_map(|z| z.finite()).collect();
        let line = |p: Complex64, q: Complex64| {
            let mut normal = (q - p) * Complex64::i() / (q - p).norm();
            if let Some(z) = interior.finite() {
                if ((z - p) * normal.conj()).re < 0.0 {
                    normal = -normal;
                }
            }
            PlanarCircle::HalfPlane { point: p, normal }
        };
        if finite.len() < 3 {
            return line(finite[0], finite[1]);
        }
        let (p, q, r) = (finite[0], finite[1], finite[2]);
        let (u, v) = (q - p, r - p);
        let cross = u.re * v.im - u.im * v.re;
        let scale = u.norm().max(v.norm());
        if cross.abs() <= 1e-15 * scale * scale {
            return line(p, q);
        }
        let (uu, vv) = (u.norm_sqr(), v.norm_sqr());
        let center = p + Complex64::new(v.im * uu - u.im * vv, u.re * vv - v.re * uu) / (2.0 * cross);
        let radius = ((p - center).norm() + (q - center).norm() + (r - center).norm()) / 3.0;
        match interior.finite() {
            Some(z) if (z - center).norm() < radius => PlanarCircle::Disk { center, radius },
            _ => PlanarCircle::Exterior { center, radius },
        }
    }

    pub fn transformed(&self, m: &Mobius) -> PlanarCircle {
        PlanarCircle::from_points(self.boundary_points().map(|z| m.apply(z)), m.apply(self.interior_point()))
    }

    /// Signed distance-like membership: positive inside the disk.
    pub fn side(&self, z: Complex64) -> f64 {
        match *self {
            PlanarCircle::Disk { center, radius } => radius - (z - center).norm(),
            PlanarCircle::Exterior { center, radius } => (z - center).norm() - radius,
            PlanarCircle::HalfPlane { point, normal } => ((z - point) * normal.conj()).re,
        }
    }
}

/// A spherical cap `{x ∈ S² : ⟨normal, x⟩ >= cos_radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalCap {
    pub normal: Vector3<f64>,
    pub cos_radius: f64,
}

impl SphericalCap {
    /// Lifts a planar circle through the inverse ball chart.
    pub fn from_planar(c: &PlanarCircle) -> SphericalCap {
        SphericalCap::from_planar_mapped(c, &Mobius::identity())
    }

    /// Lifts the image of `c` under `m`. Works from mapped sample points, so
    /// images that pass near `∞` keep full precision.
    pub fn from_planar_mapped(c: &PlanarCircle, m: &Mobius) -> SphericalCap {
        const K: usize = 12;
        let pts: Vec<Vector3<f64>> = (0..K)
            .map(|k| {
                let z = match *c {
                    PlanarCircle::Disk { center, radius } | PlanarCircle::Exterior { center, radius } => {
                        ExtComplex::Finite(center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / K as f64))
                    }
                    PlanarCircle::HalfPlane { .. } if k == 0 => ExtComplex::Infinity,
                    PlanarCircle::HalfPlane { point, normal } => {
                        let t = (std::f64::consts::PI * (k as f64 / K as f64 - 0.5)).tan();
                        ExtComplex::Finite(point + normal * Complex64::i() * t)
                    }
                };
                ball_chart_inverse(m.apply(z))
            })
            .collect();
        // Normal from the best-conditioned triple, offset averaged over all samples.
        let mut n = Vector3::zeros();
        for a in 0..K {
            for b in a + 1..K {
                for d in b + 1..K {
                    let cand = (pts[b] - pts[a]).cross(&(pts[d] - pts[a]));
                    if cand.norm() > n.norm() {
                        n = cand;
                    }
                }
            }
        }
        let mut n = n.normalize();
        let mut off = pts.iter().map(|p| n.dot(p)).sum::<f64>() / K as f64;
        let inside = ball_chart_inverse(m.apply(c.interior_point()));
        if n.dot(&inside) < off {
            n = -n;
            off = -off;
        }
        SphericalCap { normal: n, cos_radius: off }
    }

    pub fn angular_radius(&self) -> f64 {
        self.cos_radius.clamp(-1.0, 1.0).acos()
    }

    pub fn sin_radius(&self) -> f64 {
        (1.0 - self.cos_radius * self.cos_radius).max(0.0).sqrt()
    }

    /// Points on the boundary circle.
    pub fn boundary_point(&self, theta: f64) -> Vector3<f64> {
        let n = self.normal;
        let seed = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = n.cross(&seed).normalize();
        let w = n.cross(&u);
        n * self.cos_radius + (u * theta.cos() + w * theta.sin()) * self.sin_radius()
    }

    /// Zero when the caps touch externally.
    pub fn tangency_residual(&self, other: &SphericalCap) -> f64 {
        // cos(ρ₁ + ρ₂) = c₁c₂ - s₁s₂
        self.normal.dot(&other.normal)
            - (self.cos_radius * other.cos_radius - self.sin_radius() * other.sin_radius())
    }

    /// Zero when the boundary circles cross at right angles.
    pub fn orthogonality_residual(&self, other: &SphericalCap) -> f64 {
        self.normal.dot(&other.normal) - self.cos_radius * other.cos_radius
    }

    /// Zero when `p` lies on the boundary circle.
    pub fn point_residual(&self, p: &Vector3<f64>) -> f64 {
        self.normal.dot(p) - self.cos_radius
    }

    pub fn to_planar(&self) -> PlanarCircle {
        let b = [0.0, 1.0, 2.0].map(|k| chart_forward(&self.boundary_point(k * std::f64::consts::TAU / 3.0)));
        PlanarCircle::from_points(b, chart_forward(&self.normal))
    }
}
