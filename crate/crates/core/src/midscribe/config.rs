use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{Frame, PolyhedralComplex};
use crate::mobius::ExtComplex;

/// Vertices whose unit 4-vector has `|x₀|` at or below this are at infinity.
pub const EPS_INFINITY: f64 = 1e-7;

/// An oriented plane `⟨normal, x⟩ = offset`; the normal points out of the polyhedron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Vector3<f64>, offset: f64) -> Self {
        Plane { normal, offset }
    }

    /// Projective coordinates `(n, -d)`, pairing with points as `[x₀ : x₁ : x₂ : x₃]`
    /// through `⟨n, x₁..₃⟩ - d x₀`.
    pub fn coords(&self) -> Vector4<f64> {
        Vector4::new(self.normal.x, self.normal.y, self.normal.z, -self.offset)
    }

    pub fn signed_distance(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// Incidence with a projective point given as `(x₀, x₁, x₂, x₃)`.
    pub fn incidence(&self, x: &Vector4<f64>) -> f64 {
        self.normal.dot(&x.fixed_rows::<3>(1)) - self.offset * x[0]
    }
}

/// Frame plus the pinned tangent points on the body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marks {
    pub frame: Frame,
    /// Chart coordinates of the marks.
    pub z: [ExtComplex; 3],
    /// Physical mark points on the current body.
    pub points: [Vector3<f64>; 3],
}

/// One oriented plane per face plus vertex and tangent-point unknowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub planes: Vec<Plane>,
    /// Projective vertices `[x₀ : x₁ : x₂ : x₃]`, kept at unit length.
    pub vertices: Vec<Vector4<f64>>,
    pub tangent_points: Vec<Vector3<f64>>,
    pub marks: Marks,
}

/// Position of a vertex in `RP³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexPosition {
    Affine(Vector3<f64>),
    AtInfinity(Vector3<f64>),
}

impl Configuration {
    pub fn vertex_position(&self, v: usize) -> VertexPosition {
        let x = self.vertices[v].normalize();
        if x[0].abs() <= EPS_INFINITY {
            VertexPosition::AtInfinity(x.fixed_rows::<3>(1).into_owned())
        } else {
            VertexPosition::Affine(x.fixed_rows::<3>(1) / x[0])
        }
    }

    /// Affine coordinates of every vertex, or `None` if any is at infinity.
    pub fn affine_vertices(&self) -> Option<Vec<Vector3<f64>>> {
        (0..self.vertices.len())
            .map(|v| match self.vertex_position(v) {
                VertexPosition::Affine(p) => Some(p),
                VertexPosition::AtInfinity(_) => None,
            })
            .collect()
    }

    pub fn dimensions_match(&self, complex: &PolyhedralComplex) -> bool {
        self.planes.len() == complex.num_faces()
            && self.vertices.len() == complex.num_vertices()
            && self.tangent_points.len() == complex.num_edges()
    }

    /// Normalizes every vertex 4-vector to unit length, keeping its sign.
    pub fn normalize_vertices(&mut self) {
        for x in &mut self.vertices {
            *x = x.normalize();
        }
    }

    /// Returns a copy with every vertex scaled so that `x₀ >= 0`.
    pub fn with_canonical_signs(&self) -> Configuration {
        let mut c = self.clone();
        for x in &mut c.vertices {
            if x[0] < 0.0 {
                *x = -*x;
            }
        }
        c
    }

    /// Distance between vertex sets, comparing unit 4-vectors up to sign.
    pub fn max_vertex_distance(&self, other: &Configuration) -> f64 {
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| {
                let (a, b) = (a.normalize(), b.normalize());
                match (self.affine_of(&a), self.affine_of(&b)) {
                    (Some(p), Some(q)) => (p - q).norm(),
                    _ => (a - b).norm().min((a + b).norm()),
                }
            })
            .fold(0.0, f64::max)
    }

    fn affine_of(&self, x: &Vector4<f64>) -> Option<Vector3<f64>> {
        (x[0].abs() > EPS_INFINITY).then(|| x.fixed_rows::<3>(1) / x[0])
    }
}
