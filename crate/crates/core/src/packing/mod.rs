//! Orthogonal primal–dual circle packing for the unit-ball case.
//!
//! Every vertex `v` and face `f` of the complex gets a circle. Circles of
//! adjacent vertices touch, circles of adjacent faces touch, and incident
//! vertex/face circles cross at right angles; all four circles of an edge
//! meet at its tangency point. The pipeline is [`solve_radii`] →
//! [`layout_circles`] → [`lift_normalize`] → [`koebe_config`].

mod circle;
mod layout;
mod lift;
mod radii;

pub use circle::{PlanarCircle, SphericalCap};
pub use layout::layout_circles;
pub use lift::{ball_chart_inverse, koebe_config, lift_normalize, pack};
pub use radii::{solve_radii, RadiiOptions, RadiusAssignment};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{EdgeId, FaceId, Frame, PolyhedralComplex, VertexId};
use crate::mobius::ExtComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackingError {
    #[error("radius iteration did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("layout does not close up (residual {0:e})")]
    LayoutInconsistency(f64),
    #[error("marks are not distinct")]
    DegenerateMarks,
    #[error("degenerate spherical cap for {0}")]
    HemisphereViolation(String),
}

/// A node of the packing graph: one circle per vertex and per face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Vertex(VertexId),
    Face(FaceId),
}

impl Node {
    pub fn index(self, complex: &PolyhedralComplex) -> usize {
        match self {
            Node::Vertex(v) => v,
            Node::Face(f) => complex.num_vertices() + f,
        }
    }

    pub fn from_index(i: usize, complex: &PolyhedralComplex) -> Node {
        if i < complex.num_vertices() {
            Node::Vertex(i)
        } else {
            Node::Face(i - complex.num_vertices())
        }
    }

    /// Incident nodes in cyclic order (counterclockwise seen from outside),
    /// paired with the edge that follows each of them.
    pub fn neighbors(self, complex: &PolyhedralComplex) -> Vec<(Node, EdgeId)> {
        match self {
            Node::Vertex(v) => complex
                .vertex_faces(v)
                .iter()
                .zip(complex.vertex_edges(v))
                .map(|(&f, &e)| (Node::Face(f), e))
                .collect(),
            Node::Face(f) => complex
                .face(f)
                .iter()
                .zip(complex.face_edges(f))
                .map(|(&v, &e)| (Node::Vertex(v), e))
                .collect(),
        }
    }
}

/// A circle in both its planar (extended-plane) and spherical forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub planar: PlanarCircle,
    pub spherical: Option<SphericalCap>,
}

/// Tangency point of an edge, in the plane and (after lifting) on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyPoint {
    pub planar: ExtComplex,
    pub sphere: Option<Vector3<f64>>,
}

/// Vertex and face circles with the per-edge tangency points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclePattern {
    pub vertex_circles: Vec<Circle>,
    pub face_circles: Vec<Circle>,
    pub tangency: Vec<TangencyPoint>,
    pub frame: Frame,
    /// Planar images of the tangency points of the frame edges.
    pub marks: [ExtComplex; 3],
    /// Mark points on the unit sphere, present once lifted.
    pub mark_points: Option<[Vector3<f64>; 3]>,
}

/// Residuals of the packing invariants on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternResiduals {
    pub vertex_tangency: f64,
    pub face_tangency: f64,
    pub orthogonality: f64,
    pub common_point: f64,
    /// Smallest over largest angular radius.
    pub radius_ratio: f64,
}

impl PatternResiduals {
    pub fn max(&self) -> f64 {
        self.vertex_tangency
            .max(self.face_tangency)
            .max(self.orthogonality)
            .max(self.common_point)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.max() < tol && self.radius_ratio > 1e-8
    }
}

impl CirclePattern {
    pub fn is_spherical(&self) -> bool {
        self.mark_points.is_some()
    }

    pub fn circle(&self, node: Node) -> &Circle {
        match node {
            Node::Vertex(v) => &self.vertex_circles[v],
            Node::Face(f) => &self.face_circles[f],
        }
    }

    /// Spherical caps, lifting the planar forms through the ball chart when
    /// the pattern has not been lifted yet.
    fn caps(&self) -> (Vec<SphericalCap>, Vec<SphericalCap>, Vec<Vector3<f64>>) {
        let cap = |c: &Circle| c.spherical.unwrap_or_else(|| SphericalCap::from_planar(&c.planar));
        (
            self.vertex_circles.iter().map(cap).collect(),
            self.face_circles.iter().map(cap).collect(),
            self.tangency
                .iter()
                .map(|t| t.sphere.unwrap_or_else(|| ball_chart_inverse(t.planar)))
                .collect(),
        )
    }

    /// Measures tangency, orthogonality and common-point residuals on the sphere.
    pub fn residuals(&self, complex: &PolyhedralComplex) -> PatternResiduals {
        let (vc, fc, tp) = self.caps();
        let mut r = PatternResiduals {
            vertex_tangency: 0.0,
            face_tangency: 0.0,
            orthogonality: 0.0,
            common_point: 0.0,
            radius_ratio: 0.0,
        };
        for (e, edge) in complex.edges().iter().enumerate() {
            let [v, w] = edge.vertices;
            let [f, g] = edge.faces;
            r.vertex_tangency = r.vertex_tangency.max(vc[v].tangency_residual(&vc[w]).abs());
            r.face_tangency = r.face_tangency.max(fc[f].tangency_residual(&fc[g]).abs());
            for cap in [&vc[v], &vc[w], &fc[f], &fc[g]] {
                r.common_point = r.common_point.max(cap.point_residual(&tp[e]).abs());
            }
        }
        for f in 0..complex.num_faces() {
            for &v in complex.face(f) {
                r.orthogonality = r.orthogonality.max(vc[v].orthogonality_residual(&fc[f]).abs());
            }
        }
        let radii: Vec<f64> = vc.iter().chain(&fc).map(|c| c.angular_radius()).collect();
        let max = radii.iter().copied().fold(0.0, f64::max);
        let min = radii.iter().copied().fold(f64::INFINITY, f64::min);
        r.radius_ratio = min / max;
        r
    }

    /// Largest disagreement between the planar and spherical form of any
    /// circle, sampled at three points per circle.
    pub fn form_disagreement(&self) -> f64 {
        self.vertex_circles
            .iter()
            .chain(&self.face_circles)
            .filter_map(|c| {
                let cap = c.spherical?;
                Some(
                    c.planar
                        .boundary_points()
                        .iter()
                        .map(|&z| cap.point_residual(&ball_chart_inverse(z)).abs())
                        .fold(0.0, f64::max),
                )
            })
            .fold(0.0, f64::max)
    }

    /// Applies a Möbius transformation of the plane to every circle and point.
    pub fn transformed(&self, m: &crate::mobius::Mobius) -> CirclePattern {
        let map_circle = |c: &Circle| Circle {
            planar: c.planar.transformed(m),
            spherical: c.spherical.map(|_| SphericalCap::from_planar_mapped(&c.planar, m)),
        };
        let lifted = self.is_spherical();
        CirclePattern {
            vertex_circles: self.vertex_circles.iter().map(map_circle).collect(),
            face_circles: self.face_circles.iter().map(map_circle).collect(),
            tangency: self
                .tangency
                .iter()
                .map(|t| {
                    let z = m.apply(t.planar);
                    TangencyPoint { planar: z, sphere: lifted.then(|| ball_chart_inverse(z)) }
                })
                .collect(),
            frame: self.frame,
            marks: self.marks.map(|z| m.apply(z)),
            mark_points: self.mark_points.map(|_| self.marks.map(|z| ball_chart_inverse(m.apply(z)))),
        }
    }

    /// JSON dump with planar and spherical forms, tangency points and marks.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("pattern serializes")
    }
}
