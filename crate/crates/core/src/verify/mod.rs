//! Checks on solved configurations that do not rely on solver residuals.

mod kdisk;
mod probe;

pub use kdisk::{extract_kdisk_packings, ContactCheck, DiskKind, KDisk, KDiskPacking};
pub use probe::{rigidity_probe, sweep, RigidityReport, SweepClass, SweepGrid, SweepSample};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bodies::ConvexBody;
use crate::combinatorics::PolyhedralComplex;
use crate::midscribe::{Configuration, VertexPosition, EPS_INFINITY};

/// Default tolerance on tangency and incidence residuals.
pub const TANGENCY_TOL: f64 = 1e-9;

/// Non-incident vertices must lie at least this far inside each face plane.
pub const SIDE_TOL: f64 = 1e-9;

/// Contact detection tolerance for K-disk packings.
pub const CONTACT_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("configuration is not midscribed (residual {0:e})")]
    NotMidscribed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    Convex,
    Nonconvex,
    ProjectiveDegenerate,
}

impl std::fmt::Display for Convexity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convexity::Convex => "convex",
            Convexity::Nonconvex => "nonconvex",
            Convexity::ProjectiveDegenerate => "projective-degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub classification: Convexity,
    /// Smallest `d_f - ⟨n_f, x_v⟩` over non-incident pairs (affine case only).
    pub min_margin: f64,
    /// Convex, but with `min_margin` within ten times the side tolerance.
    pub marginal: bool,
}

/// Global minimum of the gauge along one edge line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCheck {
    pub edge: usize,
    pub line_minimum: f64,
    pub minimizer: Vector3<f64>,
    /// Distance from the stored tangent point to the minimizer (diagnostic).
    pub tangent_point_offset: f64,
    pub tangent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexCheck {
    pub vertex: usize,
    /// Largest plane incidence residual over the incident faces.
    pub max_incidence: f64,
    /// Smallest plane incidence residual over the non-incident faces.
    pub min_nonincidence: f64,
    pub at_infinity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub max_tangency_residual: f64,
    pub max_incidence_residual: f64,
    pub max_tangent_point_offset: f64,
    pub combinatorics_ok: bool,
    pub convexity: Convexity,
    pub marginal: bool,
    pub contact_graph_primal_ok: bool,
    pub contact_graph_dual_ok: bool,
    pub midscribed: bool,
    pub tol: f64,
    pub eps_infinity: f64,
    pub per_edge: Vec<EdgeCheck>,
    pub per_vertex: Vec<VertexCheck>,
}

impl VerifyReport {
    /// Midscribed with the expected combinatorics.
    pub fn passed(&self) -> bool {
        self.midscribed && self.combinatorics_ok
    }
}

/// Minimum of `F` along the line `x0 + t d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LineMinimum {
    pub t: f64,
    pub value: f64,
    pub point: Vector3<f64>,
}

/// Minimizes the convex restriction of the gauge to a line by bracketing the
/// sign change of the derivative, then safeguarded Newton steps.
pub(crate) fn line_minimum(body: &ConvexBody, x0: &Vector3<f64>, d: &Vector3<f64>) -> LineMinimum {
    let slope = |t: f64| body.gradient(&(x0 + d * t)).dot(d);
    let (mut lo, mut hi);
    let g0 = slope(0.0);
    let mut step = 1.0;
    if g0 < 0.0 {
        lo = 0.0;
        hi = step;
        while slope(hi) < 0.0 && step < 1e12 {
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    } else if g0 > 0.0 {
        hi = 0.0;
        lo = -step;
        while slope(lo) > 0.0 && step < 1e12 {
            hi = lo;
            step *= 2.0;
            lo -= step;
        }
    } else {
        lo = 0.0;
        hi = 0.0;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..300 {
        if hi - lo <= 1e-15 * t.abs().max(1.0) {
            break;
        }
        let e = body.eval(&(x0 + d * t));
        let g = e.gradient.dot(d);
        if g == 0.0 {
            break;
        }
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let curvature = d.dot(&(e.hessian * d));
        let newton = t - g / curvature;
        let mid = 0.5 * (lo + hi);
        t = if curvature > 0.0 && newton > lo && newton < hi { newton } else { mid };
        // Guard against Newton creeping along one end of a wide bracket.
        if (t - lo).min(hi - t) < 1e-3 * (hi - lo) && hi - lo > 1e-8 {
            t = mid;
        }
    }
    let point = x0 + d * t;
    LineMinimum { t, value: body.value(&point), point }
}

/// The line of two planes: a point on it and a unit direction.
pub(crate) fn plane_line(
    n1: &Vector3<f64>,
    d1: f64,
    n2: &Vector3<f64>,
    d2: f64,
) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let dir = n1.cross(n2);
    if dir.norm() < 1e-12 {
        return None;
    }
    let dir = dir.normalize();
    let m = Matrix3::from_rows(&[n1.transpose(), n2.transpose(), dir.transpose()]);
    let x0 = m.lu().solve(&Vector3::new(d1, d2, 0.0))?;
    Some((x0, dir))
}

/// Convexity classification of a configuration.
pub fn check_convexity(cfg: &Configuration, complex: &PolyhedralComplex) -> ConvexityReport {
    let Some(vertices) = cfg.affine_vertices() else {
        return ConvexityReport { classification: Convexity::ProjectiveDegenerate, min_margin: f64::NAN, marginal: false };
    };
    let mut min_margin = f64::INFINITY;
    let mut incidences_ok = true;
    for (f, plane) in cfg.planes.iter().enumerate() {
        let normal = plane.normal.normalize();
        let offset = plane.offset / plane.normal.norm();
        let face = complex.face(f);
        for (v, x) in vertices.iter().enumerate() {
            let side = normal.dot(x) - offset;
            if face.contains(&v) {
                incidences_ok &= side.abs() <= TANGENCY_TOL * x.norm().max(1.0);
            } else {
                min_margin = min_margin.min(-side);
            }
        }
    }
    let convex = incidences_ok && min_margin > SIDE_TOL;
    ConvexityReport {
        classification: if convex { Convexity::Convex } else { Convexity::Nonconvex },
        min_margin,
        marginal: convex && min_margin <= 10.0 * SIDE_TOL,
    }
}

/// Tangency of every edge line and incidence of every vertex, recomputed
/// from the planes and vertices alone.
pub(crate) fn midscription_checks(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
    tol: f64,
) -> (Vec<EdgeCheck>, Vec<VertexCheck>, bool) {
    let mut dims_ok = cfg.dimensions_match(complex);
    let per_edge = complex
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let [f, g] = edge.faces;
            let (pf, pg) = (&cfg.planes[f], &cfg.planes[g]);
            let scale_f = pf.normal.norm();
            let scale_g = pg.normal.norm();
            match plane_line(&(pf.normal / scale_f), pf.offset / scale_f, &(pg.normal / scale_g), pg.offset / scale_g) {
                Some((x0, dir)) => {
                    let m = line_minimum(body, &x0, &dir);
                    EdgeCheck {
                        edge: e,
                        line_minimum: m.value,
                        minimizer: m.point,
                        tangent_point_offset: cfg.tangent_points.get(e).map_or(f64::NAN, |p| (p - m.point).norm()),
                        tangent: m.value.abs() < tol,
                    }
                }
                None => EdgeCheck {
                    edge: e,
                    line_minimum: f64::INFINITY,
                    minimizer: Vector3::repeat(f64::NAN),
                    tangent_point_offset: f64::NAN,
                    tangent: false,
                },
            }
        })
        .collect();
    let per_vertex = (0..complex.num_vertices())
        .map(|v| {
            let x = cfg.vertices[v].normalize();
            let incident = complex.vertex_faces(v);
            let mut max_incidence: f64 = 0.0;
            let mut min_nonincidence = f64::INFINITY;
            for (f, plane) in cfg.planes.iter().enumerate() {
                let r = plane.incidence(&x).abs() / plane.coords().norm();
                if incident.contains(&f) {
                    max_incidence = max_incidence.max(r);
                } else {
                    min_nonincidence = min_nonincidence.min(r);
                }
            }
            VertexCheck {
                vertex: v,
                max_incidence,
                min_nonincidence,
                at_infinity: matches!(cfg.vertex_position(v), VertexPosition::AtInfinity(_)),
            }
        })
        .collect::<Vec<_>>();
    // Extra incidences would merge faces or vertices.
    dims_ok &= per_vertex.iter().all(|c: &VertexCheck| c.min_nonincidence > tol);
    (per_edge, per_vertex, dims_ok)
}

/// Full verification: midscription, combinatorics, convexity and both K-disk packings.
pub fn check_midscription(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
    tol: f64,
) -> VerifyReport {
    if !cfg.dimensions_match(complex) {
        return VerifyReport {
            max_tangency_residual: f64::INFINITY,
            max_incidence_residual: f64::INFINITY,
            max_tangent_point_offset: f64::NAN,
            combinatorics_ok: false,
            convexity: Convexity::Nonconvex,
            marginal: false,
            contact_graph_primal_ok: false,
            contact_graph_dual_ok: false,
            midscribed: false,
            tol,
            eps_infinity: EPS_INFINITY,
            per_edge: Vec::new(),
            per_vertex: Vec::new(),
        };
    }
    let (per_edge, per_vertex, mut combinatorics_ok) = midscription_checks(cfg, body, complex, tol);
    let max_tangency_residual = per_edge.iter().map(|c| c.line_minimum.abs()).fold(0.0, f64::max);
    let max_incidence_residual = per_vertex.iter().map(|c| c.max_incidence).fold(0.0, f64::max);
    let max_tangent_point_offset = per_edge.iter().map(|c| c.tangent_point_offset).fold(0.0, f64::max);
    combinatorics_ok &= max_incidence_residual < tol;
    let midscribed = max_tangency_residual < tol && max_incidence_residual < tol;
    let convexity = check_convexity(cfg, complex);
    let (primal, dual) = match extract_kdisk_packings(cfg, body, complex) {
        Ok((faces, visibility)) => (visibility.contact_graph_ok, faces.contact_graph_ok),
        Err(_) => (false, false),
    };
    VerifyReport {
        max_tangency_residual,
        max_incidence_residual,
        max_tangent_point_offset,
        combinatorics_ok,
        convexity: convexity.classification,
        marginal: convexity.marginal,
        contact_graph_primal_ok: primal,
        contact_graph_dual_ok: dual,
        midscribed,
        tol,
        eps_infinity: EPS_INFINITY,
        per_edge,
        per_vertex,
    }
}
