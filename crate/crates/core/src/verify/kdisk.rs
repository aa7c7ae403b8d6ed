use std::f64::consts::{PI, TAU};

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::{line_minimum, midscription_checks, VerifyError, CONTACT_TOL, TANGENCY_TOL};
use crate::bodies::ConvexBody;
use crate::combinatorics::PolyhedralComplex;
use crate::midscribe::{Configuration, Plane, EPS_INFINITY};
use crate::packing::Node;

/// Boundary samples per K-circle.
pub const DISK_SAMPLES: usize = 256;

/// Stand-in distance for vertices at infinity.
const FAR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskKind {
    /// `{x ∈ ∂K : ⟨n, x⟩ >= d}`.
    Face { plane: Plane },
    /// Points of `∂K` visible from `apex`, given projectively with `x₀ >= 0`.
    /// A vertex at infinity is replaced by a far point on its direction and flagged.
    Visibility { apex: Vector4<f64>, at_infinity: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KDisk {
    pub owner: Node,
    pub kind: DiskKind,
    pub boundary_samples: Vec<Vector3<f64>>,
}

impl KDisk {
    /// Positive inside the disk, zero on its boundary.
    pub fn membership(&self, body: &ConvexBody, p: &Vector3<f64>) -> f64 {
        match self.kind {
            DiskKind::Face { plane } => plane.signed_distance(p) / plane.normal.norm(),
            DiskKind::Visibility { apex, .. } => {
                let g = body.gradient(p).normalize();
                (apex.fixed_rows::<3>(1) - p * apex[0]).dot(&g)
            }
        }
    }
}

/// Result of comparing one pair of disks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactCheck {
    pub a: Node,
    pub b: Node,
    pub expected: bool,
    pub detected: bool,
    /// Largest membership of either disk's boundary samples in the other disk.
    pub max_overlap: f64,
    /// Membership residual of the shared tangent point, for expected contacts.
    pub contact_residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KDiskPacking {
    pub disks: Vec<KDisk>,
    pub contacts: Vec<ContactCheck>,
    pub contact_graph_ok: bool,
    /// No sampled point lies in three disk closures.
    pub non_degenerate: bool,
    pub max_boundary_residual: f64,
}

fn basis(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let seed = if axis.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = axis.cross(&seed).normalize();
    (u, axis.cross(&u))
}

/// Pulls a point back onto `∂K` along the gradient.
fn project(body: &ConvexBody, mut p: Vector3<f64>) -> Vector3<f64> {
    for _ in 0..8 {
        let e = body.eval(&p);
        if e.value.abs() < 1e-15 {
            break;
        }
        p -= e.gradient * (e.value / e.gradient.norm_squared());
    }
    p
}

fn face_disk(cfg: &Configuration, body: &ConvexBody, complex: &PolyhedralComplex, f: usize) -> KDisk {
    let plane = cfg.planes[f];
    let n = plane.normal.normalize();
    let edges = complex.face_edges(f);
    let mut c = edges.iter().map(|&e| cfg.tangent_points[e]).sum::<Vector3<f64>>() / edges.len() as f64;
    c -= n * (n.dot(&c) - plane.offset / plane.normal.norm());
    let (u, w) = basis(&n);
    let boundary_samples = (0..DISK_SAMPLES)
        .map(|k| {
            let th = TAU * k as f64 / DISK_SAMPLES as f64;
            project(body, body.ray_exit(&c, &(u * th.cos() + w * th.sin())))
        })
        .collect();
    KDisk { owner: Node::Face(f), kind: DiskKind::Face { plane }, boundary_samples }
}

fn visibility_disk(cfg: &Configuration, body: &ConvexBody, complex: &PolyhedralComplex, v: usize) -> KDisk {
    let edges = complex.vertex_edges(v);
    let q = edges.iter().map(|&e| cfg.tangent_points[e]).sum::<Vector3<f64>>() / edges.len() as f64;
    let mut apex = cfg.vertices[v].normalize();
    if apex[0] < 0.0 {
        apex = -apex;
    }
    let at_infinity = apex[0] <= EPS_INFINITY;
    let x = if at_infinity {
        q + apex.fixed_rows::<3>(1).normalize() * FAR
    } else {
        apex.fixed_rows::<3>(1) / apex[0]
    };
    let axis = (q - x).normalize();
    let (u, w) = basis(&axis);
    let boundary_samples = (0..DISK_SAMPLES)
        .map(|k| {
            let th = TAU * k as f64 / DISK_SAMPLES as f64;
            let b = u * th.cos() + w * th.sin();
            // Rays at angle φ from the axis hit K exactly for φ below the horizon angle.
            let hits = |phi: f64| {
                let d = axis * phi.cos() + b * phi.sin();
                let m = line_minimum(body, &x, &d);
                m.t > 0.0 && m.value < 0.0
            };
            let (mut lo, mut hi) = (0.0, PI);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if hits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let d = axis * hi.cos() + b * hi.sin();
            project(body, line_minimum(body, &x, &d).point)
        })
        .collect();
    let apex = if at_infinity { Vector4::new(1.0, x.x, x.y, x.z).normalize() } else { apex };
    KDisk { owner: Node::Vertex(v), kind: DiskKind::Visibility { apex, at_infinity }, boundary_samples }
}

/// Checks a family of disks against the expected labelled contacts.
fn assemble(body: &ConvexBody, disks: Vec<KDisk>, expected: &[(usize, usize, Vector3<f64>)]) -> KDiskPacking {
    let n = disks.len();
    let mut contacts = Vec::new();
    let mut contact_graph_ok = true;
    let spacing = |d: &KDisk| {
        let s = &d.boundary_samples;
        (0..s.len()).map(|k| (s[k] - s[(k + 1) % s.len()]).norm()).fold(0.0, f64::max)
    };
    for a in 0..n {
        for b in a + 1..n {
            let contact = expected.iter().find(|(x, y, _)| (*x, *y) == (a, b) || (*x, *y) == (b, a));
            let mut max_overlap = f64::NEG_INFINITY;
            // Near-contact samples must sit next to the shared tangent point.
            let mut stray = false;
            for (i, j) in [(a, b), (b, a)] {
                let reach = 3.0 * spacing(&disks[i]);
                for p in &disks[i].boundary_samples {
                    let m = disks[j].membership(body, p);
                    max_overlap = max_overlap.max(m);
                    if m > -CONTACT_TOL {
                        stray |= contact.is_none_or(|(_, _, t)| (p - t).norm() > reach);
                    }
                }
            }
            let contact_residual = contact.map_or(0.0, |(_, _, t)| {
                disks[a].membership(body, t).abs().max(disks[b].membership(body, t).abs())
            });
            let detected = max_overlap > -CONTACT_TOL;
            let ok = match contact {
                Some(_) => contact_residual <= CONTACT_TOL && max_overlap <= CONTACT_TOL && !stray,
                None => max_overlap < -CONTACT_TOL,
            };
            contact_graph_ok &= ok;
            if contact.is_some() || detected || !ok {
                contacts.push(ContactCheck {
                    a: disks[a].owner,
                    b: disks[b].owner,
                    expected: contact.is_some(),
                    detected,
                    max_overlap,
                    contact_residual,
                    ok,
                });
            }
        }
    }
    let non_degenerate = disks.iter().all(|d| {
        d.boundary_samples.iter().all(|p| disks.iter().filter(|o| o.membership(body, p) >= -CONTACT_TOL).count() <= 2)
    });
    let max_boundary_residual = disks
        .iter()
        .flat_map(|d| d.boundary_samples.iter().map(|p| body.value(p).abs()))
        .fold(0.0, f64::max);
    KDiskPacking { disks, contacts, contact_graph_ok, non_degenerate, max_boundary_residual }
}

/// The face K-disks (contact graph `G*(P)`) and the visibility disks of the
/// vertices (contact graph `G(P)`).
pub fn extract_kdisk_packings(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
) -> Result<(KDiskPacking, KDiskPacking), VerifyError> {
    let (per_edge, per_vertex, _) = midscription_checks(cfg, body, complex, TANGENCY_TOL);
    let residual = per_edge
        .iter()
        .map(|c| c.line_minimum.abs())
        .chain(per_vertex.iter().map(|c| c.max_incidence))
        .fold(0.0, f64::max);
    if !(residual < TANGENCY_TOL) {
        return Err(VerifyError::NotMidscribed(residual));
    }
    let faces = (0..complex.num_faces()).map(|f| face_disk(cfg, body, complex, f)).collect();
    let face_contacts: Vec<_> = complex
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| (edge.faces[0], edge.faces[1], cfg.tangent_points[e]))
        .collect();
    let visibility = (0..complex.num_vertices()).map(|v| visibility_disk(cfg, body, complex, v)).collect();
    let vertex_contacts: Vec<_> = complex
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| (edge.vertices[0], edge.vertices[1], cfg.tangent_points[e]))
        .collect();
    Ok((assemble(body, faces, &face_contacts), assemble(body, visibility, &vertex_contacts)))
}
