//! Radii of the orthogonal packing in the upper half-plane.
//!
//! The frame face `f0` becomes the real axis. One edge `e*` of `f0` is sent
//! to `∞`, which turns its two endpoint circles into vertical lines and the
//! second face across `e*` into a horizontal line. The remaining circles are
//! bounded. At a bounded node `u`, a bounded neighbour `w` contributes the
//! kite angle `2·atan(r_w / r_u)` and a line neighbour contributes `π`; every
//! node's total must be `2π`.

use std::f64::consts::PI;

use super::{Node, PackingError};
use crate::combinatorics::{EdgeId, Frame, PolyhedralComplex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiiOptions {
    /// Maximum angle-sum residual at convergence.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for RadiiOptions {
    fn default() -> Self {
        RadiiOptions { tol: 1e-12, max_sweeps: 200_000 }
    }
}

/// Log-radii of the bounded circles with their angle targets.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusAssignment {
    /// Indexed by [`Node::index`]; `None` for the four line nodes.
    pub log_radii: Vec<Option<f64>>,
    /// Angle target over bounded neighbours only: `2π` minus `π` per line neighbour.
    pub targets: Vec<Option<f64>>,
    pub frame: Frame,
    /// The edge of `f0` whose tangency point sits at `∞`.
    pub infinite_edge: EdgeId,
    pub line_nodes: [Node; 4],
    pub sweeps: usize,
    pub residual: f64,
}

/// Edge `e*` and the four nodes whose circles become lines.
pub(crate) fn line_nodes(complex: &PolyhedralComplex, frame: &Frame) -> (EdgeId, [Node; 4]) {
    let fe = complex.face_edges(frame.face);
    let k = fe.iter().position(|&e| e == frame.edges[2]).expect("frame validated");
    let e_star = fe[(k + 1) % fe.len()];
    let edge = complex.edge(e_star);
    let g_star = edge.other_face(frame.face);
    (
        e_star,
        [
            Node::Face(frame.face),
            Node::Face(g_star),
            Node::Vertex(edge.vertices[0]),
            Node::Vertex(edge.vertices[1]),
        ],
    )
}

impl RadiusAssignment {
    pub fn radius(&self, node_index: usize) -> Option<f64> {
        self.log_radii[node_index].map(f64::exp)
    }

    /// Kite angle sum over bounded neighbours at a bounded node.
    pub fn angle_sum(&self, complex: &PolyhedralComplex, node: Node) -> Option<f64> {
        let lu = self.log_radii[node.index(complex)]?;
        Some(
            node.neighbors(complex)
                .iter()
                .filter_map(|(w, _)| self.log_radii[w.index(complex)])
                .map(|lw| 2.0 * (lw - lu).exp().atan())
                .sum(),
        )
    }

    pub fn max_residual(&self, complex: &PolyhedralComplex) -> f64 {
        (0..self.log_radii.len())
            .filter_map(|i| {
                let node = Node::from_index(i, complex);
                Some((self.angle_sum(complex, node)? - self.targets[i]?).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `Σ 2·atan(exp(y_w - x)) = target` for `x`; the left side is
/// strictly decreasing in `x`.
fn solve_node(neighbors: &[f64], target: f64, start: f64) -> f64 {
    let g = |x: f64| -> (f64, f64) {
        let mut val = -target;
        let mut der = 0.0;
        for &y in neighbors {
            let q = (y - x).exp();
            val += 2.0 * q.atan();
            der -= 2.0 * q / (1.0 + q * q);
        }
        (val, der)
    };
    let (mut lo, mut hi) = (start - 1.0, start + 1.0);
    while g(lo).0 < 0.0 {
        lo -= 2.0 * (hi - lo);
    }
    while g(hi).0 > 0.0 {
        hi += 2.0 * (hi - lo);
    }
    let mut x = start.clamp(lo, hi);
    for _ in 0..200 {
        let (val, der) = g(x);
        if val == 0.0 {
            return x;
        }
        if val > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < 1e-15 * x.abs().max(1.0) || val.abs() < 1e-16 * target {
            break;
        }
        let newton = x - val / der;
        x = if der < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    x
}

/// Gauss–Seidel sweeps of per-node monotone solves, in fixed node order.
pub fn solve_radii(
    complex: &PolyhedralComplex,
    frame: &Frame,
    opts: &RadiiOptions,
) -> Result<RadiusAssignment, PackingError> {
    let n = complex.num_vertices() + complex.num_faces();
    let (infinite_edge, lines) = line_nodes(complex, frame);
    let line_idx: Vec<usize> = lines.iter().map(|l| l.index(complex)).collect();

    let log_radii: Vec<Option<f64>> = (0..n)
        .map(|i| (!line_idx.contains(&i)).then_some(0.0))
        .collect();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            Node::from_index(i, complex)
                .neighbors(complex)
                .iter()
                .map(|(w, _)| w.index(complex))
                .collect()
        })
        .collect();
    let targets: Vec<Option<f64>> = (0..n)
        .map(|i| {
            log_radii[i]?;
            let lines_adjacent = neighbors[i].iter().filter(|w| line_idx.contains(w)).count();
            Some(2.0 * PI - PI * lines_adjacent as f64)
        })
        .collect();
    let pinned = (0..n).find(|i| log_radii[*i].is_some()).expect("bounded nodes exist");

    let mut assignment = RadiusAssignment {
        log_radii,
        targets,
        frame: *frame,
        infinite_edge,
        line_nodes: lines,
        sweeps: 0,
        residual: f64::INFINITY,
    };
    let mut buf = Vec::new();
    for sweep in 1..=opts.max_sweeps {
        for i in 0..n {
            let (Some(x), Some(target)) = (assignment.log_radii[i], assignment.targets[i]) else {
                continue;
            };
            buf.clear();
            buf.extend(neighbors[i].iter().filter_map(|&w| assignment.log_radii[w]));
            assignment.log_radii[i] = Some(solve_node(&buf, target, x));
        }
        let shift = assignment.log_radii[pinned].unwrap();
        for x in assignment.log_radii.iter_mut().flatten() {
            *x -= shift;
        }
        // The residual check costs about a sweep; do it every few sweeps.
        if sweep % 8 == 0 || sweep == opts.max_sweeps {
            assignment.residual = assignment.max_residual(complex);
            assignment.sweeps = sweep;
            if assignment.residual < opts.tol {
                return Ok(assignment);
            }
        }
    }
    Err(PackingError::NonConvergence { sweeps: opts.max_sweeps, residual: assignment.residual })
}
