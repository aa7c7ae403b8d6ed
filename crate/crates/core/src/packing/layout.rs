use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{Circle, CirclePattern, Node, PackingError, PlanarCircle, RadiusAssignment, TangencyPoint};
use crate::combinatorics::PolyhedralComplex;
use crate::mobius::ExtComplex;

/// Cyclic orders that are counterclockwise seen from outside run clockwise
/// in the chart plane.
const TURN: f64 = -1.0;

/// Closing-up tolerance, relative to the circles involved.
const CLOSURE_TOL: f64 = 1e-9;

/// Places the circles in the upper half-plane by propagating across flags.
///
/// `f0` becomes the real axis (its disk is the lower half-plane), and the
/// tangency point of the infinite edge sits at `∞`.
pub fn layout_circles(
    complex: &PolyhedralComplex,
    radii: &RadiusAssignment,
) -> Result<CirclePattern, PackingError> {
    let n = radii.log_radii.len();
    let radius: Vec<Option<f64>> = (0..n).map(|i| radii.radius(i)).collect();
    let neighbors: Vec<Vec<(Node, usize)>> =
        (0..n).map(|i| Node::from_index(i, complex).neighbors(complex)).collect();
    let f0 = Node::Face(radii.frame.face);

    let mut center: Vec<Option<Complex64>> = vec![None; n];
    // (position in neighbour list, direction to that neighbour)
    let mut reference: Vec<Option<(usize, f64)>> = vec![None; n];
    // Line nodes: (point on line, unit normal into the disk).
    let mut lines: Vec<Option<(Complex64, Complex64)>> = vec![None; n];
    let mut tangency: Vec<Option<Complex64>> = vec![None; complex.num_edges()];
    let mut residual: f64 = 0.0;

    let start = complex
        .face(radii.frame.face)
        .iter()
        .map(|&v| Node::Vertex(v).index(complex))
        .find(|&i| radius[i].is_some())
        .expect("f0 has a bounded vertex");
    center[start] = Some(Complex64::new(0.0, 0.0));
    let k0 = neighbors[start].iter().position(|(w, _)| *w == f0).unwrap();
    reference[start] = Some((k0, -FRAC_PI_2));

    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let (cu, ru) = (center[u].unwrap(), radius[u].unwrap());
        let (k, theta_k) = reference[u].unwrap();
        let nb = &neighbors[u];
        let m = nb.len();
        let kite = |j: usize| -> f64 {
            match radius[nb[j].0.index(complex)] {
                Some(rw) => 2.0 * (rw / ru).atan(),
                None => PI,
            }
        };
        let mut theta = vec![0.0; m];
        theta[k] = theta_k;
        for step in 1..m {
            let (prev, j) = ((k + step - 1) % m, (k + step) % m);
            theta[j] = theta[prev] + TURN * 0.5 * (kite(prev) + kite(j));
        }
        for j in 0..m {
            let (w_node, e) = nb[j];
            let w = w_node.index(complex);
            let t = cu + Complex64::from_polar(ru, theta[j] + TURN * 0.5 * kite(j));
            match tangency[e] {
                None => tangency[e] = Some(t),
                Some(old) => residual = residual.max((old - t).norm() / ru),
            }
            match radius[w] {
                Some(rw) => {
                    let predicted = cu + Complex64::from_polar(ru.hypot(rw), theta[j]);
                    match center[w] {
                        None => {
                            center[w] = Some(predicted);
                            let back = neighbors[w]
                                .iter()
                                .position(|(x, _)| x.index(complex) == u)
                                .unwrap();
                            reference[w] = Some((back, theta[j] + PI));
                            queue.push_back(w);
                        }
                        Some(c) => residual = residual.max((c - predicted).norm() / ru.max(rw)),
                    }
                }
                None => {
                    // Neighbours cross orthogonally, so the line runs through cu.
                    let normal = Complex64::from_polar(1.0, theta[j]);
                    match lines[w] {
                        None => lines[w] = Some((cu, normal)),
                        Some((p, nrm)) => {
                            residual = residual
                                .max((nrm - normal).norm())
                                .max(((cu - p) * nrm.conj()).re.abs() / ru);
                        }
                    }
                }
            }
        }
    }

    if residual > CLOSURE_TOL || center.iter().zip(&radius).any(|(c, r)| r.is_some() && c.is_none()) {
        return Err(PackingError::LayoutInconsistency(residual));
    }

    let circle = |i: usize| -> Circle {
        let planar = match (center[i], radius[i]) {
            (Some(c), Some(r)) => PlanarCircle::Disk { center: c, radius: r },
            _ => {
                let (point, normal) = lines[i].expect("line nodes have bounded neighbours");
                PlanarCircle::HalfPlane { point, normal }
            }
        };
        Circle { planar, spherical: None }
    };
    let tangency: Vec<TangencyPoint> = tangency
        .iter()
        .map(|t| TangencyPoint {
            planar: t.map_or(ExtComplex::Infinity, ExtComplex::Finite),
            sphere: None,
        })
        .collect();
    let marks = radii.frame.edges.map(|e| tangency[e].planar);
    Ok(CirclePattern {
        vertex_circles: (0..complex.num_vertices()).map(|v| circle(Node::Vertex(v).index(complex))).collect(),
        face_circles: (0..complex.num_faces()).map(|f| circle(Node::Face(f).index(complex))).collect(),
        tangency,
        frame: radii.frame,
        marks,
        mark_points: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::seeds;
    use crate::packing::{solve_radii, RadiiOptions};

    #[test]
    fn seeds_layout_without_residual() {
        for (name, p) in seeds::all_seeds() {
            let frame = p.default_frame();
            let r = solve_radii(&p, &frame, &RadiiOptions::default()).unwrap();
            let pattern = layout_circles(&p, &r).unwrap();
            let res = pattern.residuals(&p);
            assert!(res.is_valid(1e-9), "{name}: {res:?}");
            let infinite = pattern.tangency.iter().filter(|t| t.planar.is_infinite()).count();
            assert_eq!(infinite, 1, "{name}");
            // Everything but f0's disk lies in the closed upper half-plane.
            if let PlanarCircle::HalfPlane { point, normal } = pattern.face_circles[frame.face].planar {
                assert!(point.im.abs() < 1e-12 && (normal - Complex64::new(0.0, -1.0)).norm() < 1e-12);
            } else {
                panic!("f0 is not a line");
            }
            for c in pattern.vertex_circles.iter().chain(&pattern.face_circles) {
                if let PlanarCircle::Disk { center, radius } = c.planar {
                    assert!(center.im - radius > -1e-9 * radius.max(1.0) || center.im.abs() < 1e-9);
                }
            }
        }
    }
}
