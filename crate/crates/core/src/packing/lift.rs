use nalgebra::{Vector3, Vector4};

use super::{layout_circles, solve_radii, Circle, CirclePattern, PackingError, RadiiOptions, SphericalCap, TangencyPoint};
use crate::combinatorics::{Frame, PolyhedralComplex};
use crate::midscribe::{Configuration, Marks, Plane};
use crate::mobius::{ExtComplex, Mobius};

/// Inverse chart of the unit ball in closed form: inverse stereographic
/// projection of `z / 2` from `N`.
pub fn ball_chart_inverse(z: ExtComplex) -> Vector3<f64> {
    match z {
        ExtComplex::Infinity => Vector3::new(0.0, 0.0, 1.0),
        ExtComplex::Finite(z) => {
            let w = z / 2.0;
            let q = w.norm_sqr();
            Vector3::new(2.0 * w.re, 2.0 * w.im, q - 1.0) / (q + 1.0)
        }
    }
}

/// Moves the frame marks of a planar pattern to `targets` and lifts every
/// circle and tangency point to the unit sphere.
pub fn lift_normalize(pattern: &CirclePattern, targets: [ExtComplex; 3]) -> Result<CirclePattern, PackingError> {
    let m = Mobius::from_triples(pattern.marks, targets).ok_or(PackingError::DegenerateMarks)?;
    let moved = pattern.transformed(&m);
    let lift = |original: &Circle, c: &Circle| Circle {
        planar: c.planar,
        spherical: Some(SphericalCap::from_planar_mapped(&original.planar, &m)),
    };
    let mut tangency: Vec<TangencyPoint> = moved
        .tangency
        .iter()
        .map(|t| TangencyPoint { planar: t.planar, sphere: Some(ball_chart_inverse(t.planar)) })
        .collect();
    // Pin the marked points exactly rather than up to Möbius rounding.
    for (&e, &z) in pattern.frame.edges.iter().zip(&targets) {
        tangency[e] = TangencyPoint { planar: z, sphere: Some(ball_chart_inverse(z)) };
    }
    Ok(CirclePattern {
        vertex_circles: pattern.vertex_circles.iter().zip(&moved.vertex_circles).map(|(o, c)| lift(o, c)).collect(),
        face_circles: pattern.face_circles.iter().zip(&moved.face_circles).map(|(o, c)| lift(o, c)).collect(),
        tangency,
        frame: pattern.frame,
        marks: targets,
        mark_points: Some(targets.map(ball_chart_inverse)),
    })
}

fn cap_of(c: &Circle) -> SphericalCap {
    c.spherical.unwrap_or_else(|| SphericalCap::from_planar(&c.planar))
}

/// The midscribed polyhedron of a spherical pattern: face planes are the
/// planes of the face circles, vertices are the poles of the vertex circles.
pub fn koebe_config(pattern: &CirclePattern, complex: &PolyhedralComplex) -> Result<Configuration, PackingError> {
    let degenerate = |c: &SphericalCap| !c.cos_radius.is_finite() || c.cos_radius.abs() >= 1.0;
    let mut planes = Vec::with_capacity(complex.num_faces());
    for (f, c) in pattern.face_circles.iter().enumerate() {
        let cap = cap_of(c);
        if degenerate(&cap) {
            return Err(PackingError::HemisphereViolation(format!("face {f}")));
        }
        planes.push(Plane::new(cap.normal, cap.cos_radius));
    }
    let mut vertices = Vec::with_capacity(complex.num_vertices());
    for (v, c) in pattern.vertex_circles.iter().enumerate() {
        let cap = cap_of(c);
        if degenerate(&cap) {
            return Err(PackingError::HemisphereViolation(format!("vertex {v}")));
        }
        let n = cap.normal;
        vertices.push(Vector4::new(cap.cos_radius, n.x, n.y, n.z).normalize());
    }
    let tangent_points = pattern
        .tangency
        .iter()
        .map(|t| t.sphere.unwrap_or_else(|| ball_chart_inverse(t.planar)))
        .collect();
    Ok(Configuration {
        planes,
        vertices,
        tangent_points,
        marks: Marks {
            frame: pattern.frame,
            z: pattern.marks,
            points: pattern.mark_points.unwrap_or_else(|| pattern.marks.map(ball_chart_inverse)),
        },
    })
}

/// Radii, layout and normalization in one call.
pub fn pack(complex: &PolyhedralComplex, frame: &Frame, marks: [ExtComplex; 3]) -> Result<CirclePattern, PackingError> {
    if Mobius::to_standard(marks).is_none() {
        return Err(PackingError::DegenerateMarks);
    }
    let radii = solve_radii(complex, frame, &RadiiOptions::default())?;
    let planar = layout_circles(complex, &radii)?;
    lift_normalize(&planar, marks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::seeds;
    use crate::packing::PlanarCircle;
    use num_complex::Complex64;

    #[test]
    fn ball_chart_values() {
        assert_eq!(ball_chart_inverse(ExtComplex::new(0.0, 0.0)), Vector3::new(0.0, 0.0, -1.0));
        assert!((ball_chart_inverse(ExtComplex::new(1.0, 0.0)) - Vector3::new(0.8, 0.0, -0.6)).norm() < 1e-15);
        assert_eq!(ball_chart_inverse(ExtComplex::Infinity), Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn spec_cap_examples() {
        let equator = Circle {
            planar: PlanarCircle::Disk { center: Complex64::new(0.0, 0.0), radius: 2.0 },
            spherical: Some(SphericalCap { normal: Vector3::new(0.0, 0.0, 1.0), cos_radius: 0.0 }),
        };
        let cap = cap_of(&equator);
        assert_eq!(Plane::new(cap.normal, cap.cos_radius), Plane::new(Vector3::z(), 0.0));
        let c = std::f64::consts::FRAC_PI_4.cos();
        let x = Vector4::new(c, 0.0, 0.0, 1.0).normalize();
        assert!(((x[3] / x[0]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_marks() {
        let p = seeds::cube();
        let z = ExtComplex::new(1.0, 0.0);
        assert_eq!(pack(&p, &p.default_frame(), [z, z, ExtComplex::Infinity]), Err(PackingError::DegenerateMarks));
    }

    #[test]
    fn symmetric_cube() {
        let p = seeds::cube();
        let r = 2.0 * (1.0 + 2f64.sqrt());
        let marks = [ExtComplex::new(0.0, -r), ExtComplex::new(r, 0.0), ExtComplex::new(0.0, r)];
        let pattern = pack(&p, &p.default_frame(), marks).unwrap();
        assert!(pattern.residuals(&p).is_valid(1e-9));
        let cfg = koebe_config(&pattern, &p).unwrap();
        let s = 0.5f64.sqrt();
        for (x, expected) in cfg.affine_vertices().unwrap().iter().zip(seeds::cube_vertices()) {
            assert!((x - Vector3::from(expected) * s).norm() < 1e-9, "{x} vs {expected:?}");
        }
    }
}
