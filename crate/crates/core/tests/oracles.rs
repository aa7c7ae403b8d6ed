//! Library results against independent computations.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use common::*;
use midscribe_core::bodies::{chart_inverse, BodyPath, ConvexBody};
use midscribe_core::combinatorics::{seeds, PolyhedralComplex};
use midscribe_core::midscribe::{
    newton_refine, plane_quadruple_det, singular_value_summary, start_configuration, SolverOptions, System,
};
use midscribe_core::mobius::ExtComplex;
use midscribe_core::packing::{layout_circles, lift_normalize, solve_radii, PlanarCircle, RadiiOptions};
use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Neighbours of every node and the four nodes that become lines, derived
/// from the face lists alone.
fn packing_graph(c: &PolyhedralComplex) -> (Vec<Vec<usize>>, Vec<usize>) {
    let nv = c.num_vertices();
    let mut adj = vec![Vec::new(); nv + c.num_faces()];
    for (f, face) in c.faces().iter().enumerate() {
        for &v in face {
            adj[v].push(nv + f);
            adj[nv + f].push(v);
        }
    }
    let frame = c.default_frame();
    let fe = c.face_edges(frame.face);
    let k = fe.iter().position(|&e| e == frame.edges[2]).unwrap();
    let star = c.edge(fe[(k + 1) % fe.len()]);
    let g = if star.faces[0] == frame.face { star.faces[1] } else { star.faces[0] };
    (adj, vec![nv + frame.face, nv + g, star.vertices[0], star.vertices[1]])
}

#[test]
fn radii_match_damped_root_finder() {
    for (name, c) in [("tetrahedron", seeds::tetrahedron()), ("cube", seeds::cube()), ("dodecahedron", seeds::dodecahedron())] {
        let radii = solve_radii(&c, &c.default_frame(), &RadiiOptions::default()).unwrap();
        let (adj, lines) = packing_graph(&c);
        let bounded: Vec<usize> = (0..adj.len()).filter(|i| !lines.contains(i)).collect();
        let target = |u: usize| TAU - PI * adj[u].iter().filter(|w| lines.contains(w)).count() as f64;
        let sums = |log_r: &dyn Fn(usize) -> f64, u: usize| -> f64 {
            adj[u].iter().filter(|w| !lines.contains(w)).map(|&w| 2.0 * (log_r(w) - log_r(u)).exp().atan()).sum()
        };

        // Re-evaluated angle sums of the library radii.
        let lib = |u: usize| radii.log_radii[u].unwrap();
        for &u in &bounded {
            let err = (sums(&lib, u) - target(u)).abs();
            assert!(err < 1e-12, "{name}: node {u} angle sum off by {err:e}");
        }

        // Oracle from all-zero log radii, with one radius pinned for scale.
        let pin = bounded[0];
        let oracle = lm_minimize(
            |x| {
                let pos = |u: usize| bounded.iter().position(|&b| b == u).unwrap();
                let lr = |u: usize| x[pos(u)];
                let mut r: Vec<f64> = bounded.iter().map(|&u| sums(&lr, u) - target(u)).collect();
                r.push(x[0] - lib(pin));
                DVector::from_vec(r)
            },
            &DVector::zeros(bounded.len()),
            500,
        );
        for (k, &u) in bounded.iter().enumerate() {
            assert!((oracle[k] - lib(u)).abs() < 1e-9, "{name}: log radius of node {u}");
        }
        for l in &lines {
            assert!(radii.log_radii[*l].is_none());
        }
    }
}

#[test]
fn layout_matches_least_squares_positions() {
    let c = seeds::tetrahedron();
    let radii = solve_radii(&c, &c.default_frame(), &RadiiOptions::default()).unwrap();
    let pattern = layout_circles(&c, &radii).unwrap();
    let (adj, lines) = packing_graph(&c);
    let nv = c.num_vertices();
    let circle = |u: usize| if u < nv { pattern.vertex_circles[u].planar } else { pattern.face_circles[u - nv].planar };
    let f0 = lines[0];

    // Bounded nodes carry a center, lines an angle and an offset.
    let unknowns: Vec<usize> = (0..adj.len()).filter(|&u| u != f0).collect();
    let mut x0 = Vec::new();
    for &u in &unknowns {
        match circle(u) {
            PlanarCircle::Disk { center, .. } => x0.extend([center.re, center.im]),
            PlanarCircle::HalfPlane { point, normal } => x0.extend([normal.arg(), (point * normal.conj()).re]),
            PlanarCircle::Exterior { .. } => panic!("exterior circle in the half-plane layout"),
        }
    }
    let exact = DVector::from_vec(x0.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = exact.map(|v| v + 1e-3 * rng.gen_range(-1.0..1.0));

    enum Geo {
        Disk(Complex64, f64),
        Line(f64, f64),
    }
    let radius = |u: usize| radii.log_radii[u].map(f64::exp);
    let pin_vertex = c.face(lines[0] - nv).iter().copied().find(|v| !lines.contains(v)).unwrap();
    let pin_re = match circle(pin_vertex) {
        PlanarCircle::Disk { center, .. } => center.re,
        _ => unreachable!(),
    };
    let geo = |x: &DVector<f64>, u: usize| -> Geo {
        if u == f0 {
            return Geo::Line(-PI / 2.0, 0.0);
        }
        let k = unknowns.iter().position(|&w| w == u).unwrap();
        match radius(u) {
            Some(r) => Geo::Disk(Complex64::new(x[2 * k], x[2 * k + 1]), r),
            None => Geo::Line(x[2 * k], x[2 * k + 1]),
        }
    };
    let pairs = |kind: u8| -> Vec<(usize, usize)> {
        match kind {
            // orthogonal vertex–face pairs
            0 => (0..nv).flat_map(|v| adj[v].iter().map(move |&f| (v, f))).collect(),
            // tangent vertex–vertex and face–face pairs, one per edge
            _ => c.edges().iter().flat_map(|e| [(e.vertices[0], e.vertices[1]), (nv + e.faces[0], nv + e.faces[1])]).collect(),
        }
    };
    let residual = |x: &DVector<f64>| {
        let mut r = Vec::new();
        for (u, w) in pairs(0) {
            r.push(match (geo(x, u), geo(x, w)) {
                (Geo::Disk(a, ra), Geo::Disk(b, rb)) => (a - b).norm_sqr() - ra * ra - rb * rb,
                (Geo::Disk(a, _), Geo::Line(t, o)) | (Geo::Line(t, o), Geo::Disk(a, _)) => {
                    (a * Complex64::from_polar(1.0, -t)).re - o
                }
                (Geo::Line(t1, _), Geo::Line(t2, _)) => (t1 - t2).cos(),
            });
        }
        for (u, w) in pairs(1) {
            r.push(match (geo(x, u), geo(x, w)) {
                (Geo::Disk(a, ra), Geo::Disk(b, rb)) => (a - b).norm() - ra - rb,
                (Geo::Disk(a, ra), Geo::Line(t, o)) | (Geo::Line(t, o), Geo::Disk(a, ra)) => {
                    ((a * Complex64::from_polar(1.0, -t)).re - o).abs() - ra
                }
                (Geo::Line(t1, _), Geo::Line(t2, _)) => (t1 - t2).sin(),
            });
        }
        match geo(x, pin_vertex) {
            Geo::Disk(a, _) => r.push(a.re - pin_re),
            Geo::Line(..) => unreachable!(),
        }
        DVector::from_vec(r)
    };
    let oracle = lm_minimize(residual, &start, 300);
    assert!(residual(&oracle).amax() < 1e-12);
    for (k, &u) in unknowns.iter().enumerate() {
        if radius(u).is_some() {
            let d = Complex64::new(oracle[2 * k] - exact[2 * k], oracle[2 * k + 1] - exact[2 * k + 1]).norm();
            assert!(d < 1e-9, "center of node {u} differs by {d:e}");
        }
    }

    // Every finite tangency point lies on all four of its circles.
    for (e, edge) in c.edges().iter().enumerate() {
        let Some(t) = pattern.tangency[e].planar.finite() else { continue };
        for u in [edge.vertices[0], edge.vertices[1], nv + edge.faces[0], nv + edge.faces[1]] {
            assert!(circle(u).side(t).abs() < 1e-9, "edge {e}, node {u}");
        }
    }
}

/// `a ↦ (0, 1, ∞)` as a 2×2 matrix.
fn to_standard(a: [ExtComplex; 3]) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let f = |z: ExtComplex| z.finite();
    match (f(a[0]), f(a[1]), f(a[2])) {
        (Some(a1), Some(a2), Some(a3)) => [[(a2 - a3), -a1 * (a2 - a3)], [(a2 - a1), -a3 * (a2 - a1)]],
        (Some(a1), Some(a2), None) => [[one, -a1], [Complex64::new(0.0, 0.0), a2 - a1]],
        _ => panic!("marks at infinity not used here"),
    }
}

fn mat_apply(m: [[Complex64; 2]; 2], z: ExtComplex) -> ExtComplex {
    match z.finite() {
        Some(z) => {
            let den = m[1][0] * z + m[1][1];
            if den.norm() == 0.0 {
                ExtComplex::Infinity
            } else {
                ExtComplex::Finite((m[0][0] * z + m[0][1]) / den)
            }
        }
        None if m[1][0].norm() == 0.0 => ExtComplex::Infinity,
        None => ExtComplex::Finite(m[0][0] / m[1][0]),
    }
}

fn mat_inv(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn sphere_point(z: ExtComplex) -> Vector3<f64> {
    match z.finite() {
        None => Vector3::z(),
        Some(z) => {
            let (x, y) = (z.re / 2.0, z.im / 2.0);
            let q = x * x + y * y;
            Vector3::new(2.0 * x, 2.0 * y, q - 1.0) / (1.0 + q)
        }
    }
}

#[test]
fn lifted_cube_pattern_matches_composed_mobius() {
    let c = seeds::cube();
    let r = 2.0 * (1.0 + 2f64.sqrt());
    let targets = [ExtComplex::new(0.0, -r), ExtComplex::new(r, 0.0), ExtComplex::new(0.0, r)];
    let radii = solve_radii(&c, &c.default_frame(), &RadiiOptions::default()).unwrap();
    let planar = layout_circles(&c, &radii).unwrap();
    let lifted = lift_normalize(&planar, targets).unwrap();
    let m = mat_mul(mat_inv(to_standard(targets)), to_standard(planar.marks));

    let ball = ConvexBody::ball();
    for (k, &e) in planar.frame.edges.iter().enumerate() {
        let image = sphere_point(mat_apply(m, planar.tangency[e].planar));
        let want = chart_inverse(&ball, targets[k]).unwrap();
        assert!((image - want).norm() < 1e-10);
        assert!((lifted.tangency[e].sphere.unwrap() - want).norm() < 1e-10);
    }
    // Three witness points per circle, mapped and lifted by hand.
    for (orig, lift) in planar.vertex_circles.iter().chain(&planar.face_circles).zip(lifted.vertex_circles.iter().chain(&lifted.face_circles)) {
        let cap = lift.spherical.unwrap();
        let witnesses: Vec<ExtComplex> = match orig.planar {
            PlanarCircle::Disk { center, radius } | PlanarCircle::Exterior { center, radius } => {
                [0.3, 2.2, 4.1].iter().map(|&t| ExtComplex::Finite(center + Complex64::from_polar(radius, t))).collect()
            }
            PlanarCircle::HalfPlane { point, normal } => {
                [-1.5, 0.0, 2.5].iter().map(|&t| ExtComplex::Finite(point + normal * Complex64::new(0.0, t))).collect()
            }
        };
        for w in witnesses {
            let p = sphere_point(mat_apply(m, w));
            assert!(cap.point_residual(&p).abs() < 1e-10);
        }
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let bodies = [
        ConvexBody::parse("ellipsoid:a=1.2,b=1.0").unwrap(),
        ConvexBody::parse("superellipsoid:p=4,a=1,b=1").unwrap(),
        ConvexBody::parse("ellipsoid:a=0.9,b=1.1").unwrap().blended(0.4),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (_, c) in seeds::all_seeds() {
        for trial in 0..20 {
            let marks = random_marks(&mut rng);
            let start = start_configuration(&c, &c.default_frame(), marks).unwrap();
            let body = bodies[trial % bodies.len()];
            let sys = System::new(&c, body, Some(&start.marks));
            let x = sys.pack(&start).map(|v| v + 1e-2 * rng.gen_range(-1.0..1.0));
            let j = sys.jacobian(&x).to_dense();
            let h = 1e-6;
            for k in 0..x.len() {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[k] += h;
                xm[k] -= h;
                let fd = (sys.residual(&xp) - sys.residual(&xm)) / (2.0 * h);
                for i in 0..fd.len() {
                    let err = (j[(i, k)] - fd[i]).abs() / j[(i, k)].abs().max(1.0);
                    assert!(err < 1e-5, "row {i}, column {k}: {} vs {}", j[(i, k)], fd[i]);
                }
            }
        }
    }
}

#[test]
fn cube_jacobian_singular_values_match_eigen_decomposition() {
    let c = seeds::cube();
    let cfg = exact_config(&c, &cube_box(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    let sys = System::new(&c, ConvexBody::ball(), Some(&cfg.marks));
    let j: DMatrix<f64> = sys.jacobian(&sys.pack(&cfg)).to_dense();
    let eig = (j.transpose() * &j).symmetric_eigen().eigenvalues;
    let smin = eig.min().max(0.0).sqrt();
    let smax = eig.max().sqrt();
    assert!(smin > 1e-6, "smallest singular value {smin:e}");
    let (condition, ratio, deficiency) = singular_value_summary(&j);
    assert_eq!(deficiency, 0);
    assert!((ratio - smin / smax).abs() < 1e-6 * ratio);
    assert!((condition - smax / smin).abs() < 1e-6 * condition);
}

#[test]
fn perturbed_cube_reconverges_like_least_squares() {
    let c = seeds::cube();
    let exact = cube_box(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let mut start = exact_config(&c, &exact);
    for p in &mut start.planes {
        p.offset += 0.01;
    }
    let (solved, _) = newton_refine(&start, &ConvexBody::ball(), &c, &SolverOptions::default()).unwrap();
    assert!(vertex_error(&solved, &exact) < 1e-9);

    let sys = System::new(&c, ConvexBody::ball(), Some(&start.marks));
    let oracle = sys.unpack(&lm_minimize(|x| sys.residual(x), &sys.pack(&start), 200), &start);
    assert!(vertex_error(&oracle, &exact) < 1e-9);
}

#[test]
fn cube_plane_quadruples_match_cofactor_expansion() {
    let c = seeds::cube();
    let cfg = exact_config(&c, &cube_box(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    let mut checked = 0;
    for a in 0..6 {
        for b in a + 1..6 {
            for d in b + 1..6 {
                for e in d + 1..6 {
                    let planes = [a, b, d, e].map(|f| cfg.planes[f]);
                    let det = plane_quadruple_det(planes);
                    let rows = planes.map(|p| {
                        let q = p.coords();
                        [q[0], q[1], q[2], q[3]]
                    });
                    let oracle = det4(rows);
                    assert!((det - oracle).abs() < 1e-12);
                    // Four planes containing a common axis direction meet at a point at infinity.
                    let common_direction =
                        (0..3).any(|axis| planes.iter().all(|p| p.normal[axis].abs() < 1e-12));
                    if common_direction {
                        assert!(oracle.abs() < 1e-12);
                    } else {
                        assert!(oracle.abs() > 0.1, "faces {a},{b},{d},{e}: {oracle}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert_eq!(checked, 12);
}

#[test]
fn blended_gauge_matches_scalar_evaluation() {
    let path = BodyPath::new(ConvexBody::parse("ellipsoid:a=1.2,b=1.0").unwrap()).unwrap();
    let p = Vector3::new(1.1, 0.0, 0.0);
    let ball = 1.1f64 * 1.1 - 1.0;
    let ellipsoid = (1.1f64 / 1.2).powi(2) - 1.0;
    let expected = 0.5 * ball + 0.5 * ellipsoid;
    let got = path.eval(0.5).value(&p);
    assert!(expected > 0.0 && got > 0.0);
    assert!((got - expected).abs() < 1e-15);
    assert!((path.eval(0.0).value(&p) - 0.21).abs() < 1e-15);
}
