//! End-to-end behaviour on closed-form configurations.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::*;
use midscribe_core::bodies::{BodyPath, ConvexBody};
use midscribe_core::combinatorics::seeds;
use midscribe_core::midscribe::{
    assemble_jacobian, assemble_residual, continue_to_body, newton_refine, Configuration, SolveError, SolverOptions,
    System,
};
use midscribe_core::mobius::ExtComplex;
use midscribe_core::packing::{koebe_config, pack};
use midscribe_core::verify::{
    check_convexity, check_midscription, extract_kdisk_packings, rigidity_probe, Convexity, DiskKind, TANGENCY_TOL,
};
use nalgebra::{DVector, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = FRAC_1_SQRT_2;

fn unit_cube() -> Configuration {
    exact_config(&seeds::cube(), &cube_box(H, H, H))
}

fn superellipsoid_box() -> Vec<Vector3<f64>> {
    let q = 2f64.powf(-0.25);
    cube_box(q, q, q)
}

fn singular_ok() -> SolverOptions {
    SolverOptions { allow_singular: true, ..SolverOptions::default() }
}

#[test]
fn closed_form_residuals() {
    let c = seeds::cube();
    let r = assemble_residual(&unit_cube(), &ConvexBody::ball(), &c).unwrap();
    assert!(r.amax() < 1e-14, "{}", r.amax());

    for (a, b) in [(1.2, 1.0), (0.9, 1.1), (1.5, 0.7)] {
        let body = ConvexBody::parse(&format!("ellipsoid:a={a},b={b}")).unwrap();
        let cfg = exact_config(&c, &cube_box(a * H, b * H, H));
        assert!(assemble_residual(&cfg, &body, &c).unwrap().amax() < 1e-12);
    }
}

#[test]
fn scaled_cube_gauge_rows() {
    let c = seeds::cube();
    let cfg = exact_config(&c, &cube_box(1.1 * H, 1.1 * H, 1.1 * H));
    let sys = System::new(&c, ConvexBody::ball(), None);
    let mut r = sys.residual(&sys.pack(&cfg));
    let (nf, nv, ne) = (c.num_faces(), c.num_vertices(), c.num_edges());
    for e in 0..ne {
        let row = nf + 2 * ne + nv + 4 * e + 2;
        assert!((r[row] - 0.21).abs() < 1e-14);
        r[row] = 0.0;
    }
    assert!(r.amax() < 1e-14);
}

#[test]
fn jacobian_entries() {
    let c = seeds::cube();
    let body = ConvexBody::parse("superellipsoid:p=4,a=1,b=1").unwrap();
    let mut cfg = unit_cube();
    cfg.tangent_points[5] += Vector3::new(0.01, -0.02, 0.03);
    let j = assemble_jacobian(&cfg, &body, &c).unwrap().to_dense();
    let n = cfg.planes[2].normal;
    for k in 0..3 {
        assert_eq!(j[(2, 4 * 2 + k)], 2.0 * n[k]);
    }
    // Without marks every edge owns its gauge row and its point unknowns.
    let sys = System::new(&c, body, None);
    let j = sys.jacobian(&sys.pack(&cfg)).to_dense();
    let (nf, nv, ne) = (c.num_faces(), c.num_vertices(), c.num_edges());
    let row = nf + 2 * ne + nv + 4 * 5 + 2;
    let col = 4 * nf + 4 * nv + 3 * 5;
    let g = body.gradient(&cfg.tangent_points[5]);
    for k in 0..3 {
        assert_eq!(j[(row, col + k)], g[k]);
    }
}

#[test]
fn newton_fixed_point_and_failure() {
    let c = seeds::cube();
    let (out, report) = newton_refine(&unit_cube(), &ConvexBody::ball(), &c, &SolverOptions::default()).unwrap();
    assert!(report.iterations <= 1);
    assert!(report.final_residual < 1e-11);
    assert!(out.max_vertex_distance(&unit_cube()) < 1e-12);

    let sys = System::new(&c, ConvexBody::ball(), Some(&unit_cube().marks));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let garbage = DVector::from_fn(sys.num_unknowns(), |_, _| rng.gen_range(-5.0..5.0));
        let start = sys.unpack(&garbage, &unit_cube());
        match newton_refine(&start, &ConvexBody::ball(), &c, &SolverOptions::default()) {
            Err(SolveError::NoDecrease { .. } | SolveError::MaxIterations { .. }) => {}
            other => panic!("expected a graceful failure, got {other:?}"),
        }
    }
}

#[test]
fn constant_path_returns_koebe_configuration() {
    let c = seeds::dodecahedron();
    let z = [ExtComplex::new(0.4, -0.3), ExtComplex::new(-0.2, 0.9), ExtComplex::new(-1.1, -0.6)];
    let koebe = koebe_config(&pack(&c, &c.default_frame(), z).unwrap(), &c).unwrap();
    let path = BodyPath::new(ConvexBody::ball()).unwrap();
    let (out, _) = continue_to_body(&c, &c.default_frame(), z, &path, &SolverOptions::default()).unwrap();
    assert!(out.max_vertex_distance(&koebe) < 1e-10);
}

#[test]
fn symmetric_boxes_by_continuation() {
    let c = seeds::cube();
    let path = BodyPath::new(ConvexBody::parse("ellipsoid:a=1.2,b=1.0").unwrap()).unwrap();
    let expected = cube_box(1.2 * H, H, H);
    let z = witness_marks(&c, &expected);
    let (out, _) = continue_to_body(&c, &c.default_frame(), z, &path, &SolverOptions::default()).unwrap();
    assert!(vertex_error(&out, &expected) < 1e-9);

    let body = ConvexBody::parse("superellipsoid:p=4,a=1,b=1").unwrap();
    let path = BodyPath::new(body).unwrap();
    let expected = superellipsoid_box();
    let z = witness_marks(&c, &expected);
    let (out, report) = continue_to_body(&c, &c.default_frame(), z, &path, &singular_ok()).unwrap();
    assert!(vertex_error(&out, &expected) < 1e-8);
    assert!(report.singular_steps > 0 && report.rank_deficiency > 0);
    assert!(check_midscription(&out, &body, &c, 1e-9).passed());

    // The box is a singular root, so the default solver refuses it.
    match continue_to_body(&c, &c.default_frame(), z, &path, &SolverOptions::default()) {
        Err(SolveError::StepUnderflow { last_s, .. }) => assert!(last_s > 0.9),
        other => panic!("expected StepUnderflow, got {other:?}"),
    }
}

#[test]
fn regular_tetrahedron_verification() {
    let c = seeds::tetrahedron();
    let ball = ConvexBody::ball();
    let cfg = exact_config(&c, &regular_tetrahedron());
    let report = check_midscription(&cfg, &ball, &c, TANGENCY_TOL);
    assert!(report.passed());
    for (e, check) in report.per_edge.iter().enumerate() {
        assert!(check.line_minimum.abs() < 1e-15);
        let edge = c.edge(e);
        let mid = (regular_tetrahedron()[edge.vertices[0]] + regular_tetrahedron()[edge.vertices[1]]) / 2.0;
        assert!((check.minimizer - mid).norm() < 1e-12);
    }

    let doubled: Vec<_> = regular_tetrahedron().iter().map(|v| v * 2.0).collect();
    let report = check_midscription(&exact_config(&c, &doubled), &ball, &c, TANGENCY_TOL);
    assert!(!report.passed());
    for check in &report.per_edge {
        assert!((check.line_minimum - 3.0).abs() < 1e-12);
    }
}

#[test]
fn convexity_classes() {
    let c = seeds::cube();
    assert_eq!(check_convexity(&unit_cube(), &c).classification, Convexity::Convex);

    let mut flipped = unit_cube();
    flipped.planes[3].normal = -flipped.planes[3].normal;
    assert_eq!(check_convexity(&flipped, &c).classification, Convexity::Nonconvex);

    let mut at_infinity = unit_cube();
    at_infinity.vertices[4] = Vector4::new(0.0, 1.0, 0.0, 0.0);
    assert_eq!(check_convexity(&at_infinity, &c).classification, Convexity::ProjectiveDegenerate);
}

#[test]
fn cube_disks_are_spherical_caps() {
    let c = seeds::cube();
    let cfg = unit_cube();
    let ball = ConvexBody::ball();
    let (faces, visibility) = extract_kdisk_packings(&cfg, &ball, &c).unwrap();
    for disk in &faces.disks {
        let DiskKind::Face { plane } = disk.kind else { panic!("face disk expected") };
        let center = plane.normal * H;
        for p in &disk.boundary_samples {
            assert!(((p - center).norm() - H).abs() < 1e-10);
            assert!((plane.normal.dot(p) - H).abs() < 1e-10);
        }
    }
    let vertices = cfg.affine_vertices().unwrap();
    for (v, disk) in visibility.disks.iter().enumerate() {
        for p in &disk.boundary_samples {
            assert!((p.dot(&vertices[v]) - 1.0).abs() < 1e-10);
        }
        for &e in c.vertex_edges(v) {
            assert!(disk.membership(&ball, &cfg.tangent_points[e]).abs() < 1e-12);
        }
    }
    assert!(faces.contact_graph_ok && visibility.contact_graph_ok);
    assert!(faces.non_degenerate && visibility.non_degenerate);
}

#[test]
fn ellipsoid_box_contact_graphs() {
    let c = seeds::cube();
    let body = ConvexBody::parse("ellipsoid:a=1.2,b=1.0").unwrap();
    let cfg = exact_config(&c, &cube_box(1.2 * H, H, H));
    let (faces, visibility) = extract_kdisk_packings(&cfg, &body, &c).unwrap();
    for packing in [&faces, &visibility] {
        assert!(packing.contact_graph_ok && packing.non_degenerate);
        assert!(packing.max_boundary_residual < 1e-12);
        let expected = packing.contacts.iter().filter(|k| k.expected).count();
        assert_eq!(expected, c.num_edges());
        // Expected contacts are checked at p_e; no other pair may come close.
        assert!(packing.contacts.iter().filter(|k| !k.expected).all(|k| !k.detected));
        assert!(packing.contacts.iter().filter(|k| k.expected).all(|k| k.contact_residual < 1e-7));
    }
    let report = check_midscription(&cfg, &body, &c, TANGENCY_TOL);
    assert!(report.passed() && report.contact_graph_dual_ok && report.contact_graph_primal_ok);
}

#[test]
fn rigidity_examples() {
    let c = seeds::cube();
    let frame = c.default_frame();
    let ball = BodyPath::new(ConvexBody::ball()).unwrap();
    let z = [ExtComplex::new(0.3, 0.1), ExtComplex::new(-1.0, 0.4), ExtComplex::new(0.5, -1.2)];
    let (_, report) = rigidity_probe(&c, &frame, z, &ball, 5, 1e-3, &SolverOptions::default()).unwrap();
    assert_eq!(report.converged, 5);
    assert!(report.max_pairwise_distance < 1e-6);

    let (_, report) = rigidity_probe(&c, &frame, z, &ball, 3, 0.0, &SolverOptions::default()).unwrap();
    assert_eq!(report.max_pairwise_distance, 0.0);
    assert_eq!(report.max_distance_to_base, 0.0);

    let path = BodyPath::new(ConvexBody::parse("superellipsoid:p=4,a=1,b=1").unwrap()).unwrap();
    let expected = superellipsoid_box();
    let z = witness_marks(&c, &expected);
    let (base, report) = rigidity_probe(&c, &frame, z, &path, 5, 1e-2, &singular_ok()).unwrap();
    assert_eq!(report.converged, 5, "{:?}", report.failures);
    assert!(vertex_error(&base, &expected) < 1e-8);
    assert!(report.max_distance_to_base < 1e-6, "{}", report.max_distance_to_base);
}
