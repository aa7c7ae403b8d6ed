#![allow(dead_code)]

use midscribe_core::bodies::{chart_forward, ConvexBody};
use midscribe_core::combinatorics::{seeds, PolyhedralComplex};
use midscribe_core::midscribe::{Configuration, Marks, Plane};
use midscribe_core::mobius::ExtComplex;
use nalgebra::{DMatrix, DVector, Vector3, Vector4};
use rand::Rng;

/// Levenberg–Marquardt on `r(x)` with a central-difference Jacobian.
pub fn lm_minimize(r: impl Fn(&DVector<f64>) -> DVector<f64>, x0: &DVector<f64>, iters: usize) -> DVector<f64> {
    let n = x0.len();
    let mut x = x0.clone();
    let mut rx = r(&x);
    let mut cost = rx.norm_squared();
    let mut mu = 1e-3;
    let h = 1e-7;
    for _ in 0..iters {
        let mut j = DMatrix::zeros(rx.len(), n);
        for k in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            j.set_column(k, &((r(&xp) - r(&xm)) / (2.0 * h)));
        }
        let jt = j.transpose();
        let g = &jt * &rx;
        let a = &jt * &j;
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = a.clone();
            for k in 0..n {
                damped[(k, k)] += mu * (1.0 + a[(k, k)]);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-&g))) else {
                mu *= 10.0;
                continue;
            };
            let trial = &x + &step;
            let rt = r(&trial);
            let ct = rt.norm_squared();
            if ct < cost {
                x = trial;
                rx = rt;
                cost = ct;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved || cost < 1e-30 {
            break;
        }
    }
    x
}

/// Orientation-preserving plane through the first three vertices of a face.
pub fn exact_config(complex: &PolyhedralComplex, vertices: &[Vector3<f64>]) -> Configuration {
    let planes = complex
        .faces()
        .iter()
        .map(|f| {
            let (a, b, c) = (vertices[f[0]], vertices[f[1]], vertices[f[2]]);
            let n = (b - a).cross(&(c - a)).normalize();
            Plane::new(n, n.dot(&a))
        })
        .collect();
    // Symmetric witnesses touch at edge midpoints.
    let tangent_points: Vec<Vector3<f64>> =
        complex.edges().iter().map(|e| (vertices[e.vertices[0]] + vertices[e.vertices[1]]) / 2.0).collect();
    let frame = complex.default_frame();
    let points = frame.edges.map(|e| tangent_points[e]);
    Configuration {
        planes,
        vertices: vertices.iter().map(|v| Vector4::new(1.0, v.x, v.y, v.z).normalize()).collect(),
        tangent_points,
        marks: Marks { frame, z: points.map(|p| chart_forward(&p)), points },
    }
}

pub fn cube_box(a: f64, b: f64, c: f64) -> Vec<Vector3<f64>> {
    seeds::cube_vertices().iter().map(|v| Vector3::new(v[0] * a, v[1] * b, v[2] * c)).collect()
}

pub fn regular_tetrahedron() -> Vec<Vector3<f64>> {
    seeds::tetrahedron_vertices().iter().map(|v| Vector3::from(*v)).collect()
}

/// Chart images of the frame-edge midpoints of a symmetric witness.
pub fn witness_marks(complex: &PolyhedralComplex, vertices: &[Vector3<f64>]) -> [ExtComplex; 3] {
    exact_config(complex, vertices).marks.z
}

/// Uniform marks in `|z| <= 2` with pairwise distances of at least 0.5.
pub fn random_marks(rng: &mut impl Rng) -> [ExtComplex; 3] {
    loop {
        let z: [num_complex::Complex64; 3] = std::array::from_fn(|_| loop {
            let w = num_complex::Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if w.norm() <= 2.0 {
                break w;
            }
        });
        if (z[0] - z[1]).norm() >= 0.5 && (z[1] - z[2]).norm() >= 0.5 && (z[0] - z[2]).norm() >= 0.5 {
            return z.map(ExtComplex::Finite);
        }
    }
}

pub fn bodies_for_existence() -> [(&'static str, ConvexBody); 2] {
    [
        ("ellipsoid 1.2,1.0", ConvexBody::parse("ellipsoid:a=1.2,b=1.0").unwrap()),
        ("superellipsoid p=4", ConvexBody::parse("superellipsoid:p=4,a=1,b=1").unwrap()),
    ]
}

/// Cofactor expansion along the first row.
pub fn det4(m: [[f64; 4]; 4]) -> f64 {
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    (0..4)
        .map(|c| {
            let minor: [[f64; 3]; 3] = std::array::from_fn(|i| {
                let row = m[i + 1];
                let cols: Vec<f64> = (0..4).filter(|&k| k != c).map(|k| row[k]).collect();
                [cols[0], cols[1], cols[2]]
            });
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * det3(minor)
        })
        .sum()
}

/// Largest distance between matching affine vertices.
pub fn vertex_error(cfg: &Configuration, expected: &[Vector3<f64>]) -> f64 {
    match cfg.affine_vertices() {
        Some(vs) => vs.iter().zip(expected).map(|(v, e)| (v - e).amax()).fold(0.0, f64::max),
        None => f64::INFINITY,
    }
}
