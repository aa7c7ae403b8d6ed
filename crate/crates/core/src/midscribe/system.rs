//! The square constraint system of a midscribed configuration.
//!
//! Unknowns, in order: `(n_f, d_f)` per face, the projective vertex
//! `x_v` per vertex, then `p_e` per unmarked edge.
//!
//! Equations, in order:
//! 1. `|n_f|² - 1` per face;
//! 2. `⟨n_f, x_v[1..3]⟩ - d_f x_v[0]` per flag, walking each vertex's faces
//!    in rotation order;
//! 3. `|x_v|² - 1` per vertex;
//! 4. per edge with faces `f, g`: `⟨n_f, p_e⟩ - d_f`, `⟨n_g, p_e⟩ - d_g`,
//!    `F(p_e)` and `⟨∇F(p_e), n_f × n_g⟩`. Marked edges drop `F(p_e)` and
//!    use their fixed mark point for `p_e`.

use nalgebra::{DMatrix, DVector, Matrix4, Vector3, Vector4};

use super::{Configuration, Marks, Plane, SolveError};
use crate::bodies::ConvexBody;
use crate::combinatorics::{EdgeId, PolyhedralComplex};

/// Coordinate-format sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub triplets: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for &(i, j, v) in &self.triplets {
            m[(i, j)] += v;
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }
}

/// Index bookkeeping for one complex, body and (optional) set of marks.
#[derive(Debug, Clone)]
pub struct System<'a> {
    complex: &'a PolyhedralComplex,
    body: ConvexBody,
    /// Per edge: `Some(i)` if it carries mark `i`.
    mark_of: Vec<Option<usize>>,
    mark_points: [Vector3<f64>; 3],
    /// Per edge: offset of `p_e` among the unknowns, `None` for marked edges.
    point_offset: Vec<Option<usize>>,
    n_unknowns: usize,
    n_equations: usize,
}

impl<'a> System<'a> {
    pub fn new(complex: &'a PolyhedralComplex, body: ConvexBody, marks: Option<&Marks>) -> Self {
        let (nf, nv, ne) = (complex.num_faces(), complex.num_vertices(), complex.num_edges());
        let mut mark_of = vec![None; ne];
        let mut mark_points = [Vector3::zeros(); 3];
        if let Some(m) = marks {
            for (i, &e) in m.frame.edges.iter().enumerate() {
                mark_of[e] = Some(i);
            }
            mark_points = m.points;
        }
        let mut next = 4 * nf + 4 * nv;
        let point_offset = mark_of
            .iter()
            .map(|m| {
                m.is_none().then(|| {
                    next += 3;
                    next - 3
                })
            })
            .collect();
        let n_marked = mark_of.iter().flatten().count();
        System {
            complex,
            body,
            mark_of,
            mark_points,
            point_offset,
            n_unknowns: next,
            n_equations: nf + 2 * ne + nv + 4 * ne - n_marked,
        }
    }

    pub fn num_unknowns(&self) -> usize {
        self.n_unknowns
    }

    pub fn num_equations(&self) -> usize {
        self.n_equations
    }

    /// Equations minus unknowns.
    pub fn balance(&self) -> i64 {
        self.n_equations as i64 - self.n_unknowns as i64
    }

    fn face_offset(&self, f: usize) -> usize {
        4 * f
    }

    fn vertex_offset(&self, v: usize) -> usize {
        4 * self.complex.num_faces() + 4 * v
    }

    pub fn check_dimensions(&self, cfg: &Configuration) -> Result<(), SolveError> {
        if cfg.dimensions_match(self.complex) {
            Ok(())
        } else {
            Err(SolveError::DimensionMismatch(format!(
                "configuration has {} planes, {} vertices, {} tangent points; complex has {} faces, {} vertices, {} edges",
                cfg.planes.len(),
                cfg.vertices.len(),
                cfg.tangent_points.len(),
                self.complex.num_faces(),
                self.complex.num_vertices(),
                self.complex.num_edges()
            )))
        }
    }

    /// Flattens a configuration into the unknown vector.
    pub fn pack(&self, cfg: &Configuration) -> DVector<f64> {
        let mut x = DVector::zeros(self.n_unknowns);
        for (f, p) in cfg.planes.iter().enumerate() {
            let o = self.face_offset(f);
            x.fixed_rows_mut::<3>(o).copy_from(&p.normal);
            x[o + 3] = p.offset;
        }
        for (v, xv) in cfg.vertices.iter().enumerate() {
            x.fixed_rows_mut::<4>(self.vertex_offset(v)).copy_from(xv);
        }
        for (e, p) in cfg.tangent_points.iter().enumerate() {
            if let Some(o) = self.point_offset[e] {
                x.fixed_rows_mut::<3>(o).copy_from(p);
            }
        }
        x
    }

    /// Writes the unknown vector back into a copy of `template`.
    pub fn unpack(&self, x: &DVector<f64>, template: &Configuration) -> Configuration {
        let mut cfg = template.clone();
        for f in 0..self.complex.num_faces() {
            let o = self.face_offset(f);
            cfg.planes[f] = Plane::new(x.fixed_rows::<3>(o).into_owned(), x[o + 3]);
        }
        for v in 0..self.complex.num_vertices() {
            cfg.vertices[v] = x.fixed_rows::<4>(self.vertex_offset(v)).into_owned();
        }
        for e in 0..self.complex.num_edges() {
            cfg.tangent_points[e] = self.point(x, e);
        }
        cfg
    }

    /// Rescales each vertex block of `x` to unit length.
    pub fn normalize_vertices(&self, x: &mut DVector<f64>) {
        for v in 0..self.complex.num_vertices() {
            let o = self.vertex_offset(v);
            let n = x.fixed_rows::<4>(o).norm();
            if n > 0.0 {
                x.fixed_rows_mut::<4>(o).unscale_mut(n);
            }
        }
    }

    fn normal(&self, x: &DVector<f64>, f: usize) -> Vector3<f64> {
        x.fixed_rows::<3>(self.face_offset(f)).into_owned()
    }

    fn offset(&self, x: &DVector<f64>, f: usize) -> f64 {
        x[self.face_offset(f) + 3]
    }

    fn vertex(&self, x: &DVector<f64>, v: usize) -> Vector4<f64> {
        x.fixed_rows::<4>(self.vertex_offset(v)).into_owned()
    }

    fn point(&self, x: &DVector<f64>, e: EdgeId) -> Vector3<f64> {
        match (self.point_offset[e], self.mark_of[e]) {
            (Some(o), _) => x.fixed_rows::<3>(o).into_owned(),
            (None, Some(i)) => self.mark_points[i],
            (None, None) => unreachable!("every edge is marked or free"),
        }
    }

    pub fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let c = self.complex;
        let mut r = Vec::with_capacity(self.n_equations);
        for f in 0..c.num_faces() {
            r.push(self.normal(x, f).norm_squared() - 1.0);
        }
        for v in 0..c.num_vertices() {
            let xv = self.vertex(x, v);
            for &f in c.vertex_faces(v) {
                r.push(Plane::new(self.normal(x, f), self.offset(x, f)).incidence(&xv));
            }
        }
        for v in 0..c.num_vertices() {
            r.push(self.vertex(x, v).norm_squared() - 1.0);
        }
        for (e, edge) in c.edges().iter().enumerate() {
            let [f, g] = edge.faces;
            let (nf, ng) = (self.normal(x, f), self.normal(x, g));
            let p = self.point(x, e);
            let ev = self.body.eval(&p);
            r.push(nf.dot(&p) - self.offset(x, f));
            r.push(ng.dot(&p) - self.offset(x, g));
            if self.mark_of[e].is_none() {
                r.push(ev.value);
            }
            r.push(ev.gradient.dot(&nf.cross(&ng)));
        }
        debug_assert_eq!(r.len(), self.n_equations);
        DVector::from_vec(r)
    }

    pub fn jacobian(&self, x: &DVector<f64>) -> SparseMatrix {
        let c = self.complex;
        let mut t: Vec<(usize, usize, f64)> = Vec::new();
        let mut row = 0;
        let put3 = |t: &mut Vec<(usize, usize, f64)>, row: usize, col: usize, v: &Vector3<f64>| {
            for k in 0..3 {
                t.push((row, col + k, v[k]));
            }
        };
        for f in 0..c.num_faces() {
            put3(&mut t, row, self.face_offset(f), &(2.0 * self.normal(x, f)));
            row += 1;
        }
        for v in 0..c.num_vertices() {
            let xv = self.vertex(x, v);
            let vo = self.vertex_offset(v);
            for &f in c.vertex_faces(v) {
                let fo = self.face_offset(f);
                let n = self.normal(x, f);
                put3(&mut t, row, fo, &xv.fixed_rows::<3>(1).into_owned());
                t.push((row, fo + 3, -xv[0]));
                t.push((row, vo, -self.offset(x, f)));
                put3(&mut t, row, vo + 1, &n);
                row += 1;
            }
        }
        for v in 0..c.num_vertices() {
            let xv = self.vertex(x, v);
            let vo = self.vertex_offset(v);
            for k in 0..4 {
                t.push((row, vo + k, 2.0 * xv[k]));
            }
            row += 1;
        }
        for (e, edge) in c.edges().iter().enumerate() {
            let [f, g] = edge.faces;
            let (fo, go) = (self.face_offset(f), self.face_offset(g));
            let (nf, ng) = (self.normal(x, f), self.normal(x, g));
            let p = self.point(x, e);
            let po = self.point_offset[e];
            let ev = self.body.eval(&p);
            for (o, n) in [(fo, nf), (go, ng)] {
                put3(&mut t, row, o, &p);
                t.push((row, o + 3, -1.0));
                if let Some(po) = po {
                    put3(&mut t, row, po, &n);
                }
                row += 1;
            }
            if let Some(po) = po {
                put3(&mut t, row, po, &ev.gradient);
                row += 1;
            }
            // ⟨∇F, n_f × n_g⟩ = ⟨n_f, n_g × ∇F⟩ = ⟨n_g, ∇F × n_f⟩
            let dir = nf.cross(&ng);
            put3(&mut t, row, fo, &ng.cross(&ev.gradient));
            put3(&mut t, row, go, &ev.gradient.cross(&nf));
            if let Some(po) = po {
                put3(&mut t, row, po, &(ev.hessian * dir));
            }
            row += 1;
        }
        debug_assert_eq!(row, self.n_equations);
        SparseMatrix { nrows: self.n_equations, ncols: self.n_unknowns, triplets: t }
    }
}

/// Residual vector of `cfg` against `body`, pinned by `cfg.marks`.
pub fn assemble_residual(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
) -> Result<DVector<f64>, SolveError> {
    let sys = System::new(complex, *body, Some(&cfg.marks));
    sys.check_dimensions(cfg)?;
    Ok(sys.residual(&sys.pack(cfg)))
}

/// Analytic Jacobian of [`assemble_residual`] with respect to the unknowns.
pub fn assemble_jacobian(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
) -> Result<SparseMatrix, SolveError> {
    let sys = System::new(complex, *body, Some(&cfg.marks));
    sys.check_dimensions(cfg)?;
    Ok(sys.jacobian(&sys.pack(cfg)))
}

/// Determinant of the 4×4 matrix with rows `(n_f, -d_f)`; zero exactly
/// when the four planes share a projective point.
pub fn plane_quadruple_det(planes: [Plane; 4]) -> f64 {
    let rows = planes.map(|p| p.coords().transpose());
    Matrix4::from_rows(&rows).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::seeds;

    #[test]
    fn quadruple_determinants() {
        let x = Plane::new(Vector3::x(), 0.0);
        let y = Plane::new(Vector3::y(), 0.0);
        let z = Plane::new(Vector3::z(), 0.0);
        assert_eq!(plane_quadruple_det([x, y, z, Plane::new(Vector3::new(1.0, 1.0, 1.0), 0.0)]), 0.0);
        assert_eq!(plane_quadruple_det([x, y, z, Plane::new(Vector3::new(1.0, 1.0, 1.0), 1.0)]), -1.0);
    }

    #[test]
    fn balance_on_seeds() {
        for (name, p) in seeds::all_seeds() {
            let marks = Marks {
                frame: p.default_frame(),
                z: [crate::mobius::ExtComplex::Infinity; 3],
                points: [Vector3::zeros(); 3],
            };
            let marked = System::new(&p, ConvexBody::ball(), Some(&marks));
            assert_eq!(marked.balance(), 0, "{name}");
            assert_eq!(marked.num_unknowns(), 4 * p.num_faces() + 4 * p.num_vertices() + 3 * p.num_edges() - 9);
            assert_eq!(System::new(&p, ConvexBody::ball(), None).balance(), -6, "{name}");
        }
    }
}
