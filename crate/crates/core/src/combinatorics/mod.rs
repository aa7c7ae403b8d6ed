//! Combinatorial polyhedra: vertices, edges and faces with their incidences.
//!
//! Faces are cyclic vertex sequences listed counterclockwise as seen from
//! outside. Every other orientation convention in the crate (outward plane
//! normals, packing layout direction) derives from this one.

mod io;
pub mod seeds;

pub use io::{parse_json_complex, parse_off, read_complex};

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombinatoricsError {
    #[error("malformed complex description: {0}")]
    MalformedSpec(String),
    #[error("not a polyhedral complex: {0}")]
    NonPolyhedral(String),
    #[error("frame edges are not sequential on face {face}")]
    NotSequential { face: FaceId },
    #[error("edge {edge} is not on the boundary of face {face}")]
    NotIncident { face: FaceId, edge: EdgeId },
}

/// An undirected edge together with its two incident faces.
///
/// `faces[0]` traverses the edge as `vertices[0] -> vertices[1]`,
/// `faces[1]` traverses it in the opposite direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub vertices: [VertexId; 2],
    pub faces: [FaceId; 2],
}

impl Edge {
    pub fn other_vertex(&self, v: VertexId) -> VertexId {
        if self.vertices[0] == v {
            self.vertices[1]
        } else {
            self.vertices[0]
        }
    }

    pub fn other_face(&self, f: FaceId) -> FaceId {
        if self.faces[0] == f {
            self.faces[1]
        } else {
            self.faces[0]
        }
    }
}

/// A validated polyhedral complex P(V, E, F).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralComplex {
    faces: Vec<Vec<VertexId>>,
    edges: Vec<Edge>,
    /// `face_edges[f][i]` joins `faces[f][i]` and `faces[f][i + 1]`.
    face_edges: Vec<Vec<EdgeId>>,
    /// Faces around each vertex, counterclockwise seen from outside.
    vertex_faces: Vec<Vec<FaceId>>,
    /// `vertex_edges[v][i]` separates `vertex_faces[v][i]` from `vertex_faces[v][i + 1]`.
    vertex_edges: Vec<Vec<EdgeId>>,
    directed: HashMap<(VertexId, VertexId), (EdgeId, FaceId)>,
}

impl PolyhedralComplex {
    /// Builds and validates a complex from its face-vertex lists.
    pub fn from_faces(faces: Vec<Vec<VertexId>>) -> Result<Self, CombinatoricsError> {
        use CombinatoricsError::*;

        if faces.is_empty() {
            return Err(MalformedSpec("no faces".into()));
        }
        let n_vertices = faces.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; n_vertices];
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(NonPolyhedral(format!("face {f} has fewer than 3 sides")));
            }
            for (i, &v) in face.iter().enumerate() {
                if face[..i].contains(&v) {
                    return Err(NonPolyhedral(format!("face {f} repeats vertex {v}")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(MalformedSpec(format!("vertex {v} is not used by any face")));
        }

        let mut directed: HashMap<(VertexId, VertexId), (EdgeId, FaceId)> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for (f, face) in faces.iter().enumerate() {
            let mut fe = Vec::with_capacity(face.len());
            for i in 0..face.len() {
                let (a, b) = (face[i], face[(i + 1) % face.len()]);
                if directed.contains_key(&(a, b)) {
                    return Err(NonPolyhedral(format!(
                        "directed edge {a}->{b} used twice (inconsistent orientation)"
                    )));
                }
                let id = match directed.get(&(b, a)) {
                    Some(&(id, _)) => {
                        edges[id].faces[1] = f;
                        id
                    }
                    None => {
                        edges.push(Edge { vertices: [a, b], faces: [f, usize::MAX] });
                        edges.len() - 1
                    }
                };
                directed.insert((a, b), (id, f));
                fe.push(id);
            }
            face_edges.push(fe);
        }
        if let Some(e) = edges.iter().position(|e| e.faces[1] == usize::MAX) {
            let [a, b] = edges[e].vertices;
            return Err(NonPolyhedral(format!("edge {a}-{b} borders only one face")));
        }
        for e in &edges {
            if e.faces[0] == e.faces[1] {
                return Err(NonPolyhedral(format!("face {} borders itself", e.faces[0])));
            }
        }

        // Rotation around each vertex: after face f (which contains u -> v -> w),
        // the next face counterclockwise is the one containing v -> u.
        let mut first_face = vec![usize::MAX; n_vertices];
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                if first_face[v] == usize::MAX {
                    first_face[v] = f;
                }
            }
        }
        let mut degree = vec![0usize; n_vertices];
        for e in &edges {
            degree[e.vertices[0]] += 1;
            degree[e.vertices[1]] += 1;
        }
        let mut vertex_faces = Vec::with_capacity(n_vertices);
        let mut vertex_edges = Vec::with_capacity(n_vertices);
        for v in 0..n_vertices {
            if degree[v] < 3 {
                return Err(NonPolyhedral(format!("vertex {v} has degree {}", degree[v])));
            }
            let mut fs = Vec::new();
            let mut es = Vec::new();
            let mut f = first_face[v];
            loop {
                let face = &faces[f];
                let i = face.iter().position(|&x| x == v).unwrap();
                let u = face[(i + face.len() - 1) % face.len()];
                let &(e, _) = directed.get(&(u, v)).unwrap();
                let &(_, g) = directed.get(&(v, u)).unwrap();
                fs.push(f);
                es.push(e);
                f = g;
                if f == first_face[v] || fs.len() > degree[v] {
                    break;
                }
            }
            if fs.len() != degree[v] {
                return Err(NonPolyhedral(format!("vertex {v} is not a manifold vertex")));
            }
            vertex_faces.push(fs);
            vertex_edges.push(es);
        }

        let euler = n_vertices as i64 - edges.len() as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(NonPolyhedral(format!("Euler characteristic is {euler}, expected 2")));
        }

        let complex = PolyhedralComplex {
            faces,
            edges,
            face_edges,
            vertex_faces,
            vertex_edges,
            directed,
        };
        if !complex.is_three_connected() {
            return Err(NonPolyhedral("edge graph is not 3-connected".into()));
        }
        Ok(complex)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Vec<VertexId>] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &[VertexId] {
        &self.faces[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    /// Boundary edges of `f` in cyclic order; edge `i` follows vertex `i`.
    pub fn face_edges(&self, f: FaceId) -> &[EdgeId] {
        &self.face_edges[f]
    }

    /// Faces around `v`, counterclockwise seen from outside.
    pub fn vertex_faces(&self, v: VertexId) -> &[FaceId] {
        &self.vertex_faces[v]
    }

    pub fn vertex_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_faces[v].len()
    }

    /// Edge and left face of the directed edge `a -> b`.
    pub fn directed_edge(&self, a: VertexId, b: VertexId) -> Option<(EdgeId, FaceId)> {
        self.directed.get(&(a, b)).copied()
    }

    /// Number of (vertex, face) incidences, `2|E|`.
    pub fn flag_count(&self) -> usize {
        self.vertex_faces.iter().map(Vec::len).sum()
    }

    pub fn vertex_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_edges[v].iter().map(move |&e| self.edges[e].other_vertex(v))
    }

    fn is_three_connected(&self) -> bool {
        let n = self.num_vertices();
        if n < 4 {
            return false;
        }
        let adj: Vec<Vec<VertexId>> = (0..n).map(|v| self.vertex_neighbors(v).collect()).collect();
        // Simple graph: no repeated neighbours.
        for nb in &adj {
            let mut s = nb.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != nb.len() {
                return false;
            }
        }
        let connected_without = |removed: &[VertexId]| -> bool {
            let Some(start) = (0..n).find(|v| !removed.contains(v)) else {
                return true;
            };
            let mut seen = vec![false; n];
            for &r in removed {
                seen[r] = true;
            }
            seen[start] = true;
            let mut count = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
            count == n - removed.len()
        };
        if !connected_without(&[]) {
            return false;
        }
        for a in 0..n {
            for b in a + 1..n {
                if !connected_without(&[a, b]) {
                    return false;
                }
            }
        }
        true
    }

    /// The dual complex: one vertex per face of `self`, one face per vertex.
    ///
    /// Dual vertex `f` is face `f` of `self`; dual face `v` is the rotation of
    /// faces around vertex `v`. Dual edge ids generally differ from primal
    /// ones, see [`DualComplex::edge_map`].
    pub fn dual(&self) -> DualComplex {
        // The rotation around a vertex, read counterclockwise from outside, is a
        // counterclockwise dual face boundary.
        let complex = PolyhedralComplex::from_faces(self.vertex_faces.clone())
            .expect("dual of a polyhedral complex is polyhedral");
        let edge_map = complex
            .edges
            .iter()
            .map(|de| {
                let [f, g] = de.vertices;
                self.edges
                    .iter()
                    .position(|e| {
                        (e.faces[0] == f && e.faces[1] == g) || (e.faces[0] == g && e.faces[1] == f)
                    })
                    .expect("dual edge has a primal edge")
            })
            .collect();
        DualComplex { complex, edge_map }
    }

    /// Labeled equality up to cyclic rotation of each face list.
    pub fn same_labeled(&self, other: &PolyhedralComplex) -> bool {
        self.faces.len() == other.faces.len()
            && self.faces.iter().zip(&other.faces).all(|(a, b)| cyclic_eq(a, b))
    }

    pub fn dimension_audit(&self) -> DimensionReport {
        let (v, e, f) = (self.num_vertices() as i64, self.num_edges() as i64, self.num_faces() as i64);
        DimensionReport {
            dim_zoc: 3 * f,
            dim_zp: e + 6,
            dim_t: 2 * e - 3 * v,
            flag_count: self.flag_count() as i64,
        }
    }

    /// Selects a combinatorial frame: face `f0` with three sequential
    /// boundary edges in its cyclic order.
    pub fn select_frame(&self, f0: FaceId, edges: [EdgeId; 3]) -> Result<Frame, CombinatoricsError> {
        if f0 >= self.num_faces() {
            return Err(CombinatoricsError::MalformedSpec(format!("no face {f0}")));
        }
        let fe = &self.face_edges[f0];
        let mut pos = [0usize; 3];
        for (k, &e) in edges.iter().enumerate() {
            pos[k] = fe
                .iter()
                .position(|&x| x == e)
                .ok_or(CombinatoricsError::NotIncident { face: f0, edge: e })?;
        }
        let n = fe.len();
        if pos[1] != (pos[0] + 1) % n || pos[2] != (pos[1] + 1) % n {
            return Err(CombinatoricsError::NotSequential { face: f0 });
        }
        Ok(Frame { face: f0, edges })
    }

    /// Face 0 with its first three boundary edges.
    pub fn default_frame(&self) -> Frame {
        let fe = &self.face_edges[0];
        Frame { face: 0, edges: [fe[0], fe[1], fe[2]] }
    }
}

fn cyclic_eq(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    match b.iter().position(|&x| x == a[0]) {
        Some(k) => (0..a.len()).all(|i| a[i] == b[(i + k) % b.len()]),
        None => false,
    }
}

/// The dual complex together with the dual-edge to primal-edge bijection.
#[derive(Debug, Clone)]
pub struct DualComplex {
    pub complex: PolyhedralComplex,
    pub edge_map: Vec<EdgeId>,
}

/// A combinatorial frame: face `f0` and three sequential boundary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub face: FaceId,
    pub edges: [EdgeId; 3],
}

/// Dimension bookkeeping of the configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// `3|F|`, oriented planes one per face.
    pub dim_zoc: i64,
    /// `|E| + 6`, configurations realizing the combinatorics.
    pub dim_zp: i64,
    /// `2|E| - 3|V|`, interstice deformation parameters.
    pub dim_t: i64,
    /// Sum of vertex link sizes, `2|E|`.
    pub flag_count: i64,
}

impl DimensionReport {
    pub fn balanced(&self) -> bool {
        self.dim_t + self.dim_zp == self.dim_zoc
    }
}
