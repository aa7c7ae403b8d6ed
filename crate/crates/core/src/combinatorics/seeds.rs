//! Built-in seed complexes.
//!
//! Face lists are counterclockwise seen from outside. For the tetrahedron and
//! the cube, face 0 and the vertex labels match [`tetrahedron_vertices`] and
//! [`cube_vertices`].

use super::PolyhedralComplex;

fn build(faces: &[&[usize]]) -> PolyhedralComplex {
    PolyhedralComplex::from_faces(faces.iter().map(|f| f.to_vec()).collect())
        .expect("seed complexes are polyhedral")
}

pub fn tetrahedron() -> PolyhedralComplex {
    build(&[&[0, 1, 2], &[0, 2, 3], &[0, 3, 1], &[1, 3, 2]])
}

/// Labels of [`tetrahedron`]: the regular tetrahedron whose edge midpoints are unit vectors.
pub fn tetrahedron_vertices() -> [[f64; 3]; 4] {
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
}

/// Face 0 is the top face `z = +1`.
pub fn cube() -> PolyhedralComplex {
    build(&[
        &[0, 1, 2, 3],
        &[0, 3, 7, 4],
        &[0, 4, 5, 1],
        &[1, 5, 6, 2],
        &[2, 6, 7, 3],
        &[4, 7, 6, 5],
    ])
}

/// Labels of [`cube`] as sign patterns.
pub fn cube_vertices() -> [[f64; 3]; 8] {
    [
        [-1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [-1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0],
        [1.0, 1.0, -1.0],
        [-1.0, 1.0, -1.0],
    ]
}

pub fn octahedron() -> PolyhedralComplex {
    build(&[
        &[0, 2, 4],
        &[0, 3, 5],
        &[0, 4, 3],
        &[0, 5, 2],
        &[1, 2, 5],
        &[1, 3, 4],
        &[1, 4, 2],
        &[1, 5, 3],
    ])
}

pub fn triangular_prism() -> PolyhedralComplex {
    build(&[&[0, 1, 2], &[0, 2, 5, 3], &[0, 3, 4, 1], &[1, 4, 5, 2], &[3, 5, 4]])
}

pub fn pentagonal_prism() -> PolyhedralComplex {
    build(&[
        &[0, 1, 2, 3, 4],
        &[0, 4, 9, 5],
        &[0, 5, 6, 1],
        &[1, 6, 7, 2],
        &[2, 7, 8, 3],
        &[3, 8, 9, 4],
        &[5, 9, 8, 7, 6],
    ])
}

pub fn dodecahedron() -> PolyhedralComplex {
    build(&[
        &[1, 11, 17, 3, 13],
        &[0, 8, 4, 15, 9],
        &[0, 9, 1, 13, 10],
        &[0, 10, 2, 14, 8],
        &[1, 9, 15, 5, 11],
        &[2, 10, 13, 3, 12],
        &[2, 12, 18, 6, 14],
        &[3, 17, 7, 18, 12],
        &[4, 8, 14, 6, 16],
        &[4, 16, 19, 5, 15],
        &[5, 19, 7, 17, 11],
        &[6, 18, 7, 19, 16],
    ])
}

/// Looks a seed up by name (`tetrahedron`, `cube`, `octahedron`, `prism3`,
/// `prism5`, `dodecahedron`).
pub fn by_name(name: &str) -> Option<PolyhedralComplex> {
    Some(match name {
        "tetrahedron" => tetrahedron(),
        "cube" => cube(),
        "octahedron" => octahedron(),
        "prism3" | "triangular_prism" => triangular_prism(),
        "prism5" | "pentagonal_prism" => pentagonal_prism(),
        "dodecahedron" => dodecahedron(),
        _ => return None,
    })
}

pub fn all_seeds() -> Vec<(&'static str, PolyhedralComplex)> {
    vec![
        ("tetrahedron", tetrahedron()),
        ("cube", cube()),
        ("octahedron", octahedron()),
        ("prism3", triangular_prism()),
        ("prism5", pentagonal_prism()),
        ("dodecahedron", dodecahedron()),
    ]
}
