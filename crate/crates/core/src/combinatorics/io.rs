use std::path::Path;

use serde::Deserialize;

use super::{CombinatoricsError, PolyhedralComplex};

#[derive(Deserialize)]
struct JsonComplex {
    faces: Vec<Vec<usize>>,
}

/// Parses `{"faces": [[0,1,2], ...]}`.
pub fn parse_json_complex(text: &str) -> Result<PolyhedralComplex, CombinatoricsError> {
    let parsed: JsonComplex = serde_json::from_str(text)
        .map_err(|e| CombinatoricsError::MalformedSpec(format!("json: {e}")))?;
    PolyhedralComplex::from_faces(parsed.faces)
}

/// Parses an ASCII OFF file. Only the face lists are used; vertex
/// coordinates are read past and ignored.
pub fn parse_off(text: &str) -> Result<PolyhedralComplex, CombinatoricsError> {
    let malformed = |m: &str| CombinatoricsError::MalformedSpec(format!("off: {m}"));
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);

    let header = tokens.next().ok_or_else(|| malformed("empty input"))?;
    let mut next_count = |what: &str| -> Result<usize, CombinatoricsError> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| malformed(&format!("bad {what}")))
    };
    // Counts may share the header line ("OFF 8 6 12").
    let (nv, nf) = if header == "OFF" {
        let nv = next_count("vertex count")?;
        let nf = next_count("face count")?;
        let _ne = next_count("edge count")?;
        (nv, nf)
    } else {
        return Err(malformed("missing OFF header"));
    };
    for _ in 0..3 * nv {
        tokens
            .next()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| malformed("bad vertex coordinate"))?;
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let k: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| malformed("bad face size"))?;
        let mut face = Vec::with_capacity(k);
        for _ in 0..k {
            let v: usize = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| malformed("bad face index"))?;
            if v >= nv {
                return Err(malformed(&format!("face index {v} out of range")));
            }
            face.push(v);
        }
        faces.push(face);
    }
    PolyhedralComplex::from_faces(faces)
}

/// Reads a complex from an `.off` or `.json` file, or a built-in seed name.
pub fn read_complex(path: &Path) -> Result<PolyhedralComplex, CombinatoricsError> {
    if !path.exists() {
        if let Some(seed) = path.to_str().and_then(super::seeds::by_name) {
            return Ok(seed);
        }
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CombinatoricsError::MalformedSpec(format!("{}: {e}", path.display())))?;
    let is_off = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("off"))
        || text.trim_start().starts_with("OFF");
    if is_off {
        parse_off(&text)
    } else {
        parse_json_complex(&text)
    }
}
