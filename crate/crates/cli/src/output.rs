use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::Serialize;

use crate::commands::CliError;

/// Embedded in every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub body: Option<String>,
    /// Chart coordinates as given, normalized.
    pub marks: Option<Vec<String>>,
    /// Physical mark points on the target body.
    pub mark_points: Option<Vec<[f64; 3]>>,
    pub options: serde_json::Value,
    pub version: String,
    pub wall_time_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, inputs: Vec<PathBuf>) -> Self {
        RunManifest {
            command: command.into(),
            inputs,
            body: None,
            marks: None,
            mark_points: None,
            options: serde_json::Value::Null,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_seconds: None,
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn off_text(vertices: &[Vector3<f64>], faces: &[Vec<usize>]) -> String {
    let edges: usize = faces.iter().map(Vec::len).sum::<usize>() / 2;
    let mut s = format!("OFF\n{} {} {}\n", vertices.len(), faces.len(), edges);
    for v in vertices {
        let _ = writeln!(s, "{} {} {}", num(v.x), num(v.y), num(v.z));
    }
    for f in faces {
        s.push_str(&f.len().to_string());
        for i in f {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}

pub fn csv_field(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        num(x)
    }
}

pub fn json_text<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}
