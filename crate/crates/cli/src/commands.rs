use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use nalgebra::Vector3;
use serde_json::json;
use thiserror::Error;

use midscribe_core::bodies::{BodyError, BodyPath, ConvexBody};
use midscribe_core::combinatorics::{read_complex, Frame, PolyhedralComplex};
use midscribe_core::midscribe::{continue_to_body, Configuration, SolveError, SolverOptions};
use midscribe_core::mobius::{parse_complex, ExtComplex};
use midscribe_core::packing::{pack, PackingError};
use midscribe_core::verify::{check_convexity, check_midscription, rigidity_probe, sweep, Convexity, SweepGrid};

use crate::output::{csv_field, emit, json_text, off_text, RunManifest};
use crate::{Cli, Command, Common, ExportArgs, MidscribeArgs, PackArgs, SolveArgs, SweepArgs, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Solver(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::DimensionMismatch(_)
            | SolveError::Packing(PackingError::DegenerateMarks)
            | SolveError::Body(BodyError::InvalidDescriptor(_) | BodyError::NotStrictlyConvex(_) | BodyError::PoleViolation(_)) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<PackingError> for CliError {
    fn from(e: PackingError) -> Self {
        SolveError::from(e).into()
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MIDSCRIBE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("MIDSCRIBE_THREADS must be a positive integer, got {v:?}")))?;
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let clock = cli.timing.then(Instant::now);
    let finish = |mut m: RunManifest| {
        m.wall_time_seconds = clock.map(|t| t.elapsed().as_secs_f64());
        m
    };
    match cli.command {
        Command::Pack(a) => run_pack(a, finish),
        Command::Midscribe(a) => run_midscribe(a, finish),
        Command::Verify(a) => run_verify(a, finish),
        Command::Sweep(a) => run_sweep(a),
        Command::ExportBody(a) => run_export(a),
    }
}

fn load_complex(common: &Common) -> Result<(PolyhedralComplex, Frame), CliError> {
    let complex = read_complex(&common.complex).map_err(|e| CliError::Input(e.to_string()))?;
    let frame = match &common.frame {
        None => complex.default_frame(),
        Some(text) => parse_frame(&complex, text)?,
    };
    Ok((complex, frame))
}

fn parse_frame(complex: &PolyhedralComplex, text: &str) -> Result<Frame, CliError> {
    let bad = || CliError::Input(format!("frame must look like face:e1,e2,e3, got {text:?}"));
    let (face, edges) = text.split_once(':').ok_or_else(bad)?;
    let face = face.trim().parse().map_err(|_| bad())?;
    let edges: Vec<usize> = edges.split(',').map(|e| e.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let edges: [usize; 3] = edges.try_into().map_err(|_| bad())?;
    complex.select_frame(face, edges).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_marks(text: &str) -> Result<[ExtComplex; 3], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    let parsed: Option<Vec<ExtComplex>> = parts.iter().map(|p| parse_complex(p)).collect();
    match parsed {
        Some(z) if z.len() == 3 => Ok([z[0], z[1], z[2]]),
        _ => Err(CliError::Input(format!("marks must be three complex numbers z1,z2,z3, got {text:?}"))),
    }
}

fn parse_body(descriptor: &str) -> Result<ConvexBody, CliError> {
    ConvexBody::parse(descriptor).map_err(|e| CliError::Input(e.to_string()))
}

fn solver_options(a: &SolveArgs) -> SolverOptions {
    let mut opts = SolverOptions { allow_singular: a.allow_singular, ..SolverOptions::default() };
    if let Some(t) = a.solver_tol {
        opts.tol = t;
    }
    if let Some(n) = a.max_iter {
        opts.max_iter = n;
    }
    opts
}

fn body_path(body: ConvexBody) -> Result<BodyPath, CliError> {
    BodyPath::new(body).map_err(|e| CliError::Input(e.to_string()))
}

fn run_pack(a: PackArgs, finish: impl Fn(RunManifest) -> RunManifest) -> Result<(), CliError> {
    let (complex, frame) = load_complex(&a.common)?;
    let z = parse_marks(&a.marks)?;
    let pattern = pack(&complex, &frame, z)?;
    let mut manifest = RunManifest::new("pack", vec![a.common.complex.clone()]);
    manifest.body = Some("ball".into());
    manifest.marks = Some(z.iter().map(ExtComplex::to_string).collect());
    manifest.mark_points = pattern.mark_points.map(|p| p.iter().map(|v| [v.x, v.y, v.z]).collect());
    manifest.options = json!({ "frame": frame });
    let doc = json!({
        "manifest": finish(manifest),
        "residuals": pattern.residuals(&complex),
        "pattern": pattern.to_json(),
    });
    emit(a.out.as_deref(), &json_text(&doc)?)
}

fn run_midscribe(a: MidscribeArgs, finish: impl Fn(RunManifest) -> RunManifest) -> Result<(), CliError> {
    let (complex, frame) = load_complex(&a.common)?;
    let body = parse_body(&a.solve.body)?;
    let marks = a.marks.as_deref().ok_or_else(|| {
        CliError::Input("--marks is required: three tangent points fix the Möbius normalization".into())
    })?;
    let z = parse_marks(marks)?;
    let path = body_path(body)?;
    let opts = SolverOptions { seed: a.seed, ..solver_options(&a.solve) };

    let (cfg, solve, rigidity) = if a.starts > 0 {
        let (cfg, r) = rigidity_probe(&complex, &frame, z, &path, a.starts, a.perturbation, &opts)?;
        (cfg, r.base_report.clone(), Some(r))
    } else {
        let (cfg, r) = continue_to_body(&complex, &frame, z, &path, &opts)?;
        (cfg, r, None)
    };
    let verify = check_midscription(&cfg, &body, &complex, a.tol);
    let convexity = check_convexity(&cfg, &complex);

    let mut manifest = RunManifest::new("midscribe", vec![a.common.complex.clone()]);
    manifest.body = Some(body.descriptor());
    manifest.marks = Some(z.iter().map(ExtComplex::to_string).collect());
    manifest.mark_points = Some(cfg.marks.points.iter().map(|v| [v.x, v.y, v.z]).collect());
    manifest.options = json!({
        "solver": opts,
        "tol": a.tol,
        "frame": frame,
        "starts": a.starts,
        "perturbation": a.perturbation,
    });
    let doc = json!({
        "manifest": finish(manifest),
        "solve": solve,
        "rigidity": rigidity,
        "convexity": convexity,
        "verify": verify,
        "configuration": cfg,
    });
    let report = json_text(&doc)?;

    match cfg.affine_vertices() {
        Some(vertices) if convexity.classification != Convexity::ProjectiveDegenerate => {
            emit(a.out.as_deref(), &off_text(&vertices, complex.faces()))?;
            if let Some(p) = &a.report {
                emit(Some(p), &report)?;
            }
        }
        _ => {
            eprintln!("warning: solution has vertices at infinity; writing the JSON report only");
            emit(a.report.as_deref().or(a.out.as_deref()), &report)?;
        }
    }
    if !verify.passed() {
        return Err(CliError::Verification(format!(
            "tangency residual {:e}, incidence residual {:e}",
            verify.max_tangency_residual, verify.max_incidence_residual
        )));
    }
    if let Some(r) = &rigidity {
        if r.converged < r.starts {
            eprintln!("warning: {} of {} perturbed restarts failed", r.starts - r.converged, r.starts);
        }
    }
    Ok(())
}

fn read_configuration(path: &Path) -> Result<Configuration, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("configuration") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: not a configuration: {e}", path.display())))
}

fn run_verify(a: VerifyArgs, finish: impl Fn(RunManifest) -> RunManifest) -> Result<(), CliError> {
    let (complex, _) = load_complex(&a.common)?;
    let body = parse_body(&a.body)?;
    let cfg = read_configuration(&a.config)?;
    if !cfg.dimensions_match(&complex) {
        return Err(CliError::Input(format!(
            "configuration has {} planes, {} vertices, {} tangent points; complex has {} faces, {} vertices, {} edges",
            cfg.planes.len(),
            cfg.vertices.len(),
            cfg.tangent_points.len(),
            complex.num_faces(),
            complex.num_vertices(),
            complex.num_edges()
        )));
    }
    let verify = check_midscription(&cfg, &body, &complex, a.tol);
    let mut manifest = RunManifest::new("verify", vec![a.common.complex.clone(), a.config.clone()]);
    manifest.body = Some(body.descriptor());
    manifest.marks = Some(cfg.marks.z.iter().map(ExtComplex::to_string).collect());
    manifest.mark_points = Some(cfg.marks.points.iter().map(|v| [v.x, v.y, v.z]).collect());
    manifest.options = json!({ "tol": a.tol });
    let mut doc = serde_json::to_value(&verify).map_err(|e| CliError::Io(e.to_string()))?;
    doc["manifest"] = serde_json::to_value(finish(manifest)).map_err(|e| CliError::Io(e.to_string()))?;
    emit(a.report.as_deref(), &json_text(&doc)?)?;
    if verify.passed() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "tangency residual {:e}, incidence residual {:e}",
            verify.max_tangency_residual, verify.max_incidence_residual
        )))
    }
}

fn run_sweep(a: SweepArgs) -> Result<(), CliError> {
    let (complex, frame) = load_complex(&a.common)?;
    let path = body_path(parse_body(&a.solve.body)?)?;
    let [z1, z2, c] = parse_marks(&a.marks)?;
    let center = c.finite().ok_or_else(|| CliError::Input("grid center must be finite".into()))?;
    if a.grid == 0 || !(a.radius >= 0.0) {
        return Err(CliError::Input("--grid must be positive and --radius non-negative".into()));
    }
    let grid = SweepGrid { z1, z2, center, radius: a.radius, n: a.grid };
    let samples = sweep(&complex, &frame, &path, &grid, &solver_options(&a.solve));
    let mut csv = String::from("z1,z2,z3,classification,residual\n");
    for s in &samples {
        csv.push_str(&format!("{},{},{},{},{}\n", s.z[0], s.z[1], s.z[2], s.classification, csv_field(s.residual)));
    }
    emit(a.out.as_deref(), &csv)
}

fn run_export(a: ExportArgs) -> Result<(), CliError> {
    let body = parse_body(&a.body)?;
    let n = a.resolution;
    if n < 2 {
        return Err(CliError::Input("--resolution must be at least 2".into()));
    }
    let m = 2 * n;
    let origin = Vector3::zeros();
    let at = |theta: f64, phi: f64| {
        let dir = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        body.ray_exit(&origin, &dir)
    };
    let mut vertices = vec![at(0.0, 0.0)];
    for i in 1..n {
        for j in 0..m {
            vertices.push(at(PI * i as f64 / n as f64, 2.0 * PI * j as f64 / m as f64));
        }
    }
    vertices.push(at(PI, 0.0));
    let south = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * m + j % m;

    let mut faces = Vec::with_capacity(2 * m * (n - 1));
    for j in 0..m {
        faces.push(vec![0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..n - 1 {
        for j in 0..m {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j));
            faces.push(vec![a, d, c]);
            faces.push(vec![a, c, b]);
        }
    }
    for j in 0..m {
        faces.push(vec![south, ring(n - 1, j + 1), ring(n - 1, j)]);
    }
    emit(a.out.as_deref(), &off_text(&vertices, &faces))
}
