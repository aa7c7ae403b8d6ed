use nalgebra::Vector3;

use super::{newton_refine, Configuration, SolveError, SolveReport, SolverOptions, StepRecord, System};
use crate::bodies::{chart_inverse, BodyError, BodyPath, ConvexBody};
use crate::combinatorics::{Frame, PolyhedralComplex};
use crate::mobius::ExtComplex;
use crate::packing::{koebe_config, pack};

/// Smallest admissible distance between tangent points, and smallest face-circle size.
const DEGENERACY_TOL: f64 = 1e-6;

/// Physical mark points `p_i = h⁻¹(z_i)` on `body`.
pub fn marks_on_body(body: &ConvexBody, z: [ExtComplex; 3]) -> Result<[Vector3<f64>; 3], BodyError> {
    Ok([chart_inverse(body, z[0])?, chart_inverse(body, z[1])?, chart_inverse(body, z[2])?])
}

/// Rejects configurations whose tangent points collide, whose adjacent
/// faces turn parallel, or whose face circles shrink to a point.
pub fn degeneracy_check(cfg: &Configuration, complex: &PolyhedralComplex) -> Result<(), String> {
    let tp = &cfg.tangent_points;
    if tp.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err("non-finite tangent point".into());
    }
    for a in 0..tp.len() {
        for b in a + 1..tp.len() {
            let d = (tp[a] - tp[b]).norm();
            if d <= DEGENERACY_TOL {
                return Err(format!("tangent points of edges {a} and {b} are {d:e} apart"));
            }
        }
    }
    for (e, edge) in complex.edges().iter().enumerate() {
        let [f, g] = edge.faces;
        let (nf, ng) = (cfg.planes[f].normal.normalize(), cfg.planes[g].normal.normalize());
        let s = nf.cross(&ng).norm();
        if !(s > DEGENERACY_TOL) {
            return Err(format!("faces {f} and {g} are parallel along edge {e} (sine {s:e})"));
        }
    }
    for f in 0..complex.num_faces() {
        let es = complex.face_edges(f);
        let size = es
            .iter()
            .flat_map(|&a| es.iter().map(move |&b| (tp[a] - tp[b]).norm()))
            .fold(0.0, f64::max);
        if size <= DEGENERACY_TOL {
            return Err(format!("circle of face {f} has size {size:e}"));
        }
    }
    Ok(())
}

/// The Koebe configuration for the marks, pinned to the physical marks on the unit ball.
pub fn start_configuration(
    complex: &PolyhedralComplex,
    frame: &Frame,
    marks_z: [ExtComplex; 3],
) -> Result<Configuration, SolveError> {
    let pattern = pack(complex, frame, marks_z)?;
    let mut cfg = koebe_config(&pattern, complex)?;
    cfg.marks.points = marks_on_body(&ConvexBody::ball(), marks_z)?;
    for (&e, p) in frame.edges.iter().zip(cfg.marks.points) {
        cfg.tangent_points[e] = p;
    }
    Ok(cfg)
}

fn corrector(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
    opts: &SolverOptions,
) -> Result<(Configuration, SolveReport), SolveError> {
    let (out, report) = newton_refine(cfg, body, complex, opts)?;
    degeneracy_check(&out, complex).map_err(|reason| SolveError::StepUnderflow {
        last_s: f64::NAN,
        ds: f64::NAN,
        reason: format!("degenerate solution: {reason}"),
    })?;
    Ok((out, report))
}

/// Tracks the midscribed configuration from the unit ball along `path` to `s = 1`.
pub fn continue_to_body(
    complex: &PolyhedralComplex,
    frame: &Frame,
    marks_z: [ExtComplex; 3],
    path: &BodyPath,
    opts: &SolverOptions,
) -> Result<(Configuration, SolveReport), SolveError> {
    let start = start_configuration(complex, frame, marks_z)?;
    let (mut cfg, mut report) = corrector(&start, &path.eval(0.0), complex, opts)?;
    let mut history = vec![StepRecord {
        s: 0.0,
        ds: 0.0,
        iterations: report.iterations,
        min_singular_ratio: report.min_singular_ratio,
    }];
    let mut total_iterations = report.iterations;
    let mut singular_steps = report.singular_steps;
    let mut previous: Option<(f64, Configuration)> = None;
    let mut s = 0.0;
    let mut ds = opts.ds_init.min(opts.ds_max);
    while s < 1.0 {
        let step = ds.min(1.0 - s);
        let s_new = if 1.0 - (s + step) < 1e-12 { 1.0 } else { s + step };
        let body = path.eval(s_new);
        let attempt = marks_on_body(&body, marks_z).map_err(SolveError::from).and_then(|points| {
            let mut guess = cfg.clone();
            guess.marks.points = points;
            if let (true, Some((s_prev, prev))) = (opts.secant, &previous) {
                let sys = System::new(complex, body, Some(&guess.marks));
                let (x1, x0) = (sys.pack(&cfg), sys.pack(prev));
                let mut x = &x1 + (&x1 - &x0) * ((s_new - s) / (s - s_prev));
                sys.normalize_vertices(&mut x);
                guess = sys.unpack(&x, &guess);
            } else {
                for (&e, p) in frame.edges.iter().zip(points) {
                    guess.tangent_points[e] = p;
                }
            }
            corrector(&guess, &body, complex, opts)
        });
        match attempt {
            Ok((next, r)) => {
                previous = Some((s, std::mem::replace(&mut cfg, next)));
                total_iterations += r.iterations;
                singular_steps += r.singular_steps;
                history.push(StepRecord {
                    s: s_new,
                    ds: s_new - s,
                    iterations: r.iterations,
                    min_singular_ratio: r.min_singular_ratio,
                });
                s = s_new;
                if r.iterations <= 3 {
                    ds = (ds * 1.5).min(opts.ds_max);
                }
                report = r;
            }
            Err(e) => {
                ds *= 0.5;
                if ds < opts.ds_min {
                    let reason = match e {
                        SolveError::StepUnderflow { reason, .. } => reason,
                        other => other.to_string(),
                    };
                    return Err(SolveError::StepUnderflow { last_s: s, ds, reason });
                }
            }
        }
    }
    report.iterations = total_iterations;
    report.singular_steps = singular_steps;
    report.step_history = history;
    Ok((cfg, report))
}
