use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_convexity, midscription_checks, Convexity, TANGENCY_TOL};
use crate::bodies::BodyPath;
use crate::combinatorics::{Frame, PolyhedralComplex};
use crate::midscribe::{continue_to_body, degeneracy_check, newton_refine, Configuration, SolveError, SolveReport, SolverOptions, System};
use crate::mobius::ExtComplex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub starts: usize,
    pub perturbation: f64,
    pub converged: usize,
    pub failures: Vec<String>,
    /// Largest vertex distance between any two converged restarts.
    pub max_pairwise_distance: f64,
    /// Largest vertex distance between a converged restart and the continuation result.
    pub max_distance_to_base: f64,
    pub base_report: SolveReport,
}

/// Solves once by continuation, then re-runs the corrector at `s = 1` from
/// `n_starts` uniformly perturbed copies of the solution.
pub fn rigidity_probe(
    complex: &PolyhedralComplex,
    frame: &Frame,
    marks_z: [ExtComplex; 3],
    path: &BodyPath,
    n_starts: usize,
    perturbation: f64,
    opts: &SolverOptions,
) -> Result<(Configuration, RigidityReport), SolveError> {
    let (base, base_report) = continue_to_body(complex, frame, marks_z, path, opts)?;
    let body = path.eval(1.0);
    let sys = System::new(complex, body, Some(&base.marks));
    let x = sys.pack(&base);
    let runs: Vec<Result<Configuration, SolveError>> = (0..n_starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let mut start = x.map(|v| v + perturbation * rng.gen_range(-1.0..=1.0));
            if perturbation > 0.0 {
                sys.normalize_vertices(&mut start);
            }
            let (c, _) = newton_refine(&sys.unpack(&start, &base), &body, complex, opts)?;
            degeneracy_check(&c, complex).map_err(|reason| SolveError::StepUnderflow {
                last_s: 1.0,
                ds: 0.0,
                reason: format!("degenerate solution: {reason}"),
            })?;
            Ok(c)
        })
        .collect();
    let mut solved = Vec::new();
    let mut failures = Vec::new();
    for r in runs {
        match r {
            Ok(c) => solved.push(c),
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut max_pairwise_distance: f64 = 0.0;
    for a in 0..solved.len() {
        for b in a + 1..solved.len() {
            max_pairwise_distance = max_pairwise_distance.max(solved[a].max_vertex_distance(&solved[b]));
        }
    }
    let max_distance_to_base = solved.iter().map(|c| c.max_vertex_distance(&base)).fold(0.0, f64::max);
    let report = RigidityReport {
        starts: n_starts,
        perturbation,
        converged: solved.len(),
        failures,
        max_pairwise_distance,
        max_distance_to_base,
        base_report,
    };
    Ok((base, report))
}

/// Mark triples `(z1, z2, z3)` with `z3 = center + radius (x + iy)` on an
/// `n × n` grid of `x, y ∈ [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub z1: ExtComplex,
    pub z2: ExtComplex,
    pub center: Complex64,
    pub radius: f64,
    pub n: usize,
}

impl SweepGrid {
    /// Grid coordinate in `[-1, 1]`.
    fn coord(&self, k: usize) -> f64 {
        if self.n == 1 {
            0.0
        } else {
            -1.0 + 2.0 * k as f64 / (self.n - 1) as f64
        }
    }

    /// `(row, column, z3)` in row-major order.
    pub fn points(&self) -> Vec<(usize, usize, ExtComplex)> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.center + Complex64::new(self.coord(j), self.coord(i)) * self.radius;
                out.push((i, j, ExtComplex::Finite(z)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepClass {
    Convex,
    Marginal,
    Nonconvex,
    ProjectiveDegenerate,
    Failed,
}

impl std::fmt::Display for SweepClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepClass::Convex => "convex",
            SweepClass::Marginal => "marginal",
            SweepClass::Nonconvex => "nonconvex",
            SweepClass::ProjectiveDegenerate => "projective-degenerate",
            SweepClass::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub row: usize,
    pub col: usize,
    pub z: [ExtComplex; 3],
    pub classification: SweepClass,
    /// Largest tangency or incidence residual, `NaN` for failed solves.
    pub residual: f64,
    pub error: Option<String>,
}

fn classify(
    complex: &PolyhedralComplex,
    frame: &Frame,
    path: &BodyPath,
    z: [ExtComplex; 3],
    opts: &SolverOptions,
) -> (SweepClass, f64, Option<String>) {
    let cfg = match continue_to_body(complex, frame, z, path, opts) {
        Ok((cfg, _)) => cfg,
        Err(e) => return (SweepClass::Failed, f64::NAN, Some(e.to_string())),
    };
    let (edges, vertices, _) = midscription_checks(&cfg, &path.eval(1.0), complex, TANGENCY_TOL);
    let residual = edges
        .iter()
        .map(|c| c.line_minimum.abs())
        .chain(vertices.iter().map(|c| c.max_incidence))
        .fold(0.0, f64::max);
    if !(residual < TANGENCY_TOL) {
        return (SweepClass::Failed, residual, Some("verification residual above tolerance".into()));
    }
    let convexity = check_convexity(&cfg, complex);
    let class = match convexity.classification {
        Convexity::Convex if convexity.marginal => SweepClass::Marginal,
        Convexity::Convex => SweepClass::Convex,
        Convexity::Nonconvex => SweepClass::Nonconvex,
        Convexity::ProjectiveDegenerate => SweepClass::ProjectiveDegenerate,
    };
    (class, residual, None)
}

/// Solves and classifies every grid sample; samples run in parallel on the
/// current rayon pool and come back in grid order.
pub fn sweep(
    complex: &PolyhedralComplex,
    frame: &Frame,
    path: &BodyPath,
    grid: &SweepGrid,
    opts: &SolverOptions,
) -> Vec<SweepSample> {
    grid.points()
        .into_par_iter()
        .map(|(row, col, z3)| {
            let z = [grid.z1, grid.z2, z3];
            let (classification, residual, error) = classify(complex, frame, path, z, opts);
            SweepSample { row, col, z, classification, residual, error }
        })
        .collect()
}
