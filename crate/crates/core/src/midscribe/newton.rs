use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Configuration, System};
use crate::bodies::{BodyError, ConvexBody};
use crate::combinatorics::PolyhedralComplex;
use crate::packing::PackingError;

/// Singular values at or below this fraction of the largest count as rank loss.
pub const RANK_TOL: f64 = 1e-8;

/// LU pivots below this fraction of the largest are treated as zero.
const PIVOT_TOL: f64 = 1e-14;

const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Seed for perturbation probes.
    pub seed: u64,
    /// Extrapolate the last two accepted solutions instead of reusing the last one.
    pub secant: bool,
    /// On a singular Jacobian take the minimum-norm least-squares step
    /// instead of failing. Such steps are counted in the report.
    pub allow_singular: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-11, max_iter: 50, ds_init: 0.1, ds_min: 1e-4, ds_max: 0.25, seed: 0, secant: true, allow_singular: false }
    }
}

/// One accepted continuation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub s: f64,
    pub ds: f64,
    pub iterations: usize,
    /// Smallest over largest singular value of the Jacobian at the accepted solution.
    pub min_singular_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    /// Largest over smallest singular value of the final Jacobian.
    pub jacobian_condition_estimate: f64,
    /// Smallest over largest singular value of the final Jacobian.
    pub min_singular_ratio: f64,
    pub step_history: Vec<StepRecord>,
    pub rank_deficiency: usize,
    /// Newton steps taken through a singular Jacobian.
    pub singular_steps: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("singular Jacobian (rank deficiency {rank_deficiency}, condition {condition:e})")]
    SingularJacobian { rank_deficiency: usize, condition: f64 },
    #[error("line search found no decrease at iteration {iterations} (residual {residual:e})")]
    NoDecrease { iterations: usize, residual: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("continuation step underflow at s = {last_s} (ds = {ds:e}): {reason}")]
    StepUnderflow { last_s: f64, ds: f64, reason: String },
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Body(#[from] BodyError),
}

/// Singular-value summary: `(condition, min/max ratio, rank deficiency)`.
pub fn singular_value_summary(j: &DMatrix<f64>) -> (f64, f64, usize) {
    let sv = j.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    let deficiency = sv.iter().filter(|&&s| s <= RANK_TOL * max).count();
    (max / min, min / max, deficiency)
}

/// `-J⁺ r`, dropping singular values at or below [`RANK_TOL`] of the largest.
fn minimum_norm_step(j: DMatrix<f64>, r: &DVector<f64>) -> DVector<f64> {
    let svd = j.svd(true, true);
    let cutoff = RANK_TOL * svd.singular_values.max();
    -svd.solve(r, cutoff).expect("both factors computed")
}

fn max_norm(r: &DVector<f64>) -> f64 {
    r.amax()
}

/// Damped Newton iteration on the square system, pinned by `cfg.marks`.
pub fn newton_refine(
    cfg: &Configuration,
    body: &ConvexBody,
    complex: &PolyhedralComplex,
    opts: &SolverOptions,
) -> Result<(Configuration, SolveReport), SolveError> {
    let sys = System::new(complex, *body, Some(&cfg.marks));
    sys.check_dimensions(cfg)?;
    if sys.balance() != 0 {
        return Err(SolveError::DimensionMismatch(format!("system balance {}", sys.balance())));
    }
    let mut x = sys.pack(cfg);
    let mut r = sys.residual(&x);
    let mut rn = max_norm(&r);
    let mut iterations = 0;
    let mut singular_steps = 0;
    while rn >= opts.tol {
        if iterations == opts.max_iter {
            return Err(SolveError::MaxIterations { iterations, residual: rn });
        }
        iterations += 1;
        let j = sys.jacobian(&x).to_dense();
        let lu = j.clone().lu();
        let u = lu.u();
        let pivots = u.diagonal().map(f64::abs);
        let dx = if pivots.min() <= PIVOT_TOL * pivots.max() || !pivots.iter().all(|p| p.is_finite()) {
            if !opts.allow_singular {
                let (condition, _, rank_deficiency) = singular_value_summary(&j);
                return Err(SolveError::SingularJacobian { rank_deficiency: rank_deficiency.max(1), condition });
            }
            singular_steps += 1;
            minimum_norm_step(j, &r)
        } else {
            lu.solve(&(-&r)).expect("nonzero pivots")
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let mut trial = &x + &dx * lambda;
            sys.normalize_vertices(&mut trial);
            let rt = sys.residual(&trial);
            let rtn = max_norm(&rt);
            if rtn < rn {
                x = trial;
                r = rt;
                rn = rtn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(SolveError::NoDecrease { iterations, residual: rn });
        }
    }
    // One more full step once below tolerance: near-infinite vertices amplify
    // any leftover error when mapped to affine coordinates.
    if iterations > 0 {
        let lu = sys.jacobian(&x).to_dense().lu();
        let pivots = lu.u().diagonal().map(f64::abs);
        if pivots.min() > PIVOT_TOL * pivots.max() && pivots.iter().all(|p| p.is_finite()) {
            if let Some(dx) = lu.solve(&(-&r)) {
                let mut trial = &x + dx;
                sys.normalize_vertices(&mut trial);
                let rt = sys.residual(&trial);
                if max_norm(&rt) <= rn {
                    iterations += 1;
                    rn = max_norm(&rt);
                    x = trial;
                }
            }
        }
    }
    let j = sys.jacobian(&x).to_dense();
    let (condition, ratio, rank_deficiency) = singular_value_summary(&j);
    Ok((
        sys.unpack(&x, cfg),
        SolveReport {
            converged: true,
            iterations,
            final_residual: rn,
            jacobian_condition_estimate: condition,
            min_singular_ratio: ratio,
            step_history: Vec::new(),
            rank_deficiency,
            singular_steps,
        },
    ))
}
