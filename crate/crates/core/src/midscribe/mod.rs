//! Midscribed configurations: the constraint system, its Newton corrector and
//! continuation from the unit ball to a target body.

mod config;
mod continuation;
mod newton;
mod system;

pub use config::*;
pub use continuation::{continue_to_body, degeneracy_check, marks_on_body, start_configuration};
pub use newton::{newton_refine, singular_value_summary, SolveError, SolveReport, SolverOptions, StepRecord, RANK_TOL};
pub use system::{assemble_jacobian, assemble_residual, plane_quadruple_det, SparseMatrix, System};
