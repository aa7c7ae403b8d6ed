//! Edge-tangent polyhedra for smooth strictly convex bodies.
//!
//! The unit-ball case comes from an orthogonal primal/dual circle pattern
//! ([`packing`]); other bodies are reached by continuation along a blended
//! family of gauges ([`midscribe`]) and checked by [`verify`].

pub mod bodies;
pub mod combinatorics;
pub mod midscribe;
pub mod mobius;
pub mod packing;
pub mod verify;

pub use bodies::{BodyPath, ConvexBody};
pub use combinatorics::{Frame, PolyhedralComplex};
pub use midscribe::{continue_to_body, Configuration, SolveError, SolveReport, SolverOptions};
pub use mobius::{Complex64, ExtComplex};
pub use packing::{pack, CirclePattern};
pub use verify::{check_convexity, check_midscription, VerifyReport};
