//! Relaxation-and-rounding toolkit for discrete optimization over graph variables.
//!
//! The pipeline works on soft assignments in the unit box:
//!
//! 1. build a penalized loss `l(x) = f(x) + beta * sum_j g_j(x)` from relaxations of the
//!    objective and its constraints, where every relaxation is concave (or affine) along
//!    each coordinate separately,
//! 2. minimize `l` over `[0,1]^n` with a first-order method,
//! 3. fix coordinates to 0/1 one at a time, each time picking the branch with the lower
//!    loss; per-coordinate concavity makes the loss trace non-increasing,
//! 4. verify at runtime that the rounded point is feasible and its cost is bounded by the
//!    initial relaxed loss whenever the penalty weight dominates the feasible costs.
//!
//! Objectives can be exact closed forms or trained surrogate models (`proxy`); the
//! `baselines` module carries brute-force oracles and classic heuristics for comparison.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod multilinear;
pub mod objectives;
pub mod proxy;
pub mod relaxation;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
