//! Viscosity approximation with error terms for m-accretive operators on
//! Euclidean spaces, together with explicit rates of asymptotic regularity
//! and a harness that checks those rates against simulated trajectories.
//!
//! The crate is organized bottom-up:
//!
//! * [`moduli`]: moduli of convergence and their checkers.
//! * [`operators`]: resolvent oracles and contractions.
//! * [`iteration`]: the iteration engine, parameter schedules and trace checks.
//! * [`rates`]: rate certificates built from schedule moduli.
//! * [`verify`]: certified-versus-empirical comparison.

// `!(a <= b)` is how NaN ends up on the failing side of a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod moduli;
pub mod operators;
pub mod iteration;
pub mod rates;
pub mod verify;

/// Absolute slack added to the bound side of every floating-point comparison.
pub const TOL_FLOAT: f64 = 1e-9;
