//! Quasi-periodic standing waves of the cubic NLS: profile integrals,
//! direct ODE integration and a constrained gradient-flow minimizer.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod elliptic;
pub mod error;
pub mod gradflow;
pub mod linalg;
pub mod ode;
pub mod profile;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
