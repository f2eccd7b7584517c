//! Numerical tools for periodic magnetic Schrödinger operators
//! `(−i∇ − A)² + V` on `ℝⁿ`: plane-wave fiber matrices, band functions,
//! the transversal averaging conditions on `A`, complex-quasimomentum
//! invertibility probes and the auxiliary Dirac operator.

// `!(x > 0.0)` style guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod cli;
pub mod conditions;
pub mod config;
pub mod dirac;
pub mod error;
pub mod exec;
pub mod fiber;
pub mod lattice;
pub mod linalg;
pub mod potential;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
