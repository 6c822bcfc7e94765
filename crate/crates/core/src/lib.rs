//! Deciding whether a finite-dimensional stochastic matrix is embeddable in
//! a homogeneous Markov semigroup, i.e. whether M = e^Q for a rate matrix Q.
//!
//! The crate combines a necessary-condition battery, complete constructive
//! solvers for structured matrix classes (2x2, equal-input, circulant,
//! symmetric and doubly stochastic at d = 3), and a generic logarithm
//! branch search, all cross-checked against exp/log oracles.
//!
//! Everything is a pure function over immutable values; all types are safe
//! to share across threads.

// negated comparisons like !(x > 0.0) are NaN-rejecting guards
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod matcore;
pub mod verdict;

pub mod diagnostics;
pub mod kendall2;

pub mod equalinput;

pub mod circulant;
pub mod classes3;
pub mod logsearch;

pub mod classify;

pub(crate) mod newton;

pub use error::{Error, Result};
