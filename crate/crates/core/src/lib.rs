//! Exact construction and verification of meromorphic k-differentials on
//! singular curves.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactnum`]: rationals, Laurent series, rational functions, linear algebra.
//! - [`diffcalc`]: k-differentials on the projective line and their residues.
//! - [`curvegraph`]: dual graphs of nodal curves and harmonic flows.
//! - [`balance`]: global differentials on nodal curves, balancing and span checks.
//! - [`localsing`]: conductors, δ-invariants and descent at plane singularities.
//! - [`cli`]: curve documents, reports and the `residuum` command set.

pub mod balance;
pub mod cli;
pub mod curvegraph;
pub mod diffcalc;
pub mod error;
pub mod exactnum;
pub mod localsing;

pub use error::{Error, Result};
