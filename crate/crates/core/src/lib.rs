//! Graph parameters around the rank-1 quantum chromatic number.
//!
//! The crate relates three quantities of a simple graph `G`:
//!
//! * the chromatic number `χ(G)` ([`chromatic`]),
//! * the orthogonal rank `ξ(G)`, the least dimension admitting an orthogonal
//!   representation ([`reps`]),
//! * the rank-1 quantum chromatic number `χ_q^(1)(G)`, the least number of
//!   colors of a winning rank-1 strategy in the coloring game ([`game`], [`reps`]).
//!
//! `ξ(G) ≤ χ_q^(1)(G) ≤ χ(G)` always holds. Only `χ` is computed exactly; for
//! the other two the crate produces verified upper-bound certificates and
//! clique lower bounds. Kochen-Specker and weak Kochen-Specker decisions on
//! finite vector sets live in [`ks`].

pub mod chromatic;
pub mod error;
pub mod game;
pub mod graph;
pub mod io;
pub mod ks;
pub mod linalg;
pub mod reps;

pub use error::{Error, Result};
pub use graph::Graph;
pub use linalg::{CMatrix, CVector, C64};

/// Absolute tolerance for orthogonality and consistency checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative cutoff (against the largest singular/eigen value) for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;
