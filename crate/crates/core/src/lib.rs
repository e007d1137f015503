//! Kolmogorovian representability of correlation data.
//!
//! * [`polytope`]: exact membership in the classical correlation polytope
//!   `C(n, S)` with convex-weight or separating-functional witnesses, and
//!   the Kolmogorov space built from convex weights.
//! * [`ch`]: the Clauser–Horne system for `(4, S₄)`.
//! * [`quantum`]: Born probabilities, spin projectors, the singlet.
//! * [`censorship`]: per-context spaces, the disjoint-union space for
//!   switch-driven experiments, and its verification.
//! * [`orsay`]: the two-sided singlet experiment with switches.
//! * [`simulation`]: seeded event streams and frequency estimates.

pub mod censorship;
pub mod ch;
pub mod error;
pub mod index;
pub mod io;
pub mod orsay;
pub mod parallel;
pub mod polytope;
pub mod quantum;
pub mod rational;
pub mod simulation;
pub mod space;

pub use error::{Error, Result};
pub use index::IndexSet;
pub use rational::{Rational, RationalizationPolicy};
