//! Numerical engine for stochastic Wilson lines.
//!
//! The crate computes the ingredients of a one-loop gauge-theory
//! approximation end to end: mollified currents along loops in R^3
//! ([`geometry`]), linking numbers by the Gauss integral and by a crossing
//! count ([`topology`]), graded holonomies of matrix-valued driving paths
//! ([`signature`]), a truncated spectral Gaussian model with its complex
//! Fresnel rescaling ([`spectral`]), Wick and Monte Carlo moments
//! ([`gaussian`]), and the su(2) two-loop asymptotic series in the inverse
//! level whose coefficients reduce to linking numbers ([`expansion`]).
//!
//! Every major capability has a runnable example under `examples/`, and the
//! `wilsonline` binary exposes the same entry points as subcommands that
//! read and write JSON.

pub mod cli;
pub mod cmat;
pub mod counter_rng;
pub mod error;
pub mod expansion;
pub mod gaussian;
pub mod geometry;
pub mod lie_rep;
pub mod quad;
pub mod signature;
pub mod spectral;
pub mod topology;

pub use error::{EngineError, Result};
