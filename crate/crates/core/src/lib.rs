//! Spectral laboratory for structurally damped σ-evolution equations
//! `u_tt + (-Δ)^σ u + (-Δ)^δ u_t = f(u, u_t)`.
//!
//! Linear solutions are propagated exactly through the Fourier multipliers
//! of each mode; the crate also measures kernel norms, fits decay exponents,
//! decides the admissible nonlinearity exponents exactly and runs the
//! semilinear problem with an exponential Duhamel integrator.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod analysis;
#[cfg(feature = "cli")]
pub mod cli;
pub mod cutoff;
pub mod hankel;
pub mod model;
mod parallel;
pub mod propagator;
pub mod quadrature;
pub mod rational;
pub mod semilinear;
pub mod symbols;

pub use model::{ModelParams, NormSetup, Regime};
pub use rational::Rational;
