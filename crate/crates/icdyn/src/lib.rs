//! Information-criterion model selection for sampled dynamical signals.
//!
//! The crate answers one question from several angles: given a finite,
//! noisy record of a dynamical process (an exponential decay, a harmonic
//! oscillation, a chaotic flow, or several pooled decay dimensions), when
//! does AIC prefer the structured model over plain noise — and when does it
//! stop doing so because the sampling is too sparse, too short, or too
//! noisy?
//!
//! - [`signal_models`] generates the trajectories and the noise.
//! - [`estimation`] fits each model by profiled-likelihood least squares.
//! - [`criteria`] scores fits (AIC/BIC) and picks a winner.
//! - [`theory`] predicts the selection crossovers in closed form or by
//!   deterministic root-finding.
//! - [`montecarlo`] measures the same crossovers empirically from seeded,
//!   reproducible trial ensembles.
//! - [`presets`] bundles the standard experiments and their pass/fail
//!   checks; the `icdyn` binary exposes everything on the command line.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod estimation;
pub mod montecarlo;
pub mod presets;
pub mod rng;
pub mod signal_models;
pub mod theory;

pub use error::{Error, Result};
