//! Spectral Galerkin laboratory for periodic Lévy-type nonlocal operators.
//!
//! The crate computes, for a jump kernel `mu(x, y) / |x - y|^{d+alpha}` with a
//! periodic trigonometric-polynomial coefficient `mu`, the homogenization data
//! (effective coefficient, corrector functions, effective matrix) and measures
//! the operator-norm convergence rates of the corrected resolvent
//! approximations on the Bloch-fiber decomposition.

pub mod assembly;
pub mod cell;
pub mod coefficient;
pub mod config;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod runner;
pub mod spectral;
pub mod sweep;
pub mod symbol;

pub use error::{Error, Result};
