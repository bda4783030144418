//! sasakilab: a numerical verification workbench for Sasakian geometry and
//! gradient shrinking Sasaki-Ricci solitons.
//!
//! The crate computes curvature from coordinate charts by exact truncated
//! Taylor arithmetic, represents Sasakian structures `(phi, xi, eta, g)`,
//! and evaluates every soliton identity, inequality and classification
//! criterion as point-sampled residuals with pass/fail verdicts.

pub mod error;
pub mod expr;
pub mod fixtures;
pub mod identities;
pub mod par;
pub mod report;
pub mod sampling;
pub mod sasaki;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
