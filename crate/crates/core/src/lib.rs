//! Two-mode Gaussian states of a type-II optical parametric oscillator.
//!
//! * [`gaussian`]: covariance matrices, basis changes, passive optics, losses
//! * [`criteria`]: gemellity, conditional variance, separability, EOF, EPR
//!   product, logarithmic negativity
//! * [`opo`]: below-threshold and self-phase-locked OPO states
//! * [`condprep`]: Monte Carlo conditional preparation
//! * [`entopt`]: entanglement extraction by a relative phase / wave plates
//! * [`io`]: matrix documents and fixtures
//!
//! The state math is generic over [`Scalar`] (`f32`, `f64`); the aliases
//! below fix the common `f64` case.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
// Index loops read better than iterator chains for 4×4 matrix code.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod condprep;
pub mod criteria;
pub mod entopt;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod opo;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use gaussian::{LossModel as GenericLossModel, Mode, ModeBasis};
pub use scalar::Scalar;

pub type CovarianceMatrix = gaussian::CovarianceMatrix<f64>;
pub type CovarianceMatrix32 = gaussian::CovarianceMatrix<f32>;
pub type PassiveTransform = gaussian::PassiveTransform<f64>;
pub type PassiveTransform32 = gaussian::PassiveTransform<f32>;
pub type LossModel = gaussian::LossModel<f64>;
pub type CriteriaReport = criteria::CriteriaReport<f64>;
pub type CorrelationStats = criteria::CorrelationStats<f64>;
pub type OpoParams = opo::OpoParams<f64>;
pub type CoupledStateParams = opo::CoupledStateParams<f64>;
pub type OptimizationOutcome = entopt::OptimizationOutcome<f64>;
