//! Serial-correlation tests for least-squares residuals on spatial samples.
//!
//! The Durbin-Watson statistic depends on the order in which observations are
//! listed, which is arbitrary for cross-sectional data. This crate replaces
//! the lag with a unit-sum spatial weight matrix built from pairwise
//! distances and reports:
//!
//! - the spatial autocorrelation index `I = eᵀWe` on standardized residuals
//!   and the residual correlation index `S = 2(1 − I)`,
//! - a Geary-type coefficient `C` and its doubled form `S_a = 2C`,
//! - Durbin-Watson and lag-one ρ, for comparison,
//! - a randomization p-value for `I`.
//!
//! ```
//! use sdw_core::{autocorr, regression::{Mode, StandardizedResiduals}, weights};
//!
//! let e = StandardizedResiduals::from_residuals(&[1.0, -1.0], Mode::Sample).unwrap();
//! let w = weights::even_weights(2).unwrap();
//! let i = autocorr::sai(&e, &w).unwrap();
//! assert!((i + 0.5).abs() < 1e-15);
//! assert!((autocorr::rci(i) - 3.0).abs() < 1e-15);
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autocorr;
pub mod dataio;
pub mod error;
pub mod inference;
pub mod json;
pub mod matrix;
pub mod regression;
pub mod weights;

pub use autocorr::{ScatterSeries, TestReport};
pub use dataio::{Dataset, DistanceMatrix, Permutation};
pub use error::{Error, Result};
pub use inference::{FullReport, PermutationReport, ReportConfig};
pub use matrix::SquareMatrix;
pub use regression::{FitResult, Mode, Model, StandardizedResiduals};
pub use weights::{ContiguityMatrix, WeightMatrix, WeightSpec};
