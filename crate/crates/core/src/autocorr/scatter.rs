//! Residual autocorrelation scatterplot: standardized residuals against their
//! weighted spatial lag, with the trend line whose slope is the SAI.

use serde::Serialize;

use crate::error::Result;
use crate::regression::{Mode, StandardizedResiduals};
use crate::weights::WeightMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterSeries {
    pub x: Vec<f64>,
    /// `m · W e` with `m = n` (population) or `n − 1` (sample).
    pub y_observed: Vec<f64>,
    /// `I · e`
    pub y_trend: Vec<f64>,
    pub slope: f64,
    pub mode: Mode,
}

pub fn scatter_series(e: &StandardizedResiduals, w: &WeightMatrix) -> Result<ScatterSeries> {
    let slope = super::sai(e, w)?;
    let m = e.mode().multiplier(e.len());
    let x = e.values().to_vec();
    let y_observed = w.values().mul_vec(&x).into_iter().map(|v| m * v).collect();
    let y_trend = x.iter().map(|v| slope * v).collect();
    Ok(ScatterSeries {
        x,
        y_observed,
        y_trend,
        slope,
        mode: e.mode(),
    })
}

/// Least-squares slope of `y` on `x` without intercept: `Σxy / Σx²`.
pub fn through_origin_slope(x: &[f64], y: &[f64]) -> f64 {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    sxy / sxx
}
