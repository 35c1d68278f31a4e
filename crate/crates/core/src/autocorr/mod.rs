//! Serial-correlation statistics for regression residuals: the order-based
//! Durbin-Watson family and the weight-matrix (order-free) family.

mod oracle;
mod scatter;

pub use oracle::{geary_oracle, moran_oracle, pearson, serial_autocorrelation};
pub use scatter::{scatter_series, through_origin_slope, ScatterSeries};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regression::{Mode, StandardizedResiduals};
use crate::weights::{WeightMatrix, WeightSpec};

/// All statistics computed on one residual vector and one weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub dw: f64,
    pub rho: f64,
    pub sai: f64,
    pub rci: f64,
    pub geary_c: f64,
    pub arci: f64,
    pub mode: Mode,
    pub weight_spec: WeightSpec,
    pub decomposition_check: f64,
    pub warnings: Vec<String>,
}

/// `Σ(ε_i − ε_{i−1})² / Σε²`. Depends on element order.
pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    let ss = sum_of_squares(residuals)?;
    let diff: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(diff / ss)
}

/// Lag-one coefficient `Σ ε_i ε_{i−1} / Σε²`.
pub fn lag1_rho(residuals: &[f64]) -> Result<f64> {
    let ss = sum_of_squares(residuals)?;
    let cross: f64 = residuals.windows(2).map(|w| w[1] * w[0]).sum();
    Ok(cross / ss)
}

/// Spatial autocorrelation index `eᵀWe`. Equals the population- or
/// sample-form Moran coefficient of the residuals depending on how `e`
/// was standardized.
pub fn sai(e: &StandardizedResiduals, w: &WeightMatrix) -> Result<f64> {
    check_standardized(e, w)?;
    Ok(w.values().quadratic_form(e.values()))
}

/// `S = 2(1 − I)`.
pub fn rci(sai_value: f64) -> f64 {
    2.0 * (1.0 - sai_value)
}

/// Geary-type coefficient `(n−1) ΣΣ w_ij (ε_i − ε_j)² / (2 Σε²)`.
/// Scale invariant; takes raw residuals.
pub fn geary_c(residuals: &[f64], w: &WeightMatrix) -> Result<f64> {
    let n = residuals.len();
    if w.n() != n {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: n,
        });
    }
    let ss = sum_of_squares(residuals)?;
    let scale = residuals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean = residuals.iter().sum::<f64>() / n as f64;
    if mean.abs() > 1e-9 * n as f64 * scale {
        return Err(Error::NonZeroMean(mean));
    }
    let mut num = 0.0;
    for (i, row) in w.values().rows().enumerate() {
        let ei = residuals[i];
        num += row
            .iter()
            .zip(residuals)
            .map(|(wij, ej)| wij * (ei - ej) * (ei - ej))
            .sum::<f64>();
    }
    Ok((n as f64 - 1.0) * num / (2.0 * ss))
}

/// `S_a = 2C`.
pub fn arci(c_value: f64) -> Result<f64> {
    if c_value < 0.0 {
        return Err(Error::NegativeGeary(c_value));
    }
    Ok(2.0 * c_value)
}

/// `S_a − 2[(n−1) Σ r_i e_i² / Σe² − I_s]`, with `r_i` the weight row sums.
/// Zero up to rounding for any symmetric `W`.
pub fn decomposition_residual(e: &StandardizedResiduals, w: &WeightMatrix) -> Result<f64> {
    check_standardized(e, w)?;
    let v = e.values();
    let m = Mode::Sample.multiplier(v.len());
    let ss: f64 = v.iter().map(|x| x * x).sum();
    let s_a = arci(geary_c(v, w)?)?;
    let i_s = m * w.values().quadratic_form(v) / ss;
    let weighted: f64 = w.row_sums().iter().zip(v).map(|(r, x)| r * x * x).sum();
    Ok(s_a - 2.0 * (m * weighted / ss - i_s))
}

/// Evaluates every statistic on one fit. `residuals` are the raw residuals
/// (for DW, ρ and C); `e` their standardized form.
pub fn test_residuals(
    residuals: &[f64],
    e: &StandardizedResiduals,
    w: &WeightMatrix,
    weight_spec: WeightSpec,
) -> Result<TestReport> {
    let dw = durbin_watson(residuals)?;
    let rho = lag1_rho(residuals)?;
    let sai_value = sai(e, w)?;
    let c = geary_c(residuals, w)?;
    let mut warnings = Vec::new();
    if sai_value.abs() > 1.0 {
        warnings.push(format!(
            "|SAI| = {:.6} exceeds 1 for this weight matrix",
            sai_value.abs()
        ));
    }
    Ok(TestReport {
        dw,
        rho,
        sai: sai_value,
        rci: rci(sai_value),
        geary_c: c,
        arci: arci(c)?,
        mode: e.mode(),
        weight_spec,
        decomposition_check: decomposition_residual(e, w)?,
        warnings,
    })
}

fn sum_of_squares(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::TooSmall {
            n: xs.len(),
            min: 2,
        });
    }
    let ss: f64 = xs.iter().map(|x| x * x).sum();
    if !(ss > 0.0) {
        return Err(Error::ZeroVariance("residuals"));
    }
    Ok(ss)
}

fn check_standardized(e: &StandardizedResiduals, w: &WeightMatrix) -> Result<()> {
    let n = e.len();
    if w.n() != n {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: n,
        });
    }
    let expected = e.mode().multiplier(n);
    let found: f64 = e.values().iter().map(|x| x * x).sum();
    if (found - expected).abs() > 1e-9 * n as f64 {
        return Err(Error::NotStandardized { expected, found });
    }
    Ok(())
}
