//! Least-squares fitting with intercept, residual standardization, and the
//! logistic linearization used for bounded responses.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dataio::Dataset;
use crate::error::{Error, Result};

/// Denominator convention for variances: `n` (population) or `n − 1` (sample).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Population,
    #[default]
    Sample,
}

impl Mode {
    /// `n` for population mode, `n − 1` for sample mode.
    pub fn multiplier(self, n: usize) -> f64 {
        match self {
            Mode::Population => n as f64,
            Mode::Sample => n as f64 - 1.0,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" | "pop" => Ok(Mode::Population),
            "sample" => Ok(Mode::Sample),
            _ => Err(Error::InvalidArgument(format!(
                "mode must be 'population' or 'sample', got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Population => "population",
            Mode::Sample => "sample",
        })
    }
}

pub const DEFAULT_LMAX: f64 = 100.0;

/// Which response transform to fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    #[default]
    Linear,
    /// Fits `ln(lmax / y − 1)` instead of `y`.
    LogisticLinearized { lmax: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Linear,
    LogisticLinearized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub response: String,
    pub predictors: Vec<String>,
    pub intercept: f64,
    pub slopes: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sigma_population: f64,
    pub sigma_sample: f64,
    pub r_squared: f64,
    pub total_sum_of_squares: f64,
    pub model_kind: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lmax: Option<f64>,
}

impl FitResult {
    pub fn n(&self) -> usize {
        self.residuals.len()
    }

    pub fn residual_sum_of_squares(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }
}

/// Residuals scaled to unit standard deviation under `mode`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardizedResiduals {
    values: Vec<f64>,
    mode: Mode,
}

impl StandardizedResiduals {
    /// Divides zero-mean residuals by their standard deviation under `mode`.
    pub fn from_residuals(residuals: &[f64], mode: Mode) -> Result<Self> {
        let n = residuals.len();
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        let ss: f64 = residuals.iter().map(|e| e * e).sum();
        if !(ss > 0.0) {
            return Err(Error::ZeroVariance("residuals"));
        }
        let sigma = (ss / mode.multiplier(n)).sqrt();
        let values: Vec<f64> = residuals.iter().map(|e| e / sigma).collect();
        let mean = values.iter().sum::<f64>() / n as f64;
        if mean.abs() > 1e-9 * n as f64 {
            return Err(Error::NonZeroMean(mean));
        }
        Ok(Self { values, mode })
    }

    /// Wraps values that are already standardized, checking `Σe² = n` or `n − 1`.
    pub fn new(values: Vec<f64>, mode: Mode) -> Result<Self> {
        let n = values.len();
        let expected = mode.multiplier(n);
        let found: f64 = values.iter().map(|e| e * e).sum();
        if n < 2 || (found - expected).abs() > 1e-9 * n as f64 {
            return Err(Error::NotStandardized { expected, found });
        }
        Ok(Self { values, mode })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Reorders the residuals over locations.
    pub fn permuted(&self, mapping: &[usize]) -> Self {
        Self {
            values: mapping.iter().map(|&i| self.values[i]).collect(),
            mode: self.mode,
        }
    }
}

/// OLS of `y_col` on `x_cols` with an intercept. `x_cols` may be empty.
pub fn fit_ols(dataset: &Dataset, y_col: &str, x_cols: &[&str]) -> Result<FitResult> {
    let y = dataset.column(y_col)?;
    let xs = x_cols
        .iter()
        .map(|c| dataset.column(c))
        .collect::<Result<Vec<_>>>()?;
    let mut fit = least_squares(y, &xs)?;
    fit.response = y_col.to_owned();
    fit.predictors = x_cols.iter().map(|s| (*s).to_owned()).collect();
    Ok(fit)
}

/// Fits `ln(lmax / L − 1) = ln A − k·x`. The returned intercept is `ln A`
/// and the slope is `−k`; R² refers to the transformed response.
pub fn fit_logistic(
    dataset: &Dataset,
    y_col: &str,
    x_cols: &[&str],
    lmax: f64,
) -> Result<FitResult> {
    let levels = dataset.column(y_col)?;
    let t = linearize_labeled(levels, dataset.labels(), lmax)?;
    let xs = x_cols
        .iter()
        .map(|c| dataset.column(c))
        .collect::<Result<Vec<_>>>()?;
    let mut fit = least_squares(&t, &xs)?;
    fit.response = y_col.to_owned();
    fit.predictors = x_cols.iter().map(|s| (*s).to_owned()).collect();
    fit.model_kind = ModelKind::LogisticLinearized;
    fit.lmax = Some(lmax);
    Ok(fit)
}

pub fn fit_model(
    dataset: &Dataset,
    y_col: &str,
    x_cols: &[&str],
    model: Model,
) -> Result<FitResult> {
    match model {
        Model::Linear => fit_ols(dataset, y_col, x_cols),
        Model::LogisticLinearized { lmax } => fit_logistic(dataset, y_col, x_cols, lmax),
    }
}

pub fn standardize(fit: &FitResult, mode: Mode) -> Result<StandardizedResiduals> {
    let sse = fit.residual_sum_of_squares();
    // An exact fit leaves only rounding noise in the residuals.
    if sse <= 1e-20 * fit.total_sum_of_squares {
        return Err(Error::ZeroVariance(
            "residuals (exact fit, nothing to test)",
        ));
    }
    StandardizedResiduals::from_residuals(&fit.residuals, mode)
}

/// `ln(lmax / L − 1)` for each level; every level must lie in `(0, lmax)`.
pub fn logistic_linearize(levels: &[f64], lmax: f64) -> Result<Vec<f64>> {
    let labels: Vec<String> = (1..=levels.len()).map(|i| format!("row {i}")).collect();
    linearize_labeled(levels, &labels, lmax)
}

/// Inverse of [`logistic_linearize`].
pub fn logistic_level(t: f64, lmax: f64) -> f64 {
    lmax / (1.0 + t.exp())
}

fn linearize_labeled(levels: &[f64], labels: &[String], lmax: f64) -> Result<Vec<f64>> {
    if !(lmax > 0.0 && lmax.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lmax must be positive, got {lmax}"
        )));
    }
    levels
        .iter()
        .zip(labels)
        .map(|(&l, label)| {
            if l > 0.0 && l < lmax {
                Ok((lmax / l - 1.0).ln())
            } else {
                Err(Error::Domain {
                    label: label.clone(),
                    value: l,
                    lmax,
                })
            }
        })
        .collect()
}

/// Householder QR on the centered, column-scaled predictors; the intercept
/// follows from the means.
fn least_squares(y: &[f64], xs: &[&[f64]]) -> Result<FitResult> {
    let n = y.len();
    let k = xs.len();
    if n <= k + 1 {
        return Err(Error::TooSmall { n, min: k + 2 });
    }
    if let Some(bad) = xs.iter().find(|x| x.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let mean_y = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - mean_y).collect();
    let sst: f64 = yc.iter().map(|v| v * v).sum();
    if !(sst > 0.0) {
        return Err(Error::ZeroVariance("response"));
    }
    let means_x: Vec<f64> = xs.iter().map(|x| mean(x)).collect();

    let slopes = if k == 0 {
        Vec::new()
    } else {
        let mut design = DMatrix::<f64>::from_fn(n, k, |i, j| xs[j][i] - means_x[j]);
        let mut scales = Vec::with_capacity(k);
        for mut col in design.column_iter_mut() {
            let norm = col.norm();
            if !(norm > 0.0) {
                return Err(Error::RankDeficient);
            }
            col /= norm;
            scales.push(norm);
        }
        let qr = design.qr();
        let r = qr.r();
        let diag_max = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r.diagonal().iter().any(|v| v.abs() <= 1e-10 * diag_max) {
            return Err(Error::RankDeficient);
        }
        let mut qty = DVector::from_column_slice(&yc);
        qr.q_tr_mul(&mut qty);
        let scaled = r
            .solve_upper_triangular(&qty.rows(0, k).into_owned())
            .ok_or(Error::RankDeficient)?;
        scaled
            .iter()
            .zip(&scales)
            .map(|(b, s)| b / s)
            .collect::<Vec<f64>>()
    };
    let intercept = mean_y - slopes.iter().zip(&means_x).map(|(b, m)| b * m).sum::<f64>();

    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            yc[i]
                - xs.iter()
                    .zip(&slopes)
                    .zip(&means_x)
                    .map(|((x, b), m)| b * (x[i] - m))
                    .sum::<f64>()
        })
        .collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();

    Ok(FitResult {
        response: String::new(),
        predictors: Vec::new(),
        intercept,
        slopes,
        residuals,
        sigma_population: (sse / n as f64).sqrt(),
        sigma_sample: (sse / (n as f64 - 1.0)).sqrt(),
        r_squared: 1.0 - sse / sst,
        total_sum_of_squares: sst,
        model_kind: ModelKind::Linear,
        lmax: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{permute_dataset, Column, Permutation};
    use proptest::prelude::*;

    fn dataset(x: &[f64], y: &[f64]) -> Dataset {
        Dataset::new(
            (0..x.len()).map(|i| format!("r{i}")).collect(),
            vec![
                Column {
                    name: "x".into(),
                    values: x.to_vec(),
                },
                Column {
                    name: "y".into(),
                    values: y.to_vec(),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = fit_ols(&dataset(&x, &y), "y", &["x"]).unwrap();
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.slopes[0] - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
        assert!(matches!(
            standardize(&fit, Mode::Sample),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn hand_solved_three_points() {
        let fit = fit_ols(&dataset(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]), "y", &["x"]).unwrap();
        assert!((fit.intercept + 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.slopes[0] - 1.5).abs() < 1e-12);
        for (e, want) in fit.residuals.iter().zip([1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0]) {
            assert!((e - want).abs() < 1e-12);
        }
        assert!((fit.r_squared - 27.0 / 28.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_rejected() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let d = Dataset::new(
            (0..4).map(|i| format!("r{i}")).collect(),
            vec![
                Column {
                    name: "x".into(),
                    values: x.to_vec(),
                },
                Column {
                    name: "z".into(),
                    values: x.iter().map(|v| 3.0 * v).collect(),
                },
                Column {
                    name: "y".into(),
                    values: vec![1.0, 3.0, 2.0, 5.0],
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            fit_ols(&d, "y", &["x", "z"]),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn constant_response_rejected() {
        let r = fit_ols(&dataset(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), "y", &["x"]);
        assert!(matches!(r, Err(Error::ZeroVariance("response"))));
    }

    #[test]
    fn intercept_only_model() {
        let fit = fit_ols(&dataset(&[0.0, 0.0], &[3.0, 1.0]), "y", &[]).unwrap();
        assert_eq!(fit.intercept, 2.0);
        assert_eq!(fit.residuals, vec![1.0, -1.0]);
    }

    #[test]
    fn standardize_two_points() {
        let sr = StandardizedResiduals::from_residuals(&[1.0, -1.0], Mode::Population).unwrap();
        assert_eq!(sr.values(), &[1.0, -1.0]);
        let sr = StandardizedResiduals::from_residuals(&[1.0, -1.0], Mode::Sample).unwrap();
        assert!((sr.values()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        assert!((sr.values()[1] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        let sr = StandardizedResiduals::from_residuals(&[2.0, -2.0], Mode::Population).unwrap();
        assert_eq!(sr.values(), &[1.0, -1.0]);
    }

    #[test]
    fn standardize_rejects_nonzero_mean_and_unstandardized() {
        assert!(matches!(
            StandardizedResiduals::from_residuals(&[1.0, 1.0], Mode::Sample),
            Err(Error::NonZeroMean(_))
        ));
        assert!(StandardizedResiduals::new(vec![2.0, -2.0], Mode::Sample).is_err());
    }

    #[test]
    fn logistic_linearize_points() {
        assert_eq!(logistic_linearize(&[50.0], 100.0).unwrap(), vec![0.0]);
        let t = logistic_linearize(&[26.894], 100.0).unwrap()[0];
        assert!((t - 1.0).abs() < 1e-4);
        assert!((t - (73.106f64 / 26.894).ln()).abs() < 1e-12);
        for bad in [0.0, 100.0, -3.0, 120.0] {
            assert!(
                matches!(logistic_linearize(&[50.0, bad], 100.0), Err(Error::Domain { label, .. }) if label == "row 2")
            );
        }
    }

    #[test]
    fn logistic_domain_error_names_region() {
        let d = dataset(&[1.0, 2.0, 3.0], &[10.0, 100.0, 30.0]);
        match fit_logistic(&d, "y", &["x"], 100.0).unwrap_err() {
            Error::Domain { label, .. } => assert_eq!(label, "r1"),
            e => panic!("{e}"),
        }
    }

    fn arb_xy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (5usize..30).prop_flat_map(|n| {
            (
                prop::collection::vec(-1e5f64..1e5, n),
                prop::collection::vec(-10f64..10.0, n),
                prop::collection::vec(-1e3f64..1e3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_design((x1, x2, y) in arb_xy()) {
            let n = y.len();
            let d = Dataset::new(
                (0..n).map(|i| format!("r{i}")).collect(),
                vec![
                    Column { name: "a".into(), values: x1.clone() },
                    Column { name: "b".into(), values: x2.clone() },
                    Column { name: "y".into(), values: y.clone() },
                ],
            ).unwrap();
            let Ok(fit) = fit_ols(&d, "y", &["a", "b"]) else { return Ok(()); };
            let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tol = 1e-9 * n as f64 * ymax;
            prop_assert!(fit.residuals.iter().sum::<f64>().abs() <= tol);
            for x in [&x1, &x2] {
                let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let dot: f64 = fit.residuals.iter().zip(x).map(|(e, v)| e * v).sum();
                prop_assert!(dot.abs() <= tol * xmax);
            }
            let sse = fit.residual_sum_of_squares();
            prop_assert!((fit.sigma_population.powi(2) - sse / n as f64).abs() <= 1e-12 * sse.max(1.0));
            prop_assert!((fit.sigma_sample.powi(2) - sse / (n - 1) as f64).abs() <= 1e-12 * sse.max(1.0));

            // row permutation leaves coefficients unchanged and permutes residuals
            let p = Permutation::new((0..n).rev().collect()).unwrap();
            let fp = fit_ols(&permute_dataset(&d, &p).unwrap(), "y", &["a", "b"]).unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
            prop_assert!(rel(fp.intercept, fit.intercept) || (fp.intercept - fit.intercept).abs() < 1e-9 * ymax);
            prop_assert!((fp.r_squared - fit.r_squared).abs() <= 1e-12);
            for (i, &m) in p.mapping().iter().enumerate() {
                prop_assert!((fp.residuals[i] - fit.residuals[m]).abs() <= 1e-9 * ymax);
            }
        }

        #[test]
        fn logistic_round_trip(l in 0.01f64..99.99) {
            let t = logistic_linearize(&[l], 100.0).unwrap()[0];
            prop_assert!((logistic_level(t, 100.0) - l).abs() <= 1e-12 * l);
            let t2 = logistic_linearize(&[l + 0.005], 100.0).unwrap()[0];
            prop_assert!(t2 < t);
        }
    }
}
