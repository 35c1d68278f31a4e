//! Randomization significance for the SAI and the end-to-end report:
//! regression first, then the serial-correlation test on its residuals.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::autocorr::{self, TestReport};
use crate::dataio::{align, apply_permutation, Dataset, DistanceMatrix, Permutation};
use crate::error::{Error, Result};
use crate::regression::{fit_model, standardize, FitResult, Mode, Model, StandardizedResiduals};
use crate::weights::{weights_from_distances, WeightMatrix, WeightSpec};

pub const DEFAULT_PERMUTATIONS: usize = 999;

// Stream domains, so that null relabelings and row-order sweeps drawn from
// the same seed never coincide.
const DOMAIN_NULL: u64 = 0;
const DOMAIN_ORDER: u64 = 1;

/// Generator for draw `k` under `seed`. Depends on `(seed, domain, k)` only,
/// so draws can be evaluated in any order or in parallel.
fn stream(seed: u64, domain: u64, k: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(k);
    rng
}

fn random_mapping(n: usize, seed: u64, domain: u64, k: u64) -> Vec<usize> {
    let mut mapping: Vec<usize> = (0..n).collect();
    mapping.shuffle(&mut stream(seed, domain, k));
    mapping
}

/// The `k`-th uniformly random relabeling used by [`permutation_test`].
pub fn null_permutation(n: usize, seed: u64, k: u64) -> Permutation {
    Permutation::new(random_mapping(n, seed, DOMAIN_NULL, k)).expect("shuffle is a bijection")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationReport {
    pub observed_i: f64,
    pub m: usize,
    pub seed: u64,
    /// `#{|I_perm| ≥ |I_obs|}`
    pub extreme_count: usize,
    pub p_two_sided: f64,
    pub null_mean: f64,
    pub null_sd: f64,
}

/// Relabels `e` over fixed locations `m` times and compares `|I|`.
/// `p = (1 + #{|I_perm| ≥ |I_obs|}) / (m + 1)`.
pub fn permutation_test(
    e: &StandardizedResiduals,
    w: &WeightMatrix,
    m: usize,
    seed: u64,
) -> Result<PermutationReport> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "number of permutations must be at least 1".into(),
        ));
    }
    let observed = autocorr::sai(e, w)?;
    let n = e.len();
    let nulls: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|k| {
            let mapping = random_mapping(n, seed, DOMAIN_NULL, k as u64);
            w.values().quadratic_form(e.permuted(&mapping).values())
        })
        .collect();
    Ok(summarize_nulls(observed, &nulls, seed))
}

fn summarize_nulls(observed: f64, nulls: &[f64], seed: u64) -> PermutationReport {
    let m = nulls.len();
    // Relabelings that reproduce the observed arrangement must count as ties
    // despite summation-order rounding.
    let threshold = observed.abs() - 1e-12 * observed.abs().max(1.0);
    let extreme_count = nulls.iter().filter(|i| i.abs() >= threshold).count();
    let null_mean = nulls.iter().sum::<f64>() / m as f64;
    let null_sd = if m > 1 {
        (nulls.iter().map(|i| (i - null_mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
    } else {
        0.0
    };
    PermutationReport {
        observed_i: observed,
        m,
        seed,
        extreme_count,
        p_two_sided: (1 + extreme_count) as f64 / (m + 1) as f64,
        null_mean,
        null_sd,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermutationSettings {
    pub m: usize,
    pub seed: u64,
}

impl Default for PermutationSettings {
    fn default() -> Self {
        Self {
            m: DEFAULT_PERMUTATIONS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub response: String,
    pub predictors: Vec<String>,
    pub weight: WeightSpec,
    pub mode: Mode,
    pub model: Model,
    pub permutations: Option<PermutationSettings>,
}

impl ReportConfig {
    pub fn new(response: &str, predictors: &[&str]) -> Self {
        Self {
            response: response.to_owned(),
            predictors: predictors.iter().map(|s| (*s).to_owned()).collect(),
            weight: WeightSpec::default(),
            mode: Mode::Sample,
            model: Model::Linear,
            permutations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub weight_spec: WeightSpec,
    pub mode: Mode,
    pub model: Model,
    pub n: usize,
    pub first_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullReport {
    pub fit: FitResult,
    pub test: TestReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationReport>,
    pub provenance: Provenance,
}

/// Intermediate products of the pipeline, for callers that need more than
/// the summary (the scatterplot, for instance).
#[derive(Debug, Clone)]
pub struct Analysis {
    pub dataset: Dataset,
    pub distances: DistanceMatrix,
    pub fit: FitResult,
    pub standardized: StandardizedResiduals,
    pub weights: WeightMatrix,
    pub test: TestReport,
}

/// Align → fit → standardize → weights → statistics.
pub fn analyze(dataset: &Dataset, dm: &DistanceMatrix, config: &ReportConfig) -> Result<Analysis> {
    let (dataset, distances) = align(dataset, dm).map_err(Error::at("align"))?;
    let predictors: Vec<&str> = config.predictors.iter().map(String::as_str).collect();
    let fit = fit_model(&dataset, &config.response, &predictors, config.model)
        .map_err(Error::at("fit"))?;
    let standardized = standardize(&fit, config.mode).map_err(Error::at("standardize"))?;
    let weights =
        weights_from_distances(&distances, &config.weight).map_err(Error::at("weights"))?;
    let test = autocorr::test_residuals(&fit.residuals, &standardized, &weights, config.weight)
        .map_err(Error::at("statistics"))?;
    Ok(Analysis {
        dataset,
        distances,
        fit,
        standardized,
        weights,
        test,
    })
}

pub fn run_report(
    dataset: &Dataset,
    dm: &DistanceMatrix,
    config: &ReportConfig,
) -> Result<FullReport> {
    let a = analyze(dataset, dm, config)?;
    let permutation = config
        .permutations
        .map(|s| permutation_test(&a.standardized, &a.weights, s.m, s.seed))
        .transpose()
        .map_err(Error::at("permutation"))?;
    Ok(FullReport {
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            weight_spec: config.weight,
            mode: config.mode,
            model: config.model,
            n: a.dataset.n(),
            first_label: a.dataset.labels()[0].clone(),
            data_sha256: None,
            dist_sha256: None,
        },
        fit: a.fit,
        test: a.test,
        permutation,
    })
}

/// DW and the order-free statistics recomputed under `k` random row orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSweep {
    pub k: usize,
    pub seed: u64,
    pub dw: Vec<f64>,
    pub dw_mean: f64,
    pub dw_sd: f64,
    pub dw_min: f64,
    pub dw_max: f64,
    pub sai_spread: f64,
    pub rci_spread: f64,
    pub arci_spread: f64,
}

/// Reruns the full pipeline on `k` consistent random reorderings of the
/// dataset and distance matrix.
pub fn enumerate_orders(
    dataset: &Dataset,
    dm: &DistanceMatrix,
    config: &ReportConfig,
    k: usize,
    seed: u64,
) -> Result<OrderSweep> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "order sweep needs at least 2 orders".into(),
        ));
    }
    let (dataset, dm) = align(dataset, dm).map_err(Error::at("align"))?;
    let n = dataset.n();
    let tests = (0..k)
        .into_par_iter()
        .map(|j| {
            let p = Permutation::new(random_mapping(n, seed, DOMAIN_ORDER, j as u64))?;
            let (d, m) = apply_permutation(&dataset, &dm, &p)?;
            Ok(analyze(&d, &m, config)?.test)
        })
        .collect::<Result<Vec<TestReport>>>()?;

    let dw: Vec<f64> = tests.iter().map(|t| t.dw).collect();
    let dw_mean = dw.iter().sum::<f64>() / k as f64;
    let dw_sd = (dw.iter().map(|d| (d - dw_mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt();
    let spread = |f: fn(&TestReport) -> f64| {
        let (lo, hi) = tests
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    };
    Ok(OrderSweep {
        k,
        seed,
        dw_min: dw.iter().copied().fold(f64::INFINITY, f64::min),
        dw_max: dw.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        dw_mean,
        dw_sd,
        sai_spread: spread(|t| t.sai),
        rci_spread: spread(|t| t.rci),
        arci_spread: spread(|t| t.arci),
        dw,
    })
}
