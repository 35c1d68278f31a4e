//! Literal double-summation forms of the Moran and Geary coefficients and the
//! product-moment correlations they generalize. These share no code with the
//! matrix-form statistics and serve as independent cross-checks.

use crate::error::{Error, Result};
use crate::regression::Mode;
use crate::weights::ContiguityMatrix;

fn mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in xs {
        s += x;
    }
    s / xs.len() as f64
}

/// Classic Moran coefficient:
/// `(m / T) ΣΣ v_ij (x_i − x̄)(x_j − x̄) / Σ(x_i − x̄)²`, `m` = `n` or `n − 1`.
pub fn moran_oracle(values: &[f64], v: &ContiguityMatrix, mode: Mode) -> Result<f64> {
    let n = values.len();
    if v.n() != n {
        return Err(Error::DimensionMismatch {
            expected: v.n(),
            found: n,
        });
    }
    let xbar = mean(values);
    let mut total = 0.0;
    let mut cross = 0.0;
    let mut dev2 = 0.0;
    for i in 0..n {
        dev2 += (values[i] - xbar) * (values[i] - xbar);
        for j in 0..n {
            let vij = v.values().get(i, j);
            total += vij;
            cross += vij * (values[i] - xbar) * (values[j] - xbar);
        }
    }
    if !(dev2 > 0.0) {
        return Err(Error::ZeroVariance("values"));
    }
    let m = match mode {
        Mode::Population => n as f64,
        Mode::Sample => (n - 1) as f64,
    };
    Ok(m / total * cross / dev2)
}

/// Classic Geary coefficient:
/// `(n − 1) ΣΣ v_ij (x_i − x_j)² / (2 T Σ(x_i − x̄)²)`.
pub fn geary_oracle(values: &[f64], v: &ContiguityMatrix) -> Result<f64> {
    let n = values.len();
    if v.n() != n {
        return Err(Error::DimensionMismatch {
            expected: v.n(),
            found: n,
        });
    }
    let xbar = mean(values);
    let mut total = 0.0;
    let mut sq = 0.0;
    let mut dev2 = 0.0;
    for i in 0..n {
        dev2 += (values[i] - xbar) * (values[i] - xbar);
        for j in 0..n {
            let vij = v.values().get(i, j);
            total += vij;
            sq += vij * (values[i] - values[j]) * (values[i] - values[j]);
        }
    }
    if !(dev2 > 0.0) {
        return Err(Error::ZeroVariance("values"));
    }
    Ok((n - 1) as f64 * sq / (2.0 * total * dev2))
}

/// Product-moment correlation of `x` and `y`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::ZeroVariance("pearson input"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Lag-one autocorrelation in deviation form:
/// `Σ_{t≥2} (x_t − x̄)(x_{t−1} − x̄) / Σ(x_t − x̄)²`.
pub fn serial_autocorrelation(values: &[f64]) -> Result<f64> {
    let xbar = mean(values);
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..values.len() {
        den += (values[t] - xbar) * (values[t] - xbar);
        if t > 0 {
            num += (values[t] - xbar) * (values[t - 1] - xbar);
        }
    }
    if !(den > 0.0) {
        return Err(Error::ZeroVariance("values"));
    }
    Ok(num / den)
}
