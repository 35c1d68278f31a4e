//! Spatial contiguity from distances and its normalization to a unit-sum
//! weight matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::dataio::DistanceMatrix;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Distance-decay kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `v = r^(−gamma)`
    InversePower { gamma: f64 },
    /// `v = exp(−2r / r̄)`, `r̄` the mean off-diagonal distance.
    NegativeExponential,
    /// `v = 1` if `r ≤ d0`, else 0.
    Step { d0: f64 },
}

/// Parsed form of `power[:gamma]`, `exp`, or `step:d0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub kernel: Kernel,
}

impl WeightSpec {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidWeightSpec(format!("power:{gamma}")));
        }
        Ok(Self {
            kernel: Kernel::InversePower { gamma },
        })
    }

    pub fn exponential() -> Self {
        Self {
            kernel: Kernel::NegativeExponential,
        }
    }

    pub fn step(d0: f64) -> Result<Self> {
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(Error::InvalidWeightSpec(format!("step:{d0}")));
        }
        Ok(Self {
            kernel: Kernel::Step { d0 },
        })
    }
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self {
            kernel: Kernel::InversePower { gamma: 1.0 },
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidWeightSpec(s.to_owned());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<f64>().map_err(|_| bad())?)),
            None => (s, None),
        };
        match (name, arg) {
            ("power", g) => Self::power(g.unwrap_or(1.0)).map_err(|_| bad()),
            ("exp", None) => Ok(Self::exponential()),
            ("step", Some(d0)) => Self::step(d0).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kernel {
            Kernel::InversePower { gamma } => write!(f, "power:{gamma}"),
            Kernel::NegativeExponential => f.write_str("exp"),
            Kernel::Step { d0 } => write!(f, "step:{d0}"),
        }
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Symmetric, zero-diagonal, nonnegative nearness matrix with its total.
#[derive(Debug, Clone, PartialEq)]
pub struct ContiguityMatrix {
    values: SquareMatrix,
    total: f64,
}

impl ContiguityMatrix {
    /// Validates a user-supplied contiguity matrix.
    pub fn new(values: SquareMatrix) -> Result<Self> {
        let n = values.n();
        for i in 0..n {
            if values.get(i, i) != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "contiguity diagonal at {i} is nonzero"
                )));
            }
            for j in (i + 1)..n {
                let (a, b) = (values.get(i, j), values.get(j, i));
                if a != b || !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "contiguity entries ({i},{j}) must be equal, finite and nonnegative"
                    )));
                }
            }
        }
        let total = values.sum();
        if !(total > 0.0) {
            return Err(Error::EmptyWeights);
        }
        Ok(Self { values, total })
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    /// `T = ΣΣ v_ij`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }
}

/// Unit-sum spatial weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    values: SquareMatrix,
    row_sums: Vec<f64>,
}

impl WeightMatrix {
    fn from_values(values: SquareMatrix) -> Self {
        let row_sums = values.rows().map(|r| r.iter().sum()).collect();
        Self { values, row_sums }
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    /// Same weights over reordered locations.
    pub fn reorder(&self, order: &[usize]) -> Self {
        Self::from_values(self.values.reorder(order))
    }
}

pub fn contiguity_from_distances(
    dm: &DistanceMatrix,
    spec: &WeightSpec,
) -> Result<ContiguityMatrix> {
    let n = dm.n();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    if !matches!(spec.kernel, Kernel::Step { .. }) {
        for i in 0..n {
            for j in (i + 1)..n {
                if dm.get(i, j) == 0.0 {
                    return Err(Error::ZeroDistance {
                        a: dm.labels()[i].clone(),
                        b: dm.labels()[j].clone(),
                    });
                }
            }
        }
    }

    let kernel: Box<dyn Fn(f64) -> f64> = match spec.kernel {
        Kernel::InversePower { gamma } => {
            if gamma == 1.0 {
                Box::new(|r: f64| 1.0 / r)
            } else {
                Box::new(move |r: f64| r.powf(-gamma))
            }
        }
        Kernel::NegativeExponential => {
            let off_diagonal = dm.values().sum();
            let rbar = off_diagonal / (n * (n - 1)) as f64;
            Box::new(move |r: f64| (-2.0 * r / rbar).exp())
        }
        Kernel::Step { d0 } => Box::new(move |r: f64| if r <= d0 { 1.0 } else { 0.0 }),
    };

    // Upper triangle only, mirrored, so the result is exactly symmetric.
    let mut values = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = kernel(dm.get(i, j));
            values.set(i, j, v);
            values.set(j, i, v);
        }
    }
    let total = values.sum();
    if !(total > 0.0) {
        return Err(Error::EmptyWeights);
    }
    Ok(ContiguityMatrix { values, total })
}

/// `w_ij = v_ij / T`.
pub fn normalize(v: &ContiguityMatrix) -> Result<WeightMatrix> {
    if !(v.total > 0.0) {
        return Err(Error::EmptyWeights);
    }
    let t = v.total;
    Ok(WeightMatrix::from_values(v.values.map(|x| x / t)))
}

/// Homogeneous weights: `1 / (n(n − 1))` off the diagonal.
pub fn even_weights(n: usize) -> Result<WeightMatrix> {
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let w = 1.0 / (n * (n - 1)) as f64;
    Ok(WeightMatrix::from_values(SquareMatrix::from_fn(
        n,
        |i, j| if i == j { 0.0 } else { w },
    )))
}

pub fn weights_from_distances(dm: &DistanceMatrix, spec: &WeightSpec) -> Result<WeightMatrix> {
    normalize(&contiguity_from_distances(dm, spec)?)
}
