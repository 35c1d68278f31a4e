#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdw_core::dataio::Column;
use sdw_core::{Dataset, DistanceMatrix, SquareMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Euclidean distances between `n` random points in the unit square.
pub fn random_distances(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let m = SquareMatrix::from_fn(n, |i, j| {
        ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
    });
    DistanceMatrix::new(labels(n), m).unwrap()
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("loc{i:03}")).collect()
}

/// Random values shifted to zero mean.
pub fn centered(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter().map(|x| x - mean).collect()
}

/// `y = 2x + noise` on random locations.
pub fn linear_instance(rng: &mut ChaCha8Rng, n: usize) -> (Dataset, DistanceMatrix) {
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 2.0 * v + rng.random_range(-1.0..1.0))
        .collect();
    let data = Dataset::new(
        labels(n),
        vec![
            Column {
                name: "x".into(),
                values: x,
            },
            Column {
                name: "y".into(),
                values: y,
            },
        ],
    )
    .unwrap();
    (data, random_distances(rng, n))
}
