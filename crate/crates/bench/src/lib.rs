//! Synthetic inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdw_core::dataio::Column;
use sdw_core::{Dataset, DistanceMatrix, SquareMatrix};

/// `n` random points in the unit square with `y = 2x + noise`.
pub fn random_instance(n: usize, seed: u64) -> (Dataset, DistanceMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 2.0 * v + rng.random_range(-1.0..1.0))
        .collect();
    let labels: Vec<String> = (0..n).map(|i| format!("s{i:04}")).collect();
    let dist = SquareMatrix::from_fn(n, |i, j| {
        let (a, b) = (pts[i], pts[j]);
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    });
    let data = Dataset::new(
        labels.clone(),
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
    .expect("valid synthetic dataset");
    (
        data,
        DistanceMatrix::new(labels, dist).expect("valid synthetic distances"),
    )
}
