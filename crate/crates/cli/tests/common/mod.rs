#![allow(dead_code)]

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdw_core::dataio::Column;
use sdw_core::{Dataset, DistanceMatrix, SquareMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sdw<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_sdw"))
        .args(args)
        .output()
        .expect("spawn sdw")
}

pub fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Euclidean distances between random points in the unit square, labeled with `labels`.
pub fn random_distances(rng: &mut ChaCha8Rng, labels: &[String]) -> DistanceMatrix {
    let pts: Vec<(f64, f64)> = labels
        .iter()
        .map(|_| (rng.random(), rng.random()))
        .collect();
    let m = SquareMatrix::from_fn(labels.len(), |i, j| {
        ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
    });
    DistanceMatrix::new(labels.to_vec(), m).unwrap()
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("site{i:03}")).collect()
}

/// `y = 3 + 2x + noise` on `n` random locations.
pub fn linear_instance(rng: &mut ChaCha8Rng, n: usize) -> (Dataset, DistanceMatrix) {
    let labels = labels(n);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 3.0 + 2.0 * v + rng.random_range(-1.0..1.0))
        .collect();
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
    .unwrap();
    let dist = random_distances(rng, &labels);
    (data, dist)
}

pub fn write_inputs(dir: &Path, data: &Dataset, dist: &DistanceMatrix) -> (PathBuf, PathBuf) {
    let dp = dir.join("data.csv");
    let mp = dir.join("dist.csv");
    data.write_csv(File::create(&dp).unwrap()).unwrap();
    dist.write_csv(File::create(&mp).unwrap()).unwrap();
    (dp, mp)
}

pub fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "sdw failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of a top-level or nested numeric field in canonical JSON output,
/// located by its key (first occurrence).
pub fn json_number(json: &str, key: &str) -> f64 {
    let needle = format!("\"{key}\": ");
    let start = json
        .find(&needle)
        .unwrap_or_else(|| panic!("no {key} in {json}"))
        + needle.len();
    json[start..]
        .split([',', '\n', '}'])
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}
