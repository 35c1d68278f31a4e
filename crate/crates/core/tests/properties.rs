//! Invariants of the order-free statistics.

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use sdw_core::autocorr::{
    arci, decomposition_residual, durbin_watson, geary_c, rci, sai, scatter_series,
    through_origin_slope,
};
use sdw_core::regression::{Mode, StandardizedResiduals};
use sdw_core::weights::{even_weights, weights_from_distances, WeightSpec};

#[test]
fn even_weight_closed_forms() {
    let mut rng = common::rng(77);
    for n in [3usize, 10, 100] {
        let w = even_weights(n).unwrap();
        for _ in 0..5 {
            let eps = common::centered(&mut rng, n);
            let ip = sai(
                &StandardizedResiduals::from_residuals(&eps, Mode::Population).unwrap(),
                &w,
            )
            .unwrap();
            let is = sai(
                &StandardizedResiduals::from_residuals(&eps, Mode::Sample).unwrap(),
                &w,
            )
            .unwrap();
            let c = geary_c(&eps, &w).unwrap();
            assert!(
                (ip + 1.0 / (n as f64 - 1.0)).abs() <= 1e-10,
                "n={n} I_p={ip}"
            );
            assert!((is + 1.0 / n as f64).abs() <= 1e-10, "n={n} I_s={is}");
            assert!((c - 1.0).abs() <= 1e-10);
            assert!((arci(c).unwrap() - 2.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn order_free_statistics_ignore_permutation_but_dw_does_not() {
    let mut rng = common::rng(29);
    let n = 29;
    let dm = common::random_distances(&mut rng, n);
    let w = weights_from_distances(&dm, &WeightSpec::default()).unwrap();
    let eps = common::centered(&mut rng, n);
    let e = StandardizedResiduals::from_residuals(&eps, Mode::Sample).unwrap();
    let base_sai = sai(&e, &w).unwrap();
    let base_c = geary_c(&eps, &w).unwrap();
    let base_slope = scatter_series(&e, &w).unwrap().slope;

    let mut dws = Vec::new();
    let mut mapping: Vec<usize> = (0..n).collect();
    for _ in 0..200 {
        mapping.shuffle(&mut rng);
        let wp = w.reorder(&mapping);
        let ep = e.permuted(&mapping);
        let epsp: Vec<f64> = mapping.iter().map(|&i| eps[i]).collect();
        assert!((sai(&ep, &wp).unwrap() - base_sai).abs() < 1e-12);
        assert!((rci(sai(&ep, &wp).unwrap()) - rci(base_sai)).abs() < 1e-12);
        assert!((geary_c(&epsp, &wp).unwrap() - base_c).abs() < 1e-12);
        assert!(
            (arci(geary_c(&epsp, &wp).unwrap()).unwrap() - arci(base_c).unwrap()).abs() < 1e-12
        );
        assert!((scatter_series(&ep, &wp).unwrap().slope - base_slope).abs() < 1e-12);
        dws.push(durbin_watson(&epsp).unwrap());
    }
    let mean = dws.iter().sum::<f64>() / dws.len() as f64;
    let sd = (dws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (dws.len() - 1) as f64).sqrt();
    assert!(sd > 0.05, "DW sd {sd}");
}

fn instance() -> impl Strategy<Value = (u64, usize, bool)> {
    (any::<u64>(), 2usize..25, any::<bool>())
}

proptest! {
    #[test]
    fn exact_identities((seed, n, sample) in instance(), exp_kernel in any::<bool>()) {
        let mut rng = common::rng(seed);
        let dm = common::random_distances(&mut rng, n);
        let spec = if exp_kernel { WeightSpec::exponential() } else { WeightSpec::power(rng.random_range(0.5..2.5)).unwrap() };
        let w = weights_from_distances(&dm, &spec).unwrap();
        let eps = common::centered(&mut rng, n);
        let mode = if sample { Mode::Sample } else { Mode::Population };
        let e = StandardizedResiduals::from_residuals(&eps, mode).unwrap();

        let i = sai(&e, &w).unwrap();
        let c = geary_c(&eps, &w).unwrap();
        prop_assert!((rci(i) - 2.0 * (1.0 - i)).abs() <= 1e-12);
        prop_assert!((arci(c).unwrap() - 2.0 * c).abs() <= 1e-12);
        prop_assert!(decomposition_residual(&e, &w).unwrap().abs() <= 1e-12);

        let s = scatter_series(&e, &w).unwrap();
        prop_assert!((through_origin_slope(&s.x, &s.y_observed) - s.slope).abs() <= 1e-12);
        for (t, x) in s.y_trend.iter().zip(&s.x) {
            prop_assert!((t - s.slope * x).abs() <= 1e-12);
        }
    }

    #[test]
    fn geary_and_dw_scale_invariant((seed, n, _) in instance(), c in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0]) {
        let mut rng = common::rng(seed);
        let dm = common::random_distances(&mut rng, n);
        let w = weights_from_distances(&dm, &WeightSpec::default()).unwrap();
        let eps = common::centered(&mut rng, n);
        let scaled: Vec<f64> = eps.iter().map(|x| c * x).collect();
        prop_assert!((durbin_watson(&scaled).unwrap() - durbin_watson(&eps).unwrap()).abs() <= 1e-12);
        prop_assert!((geary_c(&scaled, &w).unwrap() - geary_c(&eps, &w).unwrap()).abs() <= 1e-12);
    }
}
