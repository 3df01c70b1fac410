mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use spnorm::iid_tests::{mardia_measures, Sample};
use spnorm::mc_harness::{modified_band_depth, CurveBundle};
use spnorm::random_fields::LatticeSpec;
use spnorm::spatial_uit::{bh_procedure, standardize, variance_estimators, GriddedSeries, KernelSpec};
use support::oracles;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn mardia_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (n, p) in [(5, 1), (12, 2), (30, 3), (50, 4), (50, 2)] {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..p)
                    .map(|_| rng.sample::<f64, _>(Exp1) + 0.3 * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        let (b1, b2) = mardia_measures(&Sample::from_rows(&rows).unwrap()).unwrap();
        let (o1, o2) = oracles::mardia(&rows);
        assert!(
            rel(b1, o1) < 1e-10 && rel(b2, o2) < 1e-10,
            "n={n} p={p}: ({b1}, {b2}) vs ({o1}, {o2})"
        );
    }
}

#[test]
fn variance_estimators_match_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for (nx, ny, bx, by) in [
        (3, 3, 1, 1),
        (5, 4, 2, 3),
        (8, 8, 3, 3),
        (12, 12, 2, 2),
        (12, 9, 5, 4),
        (12, 12, 11, 11),
    ] {
        let spec = LatticeSpec::new(nx, ny, 1.0).unwrap();
        // Smoothed noise so that the higher lags matter.
        let raw: Vec<f64> = (0..nx * ny).map(|_| rng.sample(StandardNormal)).collect();
        let vals: Vec<f64> = (0..nx * ny)
            .map(|i| raw[i] + 0.8 * raw[(i + 1) % (nx * ny)] + 3.0)
            .collect();
        let z = standardize(&GriddedSeries::new(spec, vals.clone()).unwrap()).unwrap();
        let est = variance_estimators(&z, &KernelSpec::bartlett(bx, by).unwrap()).unwrap();
        let (o3, o4) = oracles::variance_estimators(&vals, nx, ny, (bx, by));
        if o3 > 0.0 {
            assert!(
                rel(est.phi_s2, o3) < 1e-10,
                "{nx}x{ny} b=({bx},{by}): {} vs {o3}",
                est.phi_s2
            );
        } else {
            assert!(est.skewness_fallback);
        }
        assert!(rel(est.phi_k2, o4) < 1e-10);
    }
}

#[test]
fn bh_matches_threshold_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for trial in 0..2000 {
        let k = rng.random_range(1..=20);
        let p: Vec<f64> = (0..k)
            .map(|_| match rng.random_range(0..4) {
                0 => rng.random::<f64>() * 0.01,
                1 => (rng.random_range(0..5) as f64) / 100.0,
                _ => rng.random::<f64>(),
            })
            .collect();
        let alpha = [0.01, 0.05, 0.1, 0.2][trial % 4];
        let got = bh_procedure(&p, alpha).unwrap();
        let (r, rejected) = oracles::bh(&p, alpha);
        assert_eq!((got.r, &got.rejected), (r, &rejected), "p={p:?} alpha={alpha}");
    }
}

#[test]
fn band_depth_matches_pair_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for (n, m) in [(3, 1), (10, 5), (7, 12), (10, 30)] {
        let curves: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| (rng.random_range(0..6) as f64) + rng.random::<f64>() * 0.5)
                    .collect()
            })
            .collect();
        let bundle = CurveBundle::new("r", (0..m).map(|j| j as f64).collect(), curves.clone()).unwrap();
        let got = modified_band_depth(&bundle).unwrap();
        for (a, b) in got.iter().zip(oracles::band_depth(&curves)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
