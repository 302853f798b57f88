//! Monte-Carlo checks of the coherence estimator against the speckle
//! generator, which prescribes the exact population coherence of every pair.

use chrono::NaiveDate;
use sarccd::{
    build_stack, ccd, estimate_coherence, rasterize_footprint, AssetFootprint, CoherenceField,
    DamagePatch, DamageScenario, EstimatorWindow, GeoTransform,
};

fn dates() -> [NaiveDate; 3] {
    [
        NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
        NaiveDate::from_ymd_opt(2024, 1, 13).unwrap(),
        NaiveDate::from_ymd_opt(2024, 2, 6).unwrap(),
    ]
}

/// Spatial mean of the estimated coherence for a constant-gamma pair.
fn spatial_mean(gamma: f64, size: usize, window: EstimatorWindow, seed: u64) -> f64 {
    let field = CoherenceField::constant(size, size, gamma).unwrap();
    let (a, b) = generate(gamma, &field, seed);
    let coh = estimate_coherence(&a, &b, window).unwrap();
    let (sum, count) = coh
        .valid_values()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    assert_eq!(count, size * size, "gamma {gamma}: all pixels must be valid");
    sum / count as f64
}

fn generate(
    _gamma: f64,
    field: &CoherenceField,
    seed: u64,
) -> (sarccd::ComplexScene, sarccd::ComplexScene) {
    sarccd::generate_pair(field, seed, &GeoTransform::identity(), dates()[0], dates()[1]).unwrap()
}

/// Mean over several seeds, so convergence comparisons are not dominated by
/// single-realization noise.
fn seed_averaged_mean(gamma: f64, size: usize, window: EstimatorWindow, seeds: u64) -> f64 {
    (0..seeds)
        .map(|seed| spatial_mean(gamma, size, window, 1000 + seed))
        .sum::<f64>()
        / seeds as f64
}

#[test]
fn estimate_tracks_the_prescribed_coherence() {
    // Single field, default-sized problem from the estimator contract: the
    // interior mean for gamma 0.5 with a 9x9 window stays within 0.05.
    let window = EstimatorWindow::new(9, 9).unwrap();
    let field = CoherenceField::constant(256, 256, 0.5).unwrap();
    let (a, b) = generate(0.5, &field, 99);
    let coh = estimate_coherence(&a, &b, window).unwrap();
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in 4..252 {
        for col in 4..252 {
            sum += coh.value(row, col);
            count += 1;
        }
    }
    let interior_mean = sum / count as f64;
    assert!(
        (interior_mean - 0.5).abs() < 0.05,
        "interior mean {interior_mean}"
    );
}

#[test]
fn spatial_mean_is_monotone_in_gamma_for_every_window() {
    let gammas = [0.0, 0.2, 0.5, 0.9];
    for (rows, cols) in [(3, 3), (9, 9), (21, 21)] {
        let window = EstimatorWindow::new(rows, cols).unwrap();
        let means: Vec<f64> = gammas
            .iter()
            .map(|&g| seed_averaged_mean(g, 128, window, 3))
            .collect();
        for pair in means.windows(2) {
            assert!(
                pair[0] < pair[1],
                "window {rows}x{cols}: means {means:?} not monotone"
            );
        }
    }
}

#[test]
fn spatial_mean_converges_toward_gamma_as_the_window_grows() {
    let windows = [
        EstimatorWindow::new(3, 3).unwrap(),
        EstimatorWindow::new(9, 9).unwrap(),
        EstimatorWindow::new(21, 21).unwrap(),
    ];
    for gamma in [0.2, 0.5, 0.9] {
        let errors: Vec<f64> = windows
            .iter()
            .map(|&w| (seed_averaged_mean(gamma, 128, w, 3) - gamma).abs())
            .collect();
        assert!(
            errors[2] <= errors[0] && errors[1] <= errors[0],
            "gamma {gamma}: errors {errors:?} do not shrink with window area"
        );
        assert!(errors[2] < 0.02, "gamma {gamma}: final error {}", errors[2]);
    }
}

#[test]
fn zero_coherence_bias_shrinks_with_window_area() {
    // Fully decorrelated pairs: the estimator's positive bias is a pure
    // small-sample effect and must decay with the number of averaged samples.
    let m3 = spatial_mean(0.0, 256, EstimatorWindow::new(3, 3).unwrap(), 7);
    let m9 = spatial_mean(0.0, 256, EstimatorWindow::new(9, 9).unwrap(), 7);
    let m21 = spatial_mean(0.0, 256, EstimatorWindow::new(21, 21).unwrap(), 7);
    assert!(m9 < 0.25, "9x9 zero-coherence mean {m9}");
    assert!(m3 > m9 && m9 > m21, "means {m3} {m9} {m21} not decreasing");
}

#[test]
fn pooled_per_pixel_correlation_approaches_gamma() {
    // Pool one fixed pixel across many seeds: the empirical correlation
    // magnitude estimates the prescribed population coherence directly,
    // without windowing.
    let pixel = (3usize, 2usize);
    let field_size = 8usize;
    for gamma in [0.3, 0.7] {
        let field = CoherenceField::constant(field_size, field_size, gamma).unwrap();
        let correlation = |seeds: std::ops::Range<u64>| -> f64 {
            let mut cross_re = 0.0;
            let mut cross_im = 0.0;
            let mut pow_a = 0.0;
            let mut pow_b = 0.0;
            for seed in seeds {
                let (a, b) = generate(gamma, &field, seed);
                let sa = a.sample(pixel.0, pixel.1);
                let sb = b.sample(pixel.0, pixel.1);
                let (ar, ai) = (sa.re as f64, sa.im as f64);
                let (br, bi) = (sb.re as f64, sb.im as f64);
                cross_re += ar * br + ai * bi;
                cross_im += ai * br - ar * bi;
                pow_a += ar * ar + ai * ai;
                pow_b += br * br + bi * bi;
            }
            (cross_re * cross_re + cross_im * cross_im).sqrt() / (pow_a * pow_b).sqrt()
        };
        let err_small = (correlation(0..200) - gamma).abs();
        let err_big = (correlation(0..20_000) - gamma).abs();
        assert!(err_big < 0.02, "gamma {gamma}: pooled error {err_big}");
        assert!(
            err_big <= err_small + 0.005,
            "gamma {gamma}: error grew from {err_small} to {err_big}"
        );
    }
}

#[test]
fn lowering_damaged_gamma_never_lowers_expected_patch_ccd_max() {
    let gt = GeoTransform::identity();
    let patch_ring = vec![
        (16.0, -16.0),
        (48.0, -16.0),
        (48.0, -48.0),
        (16.0, -48.0),
        (16.0, -16.0),
    ];
    let window = EstimatorWindow::default();
    let seeds = 30u64;
    let mut means = Vec::new();
    for damaged in [0.6, 0.4, 0.2] {
        let mut total = 0.0;
        for seed in 0..seeds {
            let scenario = DamageScenario {
                background_gamma: 0.8,
                patches: vec![DamagePatch {
                    footprint: AssetFootprint::new("patch", patch_ring.clone()).unwrap(),
                    damaged_gamma: damaged,
                }],
                seed: 5000 + seed,
            };
            let stack = build_stack(&scenario, 64, 64, &gt, dates()).unwrap();
            let pre = estimate_coherence(&stack.pre1, &stack.pre2, window).unwrap();
            let post = estimate_coherence(&stack.pre2, &stack.post, window).unwrap();
            let change = ccd(&pre, &post).unwrap();
            let mask =
                rasterize_footprint(&scenario.patches[0].footprint, &gt, 64, 64).unwrap();
            let stats = sarccd::asset_statistics(&change, &mask).unwrap();
            total += stats.max;
        }
        means.push(total / seeds as f64);
    }
    assert!(
        means[0] < means[1] && means[1] < means[2],
        "expected patch CCD max to rise as damage deepens: {means:?}"
    );
}
