//! Distributional checks of the simulated stochastic convolution.

use delayconv::regularity::ou_holder_reference;
use delayconv::{second_moment, simulate_paths, solve_all, NoiseModel, SpectralModel, StepGrid};

#[test]
fn mode_marginals_are_gaussian() {
    let model = SpectralModel::heat(8);
    let grid = StepGrid::new(1.0, 64, 2).unwrap();
    let fs = solve_all(&model, &grid).unwrap();
    let noise = NoiseModel::inverse_square(8).unwrap();
    let paths = 4000;
    let ensemble = simulate_paths(&fs, &noise, 5, paths).unwrap();
    let node = grid.last();
    let samples = ensemble.map(|_, p| p.values.iter().map(|w| w[node]).collect::<Vec<_>>());
    for j in 0..8 {
        let x: Vec<f64> = samples.iter().map(|s| s[j]).collect();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        let kurtosis = m4 / (m2 * m2);
        // standard error of the sample kurtosis of a Gaussian is √(24/n)
        assert!(
            (kurtosis - 3.0).abs() < 4.0 * (24.0 / n).sqrt(),
            "mode {j}: kurtosis {kurtosis}"
        );
        let skew = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n / m2.powf(1.5);
        assert!(
            skew.abs() < 4.0 * (6.0 / n).sqrt(),
            "mode {j}: skewness {skew}"
        );
    }
}

#[test]
fn ensemble_mean_square_matches_isometry_at_every_node() {
    let model = SpectralModel::heat(4);
    let grid = StepGrid::new(1.0, 32, 2).unwrap();
    let fs = solve_all(&model, &grid).unwrap();
    let noise = NoiseModel::inverse_square(4).unwrap();
    let ensemble = simulate_paths(&fs, &noise, 17, 3000).unwrap();
    let pairs: Vec<(usize, usize)> = (8..=64).step_by(8).map(|t| (0, t)).collect();
    let mc = ensemble.increment_moments(0.0, &pairs);
    let within = pairs
        .iter()
        .zip(&mc)
        .filter(|(&(s, t), &(mean, se))| {
            (mean - second_moment(&fs, &noise, 0.0, s, t).unwrap()).abs() <= 3.0 * se
        })
        .count();
    assert!(
        within as f64 >= 0.95 * pairs.len() as f64 - 1e-9,
        "{within}/{}",
        pairs.len()
    );
}

#[test]
fn ou_estimator_approaches_one_half_from_below() {
    let estimates: Vec<f64> = [6, 8, 10, 12]
        .into_iter()
        .map(|levels| ou_holder_reference(levels, 2000, 3).unwrap().value)
        .collect();
    assert!(estimates.iter().all(|&b| b < 0.5), "{estimates:?}");
    assert!(
        estimates.windows(2).all(|w| w[1] > w[0] - 0.005),
        "{estimates:?}"
    );
}
