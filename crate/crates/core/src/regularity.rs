//! Exponent estimates for the stochastic convolution: log-log fits of
//! increment moments and pathwise Hölder exponents from dyadic increments.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::report::{Estimate, FitParams, FitReport};
use crate::stats::{fit_line, median, quantile};
use crate::stochastic::{stream_rng, MomentCurve, PathEnsemble};

/// Fewest lattice points accepted by a moment fit.
pub const MIN_MOMENT_POINTS: usize = 8;
/// Fewest dyadic levels accepted by the path estimator.
pub const MIN_LEVELS: u32 = 4;
/// Number of finest levels entering the per-path regression.
pub const REGRESSION_LEVELS: u32 = 5;

/// Slope of `log E‖Δ‖²` against `log(t - s)` over increments in `window`.
/// The value estimates `2β`. Curves with a vanishing moment are reported as
/// degenerate.
pub fn fit_moment_exponent(curve: &MomentCurve, window: (f64, f64)) -> Result<FitReport> {
    let (lo, hi) = window;
    let tol = 1e-9 * hi.abs().max(1e-300);
    let params = FitParams {
        gamma: Some(curve.gamma),
        ..FitParams::default()
    };
    let (x, y): (Vec<f64>, Vec<f64>) = curve
        .increments
        .iter()
        .zip(&curve.values)
        .filter(|(&d, _)| d >= lo - tol && d <= hi + tol)
        .map(|(&d, &v)| (d, v))
        .unzip();
    if x.len() < MIN_MOMENT_POINTS {
        return domain(format!(
            "window [{lo}, {hi}] holds {} lattice points, need at least {MIN_MOMENT_POINTS}",
            x.len()
        ));
    }
    if y.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Ok(FitReport::degenerate(Estimate::MomentExponent, params));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let Some(line) = fit_line(&lx, &ly) else {
        return domain("moment fit needs at least two distinct increments");
    };
    Ok(FitReport::exponent(
        Estimate::MomentExponent,
        params,
        line.slope,
        line.slope_interval(0.95),
    ))
}

/// Norm in which path increments are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathNorm {
    H,
    /// `‖(-A)^γ ·‖`.
    Gamma(f64),
}

impl PathNorm {
    pub fn gamma(self) -> f64 {
        match self {
            PathNorm::H => 0.0,
            PathNorm::Gamma(g) => g,
        }
    }
}

/// Hölder exponent of one path from its dyadic increments.
///
/// `increment(a, b)` is the norm of the increment between nodes `a < b`; the
/// path lives on nodes `0..=last` with `2^levels` dividing `last`. The maximal
/// increment at level `ℓ` (spacing `last / 2^ℓ`) is regressed in `log₂` on `ℓ`
/// over the finest levels; the exponent is minus the slope. `None` when every
/// increment vanishes.
pub fn dyadic_holder_exponent(
    increment: impl Fn(usize, usize) -> f64,
    last: usize,
    levels: u32,
) -> Option<f64> {
    let first = levels.saturating_sub(REGRESSION_LEVELS - 1).max(1);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for level in first..=levels {
        let stride = last >> level;
        let max = (0..1usize << level)
            .map(|k| increment(k * stride, (k + 1) * stride))
            .fold(0.0_f64, f64::max);
        if max > 0.0 {
            x.push(level as f64);
            y.push(max.log2());
        }
    }
    if x.len() < 2 {
        return None;
    }
    fit_line(&x, &y).map(|f| -f.slope)
}

fn check_levels(last: usize, levels: u32) -> Result<()> {
    if levels < MIN_LEVELS {
        return domain(format!(
            "path estimator needs at least {MIN_LEVELS} dyadic levels, got {levels}"
        ));
    }
    if levels >= usize::BITS || !last.is_multiple_of(1usize << levels) {
        return domain(format!(
            "grid with {last} steps does not support {levels} dyadic levels"
        ));
    }
    Ok(())
}

/// Median pathwise Hölder exponent over the ensemble with its interquartile range.
pub fn estimate_path_holder(
    ensemble: &PathEnsemble<'_>,
    norm: PathNorm,
    levels: u32,
) -> Result<FitReport> {
    let last = ensemble.grid().last();
    check_levels(last, levels)?;
    let gamma = norm.gamma();
    let exponents: Vec<f64> = ensemble
        .map(|_, path| {
            dyadic_holder_exponent(|a, b| path.increment_norm(gamma, a, b), last, levels)
        })
        .into_iter()
        .flatten()
        .collect();
    Ok(summarize_exponents(&exponents, gamma))
}

fn summarize_exponents(exponents: &[f64], gamma: f64) -> FitReport {
    let params = FitParams {
        gamma: Some(gamma),
        ..FitParams::default()
    };
    if exponents.is_empty() {
        return FitReport::degenerate(Estimate::PathHolder, params);
    }
    FitReport::exponent(
        Estimate::PathHolder,
        params,
        median(exponents),
        Some((quantile(exponents, 0.25), quantile(exponents, 0.75))),
    )
}

/// Estimator output on exact Ornstein–Uhlenbeck paths `dX = -λX dt + dB` on
/// `[0, 1]` sampled at `2^levels` steps, whose paths are Hölder of every
/// order below 1/2.
pub fn ou_holder_reference(levels: u32, paths: usize, seed: u64) -> Result<FitReport> {
    if !(MIN_LEVELS..=24).contains(&levels) {
        return domain(format!(
            "calibration levels must lie in [{MIN_LEVELS}, 24], got {levels}"
        ));
    }
    if paths == 0 {
        return domain("calibration needs at least one path");
    }
    let lambda = 1.0;
    let n = 1usize << levels;
    let h = 1.0 / n as f64;
    let decay = (-lambda * h).exp();
    let sd = ((1.0 - (-2.0 * lambda * h).exp()) / (2.0 * lambda)).sqrt();
    let exponents: Vec<f64> = (0..paths)
        .into_par_iter()
        .filter_map(|p| {
            let mut rng = stream_rng(seed, p, 0);
            let mut x = vec![0.0; n + 1];
            for i in 0..n {
                let z: f64 = StandardNormal.sample(&mut rng);
                x[i + 1] = decay * x[i] + sd * z;
            }
            dyadic_holder_exponent(|a, b| (x[b] - x[a]).abs(), n, levels)
        })
        .collect();
    Ok(summarize_exponents(&exponents, 0.0))
}

/// Downward bias of the path estimator at `levels`: `1/2` minus its median on
/// exact Ornstein–Uhlenbeck paths.
pub fn holder_bias(levels: u32, paths: usize, seed: u64) -> Result<f64> {
    Ok(0.5 - ou_holder_reference(levels, paths, seed)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::solve_all;
    use crate::grid::StepGrid;
    use crate::noise::NoiseModel;
    use crate::spectral::SpectralModel;
    use crate::stochastic::{increment_pairs, moment_curve, simulate_paths};

    fn curve(values: Vec<f64>, increments: Vec<f64>) -> MomentCurve {
        MomentCurve {
            gamma: 0.0,
            pairs: vec![(0, 0); values.len()],
            increments,
            values,
        }
    }

    #[test]
    fn power_law_curve_gives_its_exponent() {
        let d: Vec<f64> = (1..=10).map(|k| 0.01 * k as f64).collect();
        let v: Vec<f64> = d.iter().map(|x| 3.0 * x.powf(0.7)).collect();
        let fit = fit_moment_exponent(&curve(v, d), (0.0, 1.0)).unwrap();
        assert!((fit.value - 0.7).abs() < 1e-12);
        let (lo, hi) = fit.interval.unwrap();
        assert!(lo <= fit.value && fit.value <= hi);
    }

    #[test]
    fn zero_curve_is_degenerate_and_small_windows_rejected() {
        let d: Vec<f64> = (1..=10).map(|k| 0.01 * k as f64).collect();
        let fit = fit_moment_exponent(&curve(vec![0.0; 10], d.clone()), (0.0, 1.0)).unwrap();
        assert!(fit.degenerate && fit.diverged);
        assert!(fit_moment_exponent(&curve(vec![1.0; 10], d), (0.0, 0.05)).is_err());
    }

    #[test]
    fn ou_moment_slope_is_one() {
        let model = SpectralModel::semigroup_only(1, 1.0).unwrap();
        let grid = StepGrid::new(1.0, 512, 1).unwrap();
        let fs = solve_all(&model, &grid).unwrap();
        let noise = NoiseModel::new(vec![1.0], vec![1.0]).unwrap();
        let pairs = increment_pairs(256, 4, 128, 16);
        let c = moment_curve(&fs, &noise, 0.0, &pairs).unwrap();
        let fit = fit_moment_exponent(&c, (4.0 * grid.step(), 0.25)).unwrap();
        assert!((fit.value - 1.0).abs() < 0.05, "{}", fit.value);
    }

    #[test]
    fn holder_of_smooth_and_frozen_series() {
        // Lipschitz series: exponent 1
        let e = dyadic_holder_exponent(|a, b| (b - a) as f64, 1024, 10).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        assert_eq!(dyadic_holder_exponent(|_, _| 0.0, 1024, 10), None);
    }

    #[test]
    fn frozen_ensemble_is_degenerate() {
        let model = SpectralModel::heat(2);
        let fs = solve_all(&model, &StepGrid::new(1.0, 64, 1).unwrap()).unwrap();
        let noise = NoiseModel::inverse_square(2)
            .unwrap()
            .scaled_input(0.0)
            .unwrap();
        let ens = simulate_paths(&fs, &noise, 1, 3).unwrap();
        let fit = estimate_path_holder(&ens, PathNorm::H, 6).unwrap();
        assert!(fit.degenerate);
        assert!(estimate_path_holder(&ens, PathNorm::H, 3).is_err());
        assert!(estimate_path_holder(&ens, PathNorm::H, 7).is_err());
    }

    #[test]
    fn ou_reference_is_biased_below_one_half() {
        let r = ou_holder_reference(10, 200, 5).unwrap();
        assert!(r.value > 0.3 && r.value < 0.5, "{}", r.value);
        let (q1, q3) = r.interval.unwrap();
        assert!(q1 <= r.value && r.value <= q3);
    }
}
