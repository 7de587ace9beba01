//! Regularity exponents of the stochastic convolution: log-log slopes of the
//! increment moments and calibrated pathwise Hölder exponents, in H and in
//! the `(-A)^¼` norm.

use delayconv::regularity::{estimate_path_holder, fit_moment_exponent, holder_bias, PathNorm};
use delayconv::stochastic::{increment_pairs, moment_curve};
use delayconv::{simulate_paths, solve_all, NoiseModel, SpectralModel, StepGrid};

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat_default();
    let grid = StepGrid::new(1.0, 1024, 1)?;
    let fs = solve_all(&model, &grid)?;
    let levels = 10;
    let bias = holder_bias(levels, 2000, 0)?;
    println!("estimator bias at {levels} levels on Ornstein–Uhlenbeck paths: {bias:.3}");

    let pairs = increment_pairs(512, 4, 256, 16);
    let window = (4.0 * grid.step(), 0.25);
    for (label, noise, norm) in [
        ("H, Q = 1/j²", NoiseModel::inverse_square(64)?, PathNorm::H),
        (
            "(-A)^¼, Q = j^-1.05",
            NoiseModel::power_law(64, 1.05, 1.0)?,
            PathNorm::Gamma(0.25),
        ),
    ] {
        let curve = moment_curve(&fs, &noise, norm.gamma(), &pairs)?;
        let slope = fit_moment_exponent(&curve, window)?;
        let ensemble = simulate_paths(&fs, &noise, 1, 200)?;
        let path = estimate_path_holder(&ensemble, norm, levels)?;
        let (lo, hi) = path.interval.unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{label:<20} moment slope {:.3}  median path exponent {:.3} (IQR {lo:.3}..{hi:.3})",
            slope.value, path.value
        );
    }
    Ok(())
}
