//! Second moments of increments by the Itô isometry against Monte Carlo, and
//! the exact Gaussian sampler against the time-stepped paths.

use delayconv::stats::{ks_critical_value, ks_statistic};
use delayconv::{
    second_moment, simulate_paths, solve_all, ExactGaussianSampler, NoiseModel, SpectralModel,
    StepGrid,
};

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat_default();
    let grid = StepGrid::new(1.0, 64, 2)?;
    let fs = solve_all(&model, &grid)?;
    let noise = NoiseModel::inverse_square(64)?;
    let paths = 2000;
    let ensemble = simulate_paths(&fs, &noise, 11, paths)?;
    let pairs = [
        (0, 128),
        (64, 128),
        (32, 64),
        (100, 108),
        (10, 14),
        (40, 104),
    ];
    let mc = ensemble.increment_moments(0.0, &pairs);

    println!(
        "{:>5} {:>5} {:>10} {:>10} {:>9} {:>6}",
        "s", "t", "isometry", "MC", "stderr", "z"
    );
    for (&(s, t), &(mean, se)) in pairs.iter().zip(&mc) {
        let exact = second_moment(&fs, &noise, 0.0, s, t)?;
        println!(
            "{:>5.3} {:>5.3} {exact:>10.6} {mean:>10.6} {se:>9.2e} {:>6.2}",
            grid.node(s),
            grid.node(t),
            (mean - exact) / se
        );
    }

    let node = grid.last();
    let sampler = ExactGaussianSampler::new(&fs, &noise, &[node])?;
    let exact: Vec<f64> = (0..paths)
        .map(|i| sampler.sample(99, i).values[0][0])
        .collect();
    let stepped: Vec<f64> = ensemble.map(|_, p| p.values[0][node]);
    println!(
        "\nKS statistic on mode 1 at t = {}: {:.4} (1% critical value {:.4})",
        grid.node(node),
        ks_statistic(&exact, &stepped),
        ks_critical_value(paths, paths, 0.01)
    );
    Ok(())
}
