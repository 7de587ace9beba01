//! Sample paths of the stochastic convolution driven by a Q-Wiener process
//! with covariance eigenvalues `1/j²`.

use delayconv::{simulate_paths, solve_all, NoiseModel, SpectralModel, StepGrid};

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat_default();
    let grid = StepGrid::new(1.0, 256, 2)?;
    let fs = solve_all(&model, &grid)?;
    let noise = NoiseModel::inverse_square(64)?;
    println!(
        "noise trace {:.6}, neglected tail {:.3e}",
        noise.trace(),
        noise.tail().unwrap_or(0.0)
    );

    let ensemble = simulate_paths(&fs, &noise, 2024, 8)?;
    let stride = grid.last() / 8;
    print!("{:>6}", "t");
    for p in 0..ensemble.len() {
        print!(" {:>8}", format!("path {p}"));
    }
    println!();
    let paths =
        ensemble.map(|_, path| (0..=8).map(|k| path.h_norm(k * stride)).collect::<Vec<_>>());
    for k in 0..=8 {
        print!("{:>6.3}", grid.node(k * stride));
        for norms in &paths {
            print!(" {:>8.4}", norms[k]);
        }
        println!();
    }
    Ok(())
}
