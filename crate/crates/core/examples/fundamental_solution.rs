//! Fundamental solution of the default heat model, and the second-order
//! convergence of the scheme against the closed form for a pure delay.

use delayconv::spectral::{DelayKernel, Spectrum, Symbol};
use delayconv::{solve_all, solve_mode, SpectralModel, StepGrid};

/// `g(t)` on `[0, 4r]` for `g' = -λg + cλ^μ g(t - r)`, `g(0) = 1`, zero history.
fn pure_delay_closed_form(lambda: f64, c: f64, r: f64, t: f64) -> f64 {
    // g(t) = e^{-λt} Σ_k (b e^{λr})^k (t - kr)_+^k / k!
    let b = c * lambda.sqrt();
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..4 {
        if k > 0 {
            fact *= k as f64;
        }
        let x = t - k as f64 * r;
        if x < 0.0 {
            break;
        }
        sum += (b * (lambda * r).exp()).powi(k) * x.powi(k) / fact;
    }
    (-lambda * t).exp() * sum
}

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat_default();
    let grid = StepGrid::new(1.0, 512, 3)?;
    let fs = solve_all(&model, &grid)?;
    println!(
        "default heat model, {} modes, h = {}",
        fs.mode_count(),
        grid.step()
    );
    println!("{:>6} {:>14} {:>14} {:>14}", "t", "g_1", "g_2", "g_8");
    for t in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let i = grid.index_of(t).expect("t is a node");
        println!(
            "{t:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
            fs.modes[0].values[i], fs.modes[1].values[i], fs.modes[7].values[i]
        );
    }

    let lambda = 4.0;
    let pure = SpectralModel::new(
        Spectrum::Custom(vec![lambda]),
        Symbol::new(0.5, 0.5),
        Symbol::new(0.0, 0.5),
        1.0,
        DelayKernel::zero(1.0),
    )?;
    println!("\nmax error on [3r, 4r] for λ = {lambda}:");
    let mut previous: Option<f64> = None;
    for m in [64, 128, 256, 512] {
        let grid = StepGrid::new(1.0, m, 4)?;
        let g = solve_mode(lambda, &pure, &grid)?;
        let err = (3 * m..=4 * m)
            .map(|i| (g.values[i] - pure_delay_closed_form(lambda, 0.5, 1.0, grid.node(i))).abs())
            .fold(0.0, f64::max);
        match previous {
            Some(p) => println!("m = {m:>4}: {err:.3e} (ratio {:.3})", p / err),
            None => println!("m = {m:>4}: {err:.3e}"),
        }
        previous = Some(err);
    }
    Ok(())
}
