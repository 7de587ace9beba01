//! Fitted constants of the decay, integral, increment and kernel estimates on
//! lattices, each with its refinement and truncation ratios.

use delayconv::estimates::{fit_estimate, Lattice, RefinementSet};
use delayconv::{Estimate, FitParams, FitReport, SpectralModel, StepGrid};

fn show(r: &FitReport) {
    println!(
        "{:<20} n={:?} γ={:?} β={:?} κ={:?}  C = {:<10.5} m→2m {:.4}  K→2K {:.4}{}",
        r.estimate.name(),
        r.params.n,
        r.params.gamma,
        r.params.beta,
        r.params.kappa,
        r.value,
        r.refine_ratio.unwrap_or(f64::NAN),
        r.truncation_ratio.unwrap_or(f64::NAN),
        if r.diverged { "  DIVERGED" } else { "" }
    );
}

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat_default();
    let grid = StepGrid::new(1.0, 256, 3)?;
    let set = RefinementSet::build(&model, &grid)?;

    for n in 0..3 {
        let p = FitParams {
            n: Some(n),
            gamma: Some(0.5),
            ..FitParams::default()
        };
        show(&fit_estimate(
            Estimate::GammaNormDecay,
            &set,
            p,
            &Lattice::interval_times(&grid, n, 200),
        )?);
        show(&fit_estimate(
            Estimate::GammaIntegral,
            &set,
            p,
            &Lattice::closed_interval_pairs(&grid, n, 30),
        )?);
        let p = FitParams {
            beta: Some(0.2),
            ..p
        };
        show(&fit_estimate(
            Estimate::GammaIncrement,
            &set,
            p,
            &Lattice::open_interval_pairs(&grid, n, 30),
        )?);
        let p = FitParams {
            n: Some(n),
            kappa: Some(0.4),
            ..FitParams::default()
        };
        show(&fit_estimate(
            Estimate::OperatorIncrement,
            &set,
            p,
            &Lattice::open_interval_pairs(&grid, n, 30),
        )?);
    }
    let p = FitParams {
        gamma: Some(0.5),
        beta: Some(0.4),
        ..FitParams::default()
    };
    show(&fit_estimate(
        Estimate::KernelHolder,
        &set,
        p,
        &Lattice::closed_interval_pairs(&grid, 0, 30),
    )?);
    Ok(())
}
