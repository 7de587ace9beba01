//! The kernel `Γ(t) = ∫_0^t (-A)^γ e^{(t-s)A} a(-s) ds` of the distributed
//! term stays below `|a|_∞ (γ/e)^γ t^{1-γ} / (1-γ)` uniformly in the modes.

use delayconv::fundamental::{gamma_kernel_ceiling, gamma_kernel_profile};
use delayconv::spectral::{DelayKernel, Spectrum, Symbol};
use delayconv::{SpectralModel, StepGrid};

fn main() -> delayconv::Result<()> {
    let grid = StepGrid::new(1.0, 512, 1)?;
    for (name, kernel) in [
        ("constant", DelayKernel::constant(1.0, 1.0)?),
        ("linear", DelayKernel::linear(1.0, 1.0, -0.5)?),
    ] {
        let model = SpectralModel::new(
            Spectrum::Square { modes: 256 },
            Symbol::new(0.5, 0.5),
            Symbol::new(0.25, 0.5),
            1.0,
            kernel,
        )?;
        for gamma in [0.25, 0.5, 0.75] {
            let profile = gamma_kernel_profile(&model, &grid, gamma)?;
            let worst = (1..=grid.steps_per_delay())
                .map(|i| {
                    let sup = profile.iter().fold(0.0_f64, |a, p| a.max(p[i].abs()));
                    sup / gamma_kernel_ceiling(&model, gamma, grid.node(i))
                })
                .fold(0.0, f64::max);
            println!("{name:<9} γ = {gamma:<5} max Γ / ceiling = {worst:.4}");
        }
    }
    Ok(())
}
