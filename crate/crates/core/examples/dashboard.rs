//! Verification dashboard on the default heat model, and on a semigroup-only
//! model with a deliberately mis-scaled constant.

use delayconv::dashboard::{verify_dashboard, DashboardOptions, ParameterMatrix};
use delayconv::{NoiseModel, SpectralModel, StepGrid};

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat_default();
    let grid = StepGrid::new(1.0, 512, 3)?;
    let noise = NoiseModel::inverse_square(64)?;
    let matrix = ParameterMatrix::standard();
    let options = DashboardOptions {
        paths: 100,
        calibration_paths: 500,
        ..DashboardOptions::default()
    };
    let bundle = verify_dashboard(&model, &grid, &noise, &matrix, &options)?;
    print!("{}", bundle.summary());
    for cell in &bundle.cells {
        println!(
            "{:<5} {:<26} {:>10.5}  {}",
            if cell.passed { "ok" } else { "FAIL" },
            cell.report.estimate.name(),
            cell.report.value,
            cell.check
        );
    }

    let faulty = DashboardOptions {
        constant_scale: 100.0,
        ..options
    };
    let bundle = verify_dashboard(
        &SpectralModel::semigroup_only(64, 1.0)?,
        &grid,
        &noise,
        &matrix,
        &faulty,
    )?;
    println!(
        "\nsemigroup-only model with constants scaled by 100: {}",
        bundle.summary().lines().next().unwrap_or("")
    );
    Ok(())
}
