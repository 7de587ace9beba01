//! Mild solution for a constant history and forcing, checked against the
//! integrated equation on two grids.

use delayconv::{
    mild_solve, residual_check, solve_all, Forcing, InitialDatum, SpectralModel, StepGrid,
};

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::heat(4);
    let mut previous: Option<f64> = None;
    for m in [64, 128, 256] {
        let grid = StepGrid::new(1.0, m, 3)?;
        let fs = solve_all(&model, &grid)?;
        let datum = InitialDatum::constant_history(
            &grid,
            vec![1.0, 0.5, 0.0, -0.25],
            &[0.5, 0.0, 0.25, 0.0],
        )?;
        let forcing =
            Forcing::from_fn(&grid, 4, |k, t| if k == 0 { (3.0 * t).sin() } else { 0.0 })?;
        let traj = mild_solve(&fs, &datum, &forcing)?;
        let residual = residual_check(&traj, &model)?;
        let last = grid.last();
        print!(
            "m = {m:>3}: |y(3r)| = {:.6}, ‖(-A)^½ y(3r)‖ = {:.6}, residual = {residual:.3e}",
            traj.h_norm(last),
            traj.gamma_norm(0.5, last)
        );
        match previous {
            Some(p) => println!(" (ratio {:.2})", p / residual),
            None => println!(),
        }
        previous = Some(residual);
    }
    Ok(())
}
