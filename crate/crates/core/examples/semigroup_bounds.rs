//! Fractional powers of the heat semigroup: norms against the `(γ/e)^γ t^{-γ}`
//! ceiling and fitted constants of the difference estimates.

use delayconv::spectral::{
    frac_power_semigroup_ceiling, frac_power_semigroup_norm, semigroup_difference_constant,
    semigroup_increment_constant,
};
use delayconv::SpectralModel;

fn main() -> delayconv::Result<()> {
    let model = SpectralModel::semigroup_only(256, 1.0)?;

    println!("{:>6} {:>8} {:>12} {:>12}", "gamma", "t", "norm", "ceiling");
    for gamma in [0.25, 0.5, 0.75] {
        for t in [1e-3, 1e-2, 0.1, 1.0] {
            let norm = frac_power_semigroup_norm(&model, gamma, t)?;
            let ceiling = frac_power_semigroup_ceiling(gamma, t);
            println!("{gamma:>6} {t:>8} {norm:>12.6} {ceiling:>12.6}");
        }
    }

    let times: Vec<f64> = (0..12).map(|k| 1e-3 * 2f64.powi(k)).collect();
    let pairs: Vec<(f64, f64)> = times
        .iter()
        .enumerate()
        .flat_map(|(a, &s)| times[a + 1..].iter().map(move |&t| (s, t)))
        .collect();

    let fit = semigroup_difference_constant(&model, 0.5, 0.25, &pairs)?;
    println!(
        "\ninverse-power constant M = {:.6}, Hölder constant = {:.6}",
        fit.inverse_power.value, fit.holder.value
    );
    for alpha in [0.25, 0.5, 1.0] {
        let c = semigroup_increment_constant(&model, alpha, &pairs)?;
        println!(
            "increment constant α = {alpha}: {:.6} (ceiling 1/α = {:.6})",
            c.value,
            1.0 / alpha
        );
    }
    Ok(())
}
