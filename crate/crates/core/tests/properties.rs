use proptest::prelude::*;

use delayconv::regularity::fit_moment_exponent;
use delayconv::spectral::{
    frac_power_semigroup_ceiling, frac_power_semigroup_norm, semigroup_factor,
    semigroup_increment_constant,
};
use delayconv::stochastic::{increment_pairs, moment_curve};
use delayconv::{
    mild_solve, second_moment, solve_all, Forcing, InitialDatum, NoiseModel, SpectralModel,
    StepGrid,
};

const SCALAR_CASES: u32 = 10_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(SCALAR_CASES))]

    #[test]
    fn power_difference_is_subadditive(b in 0.0..1e3_f64, gap in 0.0..1e3_f64, delta in 1e-6..=1.0_f64) {
        let a = b + gap;
        let lhs = a.powf(delta) - b.powf(delta);
        let rhs = (a - b).powf(delta);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "a={a} b={b} δ={delta}: {lhs} > {rhs}");
    }

    #[test]
    fn log_is_below_scaled_power(a in 1e-9..1e6_f64, alpha in 1e-3..=1.0_f64) {
        let lhs = a.ln_1p();
        let rhs = a.powf(alpha) / alpha;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "a={a} α={alpha}: {lhs} > {rhs}");
    }

    #[test]
    fn exponential_increment_is_below_inverse_alpha(
        lambda in 1e-3..1e4_f64,
        s in 1e-4..10.0_f64,
        ratio in 1e-6..1e3_f64,
        alpha in 1e-3..=1.0_f64,
    ) {
        let t = s * (1.0 + ratio);
        let diff = ((-lambda * s).exp() - (-lambda * t).exp()).abs();
        let bound = ((t - s) / s).powf(alpha) / alpha;
        prop_assert!(diff <= bound * (1.0 + 1e-12), "λ={lambda} s={s} t={t} α={alpha}");
    }

    #[test]
    fn semigroup_law(lambda in 1e-3..1e3_f64, t in 0.0..1.0_f64, s in 0.0..1.0_f64) {
        let whole = semigroup_factor(lambda, t + s).unwrap();
        let split = semigroup_factor(lambda, t).unwrap() * semigroup_factor(lambda, s).unwrap();
        prop_assert!(whole > 0.0 || lambda * (t + s) > 700.0);
        prop_assert!(whole <= 1.0);
        let tol = 8.0 * f64::EPSILON * (1.0 + lambda * (t + s));
        prop_assert!((whole - split).abs() <= tol * whole.max(split));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fitted_increment_constant_is_below_inverse_alpha(
        modes in 1usize..200,
        alpha in 0.05..=1.0_f64,
        times in prop::collection::vec(1e-4..5.0_f64, 2..12),
    ) {
        let model = SpectralModel::semigroup_only(modes, 1.0).unwrap();
        let mut times = times;
        times.sort_by(f64::total_cmp);
        times.dedup();
        let pairs: Vec<(f64, f64)> = times
            .iter()
            .enumerate()
            .flat_map(|(a, &s)| times[a + 1..].iter().map(move |&t| (s, t)))
            .collect();
        prop_assume!(!pairs.is_empty());
        let c = semigroup_increment_constant(&model, alpha, &pairs).unwrap();
        prop_assert!(c.value <= (1.0 / alpha) * (1.0 + 1e-12));
    }

    #[test]
    fn frac_power_norm_times_power_is_bounded(
        modes in 1usize..500,
        gamma in 0.01..0.99_f64,
        log_t in -8.0..2.0_f64,
    ) {
        let model = SpectralModel::semigroup_only(modes, 1.0).unwrap();
        let t = 10f64.powf(log_t);
        let norm = frac_power_semigroup_norm(&model, gamma, t).unwrap();
        prop_assert!(norm <= frac_power_semigroup_ceiling(gamma, t) * (1.0 + 1e-12));
    }
}

fn small_setup() -> (SpectralModel, StepGrid) {
    (SpectralModel::heat(6), StepGrid::new(1.0, 32, 3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mild_solution_is_linear(
        a in -3.0..3.0_f64,
        b in -3.0..3.0_f64,
        phi in prop::collection::vec(-1.0..1.0_f64, 6),
        hist in prop::collection::vec(-1.0..1.0_f64, 6),
        force in prop::collection::vec(-1.0..1.0_f64, 6),
    ) {
        let (model, grid) = small_setup();
        let fs = solve_all(&model, &grid).unwrap();
        let d1 = InitialDatum::constant_history(&grid, phi.clone(), &hist).unwrap();
        let d2 = InitialDatum::from_fn(&grid, hist.clone(), |k, theta| phi[k] * (3.0 * theta).cos()).unwrap();
        let f1 = Forcing::constant(&grid, &force).unwrap();
        let f2 = Forcing::from_fn(&grid, 6, |k, t| hist[k] * t.sin()).unwrap();
        let y1 = mild_solve(&fs, &d1, &f1).unwrap();
        let y2 = mild_solve(&fs, &d2, &f2).unwrap();
        let combined = mild_solve(
            &fs,
            &d1.linear_combination(a, &d2, b).unwrap(),
            &f1.linear_combination(a, &f2, b).unwrap(),
        )
        .unwrap();
        for k in 0..6 {
            for i in 0..grid.len() {
                let expected = a * y1.values[k][i] + b * y2.values[k][i];
                let scale = 1.0 + a.abs() * y1.values[k][i].abs() + b.abs() * y2.values[k][i].abs();
                prop_assert!((combined.values[k][i] - expected).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn second_moment_is_additive_in_covariance(j in 0usize..6, factor in 1e-3..5.0_f64, s in 0usize..48, len in 1usize..48) {
        let (model, grid) = small_setup();
        let fs = solve_all(&model, &grid).unwrap();
        let noise = NoiseModel::inverse_square(6).unwrap();
        let t = s + len;
        let base = second_moment(&fs, &noise, 0.0, s, t).unwrap();
        let only_j = {
            let mut b = vec![0.0; 6];
            b[j] = 1.0;
            second_moment(&fs, &noise.with_input(b).unwrap(), 0.0, s, t).unwrap()
        };
        let scaled = second_moment(&fs, &noise.scaled_mode(j, factor).unwrap(), 0.0, s, t).unwrap();
        prop_assert!((scaled - (base + (factor - 1.0) * only_j)).abs() <= 1e-12 * (1.0 + base));
    }

    #[test]
    fn second_moment_grows_with_noise_modes(gamma in 0.0..0.75_f64, s in 0usize..48, len in 1usize..48) {
        let (model, grid) = small_setup();
        let fs = solve_all(&model, &grid).unwrap();
        let noise = NoiseModel::inverse_square(6).unwrap();
        let t = s + len;
        let mut previous = 0.0;
        for modes in 1..=6 {
            let v = second_moment(&fs, &noise.truncated(modes).unwrap(), gamma, s, t).unwrap();
            prop_assert!(v >= previous);
            previous = v;
        }
    }

    #[test]
    fn moment_slope_ignores_input_scale(factor in 1e-3..1e3_f64, gamma in prop::sample::select(vec![0.0, 0.25])) {
        let model = SpectralModel::heat(16);
        let grid = StepGrid::new(1.0, 256, 1).unwrap();
        let fs = solve_all(&model, &grid).unwrap();
        let noise = NoiseModel::inverse_square(16).unwrap();
        let pairs = increment_pairs(128, 4, 64, 16);
        let window = (4.0 * grid.step(), 0.25);
        let base = fit_moment_exponent(&moment_curve(&fs, &noise, gamma, &pairs).unwrap(), window).unwrap();
        let scaled_noise = noise.scaled_input(factor).unwrap();
        let scaled = fit_moment_exponent(&moment_curve(&fs, &scaled_noise, gamma, &pairs).unwrap(), window).unwrap();
        prop_assert!((base.value - scaled.value).abs() < 1e-10);
    }
}
