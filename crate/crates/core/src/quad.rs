//! Quadrature weights shared by the solvers.

/// Weights `(w_left, w_right)` of the product trapezoid rule
/// `∫_0^h e^{-λ(h-v)} f(v) dv ≈ w_left f(0) + w_right f(h)`, exact for linear `f`.
pub(crate) fn product_trapezoid_weights(lambda: f64, h: f64) -> (f64, f64) {
    let z = lambda * h;
    if z < 1e-3 {
        let left = h * (0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0);
        let right = h * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0);
        return (left, right);
    }
    let decay = (-z).exp();
    // (1 - e^{-z}) / z
    let phi1 = -(-z).exp_m1() / z;
    ((h * (phi1 - decay) / z), (h * (1.0 - phi1) / z))
}

/// `∫` over one panel of width `h` of a function with end values `a`, `b`,
/// interpolated log-linearly when both have the same sign. Exact for
/// exponentials, second order for smooth integrands; falls back to the
/// trapezoid at zeros and sign changes.
pub(crate) fn exp_fit_panel(a: f64, b: f64, h: f64) -> f64 {
    if a * b > 0.0 {
        let ratio = (a / b).ln();
        if ratio.abs() > 1e-8 {
            return h * (a - b) / ratio;
        }
    }
    0.5 * h * (a + b)
}

/// Composite [`exp_fit_panel`] over equally spaced samples.
pub(crate) fn exp_fit_sum(values: impl IntoIterator<Item = f64>, h: f64) -> f64 {
    let mut it = values.into_iter();
    let Some(mut prev) = it.next() else {
        return 0.0;
    };
    let mut acc = 0.0;
    for v in it {
        acc += exp_fit_panel(prev, v, h);
        prev = v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_weights_integrate_linear_functions_exactly() {
        for (lambda, h) in [(1.0, 0.01), (4096.0, 1.0 / 512.0), (1e-3, 0.5), (50.0, 0.1)] {
            let (wl, wr) = product_trapezoid_weights(lambda, h);
            let z: f64 = lambda * h;
            // f = 1
            let exact_const = -(-z).exp_m1() / lambda;
            assert_relative_eq!(wl + wr, exact_const, max_relative = 1e-12);
            // f(v) = v: ∫ e^{-λ(h-v)} v dv = h/λ - (1 - e^{-z})/λ²
            let exact_lin = h / lambda - (-(-z).exp_m1()) / (lambda * lambda);
            assert_relative_eq!(wr * h, exact_lin, max_relative = 1e-9);
        }
    }

    #[test]
    fn exp_fit_is_exact_for_exponentials() {
        for (lambda, h) in [(1.0, 0.01), (65536.0, 1.0 / 1024.0), (3.0, 0.5)] {
            let f = |x: f64| (-2.0 * lambda * x).exp();
            let n = 16;
            let approx = exp_fit_sum((0..=n).map(|i| f(i as f64 * h)), h);
            let exact = -(-2.0 * lambda * h * n as f64).exp_m1() / (2.0 * lambda);
            assert_relative_eq!(approx, exact, max_relative = 1e-12);
        }
        assert_eq!(exp_fit_panel(0.0, 2.0, 0.5), 0.5);
        assert_eq!(exp_fit_panel(1.0, 1.0, 0.5), 0.5);
        assert_eq!(exp_fit_panel(-1.0, 2.0, 1.0), 0.5);
        assert_relative_eq!(
            exp_fit_panel(-2.0, -1.0, 1.0),
            -exp_fit_panel(2.0, 1.0, 1.0)
        );
        assert_eq!(exp_fit_sum([], 1.0), 0.0);
    }
}
