//! Fundamental solution by the method of steps.
//!
//! Per mode the fundamental solution `g_λ` solves the scalar Volterra equation
//!
//! ```text
//! g(t) = e^{-λt} + ∫_0^t e^{-λ(t-s)} [ c₁λ^μ g(s-r) + c₂λ^ν ∫_{-r}^0 a(θ) g(s+θ) dθ ] ds
//! ```
//!
//! with `g(0) = 1` and `g = 0` on `(-∞, 0)`. Nodes are filled left to right; the
//! shifted history `g(s - r)` is always an earlier node, and the only implicit
//! dependence (through the `θ = 0` endpoint of the distributed term) is solved
//! in closed form at each node.
//!
//! The delayed term is integrated with the composite trapezoid rule on the full
//! integrand `e^{-λ(t-s)} g(s-r)`, whose history decays at the mode's own rate.
//! The distributed term varies slowly and is integrated with the product
//! trapezoid rule (linear interpolant, exact exponential weight), which keeps
//! stiff modes (`λh ≫ 1`) accurate.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::grid::StepGrid;
use crate::quad::{exp_fit_sum, product_trapezoid_weights};
use crate::spectral::SpectralModel;

/// Magnitude beyond which a mode is treated as blown up.
const BLOW_UP: f64 = 1e300;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeFundamental {
    pub lambda: f64,
    pub grid: StepGrid,
    pub values: Vec<f64>,
}

impl ModeFundamental {
    /// `g(t_i)` with the convention `g = 0` for negative indices.
    #[inline]
    pub fn at(&self, i: isize) -> f64 {
        if i < 0 {
            0.0
        } else {
            self.values[i as usize]
        }
    }
}

pub fn solve_mode(lambda: f64, model: &SpectralModel, grid: &StepGrid) -> Result<ModeFundamental> {
    solve_indexed(None, lambda, model, grid)
}

fn solve_indexed(
    mode: Option<usize>,
    lambda: f64,
    model: &SpectralModel,
    grid: &StepGrid,
) -> Result<ModeFundamental> {
    if grid.delay() != model.delay() {
        return Err(Error::MisalignedGrid {
            delay: model.delay(),
            step: grid.step(),
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("eigenvalue must be positive, got {lambda}"));
    }
    let m = grid.steps_per_delay();
    let last = grid.last();
    let h = grid.step();
    let decay = (-lambda * h).exp();
    let delayed_coeff = model.a1().at(lambda);
    let distributed_coeff = model.a2().at(lambda);
    let kernel = model.kernel();
    let with_distributed = distributed_coeff != 0.0 && !kernel.is_zero();
    // kernel_at[j] = a(-t_j), j = 0..=m
    let kernel_at: Vec<f64> = (0..=m).map(|j| kernel.eval(-grid.node(j))).collect();
    let (w_left, w_right) = product_trapezoid_weights(lambda, h);

    let fail = |node: usize, detail: String| Error::Numerical {
        mode,
        lambda,
        node,
        detail,
    };

    let mut g = vec![0.0; last + 1];
    g[0] = 1.0;
    let mut delayed = 0.0;
    let mut distributed = 0.0;
    let mut window_prev = 0.0;
    let implicit = 0.5 * h * kernel_at[0];
    let denom = 1.0 - w_right * distributed_coeff * implicit;
    if with_distributed && !(denom > 0.0 && denom.is_finite()) {
        return Err(fail(
            0,
            format!(
                "implicit step is singular (λh = {}); refine the grid",
                lambda * h
            ),
        ));
    }

    for i in 1..=last {
        if delayed_coeff != 0.0 {
            // history panel [t_{i-1} - r, t_i - r]; the jump of g at 0 is seen
            // only from the right
            let left = if i > m { g[i - 1 - m] } else { 0.0 };
            let right = if i > m { g[i - m] } else { 0.0 };
            delayed = decay * delayed + 0.5 * h * delayed_coeff * (decay * left + right);
        }
        let base = (-lambda * grid.node(i)).exp() + delayed;
        let gi = if with_distributed {
            let lo = i.saturating_sub(m);
            let mut known = 0.5 * kernel_at[i - lo] * g[lo];
            for j in lo + 1..i {
                known += kernel_at[i - j] * g[j];
            }
            known *= h;
            let carried = decay * distributed + w_left * distributed_coeff * window_prev;
            let gi = (base + carried + w_right * distributed_coeff * known) / denom;
            let window = known + implicit * gi;
            distributed = carried + w_right * distributed_coeff * window;
            window_prev = window;
            gi
        } else {
            base
        };
        if !gi.is_finite() || gi.abs() > BLOW_UP {
            return Err(fail(
                i,
                format!("value {gi} is not finite; refine the grid"),
            ));
        }
        g[i] = gi;
    }
    Ok(ModeFundamental {
        lambda,
        grid: *grid,
        values: g,
    })
}

/// Diagonal of `G(t)` on a shared grid, one entry per retained mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    pub model: SpectralModel,
    pub grid: StepGrid,
    pub modes: Vec<ModeFundamental>,
}

pub fn solve_all(model: &SpectralModel, grid: &StepGrid) -> Result<FundamentalSolution> {
    let modes = model
        .eigenvalues()
        .par_iter()
        .enumerate()
        .map(|(k, &lambda)| solve_indexed(Some(k), lambda, model, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(FundamentalSolution {
        model: model.clone(),
        grid: *grid,
        modes,
    })
}

impl FundamentalSolution {
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i > self.grid.last() {
            return domain(format!(
                "node {i} is beyond the grid (last {})",
                self.grid.last()
            ));
        }
        Ok(())
    }

    fn check_gamma(gamma: f64) -> Result<()> {
        if gamma >= 0.0 && gamma.is_finite() {
            Ok(())
        } else {
            domain(format!("γ must be nonnegative, got {gamma}"))
        }
    }

    /// `‖(-A)^γ G(t_i)‖ = sup_k λ_k^γ |g_k(t_i)|`. At node 0 this is
    /// `sup_k λ_k^γ`, finite only because of truncation.
    pub fn gamma_norm(&self, gamma: f64, i: usize) -> Result<f64> {
        Self::check_gamma(gamma)?;
        self.check_node(i)?;
        Ok(self.sup(gamma, |m| m.values[i].abs()))
    }

    /// `‖∫_s^t (-A)^γ G(u) du‖` for nodes in one closed delay interval. Panels
    /// are integrated log-linearly so stiff modes, which decay within one
    /// step, are not overweighted.
    pub fn gamma_integral_norm(&self, gamma: f64, s: usize, t: usize) -> Result<f64> {
        Self::check_gamma(gamma)?;
        self.check_node(t)?;
        if s > t {
            return domain(format!("need s ≤ t, got nodes {s}, {t}"));
        }
        let m = self.grid.steps_per_delay();
        if s == t {
            return Ok(0.0);
        }
        if s / m != (t - 1) / m {
            return domain(format!("nodes {s} and {t} straddle a delay point"));
        }
        let h = self.grid.step();
        Ok(self.sup(gamma, |mode| {
            exp_fit_sum(mode.values[s..=t].iter().copied(), h).abs()
        }))
    }

    /// `‖(-A)^γ (G(t) - G(s))‖` for `nr < s ≤ t < (n+1)r`.
    pub fn gamma_increment_norm(&self, gamma: f64, s: usize, t: usize) -> Result<f64> {
        Self::check_gamma(gamma)?;
        self.check_open_interval(s, t)?;
        Ok(self.sup(gamma, |mode| (mode.values[t] - mode.values[s]).abs()))
    }

    /// `‖G(t) - G(s)‖`.
    pub fn operator_increment_norm(&self, s: usize, t: usize) -> Result<f64> {
        self.gamma_increment_norm(0.0, s, t)
    }

    fn check_open_interval(&self, s: usize, t: usize) -> Result<()> {
        self.check_node(t)?;
        let m = self.grid.steps_per_delay();
        if s > t {
            return domain(format!("need s ≤ t, got nodes {s}, {t}"));
        }
        if s.is_multiple_of(m) || t.is_multiple_of(m) || s / m != t / m {
            return domain(format!(
                "nodes {s} and {t} do not lie inside one open delay interval"
            ));
        }
        Ok(())
    }

    fn sup(&self, gamma: f64, f: impl Fn(&ModeFundamental) -> f64) -> f64 {
        self.modes.iter().fold(0.0_f64, |acc, mode| {
            let weight = if gamma == 0.0 {
                1.0
            } else {
                mode.lambda.powf(gamma)
            };
            acc.max(weight * f(mode))
        })
    }
}

/// Per-mode values of `Γ_k(t_i) = ∫_0^{t_i} λ_k^γ e^{-λ_k(t_i-s)} a(-s) ds` for
/// `i = 0..=m` (the first delay interval), by the product trapezoid rule.
pub fn gamma_kernel_profile(
    model: &SpectralModel,
    grid: &StepGrid,
    gamma: f64,
) -> Result<Vec<Vec<f64>>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("γ must lie in (0, 1), got {gamma}"));
    }
    if grid.delay() != model.delay() {
        return Err(Error::MisalignedGrid {
            delay: model.delay(),
            step: grid.step(),
        });
    }
    let m = grid.steps_per_delay();
    let h = grid.step();
    let kernel_at: Vec<f64> = (0..=m)
        .map(|j| model.kernel().eval(-grid.node(j)))
        .collect();
    Ok(model
        .eigenvalues()
        .iter()
        .map(|&lambda| {
            let (wl, wr) = product_trapezoid_weights(lambda, h);
            let decay = (-lambda * h).exp();
            let weight = lambda.powf(gamma);
            let mut out = Vec::with_capacity(m + 1);
            let mut acc = 0.0;
            out.push(0.0);
            for i in 1..=m {
                acc = decay * acc + weight * (wl * kernel_at[i - 1] + wr * kernel_at[i]);
                out.push(acc);
            }
            out
        })
        .collect())
}

/// `‖Γ(t_i)‖ = sup_k |Γ_k(t_i)|` for a node `t_i ∈ [0, r]`.
pub fn gamma_kernel(model: &SpectralModel, grid: &StepGrid, gamma: f64, i: usize) -> Result<f64> {
    if i > grid.steps_per_delay() {
        return domain(format!("node {i} lies outside [0, r]"));
    }
    let profile = gamma_kernel_profile(model, grid, gamma)?;
    Ok(profile.iter().fold(0.0_f64, |acc, p| acc.max(p[i].abs())))
}

/// `|a|_∞ (γ/e)^γ t^{1-γ} / (1-γ)`.
pub fn gamma_kernel_ceiling(model: &SpectralModel, gamma: f64, t: f64) -> f64 {
    model.kernel().sup_norm() * (gamma / std::f64::consts::E).powf(gamma) * t.powf(1.0 - gamma)
        / (1.0 - gamma)
}
