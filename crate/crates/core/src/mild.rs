//! Deterministic mild solutions by variation of constants.
//!
//! Per mode,
//!
//! ```text
//! y(t) = g(t) φ₀ + ∫_{-r}^0 U_t(θ) φ₁(θ) dθ + ∫_0^t g(t-s) f(s) ds
//! U_t(θ) = c₁λ^μ g(t-θ-r) + c₂λ^ν ∫_{-r}^θ g(t-θ+τ) a(τ) dτ
//! ```
//!
//! The history term is evaluated after substituting `u = θ - τ`, which turns
//! it into a single convolution `∫_0^r g(t-u) ψ(u) du` with a profile `ψ` that
//! does not depend on `t`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fundamental::{FundamentalSolution, ModeFundamental};
use crate::grid::StepGrid;
use crate::spectral::SpectralModel;

/// `φ = (φ₀, φ₁)`; `phi1[k][j]` is the history of mode `k` at `θ_j = -r + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDatum {
    phi0: Vec<f64>,
    phi1: Vec<Vec<f64>>,
}

impl InitialDatum {
    pub fn new(grid: &StepGrid, phi0: Vec<f64>, phi1: Vec<Vec<f64>>) -> Result<Self> {
        let m = grid.steps_per_delay();
        if phi0.len() != phi1.len() {
            return Err(Error::Config(format!(
                "datum has {} initial values but {} histories",
                phi0.len(),
                phi1.len()
            )));
        }
        for (k, h) in phi1.iter().enumerate() {
            if h.len() != m + 1 {
                return Err(Error::Config(format!(
                    "history of mode {k} has {} samples, grid needs {}",
                    h.len(),
                    m + 1
                )));
            }
        }
        if phi0
            .iter()
            .chain(phi1.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config("datum contains non-finite values".into()));
        }
        Ok(InitialDatum { phi0, phi1 })
    }

    pub fn zero(grid: &StepGrid, modes: usize) -> Self {
        InitialDatum {
            phi0: vec![0.0; modes],
            phi1: vec![vec![0.0; grid.steps_per_delay() + 1]; modes],
        }
    }

    /// Constant history `φ₁ₖ(θ) = history[k]`.
    pub fn constant_history(grid: &StepGrid, phi0: Vec<f64>, history: &[f64]) -> Result<Self> {
        let m = grid.steps_per_delay();
        Self::new(
            grid,
            phi0,
            history.iter().map(|&c| vec![c; m + 1]).collect(),
        )
    }

    /// History sampled from `f(k, θ)`.
    pub fn from_fn(grid: &StepGrid, phi0: Vec<f64>, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let m = grid.steps_per_delay();
        let r = grid.delay();
        let phi1 = (0..phi0.len())
            .map(|k| (0..=m).map(|j| f(k, grid.node(j) - r)).collect())
            .collect();
        Self::new(grid, phi0, phi1)
    }

    pub fn phi0(&self) -> &[f64] {
        &self.phi0
    }

    pub fn phi1(&self) -> &[Vec<f64>] {
        &self.phi1
    }

    pub fn modes(&self) -> usize {
        self.phi0.len()
    }

    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        InitialDatum {
            phi0: zip_with(&self.phi0, &other.phi0, |x, y| a * x + b * y),
            phi1: self
                .phi1
                .iter()
                .zip(&other.phi1)
                .map(|(p, q)| zip_with(p, q, |x, y| a * x + b * y))
                .collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.phi1.first().map(Vec::len) != other.phi1.first().map(Vec::len)
            || self.modes() != other.modes()
        {
            return domain("data live on different grids");
        }
        Ok(self.combine(a, other, b))
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Per-mode forcing sampled on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    values: Vec<Vec<f64>>,
}

impl Forcing {
    pub fn new(grid: &StepGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        for (k, v) in values.iter().enumerate() {
            if v.len() != grid.len() {
                return Err(Error::Config(format!(
                    "forcing of mode {k} has {} samples, grid has {} nodes",
                    v.len(),
                    grid.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("forcing of mode {k} is not finite")));
            }
        }
        Ok(Forcing { values })
    }

    pub fn zero(grid: &StepGrid, modes: usize) -> Self {
        Forcing {
            values: vec![vec![0.0; grid.len()]; modes],
        }
    }

    pub fn constant(grid: &StepGrid, per_mode: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            per_mode.iter().map(|&c| vec![c; grid.len()]).collect(),
        )
    }

    pub fn from_fn(grid: &StepGrid, modes: usize, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let nodes = grid.nodes();
        Self::new(
            grid,
            (0..modes)
                .map(|k| nodes.iter().map(|&t| f(k, t)).collect())
                .collect(),
        )
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return domain("forcings have different mode counts");
        }
        Ok(Forcing {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(p, q)| zip_with(p, q, |x, y| a * x + b * y))
                .collect(),
        })
    }
}

/// Mild solution on the grid, together with the data that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: StepGrid,
    pub eigenvalues: Vec<f64>,
    /// `values[k][i] = y_k(t_i)`.
    pub values: Vec<Vec<f64>>,
    datum: InitialDatum,
    forcing: Forcing,
}

impl Trajectory {
    pub fn modes(&self) -> usize {
        self.values.len()
    }

    /// `(Σ_k y_k(t_i)²)^{1/2}`.
    pub fn h_norm(&self, i: usize) -> f64 {
        self.values.iter().map(|y| y[i] * y[i]).sum::<f64>().sqrt()
    }

    /// `(Σ_k λ_k^{2γ} y_k(t_i)²)^{1/2}`.
    pub fn gamma_norm(&self, gamma: f64, i: usize) -> f64 {
        self.values
            .iter()
            .zip(&self.eigenvalues)
            .map(|(y, &l)| l.powf(2.0 * gamma) * y[i] * y[i])
            .sum::<f64>()
            .sqrt()
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }
}

/// `U_t(θ)` for mode `k` at node `t = t_i` and `θ = -r + j h`, `j = 0..=m`.
pub fn structural_kernel(fs: &FundamentalSolution, i: usize, j: usize, k: usize) -> Result<f64> {
    let m = fs.grid.steps_per_delay();
    if i > fs.grid.last() || j > m {
        return domain(format!("node pair ({i}, {j}) is outside the grid"));
    }
    let mode = fs
        .modes
        .get(k)
        .ok_or_else(|| Error::Domain(format!("mode {k} is not retained")))?;
    let model = &fs.model;
    let lambda = mode.lambda;
    let h = fs.grid.step();
    let shift = i as isize - j as isize;
    let mut value = model.a1().at(lambda) * mode.at(shift);
    let c2 = model.a2().at(lambda);
    if c2 != 0.0 && j > 0 {
        // τ_l = -r + l h, g(t - θ + τ_l) = g_{i - j + l}
        let mut inner = 0.0;
        for l in 1..=j {
            let lo = shift + l as isize - 1;
            if lo >= 0 {
                let a_lo = model.kernel().eval(fs.grid.node(l - 1) - fs.grid.delay());
                let a_hi = model.kernel().eval(fs.grid.node(l) - fs.grid.delay());
                inner += 0.5 * h * (mode.at(lo) * a_lo + mode.at(lo + 1) * a_hi);
            }
        }
        value += c2 * inner;
    }
    Ok(value)
}

fn check_shapes(fs: &FundamentalSolution, datum: &InitialDatum, forcing: &Forcing) -> Result<()> {
    let k = fs.mode_count();
    let m = fs.grid.steps_per_delay();
    if datum.modes() != k || forcing.values.len() != k {
        return domain(format!(
            "model has {k} modes, datum {} and forcing {}",
            datum.modes(),
            forcing.values.len()
        ));
    }
    if datum.phi1.iter().any(|h| h.len() != m + 1) {
        return domain("datum history does not match the grid");
    }
    if forcing.values.iter().any(|f| f.len() != fs.grid.len()) {
        return domain("forcing does not match the grid");
    }
    Ok(())
}

/// `ψ(u_p) = c₁λ^μ φ₁(u_p - r) + c₂λ^ν ∫_{u_p - r}^0 φ₁(θ) a(θ - u_p) dθ`, `p = 0..=m`.
fn history_profile(model: &SpectralModel, grid: &StepGrid, lambda: f64, phi1: &[f64]) -> Vec<f64> {
    let m = grid.steps_per_delay();
    let r = grid.delay();
    let h = grid.step();
    let c1 = model.a1().at(lambda);
    let c2 = model.a2().at(lambda);
    let kernel = model.kernel();
    let with_distributed = c2 != 0.0 && !kernel.is_zero();
    let kernel_at: Vec<f64> = (0..=m).map(|l| kernel.eval(grid.node(l) - r)).collect();
    (0..=m)
        .map(|p| {
            let mut v = c1 * phi1[p];
            if with_distributed && p < m {
                // θ_j = -r + j h, θ_j - u_p = -r + (j - p) h
                let mut acc = 0.5 * (phi1[p] * kernel_at[0] + phi1[m] * kernel_at[m - p]);
                for j in p + 1..m {
                    acc += phi1[j] * kernel_at[j - p];
                }
                v += c2 * h * acc;
            }
            v
        })
        .collect()
}

fn solve_one(
    mode: &ModeFundamental,
    model: &SpectralModel,
    phi0: f64,
    phi1: &[f64],
    forcing: &[f64],
) -> Vec<f64> {
    let grid = &mode.grid;
    let m = grid.steps_per_delay();
    let h = grid.step();
    let g = &mode.values;
    let psi = history_profile(model, grid, mode.lambda, phi1);
    let history_active = psi.iter().any(|&v| v != 0.0);
    let forced = forcing.iter().any(|&v| v != 0.0);
    (0..grid.len())
        .map(|i| {
            let mut y = g[i] * phi0;
            if history_active {
                // ∫_0^r g(t_i - u) ψ(u) du; panels reaching below t = 0 are dropped
                let top = m.min(i);
                let mut acc = 0.0;
                for p in 1..=top {
                    acc += g[i - p + 1] * psi[p - 1] + g[i - p] * psi[p];
                }
                y += 0.5 * h * acc;
            }
            if forced && i > 0 {
                let mut acc = 0.5 * (g[i] * forcing[0] + g[0] * forcing[i]);
                for l in 1..i {
                    acc += g[i - l] * forcing[l];
                }
                y += h * acc;
            }
            y
        })
        .collect()
}

pub fn mild_solve(
    fs: &FundamentalSolution,
    datum: &InitialDatum,
    forcing: &Forcing,
) -> Result<Trajectory> {
    check_shapes(fs, datum, forcing)?;
    let values: Vec<Vec<f64>> = fs
        .modes
        .par_iter()
        .enumerate()
        .map(|(k, mode)| {
            solve_one(
                mode,
                &fs.model,
                datum.phi0[k],
                &datum.phi1[k],
                &forcing.values[k],
            )
        })
        .collect();
    for (k, y) in values.iter().enumerate() {
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                mode: Some(k),
                lambda: fs.modes[k].lambda,
                node: i,
                detail: "mild solution is not finite".into(),
            });
        }
    }
    Ok(Trajectory {
        grid: fs.grid,
        eigenvalues: fs.modes.iter().map(|m| m.lambda).collect(),
        values,
        datum: datum.clone(),
        forcing: forcing.clone(),
    })
}

/// Largest defect of the trajectory in the integrated form of the equation,
///
/// ```text
/// y(t) - φ₀ - ∫_0^t [ -λ y(s) + c₁λ^μ y(s-r) + c₂λ^ν ∫_{-r}^0 a(θ) y(s+θ) dθ + f(s) ] ds
/// ```
///
/// with `y = φ₁` on `[-r, 0)`, by the trapezoid rule. Panels meeting `s = 0`
/// use the history on their left and the trajectory on their right.
pub fn residual_check(traj: &Trajectory, model: &SpectralModel) -> Result<f64> {
    let grid = &traj.grid;
    if model.modes() != traj.modes() || model.delay() != grid.delay() {
        return domain("trajectory and model do not match");
    }
    let per_mode: Vec<f64> = (0..traj.modes())
        .into_par_iter()
        .map(|k| {
            mode_residual(
                model,
                grid,
                traj.eigenvalues[k],
                &traj.values[k],
                traj.datum.phi0[k],
                &traj.datum.phi1[k],
                &traj.forcing.values[k],
            )
        })
        .collect();
    Ok(per_mode.into_iter().fold(0.0, f64::max))
}

fn mode_residual(
    model: &SpectralModel,
    grid: &StepGrid,
    lambda: f64,
    y: &[f64],
    phi0: f64,
    phi1: &[f64],
    f: &[f64],
) -> f64 {
    let m = grid.steps_per_delay();
    let h = grid.step();
    let r = grid.delay();
    let c1 = model.a1().at(lambda);
    let c2 = model.a2().at(lambda);
    let kernel = model.kernel();
    let with_distributed = c2 != 0.0 && !kernel.is_zero();
    let kernel_at: Vec<f64> = (0..=m).map(|l| kernel.eval(grid.node(l) - r)).collect();
    // Extended path on the panel [q - 1, q] in index units: history for q ≤ 0.
    let panel = |q: isize| -> (f64, f64) {
        if q <= 0 {
            let j = (m as isize + q) as usize;
            (phi1[j - 1], phi1[j])
        } else {
            let q = q as usize;
            (y[q - 1], y[q])
        }
    };
    let distributed = |l: usize| -> f64 {
        // ∫_{-r}^0 a(θ) y(t_l + θ) dθ, θ_j = -r + j h
        let base = l as isize - m as isize;
        let mut acc = 0.0;
        for j in 1..=m {
            let (lo, hi) = panel(base + j as isize);
            acc += kernel_at[j - 1] * lo + kernel_at[j] * hi;
        }
        0.5 * h * acc
    };
    let mut worst = 0.0_f64;
    let mut integral = 0.0;
    let mut dist_prev = if with_distributed {
        distributed(0)
    } else {
        0.0
    };
    for l in 1..y.len() {
        let (del_lo, del_hi) = panel(l as isize - m as isize);
        let dist = if with_distributed {
            distributed(l)
        } else {
            0.0
        };
        let left = -lambda * y[l - 1] + c1 * del_lo + c2 * dist_prev + f[l - 1];
        let right = -lambda * y[l] + c1 * del_hi + c2 * dist + f[l];
        integral += 0.5 * h * (left + right);
        dist_prev = dist;
        worst = worst.max((y[l] - phi0 - integral).abs());
    }
    worst.max((y[0] - phi0).abs())
}
