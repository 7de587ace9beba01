//! Verification dashboard: one fit per (estimate, parameter) cell, each with a
//! pass/fail verdict.

use std::fmt::Write as _;

use crate::error::Result;
use crate::estimates::{fit_estimate, in_proven_range, Lattice, RefinementSet};
use crate::fundamental::{gamma_kernel_ceiling, gamma_kernel_profile, solve_all};
use crate::grid::StepGrid;
use crate::noise::NoiseModel;
use crate::regularity::{
    estimate_path_holder, fit_moment_exponent, holder_bias, PathNorm, MIN_LEVELS,
};
use crate::report::{Estimate, FitParams, FitReport};
use crate::spectral::{
    frac_power_semigroup_ceiling, semigroup_difference_constant, semigroup_increment_constant,
    SpectralModel,
};
use crate::stochastic::{increment_pairs, moment_curve, simulate_paths};

/// Parameter lists spanning the dashboard cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterMatrix {
    /// Delay intervals `n`.
    pub intervals: Vec<usize>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub kappas: Vec<f64>,
    /// `γ` values for the moment and path exponents (0 is the H-norm).
    pub moment_gammas: Vec<f64>,
}

impl ParameterMatrix {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
            && self.gammas.is_empty()
            && self.kappas.is_empty()
            && self.moment_gammas.is_empty()
    }

    pub fn standard() -> Self {
        ParameterMatrix {
            intervals: vec![0, 1, 2],
            gammas: vec![0.5, 0.75],
            betas: vec![0.2, 0.4],
            kappas: vec![0.25, 0.4],
            moment_gammas: vec![0.0, 0.25],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DashboardOptions {
    /// Nodes per lattice axis.
    pub lattice_points: usize,
    pub seed: u64,
    pub paths: usize,
    /// Delay intervals simulated for the path estimator.
    pub path_intervals: usize,
    /// Dyadic levels of the path estimator; `None` uses as many as the grid allows, up to 10.
    pub path_levels: Option<u32>,
    /// Paths used to calibrate the estimator bias on exact Ornstein–Uhlenbeck paths.
    pub calibration_paths: usize,
    /// Factor applied to fitted constants before they are compared with known
    /// ceilings. Anything other than 1 is a deliberate fault.
    pub constant_scale: f64,
}

impl Default for DashboardOptions {
    fn default() -> Self {
        DashboardOptions {
            lattice_points: 50,
            seed: 0,
            paths: 200,
            path_intervals: 1,
            path_levels: None,
            calibration_paths: 2000,
            constant_scale: 1.0,
        }
    }
}

/// Fitted value with its verdict. `check` describes the criterion applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub report: FitReport,
    pub passed: bool,
    pub check: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBundle {
    pub cells: Vec<Cell>,
    /// Neglected covariance tail of the noise, when known.
    pub noise_tail: Option<f64>,
}

impl ReportBundle {
    /// Cells inside the proven parameter range that failed.
    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells
            .iter()
            .filter(|c| !c.passed && !c.report.outside_proven_range)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn summary(&self) -> String {
        let in_range = self
            .cells
            .iter()
            .filter(|c| !c.report.outside_proven_range)
            .count();
        let failed = self.failures().count();
        let mut out = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict}");
        let _ = writeln!(
            out,
            "cells: {} ({in_range} in range, {} tagged outside range)",
            self.cells.len(),
            self.cells.len() - in_range
        );
        let _ = writeln!(out, "failed: {failed}");
        if let Some(t) = self.noise_tail {
            let _ = writeln!(out, "noise covariance tail: {t:e}");
        }
        for c in self.failures() {
            let _ = writeln!(
                out,
                "FAIL {} {} value={} ({})",
                c.report.estimate,
                describe(&c.report.params),
                c.report.value,
                c.check
            );
        }
        out
    }
}

fn describe(p: &FitParams) -> String {
    let mut parts = Vec::new();
    if let Some(n) = p.n {
        parts.push(format!("n={n}"));
    }
    for (name, v) in [("gamma", p.gamma), ("beta", p.beta), ("kappa", p.kappa)] {
        if let Some(v) = v {
            parts.push(format!("{name}={v}"));
        }
    }
    parts.join(" ")
}

fn lattice_cell(report: FitReport) -> Cell {
    let passed = !report.diverged;
    Cell {
        report,
        passed,
        check: "finite and stable under m→2m, K→2K".into(),
    }
}

/// Time pairs `0 < s < t ≤ horizon`, log-spaced.
fn time_pairs(horizon: f64, count: usize) -> Vec<(f64, f64)> {
    let lo = horizon * 1e-3;
    let nodes: Vec<f64> = (0..count)
        .map(|k| lo * (horizon / lo).powf(k as f64 / (count.max(2) - 1) as f64))
        .collect();
    let mut out = Vec::new();
    for (a, &s) in nodes.iter().enumerate() {
        for &t in &nodes[a + 1..] {
            out.push((s, t));
        }
    }
    out
}

/// Regularity threshold `β*` for the path exponent in the `γ`-norm: any
/// `β < 1/2 - γ`, capped by the declared kernel order `ρ` when `ρ ≤ 1/2`.
fn path_exponent_ceiling(model: &SpectralModel, gamma: f64) -> f64 {
    let rho = model
        .kernel()
        .holder()
        .filter(|_| model.a2().coeff != 0.0 && !model.kernel().is_zero())
        .map(|h| h.order)
        .unwrap_or(1.0);
    let base = if rho > 0.5 { 0.5 } else { rho };
    base - gamma
}

fn is_semigroup_only(model: &SpectralModel) -> bool {
    model.a1().coeff == 0.0 && (model.a2().coeff == 0.0 || model.kernel().is_zero())
}

pub fn verify_dashboard(
    model: &SpectralModel,
    grid: &StepGrid,
    noise: &NoiseModel,
    matrix: &ParameterMatrix,
    options: &DashboardOptions,
) -> Result<ReportBundle> {
    let mut cells = Vec::new();
    if matrix.is_empty() {
        return Ok(ReportBundle::default());
    }
    let scale = options.constant_scale;
    let points = options.lattice_points.max(2);
    let needs_lattice = !matrix.intervals.is_empty()
        && (!matrix.gammas.is_empty() || !matrix.kappas.is_empty())
        || (!matrix.gammas.is_empty() && !matrix.betas.is_empty());

    if needs_lattice {
        let set = RefinementSet::build(model, grid)?;
        for &n in &matrix.intervals {
            if n >= grid.intervals() {
                continue;
            }
            for &gamma in &matrix.gammas {
                let params = FitParams {
                    n: Some(n),
                    gamma: Some(gamma),
                    ..FitParams::default()
                };
                let decay = fit_estimate(
                    Estimate::GammaNormDecay,
                    &set,
                    params,
                    &Lattice::interval_times(grid, n, points * 4),
                )?;
                let mut cell = lattice_cell(decay);
                if is_semigroup_only(model) {
                    let ceiling = frac_power_semigroup_ceiling(gamma, 1.0);
                    cell.passed &= cell.report.value * scale <= ceiling * (1.0 + 1e-9);
                    cell.check = format!("{} and ≤ (γ/e)^γ = {ceiling:.6}", cell.check);
                }
                cells.push(cell);
                cells.push(lattice_cell(fit_estimate(
                    Estimate::GammaIntegral,
                    &set,
                    params,
                    &Lattice::closed_interval_pairs(grid, n, points),
                )?));
                for &beta in &matrix.betas {
                    let params = FitParams {
                        beta: Some(beta),
                        ..params
                    };
                    cells.push(lattice_cell(fit_estimate(
                        Estimate::GammaIncrement,
                        &set,
                        params,
                        &Lattice::open_interval_pairs(grid, n, points),
                    )?));
                }
            }
            for &kappa in &matrix.kappas {
                let params = FitParams {
                    n: Some(n),
                    kappa: Some(kappa),
                    ..FitParams::default()
                };
                cells.push(lattice_cell(fit_estimate(
                    Estimate::OperatorIncrement,
                    &set,
                    params,
                    &Lattice::open_interval_pairs(grid, n, points),
                )?));
            }
        }
        for &gamma in matrix.gammas.iter().filter(|&&g| g > 0.0 && g < 1.0) {
            let profile = gamma_kernel_profile(model, grid, gamma)?;
            let worst = (1..=grid.steps_per_delay())
                .map(|i| {
                    let value = profile.iter().fold(0.0_f64, |a, p| a.max(p[i].abs()));
                    value * scale
                        / gamma_kernel_ceiling(model, gamma, grid.node(i)).max(f64::MIN_POSITIVE)
                })
                .fold(0.0_f64, f64::max);
            let bounded = worst <= 1.0 + 1e-9 || model.kernel().is_zero();
            for &beta in &matrix.betas {
                let params = FitParams {
                    gamma: Some(gamma),
                    beta: Some(beta),
                    ..FitParams::default()
                };
                let mut cell = lattice_cell(fit_estimate(
                    Estimate::KernelHolder,
                    &set,
                    params,
                    &Lattice::closed_interval_pairs(grid, 0, points),
                )?);
                cell.passed &= bounded;
                cell.check = format!("{} and sup Γ / ceiling = {worst:.4} ≤ 1", cell.check);
                cells.push(cell);
            }
        }
    }

    let pairs = time_pairs(grid.horizon(), 24);
    for &gamma in matrix.gammas.iter().filter(|&&g| g > 0.0 && g < 1.0) {
        for &beta in &matrix.betas {
            let fit = semigroup_difference_constant(model, gamma, beta, &pairs)?;
            for report in [fit.inverse_power, fit.holder] {
                let passed = report.value.is_finite() && !report.diverged;
                cells.push(Cell {
                    report,
                    passed,
                    check: "finite and stable under K→2K".into(),
                });
            }
        }
    }
    for &alpha in matrix.kappas.iter().filter(|&&a| a > 0.0 && a <= 1.0) {
        let report = semigroup_increment_constant(model, alpha, &pairs)?;
        let passed = report.value * scale <= 1.0 / alpha * (1.0 + 1e-12);
        cells.push(Cell {
            report,
            passed,
            check: format!("≤ 1/α = {:.6}", 1.0 / alpha),
        });
    }

    if !matrix.moment_gammas.is_empty() {
        cells.extend(stochastic_cells(model, grid, noise, matrix, options)?);
    }

    for cell in &mut cells {
        let estimate = cell.report.estimate;
        if Estimate::LATTICE_FITS.contains(&estimate) {
            cell.report.outside_proven_range =
                !in_proven_range(estimate, model, &cell.report.params);
        }
    }
    Ok(ReportBundle {
        cells,
        noise_tail: noise.tail(),
    })
}

fn stochastic_cells(
    model: &SpectralModel,
    grid: &StepGrid,
    noise: &NoiseModel,
    matrix: &ParameterMatrix,
    options: &DashboardOptions,
) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let fs = solve_all(model, grid)?;
    let m = grid.steps_per_delay();
    let h = grid.step();
    let window = (4.0 * h, 0.25 * grid.delay());
    let start = grid.last() / 2;
    let pairs = increment_pairs(start, 4, (m / 4).max(4), 16);

    let path_grid = grid.with_intervals(options.path_intervals.clamp(1, grid.intervals()));
    let path_fs = solve_all(model, &path_grid)?;
    let levels = options
        .path_levels
        .unwrap_or_else(|| path_grid.dyadic_levels().min(10));
    let run_paths = options.paths > 0 && levels >= MIN_LEVELS;
    let bias = if run_paths {
        holder_bias(levels, options.calibration_paths.max(1), options.seed)?
    } else {
        0.0
    };
    let ensemble = if run_paths {
        Some(simulate_paths(
            &path_fs,
            noise,
            options.seed,
            options.paths,
        )?)
    } else {
        None
    };

    for &gamma in &matrix.moment_gammas {
        let curve = moment_curve(&fs, noise, gamma, &pairs)?;
        let mut report = fit_moment_exponent(&curve, window)?;
        let floor = if gamma == 0.0 {
            0.9
        } else {
            1.0 - 2.0 * gamma - 0.1
        };
        report.outside_proven_range = !(0.0..0.5).contains(&gamma);
        let slope = report.value;
        let passed = !report.degenerate && slope >= floor;
        cells.push(Cell {
            report,
            passed,
            check: format!("slope ≥ {floor:.3}"),
        });

        if let Some(ensemble) = &ensemble {
            let norm = if gamma == 0.0 {
                PathNorm::H
            } else {
                PathNorm::Gamma(gamma)
            };
            let mut report = estimate_path_holder(ensemble, norm, levels)?;
            report.outside_proven_range = !(0.0..0.5).contains(&gamma);
            let lower = path_exponent_ceiling(model, gamma) - bias - 0.05;
            let upper = slope / 2.0 + 0.1;
            let passed = !report.degenerate && report.value >= lower && report.value <= upper;
            cells.push(Cell {
                report,
                passed,
                check: format!("{lower:.3} ≤ median β ≤ {upper:.3} (estimator bias {bias:.3})"),
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_gives_empty_bundle() {
        let model = SpectralModel::heat(4);
        let grid = StepGrid::new(1.0, 16, 1).unwrap();
        let noise = NoiseModel::inverse_square(4).unwrap();
        let b = verify_dashboard(
            &model,
            &grid,
            &noise,
            &ParameterMatrix::default(),
            &DashboardOptions::default(),
        )
        .unwrap();
        assert!(b.cells.is_empty());
        assert!(b.passed());
    }

    #[test]
    fn semigroup_only_model_passes_and_scaled_constants_fail() {
        let model = SpectralModel::semigroup_only(16, 1.0).unwrap();
        let grid = StepGrid::new(1.0, 64, 2).unwrap();
        let noise = NoiseModel::inverse_square(16).unwrap();
        let matrix = ParameterMatrix {
            intervals: vec![0, 1],
            gammas: vec![0.5],
            betas: vec![0.2],
            kappas: vec![0.4],
            moment_gammas: vec![],
        };
        let options = DashboardOptions {
            lattice_points: 12,
            ..DashboardOptions::default()
        };
        let b = verify_dashboard(&model, &grid, &noise, &matrix, &options).unwrap();
        assert!(b.passed(), "{}", b.summary());
        assert!(b.summary().starts_with("PASS"));
        let bad = DashboardOptions {
            constant_scale: 100.0,
            ..options
        };
        let b = verify_dashboard(&model, &grid, &noise, &matrix, &bad).unwrap();
        assert!(!b.passed());
        assert!(b.summary().starts_with("FAIL"));
    }

    #[test]
    fn out_of_range_cells_are_tagged() {
        let model = SpectralModel::heat(8);
        let grid = StepGrid::new(1.0, 32, 1).unwrap();
        let noise = NoiseModel::inverse_square(8).unwrap();
        let matrix = ParameterMatrix {
            intervals: vec![0],
            gammas: vec![0.25],
            betas: vec![],
            kappas: vec![],
            moment_gammas: vec![],
        };
        let options = DashboardOptions {
            lattice_points: 8,
            ..DashboardOptions::default()
        };
        let b = verify_dashboard(&model, &grid, &noise, &matrix, &options).unwrap();
        assert!(b
            .cells
            .iter()
            .filter(|c| c.report.estimate == Estimate::GammaNormDecay)
            .all(|c| c.report.outside_proven_range));
    }
}
