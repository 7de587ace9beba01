//! Constant fitting for the regularity estimates of the fundamental solution.
//!
//! A fit is the smallest constant making a named inequality hold at every
//! lattice point. Each fit is repeated on the grid refined `m → 2m` and on the
//! spectrum doubled `K → 2K`; a constant that keeps growing is reported as
//! diverged instead of failing.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fundamental::{gamma_kernel_profile, solve_all, FundamentalSolution};
use crate::grid::StepGrid;
use crate::report::{Estimate, FitParams, FitReport};
use crate::spectral::SpectralModel;

/// Lattice of node pairs `(s, t)` on a base grid. Single-time estimates use `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    steps_per_delay: usize,
    points: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn from_pairs(grid: &StepGrid, points: Vec<(usize, usize)>) -> Self {
        Lattice {
            steps_per_delay: grid.steps_per_delay(),
            points,
        }
    }

    /// Times `t` in `(nr, (n+1)r]`, skipping the first node after the join.
    pub fn interval_times(grid: &StepGrid, n: usize, count: usize) -> Self {
        let m = grid.steps_per_delay();
        let nodes = spread(n * m + 2, (n + 1) * m, count);
        Lattice::from_pairs(grid, nodes.into_iter().map(|t| (t, t)).collect())
    }

    /// All pairs `s < t` from `count` nodes spread over the open interval
    /// `(nr, (n+1)r)`.
    pub fn open_interval_pairs(grid: &StepGrid, n: usize, count: usize) -> Self {
        let m = grid.steps_per_delay();
        let nodes = spread(n * m + 1, (n + 1) * m - 1, count);
        Lattice::from_pairs(grid, pairs(&nodes))
    }

    /// All pairs `s < t` from `count` nodes spread over `[nr, (n+1)r]`.
    pub fn closed_interval_pairs(grid: &StepGrid, n: usize, count: usize) -> Self {
        let m = grid.steps_per_delay();
        let nodes = spread(n * m, (n + 1) * m, count);
        Lattice::from_pairs(grid, pairs(&nodes))
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Node pairs on a grid with `steps_per_delay` a multiple of the base one.
    fn on(&self, grid: &StepGrid) -> Result<Vec<(usize, usize)>> {
        let m = grid.steps_per_delay();
        if !m.is_multiple_of(self.steps_per_delay) {
            return domain(format!(
                "lattice built for m = {} cannot be mapped to m = {m}",
                self.steps_per_delay
            ));
        }
        let f = m / self.steps_per_delay;
        Ok(self.points.iter().map(|&(s, t)| (s * f, t * f)).collect())
    }
}

/// Up to `count` distinct, evenly spread integers in `[lo, hi]`.
fn spread(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if hi < lo || count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![hi];
    }
    let span = (hi - lo) as f64;
    let mut out: Vec<usize> = (0..count)
        .map(|k| lo + (span * k as f64 / (count - 1) as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

fn pairs(nodes: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, &s) in nodes.iter().enumerate() {
        for &t in &nodes[a + 1..] {
            out.push((s, t));
        }
    }
    out
}

/// Fundamental solutions at the base resolution, at `m → 2m` and at `K → 2K`.
#[derive(Debug, Clone)]
pub struct RefinementSet {
    pub base: FundamentalSolution,
    pub refined: FundamentalSolution,
    /// `None` when the spectrum has no generator to double.
    pub doubled: Option<FundamentalSolution>,
}

impl RefinementSet {
    pub fn build(model: &SpectralModel, grid: &StepGrid) -> Result<Self> {
        let base = solve_all(model, grid)?;
        Self::from_base(base)
    }

    pub fn from_base(base: FundamentalSolution) -> Result<Self> {
        let refined = solve_all(&base.model, &base.grid.refined(2))?;
        let doubled = match base.model.doubled() {
            Some(model) => Some(solve_all(&model, &base.grid)?),
            None => None,
        };
        Ok(RefinementSet {
            base,
            refined,
            doubled,
        })
    }
}

/// Whether the parameters lie where the corresponding bound is claimed.
pub fn in_proven_range(estimate: Estimate, model: &SpectralModel, params: &FitParams) -> bool {
    let nu = model.a2().exponent;
    let gamma_ok = |g: Option<f64>| g.is_some_and(|g| g >= nu && g < 1.0);
    match estimate {
        Estimate::GammaNormDecay | Estimate::GammaIntegral => gamma_ok(params.gamma),
        Estimate::GammaIncrement => {
            gamma_ok(params.gamma)
                && params
                    .beta
                    .zip(params.gamma)
                    .is_some_and(|(b, g)| b > 0.0 && b < 1.0 - g)
        }
        Estimate::OperatorIncrement => match (model.kernel().holder(), params.kappa) {
            (Some(h), Some(k)) => k > 0.0 && k < h.order,
            _ => false,
        },
        Estimate::KernelHolder => params
            .beta
            .zip(params.gamma)
            .is_some_and(|(b, g)| g > 0.0 && g < 1.0 && b > 0.0 && b < 1.0 - g),
        _ => true,
    }
}

/// Smallest constant for `estimate` on `lattice`, with refinement diagnostics.
///
/// Required parameters: `GammaNormDecay`/`GammaIntegral` need `n`, `γ`;
/// `GammaIncrement` needs `n`, `γ`, `β`; `OperatorIncrement` needs `n`, `κ`;
/// `KernelHolder` needs `γ`, `β` (lattice on `[0, r]`).
pub fn fit_estimate(
    estimate: Estimate,
    set: &RefinementSet,
    params: FitParams,
    lattice: &Lattice,
) -> Result<FitReport> {
    if lattice.is_empty() {
        return Err(Error::EmptyLattice);
    }
    validate(estimate, &set.base, &params, lattice)?;
    let (value, argmax) = constant_on(estimate, &set.base, &params, lattice)?;
    let refined = constant_on(estimate, &set.refined, &params, lattice)?.0;
    let doubled = match &set.doubled {
        Some(fs) => Some(constant_on(estimate, fs, &params, lattice)?.0),
        None => None,
    };
    let mut report = FitReport::constant(
        estimate,
        params,
        value,
        argmax,
        Some(growth(refined, value)),
        doubled.map(|d| growth(d, value)),
    );
    report.outside_proven_range = !in_proven_range(estimate, &set.base.model, &params);
    Ok(report)
}

/// `new / old`, with `0 / 0 = 1` (identically vanishing constants are stable).
fn growth(new: f64, old: f64) -> f64 {
    if new == 0.0 && old == 0.0 {
        1.0
    } else {
        new / old
    }
}

fn require(v: Option<f64>, name: &str, estimate: Estimate) -> Result<f64> {
    v.ok_or_else(|| Error::Domain(format!("{estimate} needs parameter {name}")))
}

fn validate(
    estimate: Estimate,
    fs: &FundamentalSolution,
    params: &FitParams,
    lattice: &Lattice,
) -> Result<()> {
    let grid = &fs.grid;
    let m = grid.steps_per_delay();
    let n = params.n;
    let needs_n = || n.ok_or_else(|| Error::Domain(format!("{estimate} needs parameter n")));
    for &(s, t) in lattice.on(grid)?.iter() {
        if t > grid.last() {
            return domain(format!("lattice node {t} is beyond the grid"));
        }
        let ok = match estimate {
            Estimate::GammaNormDecay => {
                let n = needs_n()?;
                t > n * m && t <= (n + 1) * m
            }
            Estimate::GammaIntegral => {
                let n = needs_n()?;
                s >= n * m && s < t && t <= (n + 1) * m
            }
            Estimate::GammaIncrement | Estimate::OperatorIncrement => {
                let n = needs_n()?;
                s > n * m && s < t && t < (n + 1) * m
            }
            Estimate::KernelHolder => s < t && t <= m,
            other => return domain(format!("{other} is not a lattice estimate")),
        };
        if !ok {
            return domain(format!(
                "lattice point ({}, {}) is outside the domain of {estimate}",
                grid.node(s),
                grid.node(t)
            ));
        }
    }
    Ok(())
}

fn constant_on(
    estimate: Estimate,
    fs: &FundamentalSolution,
    params: &FitParams,
    lattice: &Lattice,
) -> Result<(f64, Option<(f64, f64)>)> {
    let grid = &fs.grid;
    let nodes = lattice.on(grid)?;
    let r = grid.delay();
    let origin = |n: Option<usize>| n.unwrap_or(0) as f64 * r;

    let ratios: Vec<f64> = match estimate {
        Estimate::GammaNormDecay => {
            let gamma = require(params.gamma, "γ", estimate)?;
            let start = origin(params.n);
            nodes
                .par_iter()
                .map(|&(_, t)| Ok((grid.node(t) - start).powf(gamma) * fs.gamma_norm(gamma, t)?))
                .collect::<Result<_>>()?
        }
        Estimate::GammaIntegral => {
            let gamma = require(params.gamma, "γ", estimate)?;
            nodes
                .par_iter()
                .map(|&(s, t)| fs.gamma_integral_norm(gamma, s, t))
                .collect::<Result<_>>()?
        }
        Estimate::GammaIncrement => {
            let gamma = require(params.gamma, "γ", estimate)?;
            let beta = require(params.beta, "β", estimate)?;
            let start = origin(params.n);
            nodes
                .par_iter()
                .map(|&(s, t)| {
                    let (ts, tt) = (grid.node(s), grid.node(t));
                    let bound = (tt - ts).powf(beta) * (ts - start).powf(-beta - gamma);
                    Ok(fs.gamma_increment_norm(gamma, s, t)? / bound)
                })
                .collect::<Result<_>>()?
        }
        Estimate::OperatorIncrement => {
            let kappa = require(params.kappa, "κ", estimate)?;
            let start = origin(params.n);
            nodes
                .par_iter()
                .map(|&(s, t)| {
                    let (ts, tt) = (grid.node(s), grid.node(t));
                    let bound = ((tt - ts) / (ts - start)).powf(kappa);
                    Ok(fs.operator_increment_norm(s, t)? / bound)
                })
                .collect::<Result<_>>()?
        }
        Estimate::KernelHolder => {
            let gamma = require(params.gamma, "γ", estimate)?;
            let beta = require(params.beta, "β", estimate)?;
            let profile = gamma_kernel_profile(&fs.model, grid, gamma)?;
            nodes
                .par_iter()
                .map(|&(s, t)| {
                    let diff = profile
                        .iter()
                        .fold(0.0_f64, |acc, p| acc.max((p[t] - p[s]).abs()));
                    diff / (grid.node(t) - grid.node(s)).powf(beta)
                })
                .collect()
        }
        other => return domain(format!("{other} is not a lattice estimate")),
    };

    let mut best = 0.0_f64;
    let mut arg = None;
    for (&(s, t), &v) in nodes.iter().zip(&ratios) {
        if v.is_nan() {
            return Ok((f64::NAN, Some((grid.node(s), grid.node(t)))));
        }
        if arg.is_none() || v > best {
            best = v;
            arg = Some((grid.node(s), grid.node(t)));
        }
    }
    Ok((best, arg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_and_pairs() {
        assert_eq!(spread(2, 10, 5), vec![2, 4, 6, 8, 10]);
        assert_eq!(spread(2, 4, 10), vec![2, 3, 4]);
        assert_eq!(pairs(&[1, 2, 3]), vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn lattice_builders_respect_domains() {
        let grid = StepGrid::new(1.0, 64, 3).unwrap();
        let l = Lattice::interval_times(&grid, 1, 20);
        assert!(l.points().iter().all(|&(_, t)| t > 65 && t <= 128));
        let p = Lattice::open_interval_pairs(&grid, 2, 10);
        assert_eq!(p.len(), 45);
        assert!(p.points().iter().all(|&(s, t)| s > 128 && t < 192 && s < t));
        let refined = p.on(&grid.refined(2)).unwrap();
        assert_eq!(refined[0], (p.points()[0].0 * 2, p.points()[0].1 * 2));
    }

    #[test]
    fn empty_lattice_is_an_error() {
        let model = SpectralModel::semigroup_only(4, 1.0).unwrap();
        let grid = StepGrid::new(1.0, 16, 1).unwrap();
        let set = RefinementSet::build(&model, &grid).unwrap();
        let empty = Lattice::from_pairs(&grid, vec![]);
        for e in Estimate::LATTICE_FITS {
            assert!(matches!(
                fit_estimate(e, &set, FitParams::default(), &empty),
                Err(Error::EmptyLattice)
            ));
        }
    }

    #[test]
    fn out_of_domain_points_are_rejected() {
        let model = SpectralModel::heat(4);
        let grid = StepGrid::new(1.0, 16, 2).unwrap();
        let set = RefinementSet::build(&model, &grid).unwrap();
        let params = FitParams {
            n: Some(0),
            gamma: Some(0.5),
            beta: Some(0.2),
            kappa: Some(0.3),
        };
        let straddle = Lattice::from_pairs(&grid, vec![(8, 20)]);
        assert!(fit_estimate(Estimate::GammaIncrement, &set, params, &straddle).is_err());
        let at_join = Lattice::from_pairs(&grid, vec![(0, 8)]);
        assert!(fit_estimate(Estimate::OperatorIncrement, &set, params, &at_join).is_err());
        let missing = FitParams {
            beta: None,
            ..params
        };
        let ok = Lattice::from_pairs(&grid, vec![(2, 8)]);
        assert!(fit_estimate(Estimate::GammaIncrement, &set, missing, &ok).is_err());
    }

    #[test]
    fn semigroup_decay_constant_is_bounded_by_calculus_maximum() {
        let model = SpectralModel::semigroup_only(64, 1.0).unwrap();
        let grid = StepGrid::new(1.0, 256, 1).unwrap();
        let set = RefinementSet::build(&model, &grid).unwrap();
        let params = FitParams {
            n: Some(0),
            gamma: Some(0.5),
            ..FitParams::default()
        };
        let lattice = Lattice::interval_times(&grid, 0, 200);
        let fit = fit_estimate(Estimate::GammaNormDecay, &set, params, &lattice).unwrap();
        let ceiling = (0.5 / std::f64::consts::E).sqrt();
        assert!(fit.value <= ceiling + 1e-12, "{} > {ceiling}", fit.value);
        assert!(fit.value > 0.9 * ceiling);
        assert!(!fit.diverged);
        assert!(!fit.outside_proven_range);
    }

    #[test]
    fn range_tags() {
        let model = SpectralModel::heat_default();
        let p = |gamma, beta, kappa| FitParams {
            n: Some(0),
            gamma,
            beta,
            kappa,
        };
        assert!(in_proven_range(
            Estimate::GammaNormDecay,
            &model,
            &p(Some(0.5), None, None)
        ));
        assert!(!in_proven_range(
            Estimate::GammaNormDecay,
            &model,
            &p(Some(0.3), None, None)
        ));
        assert!(!in_proven_range(
            Estimate::GammaIncrement,
            &model,
            &p(Some(0.75), Some(0.3), None)
        ));
        assert!(in_proven_range(
            Estimate::OperatorIncrement,
            &model,
            &p(None, None, Some(0.4))
        ));
        assert!(!in_proven_range(
            Estimate::KernelHolder,
            &model,
            &p(Some(0.5), Some(0.5), None)
        ));
    }
}
