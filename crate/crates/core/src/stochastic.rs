//! Stochastic convolution `W_G(t) = ∫_0^t G(t-s) B dW(s)`.
//!
//! Paths use a left-point Itô sum on the solver grid in which each step
//! carries the exponentially weighted increment
//! `ξ_l = ∫_{t_l}^{t_{l+1}} e^{-λ(t_{l+1}-u)} dW(u)`:
//!
//! ```text
//! W_j(t_i) = Σ_{l<i} g_j(t_i - t_{l+1}) b_j ξ_l,   ξ_l ~ N(0, q_j (1 - e^{-2λh}) / (2λ))
//! ```
//!
//! This is exact for the semigroup part and keeps modes with `λh ≫ 1` at their
//! true variance. Second moments of increments come from the Itô isometry and
//! serve as the oracle for the Monte Carlo estimates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fundamental::FundamentalSolution;
use crate::grid::StepGrid;
use crate::noise::NoiseModel;
use crate::quad::exp_fit_sum;

/// Generator for one `(path, mode)` stream. Draws are consumed in step order,
/// so the value at each step depends only on `(seed, path, mode, step)`.
pub fn stream_rng(seed: u64, path: usize, mode: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((path as u64) << 32) | mode as u64);
    rng
}

fn check_noise(fs: &FundamentalSolution, noise: &NoiseModel) -> Result<()> {
    if noise.modes() > fs.mode_count() {
        return domain(format!(
            "noise has {} modes but the model retains {}",
            noise.modes(),
            fs.mode_count()
        ));
    }
    Ok(())
}

/// Paths of the stochastic convolution, regenerated on demand from the seed.
#[derive(Debug, Clone, Copy)]
pub struct PathEnsemble<'a> {
    fs: &'a FundamentalSolution,
    noise: &'a NoiseModel,
    seed: u64,
    count: usize,
}

/// One path: `values[j][i] = W_j(t_i)` for the noise modes `j < J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub eigenvalues: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SamplePath {
    pub fn h_norm(&self, i: usize) -> f64 {
        self.gamma_norm(0.0, i)
    }

    /// `‖(-A)^γ W(t_i)‖`.
    pub fn gamma_norm(&self, gamma: f64, i: usize) -> f64 {
        self.weighted(gamma, |w| w[i])
    }

    /// `‖(-A)^γ (W(t_b) - W(t_a))‖`.
    pub fn increment_norm(&self, gamma: f64, a: usize, b: usize) -> f64 {
        self.weighted(gamma, |w| w[b] - w[a])
    }

    fn weighted(&self, gamma: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.values
            .iter()
            .zip(&self.eigenvalues)
            .map(|(w, &l)| {
                let v = f(w);
                let weight = if gamma == 0.0 {
                    1.0
                } else {
                    l.powf(2.0 * gamma)
                };
                weight * v * v
            })
            .sum::<f64>()
            .sqrt()
    }
}

pub fn simulate_paths<'a>(
    fs: &'a FundamentalSolution,
    noise: &'a NoiseModel,
    seed: u64,
    count: usize,
) -> Result<PathEnsemble<'a>> {
    check_noise(fs, noise)?;
    if count == 0 {
        return domain("path count must be positive");
    }
    Ok(PathEnsemble {
        fs,
        noise,
        seed,
        count,
    })
}

impl<'a> PathEnsemble<'a> {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> &StepGrid {
        &self.fs.grid
    }

    pub fn noise(&self) -> &NoiseModel {
        self.noise
    }

    pub fn path(&self, p: usize) -> SamplePath {
        let grid = &self.fs.grid;
        let n = grid.last();
        let h = grid.step();
        let values = (0..self.noise.modes())
            .map(|j| {
                let mut w = vec![0.0; n + 1];
                let b = self.noise.b()[j];
                if b == 0.0 {
                    return w;
                }
                let mode = &self.fs.modes[j];
                let sd = (self.noise.q()[j] * step_variance(mode.lambda, h)).sqrt();
                let g = &mode.values;
                let mut rng = stream_rng(self.seed, p, j);
                for l in 0..n {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let xi = b * sd * z;
                    // W(t_i) += g(t_i - t_{l+1}) b ξ_l for i > l
                    for (wi, gi) in w[l + 1..].iter_mut().zip(&g[..n - l]) {
                        *wi += gi * xi;
                    }
                }
                w
            })
            .collect();
        SamplePath {
            eigenvalues: self.fs.modes[..self.noise.modes()]
                .iter()
                .map(|m| m.lambda)
                .collect(),
            values,
        }
    }

    /// `f(p, path)` for every path, in path order, computed in parallel.
    pub fn map<T: Send>(&self, f: impl Fn(usize, &SamplePath) -> T + Sync) -> Vec<T> {
        (0..self.count)
            .into_par_iter()
            .map(|p| f(p, &self.path(p)))
            .collect()
    }

    /// Monte Carlo mean and standard error of `‖(-A)^γ (W(t) - W(s))‖²` per pair.
    pub fn increment_moments(&self, gamma: f64, pairs: &[(usize, usize)]) -> Vec<(f64, f64)> {
        let samples = self.map(|_, path| {
            pairs
                .iter()
                .map(|&(s, t)| path.increment_norm(gamma, s, t).powi(2))
                .collect::<Vec<_>>()
        });
        let p = self.count as f64;
        (0..pairs.len())
            .map(|k| {
                let mean = samples.iter().map(|v| v[k]).sum::<f64>() / p;
                if self.count < 2 {
                    return (mean, f64::NAN);
                }
                let var = samples.iter().map(|v| (v[k] - mean).powi(2)).sum::<f64>() / (p - 1.0);
                (mean, (var / p).sqrt())
            })
            .collect()
    }
}

/// `(1 - e^{-2λh}) / (2λ)`, the variance of `ξ_l` per unit `q`.
fn step_variance(lambda: f64, h: f64) -> f64 {
    -(-2.0 * lambda * h).exp_m1() / (2.0 * lambda)
}

/// `E‖(-A)^γ (W_G(t) - W_G(s))‖²` by the Itô isometry,
///
/// ```text
/// Σ_j q_j b_j² λ_j^{2γ} [ ∫_s^t g_j(t-u)² du + ∫_0^s (g_j(t-u) - g_j(s-u))² du ]
/// ```
///
/// Both integrands are nonnegative and decay exponentially in stiff modes;
/// each grid panel is integrated with log-linear interpolation, which is exact
/// for `e^{-2λu}` and second order otherwise.
pub fn second_moment(
    fs: &FundamentalSolution,
    noise: &NoiseModel,
    gamma: f64,
    s: usize,
    t: usize,
) -> Result<f64> {
    check_noise(fs, noise)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return domain(format!("γ must be nonnegative, got {gamma}"));
    }
    if s > t || t > fs.grid.last() {
        return domain(format!("need 0 ≤ s ≤ t on the grid, got nodes {s}, {t}"));
    }
    if s == t {
        return Ok(0.0);
    }
    let h = fs.grid.step();
    let mut total = 0.0;
    for j in 0..noise.modes() {
        let weight = noise.q()[j] * noise.b()[j].powi(2);
        if weight == 0.0 {
            continue;
        }
        let mode = &fs.modes[j];
        let g = &mode.values;
        let fresh = exp_fit_sum(g[..=t - s].iter().map(|v| v * v), h);
        let old = exp_fit_sum((0..=s).map(|l| (g[t - l] - g[s - l]).powi(2)), h);
        let power = if gamma == 0.0 {
            1.0
        } else {
            mode.lambda.powf(2.0 * gamma)
        };
        total += weight * power * (fresh + old);
    }
    Ok(total)
}

/// Second moments of increments over a lattice of node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCurve {
    pub gamma: f64,
    /// Node pairs `(s, t)`.
    pub pairs: Vec<(usize, usize)>,
    /// `t - s` in time units.
    pub increments: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn moment_curve(
    fs: &FundamentalSolution,
    noise: &NoiseModel,
    gamma: f64,
    pairs: &[(usize, usize)],
) -> Result<MomentCurve> {
    let values = pairs
        .par_iter()
        .map(|&(s, t)| second_moment(fs, noise, gamma, s, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentCurve {
        gamma,
        pairs: pairs.to_vec(),
        increments: pairs
            .iter()
            .map(|&(s, t)| fs.grid.node(t) - fs.grid.node(s))
            .collect(),
        values,
    })
}

/// Pairs `(s, s + d)` with node offsets `d` log-spaced in `[lo, hi]`.
pub fn increment_pairs(s: usize, lo: usize, hi: usize, count: usize) -> Vec<(usize, usize)> {
    let lo = lo.max(1);
    let hi = hi.max(lo);
    let ratio = (hi as f64 / lo as f64).ln();
    let mut offsets: Vec<usize> = (0..count)
        .map(|k| {
            let x = if count > 1 {
                k as f64 / (count - 1) as f64
            } else {
                1.0
            };
            (lo as f64 * (ratio * x).exp()).round() as usize
        })
        .collect();
    offsets.dedup();
    offsets.into_iter().map(|d| (s, s + d)).collect()
}

/// Exact Gaussian sampler of `(W_j(t_a))_a` at a few nodes.
#[derive(Debug, Clone)]
pub struct ExactGaussianSampler {
    nodes: Vec<usize>,
    eigenvalues: Vec<f64>,
    /// Per mode, `V Λ^{1/2}` of the node covariance.
    factors: Vec<DMatrix<f64>>,
}

pub const MAX_EXACT_NODES: usize = 128;

impl ExactGaussianSampler {
    /// Covariance `q_j b_j² ∫_0^{min(t_a, t_b)} g_j(t_a - u) g_j(t_b - u) du`
    /// by the trapezoid rule, factorized per mode. The trapezoid sum is a sum of
    /// rank-one terms, so the matrix is semidefinite up to roundoff; it is
    /// accurate while `λ_j h` stays small.
    pub fn new(fs: &FundamentalSolution, noise: &NoiseModel, nodes: &[usize]) -> Result<Self> {
        check_noise(fs, noise)?;
        if nodes.is_empty() || nodes.len() > MAX_EXACT_NODES {
            return domain(format!(
                "exact sampling needs 1 to {MAX_EXACT_NODES} nodes, got {}",
                nodes.len()
            ));
        }
        if let Some(&bad) = nodes.iter().find(|&&i| i > fs.grid.last()) {
            return domain(format!("node {bad} is beyond the grid"));
        }
        let h = fs.grid.step();
        let n = nodes.len();
        let factors = (0..noise.modes())
            .into_par_iter()
            .map(|j| {
                let weight = noise.q()[j] * noise.b()[j].powi(2);
                let g = &fs.modes[j].values;
                let cov = DMatrix::from_fn(n, n, |a, b| {
                    let (ta, tb) = (nodes[a], nodes[b]);
                    let top = ta.min(tb);
                    if top == 0 {
                        return 0.0;
                    }
                    let mut acc = 0.5 * (g[ta] * g[tb] + g[ta - top] * g[tb - top]);
                    for l in 1..top {
                        acc += g[ta - l] * g[tb - l];
                    }
                    weight * h * acc
                });
                let trace = cov.trace();
                let eig = SymmetricEigen::new(cov);
                let min = eig.eigenvalues.min();
                if min < -1e-10 * trace.max(f64::MIN_POSITIVE) {
                    return Err(Error::NotPositiveSemidefinite {
                        mode: j,
                        min_eigenvalue: min,
                    });
                }
                let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
                Ok(eig.eigenvectors * DMatrix::from_diagonal(&roots))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactGaussianSampler {
            nodes: nodes.to_vec(),
            eigenvalues: fs.modes[..noise.modes()].iter().map(|m| m.lambda).collect(),
            factors,
        })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Draw `index` of the stream `seed`: `values[j][a] = W_j(t_{nodes[a]})`.
    pub fn sample(&self, seed: u64, index: usize) -> SamplePath {
        let values = self
            .factors
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let mut rng = stream_rng(seed, index, j);
                let z = DVector::from_fn(self.nodes.len(), |_, _| StandardNormal.sample(&mut rng));
                (f * z).iter().copied().collect()
            })
            .collect();
        SamplePath {
            eigenvalues: self.eigenvalues.clone(),
            values,
        }
    }
}

/// One exact Gaussian path at `nodes`.
pub fn exact_gaussian_sample(
    fs: &FundamentalSolution,
    noise: &NoiseModel,
    nodes: &[usize],
    seed: u64,
) -> Result<SamplePath> {
    Ok(ExactGaussianSampler::new(fs, noise, nodes)?.sample(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::solve_all;
    use crate::spectral::{DelayKernel, SpectralModel, Spectrum, Symbol};

    fn ou(lambda: f64, m: usize) -> FundamentalSolution {
        let model = SpectralModel::new(
            Spectrum::Custom(vec![lambda]),
            Symbol::new(0.0, 0.5),
            Symbol::new(0.0, 0.5),
            1.0,
            DelayKernel::zero(1.0),
        )
        .unwrap();
        solve_all(&model, &StepGrid::new(1.0, m, 1).unwrap()).unwrap()
    }

    #[test]
    fn silent_noise_gives_zero_paths() {
        let model = SpectralModel::heat(4);
        let fs = solve_all(&model, &StepGrid::new(1.0, 16, 2).unwrap()).unwrap();
        let noise = NoiseModel::inverse_square(4)
            .unwrap()
            .scaled_input(0.0)
            .unwrap();
        let ens = simulate_paths(&fs, &noise, 7, 3).unwrap();
        for p in 0..3 {
            assert!(ens.path(p).values.iter().flatten().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn rejects_more_noise_modes_than_model_modes() {
        let fs = ou(1.0, 8);
        let noise = NoiseModel::inverse_square(2).unwrap();
        assert!(simulate_paths(&fs, &noise, 0, 1).is_err());
        assert!(second_moment(&fs, &noise, 0.0, 0, 4).is_err());
        assert!(simulate_paths(&fs, &noise.truncated(1).unwrap(), 0, 0).is_err());
    }

    #[test]
    fn paths_are_reproducible() {
        let fs = ou(2.0, 32);
        let noise = NoiseModel::new(vec![1.0], vec![1.0]).unwrap();
        let ens = simulate_paths(&fs, &noise, 42, 4).unwrap();
        assert_eq!(ens.path(2), ens.path(2));
        assert_ne!(ens.path(1), ens.path(2));
        let again = simulate_paths(&fs, &noise, 42, 4).unwrap();
        assert_eq!(ens.map(|_, p| p.clone()), again.map(|_, p| p.clone()));
    }

    #[test]
    fn second_moment_closed_form_for_ou() {
        let lambda = 2.0;
        let fs = ou(lambda, 1024);
        let noise = NoiseModel::new(vec![0.5], vec![1.5]).unwrap();
        let t = fs.grid.last();
        let exact = 0.5 * 2.25 * (1.0 - (-2.0 * lambda).exp()) / (2.0 * lambda);
        let v = second_moment(&fs, &noise, 0.0, 0, t).unwrap();
        assert!((v - exact).abs() < 1e-12 * exact);
        assert_eq!(second_moment(&fs, &noise, 0.3, 17, 17).unwrap(), 0.0);
        // one mode: γ only rescales by λ^{2γ}
        let w = second_moment(&fs, &noise, 0.25, 100, 300).unwrap();
        let u = second_moment(&fs, &noise, 0.0, 100, 300).unwrap();
        assert!((w - lambda.sqrt() * u).abs() < 1e-14);
    }

    #[test]
    fn increment_moments_match_ou_variance() {
        let lambda = 1.0;
        let fs = ou(lambda, 64);
        let noise = NoiseModel::new(vec![1.0], vec![1.0]).unwrap();
        let ens = simulate_paths(&fs, &noise, 3, 2000).unwrap();
        let (mean, se) = ens.increment_moments(0.0, &[(0, 64)])[0];
        let exact = (1.0 - (-2.0 * lambda).exp()) / (2.0 * lambda);
        assert!(
            (mean - exact).abs() < 3.0 * se + 0.01 * exact,
            "{mean} {se} {exact}"
        );
    }

    #[test]
    fn exact_sampler_single_node_variance() {
        let fs = ou(3.0, 256);
        let noise = NoiseModel::new(vec![2.0], vec![1.0]).unwrap();
        let sampler = ExactGaussianSampler::new(&fs, &noise, &[256]).unwrap();
        let exact = 2.0 * (1.0 - (-6.0_f64).exp()) / 6.0;
        let f = sampler.factors[0][(0, 0)];
        assert!((f * f - exact).abs() < 1e-4 * exact);
        let silent = noise.scaled_input(0.0).unwrap();
        let s = exact_gaussian_sample(&fs, &silent, &[10, 100, 256], 1).unwrap();
        assert!(s.values[0].iter().all(|&v| v == 0.0));
        assert!(ExactGaussianSampler::new(&fs, &noise, &[]).is_err());
        assert!(ExactGaussianSampler::new(&fs, &noise, &vec![1; 129]).is_err());
    }

    #[test]
    fn exact_sampler_covariance_is_semidefinite_with_delays() {
        let model = SpectralModel::heat(8);
        let fs = solve_all(&model, &StepGrid::new(1.0, 32, 3).unwrap()).unwrap();
        let noise = NoiseModel::inverse_square(8).unwrap();
        let nodes: Vec<usize> = (1..=96).collect();
        assert!(ExactGaussianSampler::new(&fs, &noise, &nodes).is_ok());
    }

    #[test]
    fn pair_builder() {
        let p = increment_pairs(10, 4, 128, 12);
        assert_eq!(p.first(), Some(&(10, 14)));
        assert_eq!(p.last(), Some(&(10, 138)));
        assert!(p.windows(2).all(|w| w[1].1 > w[0].1));
    }
}
