//! Spectral solver and regularity lab for linear evolution equations with
//! delayed and distributed-delay terms.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dashboard;
pub mod error;
pub mod estimates;
pub mod fundamental;
pub mod grid;
pub mod io;
pub mod mild;
pub mod noise;
pub(crate) mod quad;
pub mod regularity;
pub mod report;
pub mod spectral;
pub mod stats;
pub mod stochastic;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use estimates::{fit_estimate, Lattice, RefinementSet};
pub use fundamental::{solve_all, solve_mode, FundamentalSolution, ModeFundamental};
pub use grid::StepGrid;
pub use mild::{mild_solve, residual_check, Forcing, InitialDatum, Trajectory};
pub use noise::NoiseModel;
pub use report::{Estimate, FitParams, FitReport};
pub use spectral::{DelayKernel, KernelForm, SpectralModel, Spectrum, Symbol};
pub use stochastic::{
    exact_gaussian_sample, moment_curve, second_moment, simulate_paths, ExactGaussianSampler,
    MomentCurve, PathEnsemble, SamplePath,
};
