//! Run configuration in TOML.
//!
//! Model keys sit at the top level as dotted keys; grid, noise and run
//! settings live in their own tables:
//!
//! ```toml
//! eigenvalues.kind = "square"      # or "custom-list" with eigenvalues.values = [...]
//! modes = 64
//! a1.c = 0.5
//! a1.mu = 0.5
//! a2.c = 0.25
//! a2.nu = 0.5
//! delay.r = 1.0
//! kernel.form = "constant"         # zero | constant | linear | sampled
//! kernel.params = [1.0]
//!
//! [grid]
//! m = 512
//! intervals = 3
//!
//! [noise]
//! kind = "inverse-square"          # inverse-square | power-law | custom
//!
//! [run]
//! seed = 0
//! paths = 200
//! ```
//!
//! Every key is optional; missing keys take the defaults shown by
//! [`RunConfig::default`]. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dashboard::{DashboardOptions, ParameterMatrix};
use crate::error::{Error, Result};
use crate::grid::{StepGrid, DEFAULT_INTERVALS, DEFAULT_STEPS_PER_DELAY};
use crate::mild::{Forcing, InitialDatum};
use crate::noise::NoiseModel;
use crate::spectral::{DelayKernel, SpectralModel, Spectrum, Symbol, DEFAULT_MODES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub eigenvalues: EigenvalueSection,
    pub modes: usize,
    pub a1: A1Section,
    pub a2: A2Section,
    pub delay: DelaySection,
    pub kernel: KernelSection,
    pub grid: GridSection,
    pub noise: NoiseSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenvalueKind {
    Square,
    CustomList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenvalueSection {
    pub kind: EigenvalueKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct A1Section {
    pub c: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct A2Section {
    pub c: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DelaySection {
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Zero,
    Constant,
    Linear,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub form: KernelKind,
    /// `constant`: `[a₀]`; `linear`: `[a₀, a₁]`; `sampled`: values on `[-r, 0]`.
    pub params: Vec<f64>,
    /// Declared Hölder order of a sampled kernel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Steps per delay interval.
    pub m: usize,
    /// Number of delay intervals.
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    InverseSquare,
    PowerLaw,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub kind: NoiseKind,
    /// `J`; defaults to the model's mode count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Decay exponent of a power-law covariance.
    pub exponent: f64,
    pub scale: f64,
    /// Covariance eigenvalues of a custom covariance.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<f64>,
    /// Diagonal of `B`; empty means all ones.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub paths: usize,
    pub intervals: Vec<usize>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub kappas: Vec<f64>,
    pub moment_gammas: Vec<f64>,
    pub lattice_points: usize,
    /// Delay intervals simulated for the path estimator in `verify`.
    pub path_intervals: usize,
    /// Ornstein–Uhlenbeck paths calibrating the path estimator bias.
    pub calibration_paths: usize,
    /// `γ` of the `gamma_norm` columns.
    pub report_gamma: f64,
    pub out: PathBuf,
    /// Initial datum file for `mild`, relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datum: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eigenvalues: EigenvalueSection::default(),
            modes: DEFAULT_MODES,
            a1: A1Section::default(),
            a2: A2Section::default(),
            delay: DelaySection::default(),
            kernel: KernelSection::default(),
            grid: GridSection::default(),
            noise: NoiseSection::default(),
            run: RunSection::default(),
        }
    }
}

impl Default for EigenvalueSection {
    fn default() -> Self {
        EigenvalueSection {
            kind: EigenvalueKind::Square,
            values: Vec::new(),
        }
    }
}

impl Default for A1Section {
    fn default() -> Self {
        A1Section { c: 0.5, mu: 0.5 }
    }
}

impl Default for A2Section {
    fn default() -> Self {
        A2Section { c: 0.25, nu: 0.5 }
    }
}

impl Default for DelaySection {
    fn default() -> Self {
        DelaySection { r: 1.0 }
    }
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection {
            form: KernelKind::Constant,
            params: vec![1.0],
            holder_order: None,
        }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            m: DEFAULT_STEPS_PER_DELAY,
            intervals: DEFAULT_INTERVALS,
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            kind: NoiseKind::InverseSquare,
            modes: None,
            exponent: 2.0,
            scale: 1.0,
            q: Vec::new(),
            b: Vec::new(),
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        let m = ParameterMatrix::standard();
        RunSection {
            seed: 0,
            paths: 200,
            intervals: m.intervals,
            gammas: m.gammas,
            betas: m.betas,
            kappas: m.kappas,
            moment_gammas: m.moment_gammas,
            lattice_points: 50,
            path_intervals: 1,
            calibration_paths: 2000,
            report_gamma: 0.5,
            out: PathBuf::from("out"),
            datum: None,
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn invalid(e: Error) -> Error {
    match e {
        Error::InvalidModel(msg) | Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&text)?;
        if let (Some(datum), Some(dir)) = (&config.run.datum, path.parent()) {
            config.run.datum = Some(dir.join(datum));
        }
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every section by building the objects it describes.
    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        self.grid()?;
        self.noise_for(&model)?;
        let r = &self.run;
        check(r.paths > 0, || "run.paths must be positive".into())?;
        check(r.lattice_points >= 2, || {
            "run.lattice_points must be at least 2".into()
        })?;
        check(r.path_intervals >= 1, || {
            "run.path_intervals must be positive".into()
        })?;
        check(r.calibration_paths >= 1, || {
            "run.calibration_paths must be positive".into()
        })?;
        for &g in &r.gammas {
            check(g > 0.0 && g < 1.0, || {
                format!("run.gammas entry {g} is outside (0, 1)")
            })?;
        }
        for &g in &r.moment_gammas {
            check((0.0..1.0).contains(&g), || {
                format!("run.moment_gammas entry {g} is outside [0, 1)")
            })?;
        }
        for &b in &r.betas {
            check(b > 0.0 && b < 1.0, || {
                format!("run.betas entry {b} is outside (0, 1)")
            })?;
        }
        for &k in &r.kappas {
            check(k > 0.0 && k <= 1.0, || {
                format!("run.kappas entry {k} is outside (0, 1]")
            })?;
        }
        check(r.report_gamma >= 0.0 && r.report_gamma.is_finite(), || {
            "run.report_gamma must be nonnegative".into()
        })?;
        Ok(())
    }

    pub fn model(&self) -> Result<SpectralModel> {
        let spectrum = match self.eigenvalues.kind {
            EigenvalueKind::Square => {
                check(self.modes >= 1, || "modes must be positive".into())?;
                Spectrum::Square { modes: self.modes }
            }
            EigenvalueKind::CustomList => {
                check(!self.eigenvalues.values.is_empty(), || {
                    "eigenvalues.values is required for a custom list".into()
                })?;
                Spectrum::Custom(self.eigenvalues.values.clone())
            }
        };
        let r = self.delay.r;
        check(r > 0.0 && r.is_finite(), || {
            format!("delay.r must be positive, got {r}")
        })?;
        let p = &self.kernel.params;
        let want = |n: usize| {
            check(p.len() == n, || {
                format!(
                    "kernel.form {:?} takes {n} parameters, got {}",
                    self.kernel.form,
                    p.len()
                )
            })
        };
        let kernel = match self.kernel.form {
            KernelKind::Zero => DelayKernel::zero(r),
            KernelKind::Constant => {
                want(1)?;
                DelayKernel::constant(r, p[0]).map_err(invalid)?
            }
            KernelKind::Linear => {
                want(2)?;
                DelayKernel::linear(r, p[0], p[1]).map_err(invalid)?
            }
            KernelKind::Sampled => {
                DelayKernel::sampled(r, p.clone(), self.kernel.holder_order).map_err(invalid)?
            }
        };
        SpectralModel::new(
            spectrum,
            Symbol::new(self.a1.c, self.a1.mu),
            Symbol::new(self.a2.c, self.a2.nu),
            r,
            kernel,
        )
        .map_err(invalid)
    }

    pub fn grid(&self) -> Result<StepGrid> {
        StepGrid::new(self.delay.r, self.grid.m, self.grid.intervals).map_err(invalid)
    }

    pub fn noise_for(&self, model: &SpectralModel) -> Result<NoiseModel> {
        let n = &self.noise;
        let modes = n.modes.unwrap_or(match n.kind {
            NoiseKind::Custom => n.q.len(),
            _ => model.modes(),
        });
        check(modes >= 1 && modes <= model.modes(), || {
            format!(
                "noise.modes must lie in [1, {}], got {modes}",
                model.modes()
            )
        })?;
        let base = match n.kind {
            NoiseKind::InverseSquare => NoiseModel::inverse_square(modes)?,
            NoiseKind::PowerLaw => NoiseModel::power_law(modes, n.exponent, n.scale)?,
            NoiseKind::Custom => {
                check(n.q.len() == modes, || {
                    format!("noise.q has {} entries, expected {modes}", n.q.len())
                })?;
                NoiseModel::new(n.q.clone(), vec![1.0; modes])?
            }
        };
        if n.b.is_empty() {
            Ok(base)
        } else {
            check(n.b.len() == modes, || {
                format!("noise.b has {} entries, expected {modes}", n.b.len())
            })?;
            base.with_input(n.b.clone())
        }
    }

    pub fn matrix(&self) -> ParameterMatrix {
        ParameterMatrix {
            intervals: self.run.intervals.clone(),
            gammas: self.run.gammas.clone(),
            betas: self.run.betas.clone(),
            kappas: self.run.kappas.clone(),
            moment_gammas: self.run.moment_gammas.clone(),
        }
    }

    pub fn dashboard_options(&self) -> DashboardOptions {
        DashboardOptions {
            lattice_points: self.run.lattice_points,
            seed: self.run.seed,
            paths: self.run.paths,
            path_intervals: self.run.path_intervals,
            calibration_paths: self.run.calibration_paths,
            ..DashboardOptions::default()
        }
    }
}

/// Initial datum and forcing for `mild`: `phi0` per mode, a constant history
/// per mode and a constant forcing per mode. Missing lists are zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatumFile {
    pub phi0: Vec<f64>,
    pub history: Vec<f64>,
    pub forcing: Vec<f64>,
}

impl DatumFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(e.message().to_string()))
    }

    fn padded(values: &[f64], modes: usize, name: &str) -> Result<Vec<f64>> {
        check(values.len() <= modes, || {
            format!(
                "datum {name} has {} entries but the model has {modes} modes",
                values.len()
            )
        })?;
        let mut out = values.to_vec();
        out.resize(modes, 0.0);
        Ok(out)
    }

    pub fn build(&self, grid: &StepGrid, modes: usize) -> Result<(InitialDatum, Forcing)> {
        let phi0 = Self::padded(&self.phi0, modes, "phi0")?;
        let history = Self::padded(&self.history, modes, "history")?;
        let forcing = Self::padded(&self.forcing, modes, "forcing")?;
        Ok((
            InitialDatum::constant_history(grid, phi0, &history)?,
            Forcing::constant(grid, &forcing)?,
        ))
    }
}
