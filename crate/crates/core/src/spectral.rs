//! Diagonal operator setting.
//!
//! `A` acts on the eigenbasis of `-A` as multiplication by `-λ_k`, the delay
//! coefficients `A₁`, `A₂` act as `c·λ_k^p` with `p ∈ (0, 1)`, and the
//! distributed delay is weighted by a scalar kernel `a(θ)` on `[-r, 0]`.
//! Every operator norm in this setting is a supremum over the retained modes.

use crate::error::{domain, Error, Result};
use crate::report::{Estimate, FitParams, FitReport};

/// How the eigenvalues of `-A` are generated.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `λ_k = k²`, the Dirichlet Laplacian on `(0, π)`.
    Square { modes: usize },
    /// User supplied list, strictly positive and nondecreasing.
    Custom(Vec<f64>),
}

impl Spectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            Spectrum::Square { modes } => (1..=*modes).map(|k| (k * k) as f64).collect(),
            Spectrum::Custom(values) => values.clone(),
        }
    }

    /// The same generator with twice the number of modes, when one exists.
    pub fn doubled(&self) -> Option<Spectrum> {
        match self {
            Spectrum::Square { modes } => Some(Spectrum::Square { modes: 2 * modes }),
            Spectrum::Custom(_) => None,
        }
    }
}

/// Diagonal symbol `c·λ^p` of a delay coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symbol {
    pub coeff: f64,
    pub exponent: f64,
}

impl Symbol {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Symbol { coeff, exponent }
    }

    #[inline]
    pub fn at(&self, lambda: f64) -> f64 {
        if self.coeff == 0.0 {
            0.0
        } else {
            self.coeff * lambda.powf(self.exponent)
        }
    }
}

/// Closed form or sampled description of the delay kernel `a(θ)`, `θ ∈ [-r, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelForm {
    Zero,
    Constant(f64),
    /// `a(θ) = intercept + slope·θ`.
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// Values on a uniform grid of `[-r, 0]`, ascending in `θ`; linear in between.
    Sampled(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderSpec {
    pub order: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayKernel {
    form: KernelForm,
    delay: f64,
    sup_norm: f64,
    holder: Option<HolderSpec>,
}

impl DelayKernel {
    pub fn zero(delay: f64) -> Self {
        Self::build(KernelForm::Zero, delay, None).expect("zero kernel is always valid")
    }

    pub fn constant(delay: f64, value: f64) -> Result<Self> {
        Self::build(KernelForm::Constant(value), delay, None)
    }

    pub fn linear(delay: f64, intercept: f64, slope: f64) -> Result<Self> {
        Self::build(KernelForm::Linear { intercept, slope }, delay, None)
    }

    /// Sampled kernel. `declared_order` is the Hölder order the caller vouches
    /// for; it cannot be inferred from finitely many samples.
    pub fn sampled(delay: f64, values: Vec<f64>, declared_order: Option<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidModel(
                "sampled kernel needs at least two samples".into(),
            ));
        }
        Self::build(KernelForm::Sampled(values), delay, declared_order)
    }

    fn build(form: KernelForm, delay: f64, declared_order: Option<f64>) -> Result<Self> {
        if !(delay > 0.0 && delay.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "delay must be positive, got {delay}"
            )));
        }
        let finite = match &form {
            KernelForm::Zero => true,
            KernelForm::Constant(c) => c.is_finite(),
            KernelForm::Linear { intercept, slope } => intercept.is_finite() && slope.is_finite(),
            KernelForm::Sampled(v) => v.iter().all(|x| x.is_finite()),
        };
        if !finite {
            return Err(Error::InvalidModel(
                "kernel parameters must be finite".into(),
            ));
        }
        let sup_norm = match &form {
            KernelForm::Zero => 0.0,
            KernelForm::Constant(c) => c.abs(),
            KernelForm::Linear { intercept, slope } => {
                intercept.abs().max((intercept - slope * delay).abs())
            }
            KernelForm::Sampled(v) => v.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        };
        let holder = match &form {
            KernelForm::Zero | KernelForm::Constant(_) => Some(HolderSpec {
                order: 1.0,
                constant: 0.0,
            }),
            KernelForm::Linear { slope, .. } => Some(HolderSpec {
                order: 1.0,
                constant: slope.abs(),
            }),
            KernelForm::Sampled(v) => match declared_order {
                None => None,
                Some(order) => {
                    if !(order > 0.0 && order <= 1.0) {
                        return Err(Error::InvalidModel(format!(
                            "Hölder order must lie in (0, 1], got {order}"
                        )));
                    }
                    let step = delay / (v.len() - 1) as f64;
                    let mut constant = 0.0_f64;
                    for i in 0..v.len() {
                        for j in i + 1..v.len() {
                            let dist = (j - i) as f64 * step;
                            constant = constant.max((v[j] - v[i]).abs() / dist.powf(order));
                        }
                    }
                    Some(HolderSpec { order, constant })
                }
            },
        };
        Ok(DelayKernel {
            form,
            delay,
            sup_norm,
            holder,
        })
    }

    pub fn form(&self) -> &KernelForm {
        &self.form
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Essential supremum of `|a|` on `[-r, 0]`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn holder(&self) -> Option<HolderSpec> {
        self.holder
    }

    pub fn is_zero(&self) -> bool {
        match &self.form {
            KernelForm::Zero => true,
            KernelForm::Constant(c) => *c == 0.0,
            KernelForm::Linear { intercept, slope } => *intercept == 0.0 && *slope == 0.0,
            KernelForm::Sampled(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    /// `a(θ)`; arguments outside `[-r, 0]` are clamped.
    pub fn eval(&self, theta: f64) -> f64 {
        let theta = theta.clamp(-self.delay, 0.0);
        match &self.form {
            KernelForm::Zero => 0.0,
            KernelForm::Constant(c) => *c,
            KernelForm::Linear { intercept, slope } => intercept + slope * theta,
            KernelForm::Sampled(v) => {
                let n = v.len() - 1;
                let x = (theta + self.delay) / self.delay * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let frac = x - i as f64;
                v[i] * (1.0 - frac) + v[i + 1] * frac
            }
        }
    }
}

/// Diagonal realization of `A`, `A₁`, `A₂`, the delay `r` and the kernel `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    spectrum: Spectrum,
    eigenvalues: Vec<f64>,
    a1: Symbol,
    a2: Symbol,
    delay: f64,
    kernel: DelayKernel,
}

pub const DEFAULT_MODES: usize = 64;

impl SpectralModel {
    pub fn new(
        spectrum: Spectrum,
        a1: Symbol,
        a2: Symbol,
        delay: f64,
        kernel: DelayKernel,
    ) -> Result<Self> {
        let eigenvalues = spectrum.eigenvalues();
        if eigenvalues.is_empty() {
            return Err(Error::InvalidModel("at least one mode is required".into()));
        }
        if eigenvalues.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidModel(
                "eigenvalues must be positive and finite".into(),
            ));
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidModel(
                "eigenvalues must be nondecreasing".into(),
            ));
        }
        for (name, sym) in [("a1", a1), ("a2", a2)] {
            if !(sym.exponent > 0.0 && sym.exponent < 1.0) {
                return Err(Error::InvalidModel(format!(
                    "{name} exponent must lie in (0, 1), got {}",
                    sym.exponent
                )));
            }
            if !sym.coeff.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "{name} coefficient must be finite"
                )));
            }
        }
        if !(delay > 0.0 && delay.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "delay must be positive, got {delay}"
            )));
        }
        if kernel.delay() != delay {
            return Err(Error::InvalidModel(format!(
                "kernel is defined on [-{}, 0] but the delay is {delay}",
                kernel.delay()
            )));
        }
        Ok(SpectralModel {
            spectrum,
            eigenvalues,
            a1,
            a2,
            delay,
            kernel,
        })
    }

    /// Delay heat equation on `(0, π)` with `A₁ = ½(-Δ)^{1/2}`,
    /// `A₂ = ¼(-Δ)^{1/2}`, unit delay and constant unit kernel.
    pub fn heat_default() -> Self {
        Self::heat(DEFAULT_MODES)
    }

    pub fn heat(modes: usize) -> Self {
        SpectralModel::new(
            Spectrum::Square { modes },
            Symbol::new(0.5, 0.5),
            Symbol::new(0.25, 0.5),
            1.0,
            DelayKernel::constant(1.0, 1.0).unwrap(),
        )
        .expect("default heat model is valid")
    }

    /// No delay terms: `G(t) = e^{tA}`.
    pub fn semigroup_only(modes: usize, delay: f64) -> Result<Self> {
        SpectralModel::new(
            Spectrum::Square { modes },
            Symbol::new(0.0, 0.5),
            Symbol::new(0.0, 0.5),
            delay,
            DelayKernel::zero(delay),
        )
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn a1(&self) -> Symbol {
        self.a1
    }

    pub fn a2(&self) -> Symbol {
        self.a2
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn kernel(&self) -> &DelayKernel {
        &self.kernel
    }

    /// Same model with the spectrum generator doubled; `None` for custom lists.
    pub fn doubled(&self) -> Option<SpectralModel> {
        let spectrum = self.spectrum.doubled()?;
        let eigenvalues = spectrum.eigenvalues();
        Some(SpectralModel {
            spectrum,
            eigenvalues,
            ..self.clone()
        })
    }

    pub fn with_spectrum(&self, spectrum: Spectrum) -> Result<SpectralModel> {
        SpectralModel::new(spectrum, self.a1, self.a2, self.delay, self.kernel.clone())
    }
}

/// `e^{-λt}`, the diagonal entry of `e^{tA}`.
pub fn semigroup_factor(lambda: f64, t: f64) -> Result<f64> {
    if !(lambda > 0.0) || lambda.is_nan() {
        return domain(format!("eigenvalue must be positive, got {lambda}"));
    }
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    Ok((-lambda * t).exp())
}

/// `‖(-A)^γ e^{tA}‖ = sup_k λ_k^γ e^{-λ_k t}`.
pub fn frac_power_semigroup_norm(model: &SpectralModel, gamma: f64, t: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("time must be positive, got {t}"));
    }
    Ok(sup_over_modes(model.eigenvalues(), |l| {
        l.powf(gamma) * (-l * t).exp()
    }))
}

/// `(γ/e)^γ t^{-γ}`, the maximum of `x^γ e^{-xt}` over `x > 0`.
pub fn frac_power_semigroup_ceiling(gamma: f64, t: f64) -> f64 {
    (gamma / std::f64::consts::E).powf(gamma) * t.powf(-gamma)
}

/// Fitted constants for the two fractional-power difference bounds of the
/// semigroup: against `s^{-γ} - t^{-γ}` and against `(t-s)^β s^{-β-γ}`.
#[derive(Debug, Clone)]
pub struct SemigroupDifferenceFit {
    pub inverse_power: FitReport,
    pub holder: FitReport,
}

pub fn semigroup_difference_constant(
    model: &SpectralModel,
    gamma: f64,
    beta: f64,
    pairs: &[(f64, f64)],
) -> Result<SemigroupDifferenceFit> {
    check_gamma(gamma)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("β must be positive, got {beta}"));
    }
    check_pairs(pairs)?;

    let diff = |lams: &[f64], s: f64, t: f64| {
        sup_over_modes(lams, |l| {
            l.powf(gamma) * ((-l * s).exp() - (-l * t).exp()).abs()
        })
    };
    let inverse_power = |s: f64, t: f64| s.powf(-gamma) - t.powf(-gamma);
    let holder = |s: f64, t: f64| (t - s).powf(beta) * s.powf(-beta - gamma);

    let params = FitParams {
        gamma: Some(gamma),
        beta: Some(beta),
        ..FitParams::default()
    };
    let fit = |estimate: Estimate, bound: &dyn Fn(f64, f64) -> f64| {
        let eval = |lams: &[f64]| max_ratio(pairs, |s, t| diff(lams, s, t) / bound(s, t));
        let (value, argmax) = eval(model.eigenvalues());
        let truncation_ratio = model.doubled().map(|d| eval(d.eigenvalues()).0 / value);
        FitReport::constant(estimate, params, value, argmax, None, truncation_ratio)
    };
    Ok(SemigroupDifferenceFit {
        inverse_power: fit(Estimate::SemigroupInversePower, &inverse_power),
        holder: fit(Estimate::SemigroupHolder, &holder),
    })
}

/// Fitted constant `C` in `sup_k |e^{-λ_k t} - e^{-λ_k s}| ≤ C ((t-s)/s)^α`.
/// With `M = 1` the logarithmic bound gives `C ≤ 1/α`.
pub fn semigroup_increment_constant(
    model: &SpectralModel,
    alpha: f64,
    pairs: &[(f64, f64)],
) -> Result<FitReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("α must lie in (0, 1], got {alpha}"));
    }
    check_pairs(pairs)?;
    let eval = |lams: &[f64]| {
        max_ratio(pairs, |s, t| {
            let d = sup_over_modes(lams, |l| ((-l * s).exp() - (-l * t).exp()).abs());
            d / ((t - s) / s).powf(alpha)
        })
    };
    let (value, argmax) = eval(model.eigenvalues());
    let truncation_ratio = model.doubled().map(|d| eval(d.eigenvalues()).0 / value);
    let params = FitParams {
        beta: Some(alpha),
        ..FitParams::default()
    };
    Ok(FitReport::constant(
        Estimate::SemigroupIncrement,
        params,
        value,
        argmax,
        None,
        truncation_ratio,
    ))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        domain(format!("γ must lie in (0, 1), got {gamma}"))
    }
}

fn check_pairs(pairs: &[(f64, f64)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::EmptyLattice);
    }
    for &(s, t) in pairs {
        if !(s > 0.0 && s < t && t.is_finite()) {
            return domain(format!("lattice pair ({s}, {t}) violates 0 < s < t"));
        }
    }
    Ok(())
}

pub(crate) fn sup_over_modes(lams: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    lams.iter().fold(0.0_f64, |m, &l| m.max(f(l)))
}

pub(crate) fn max_ratio(
    pairs: &[(f64, f64)],
    ratio: impl Fn(f64, f64) -> f64,
) -> (f64, Option<(f64, f64)>) {
    let mut best = 0.0_f64;
    let mut arg = None;
    for &(s, t) in pairs {
        let r = ratio(s, t);
        if r.is_nan() {
            return (f64::NAN, Some((s, t)));
        }
        if arg.is_none() || r > best {
            best = r;
            arg = Some((s, t));
        }
    }
    (best, arg)
}
