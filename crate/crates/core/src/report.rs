//! Fitted constants and exponents.

use std::fmt;

/// A named estimate whose constant or exponent is fitted on a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimate {
    /// `(t - nr)^γ ‖(-A)^γ G(t)‖ ≤ C` on `(nr, (n+1)r]`.
    GammaNormDecay,
    /// `‖∫_s^t (-A)^γ G(u) du‖ ≤ C` on `[nr, (n+1)r]`.
    GammaIntegral,
    /// `‖(-A)^γ (G(t) - G(s))‖ ≤ C (t-s)^β (s-nr)^{-β-γ}`.
    GammaIncrement,
    /// `‖G(t) - G(s)‖ ≤ C ((t-s)/(s-nr))^κ`.
    OperatorIncrement,
    /// `‖Γ(t) - Γ(s)‖ ≤ C (t-s)^β` on `[0, r]`.
    KernelHolder,
    /// `‖(-A)^γ (e^{tA} - e^{sA})‖ ≤ M (s^{-γ} - t^{-γ})`.
    SemigroupInversePower,
    /// `‖(-A)^γ (e^{tA} - e^{sA})‖ ≤ C (t-s)^β s^{-β-γ}`.
    SemigroupHolder,
    /// `‖e^{tA} - e^{sA}‖ ≤ C ((t-s)/s)^α`.
    SemigroupIncrement,
    /// Log-log slope of the second moment of increments.
    MomentExponent,
    /// Median pathwise Hölder exponent from dyadic increments.
    PathHolder,
}

impl Estimate {
    pub const LATTICE_FITS: [Estimate; 5] = [
        Estimate::GammaNormDecay,
        Estimate::GammaIntegral,
        Estimate::GammaIncrement,
        Estimate::OperatorIncrement,
        Estimate::KernelHolder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimate::GammaNormDecay => "gamma_norm_decay",
            Estimate::GammaIntegral => "gamma_integral",
            Estimate::GammaIncrement => "gamma_increment",
            Estimate::OperatorIncrement => "operator_increment",
            Estimate::KernelHolder => "kernel_holder",
            Estimate::SemigroupInversePower => "semigroup_inverse_power",
            Estimate::SemigroupHolder => "semigroup_holder",
            Estimate::SemigroupIncrement => "semigroup_increment",
            Estimate::MomentExponent => "moment_exponent",
            Estimate::PathHolder => "path_holder",
        }
    }

    pub fn from_name(name: &str) -> Option<Estimate> {
        Self::LATTICE_FITS
            .into_iter()
            .chain([
                Estimate::SemigroupInversePower,
                Estimate::SemigroupHolder,
                Estimate::SemigroupIncrement,
                Estimate::MomentExponent,
                Estimate::PathHolder,
            ])
            .find(|e| e.name() == name)
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FitParams {
    pub n: Option<usize>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
}

/// Relative growth under refinement above which a constant is declared divergent.
pub const DIVERGENCE_GROWTH: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub estimate: Estimate,
    pub params: FitParams,
    /// Fitted constant, or exponent for the exponent estimators.
    pub value: f64,
    /// 95% interval (exponents) or interquartile range (path medians).
    pub interval: Option<(f64, f64)>,
    /// Lattice point `(s, t)` attaining the constant.
    pub argmax: Option<(f64, f64)>,
    /// `value(2m) / value(m)`.
    pub refine_ratio: Option<f64>,
    /// `value(2K) / value(K)`.
    pub truncation_ratio: Option<f64>,
    pub diverged: bool,
    pub outside_proven_range: bool,
    /// Input carried no signal (zero increments, zero moments).
    pub degenerate: bool,
}

impl FitReport {
    pub(crate) fn constant(
        estimate: Estimate,
        params: FitParams,
        value: f64,
        argmax: Option<(f64, f64)>,
        refine_ratio: Option<f64>,
        truncation_ratio: Option<f64>,
    ) -> Self {
        let grows = |r: Option<f64>| r.is_some_and(|r| !(r <= DIVERGENCE_GROWTH));
        let diverged = !value.is_finite() || grows(refine_ratio) || grows(truncation_ratio);
        FitReport {
            estimate,
            params,
            value,
            interval: None,
            argmax,
            refine_ratio,
            truncation_ratio,
            diverged,
            outside_proven_range: false,
            degenerate: false,
        }
    }

    pub(crate) fn exponent(
        estimate: Estimate,
        params: FitParams,
        value: f64,
        interval: Option<(f64, f64)>,
    ) -> Self {
        FitReport {
            estimate,
            params,
            value,
            interval,
            argmax: None,
            refine_ratio: None,
            truncation_ratio: None,
            diverged: !value.is_finite(),
            outside_proven_range: false,
            degenerate: false,
        }
    }

    pub(crate) fn degenerate(estimate: Estimate, params: FitParams) -> Self {
        FitReport {
            estimate,
            params,
            value: f64::NAN,
            interval: None,
            argmax: None,
            refine_ratio: None,
            truncation_ratio: None,
            diverged: true,
            outside_proven_range: false,
            degenerate: true,
        }
    }

    /// Largest relative change of the value under `m → 2m`.
    pub fn refine_change(&self) -> Option<f64> {
        self.refine_ratio.map(|r| (r - 1.0).abs())
    }

    pub fn truncation_change(&self) -> Option<f64> {
        self.truncation_ratio.map(|r| (r - 1.0).abs())
    }
}
