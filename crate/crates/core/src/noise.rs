//! Truncated Q-Wiener noise with a diagonal input operator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Eigenvalues `q_j` of `Q` and diagonal entries `b_j` of `B`, aligned with
/// the first `J` modes of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    q: Vec<f64>,
    b: Vec<f64>,
    tail: Option<f64>,
}

impl NoiseModel {
    pub fn new(q: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::with_tail(q, b, None)
    }

    fn with_tail(q: Vec<f64>, b: Vec<f64>, tail: Option<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::Config("noise needs at least one mode".into()));
        }
        if q.len() != b.len() {
            return Err(Error::Config(format!(
                "noise has {} covariance eigenvalues but {} input entries",
                q.len(),
                b.len()
            )));
        }
        if let Some(j) = q.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!(
                "covariance eigenvalue {} must be positive, got {}",
                j + 1,
                q[j]
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "input operator has non-finite entries".into(),
            ));
        }
        Ok(NoiseModel { q, b, tail })
    }

    /// `q_j = 6 / (π² j²)`, `b_j = 1`, so that the untruncated trace is 1.
    pub fn inverse_square(modes: usize) -> Result<Self> {
        let q: Vec<f64> = (1..=modes)
            .map(|j| 6.0 / (PI * PI * (j * j) as f64))
            .collect();
        let tail = (1.0 - q.iter().sum::<f64>()).max(0.0);
        Self::with_tail(q, vec![1.0; modes], Some(tail))
    }

    /// `q_j = scale · j^{-exponent}` with `exponent > 1`; the tail is bounded by
    /// `scale · J^{1-exponent} / (exponent - 1)`.
    pub fn power_law(modes: usize, exponent: f64, scale: f64) -> Result<Self> {
        if !(exponent > 1.0) {
            return Err(Error::Config(format!(
                "power-law exponent must exceed 1 for a trace-class covariance, got {exponent}"
            )));
        }
        let q = (1..=modes)
            .map(|j| scale * (j as f64).powf(-exponent))
            .collect();
        let tail = scale * (modes as f64).powf(1.0 - exponent) / (exponent - 1.0);
        Self::with_tail(q, vec![1.0; modes], Some(tail))
    }

    /// Same covariance with input entries `b`.
    pub fn with_input(&self, b: Vec<f64>) -> Result<Self> {
        Self::with_tail(self.q.clone(), b, self.tail)
    }

    /// Input entries multiplied by `factor`.
    pub fn scaled_input(&self, factor: f64) -> Result<Self> {
        self.with_input(self.b.iter().map(|v| v * factor).collect())
    }

    /// Covariance eigenvalue `j` (zero-based) multiplied by `factor`.
    pub fn scaled_mode(&self, j: usize, factor: f64) -> Result<Self> {
        let mut q = self.q.clone();
        q[j] *= factor;
        Self::with_tail(q, self.b.clone(), None)
    }

    /// First `modes` noise modes.
    pub fn truncated(&self, modes: usize) -> Result<Self> {
        let j = modes.min(self.q.len());
        Self::with_tail(self.q[..j].to_vec(), self.b[..j].to_vec(), None)
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `J`.
    pub fn modes(&self) -> usize {
        self.q.len()
    }

    /// Trace of the truncated covariance.
    pub fn trace(&self) -> f64 {
        self.q.iter().sum()
    }

    /// `Σ_{j>J} q_j` (exact or an analytic bound), when known.
    pub fn tail(&self) -> Option<f64> {
        self.tail
    }

    /// `‖B‖²_{L₂(K_Q, H)} = Σ_j q_j b_j²`.
    pub fn hilbert_schmidt_sq(&self) -> f64 {
        self.q.iter().zip(&self.b).map(|(q, b)| q * b * b).sum()
    }

    /// `‖B‖ = sup_j |b_j|`.
    pub fn input_norm(&self) -> f64 {
        self.b.iter().fold(0.0_f64, |acc, b| acc.max(b.abs()))
    }

    pub fn is_silent(&self) -> bool {
        self.b.iter().all(|&b| b == 0.0)
    }
}
