//! Uniform time grid aligned with the delay.

use crate::error::{Error, Result};

/// `N` delay intervals of `m` steps each; `t_i = q·r + p·h` for `i = q·m + p`,
/// so every multiple of the delay is a node bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGrid {
    delay: f64,
    steps_per_delay: usize,
    intervals: usize,
}

pub const DEFAULT_STEPS_PER_DELAY: usize = 512;
pub const DEFAULT_INTERVALS: usize = 3;

impl StepGrid {
    pub fn new(delay: f64, steps_per_delay: usize, intervals: usize) -> Result<Self> {
        if !(delay > 0.0 && delay.is_finite()) {
            return Err(Error::Config(format!(
                "delay must be positive, got {delay}"
            )));
        }
        if steps_per_delay == 0 || intervals == 0 {
            return Err(Error::Config(
                "grid needs at least one step and one interval".into(),
            ));
        }
        Ok(StepGrid {
            delay,
            steps_per_delay,
            intervals,
        })
    }

    /// Grid from a step size; fails unless `delay / step` is an integer.
    pub fn from_step(delay: f64, step: f64, intervals: usize) -> Result<Self> {
        let ratio = delay / step;
        let m = ratio.round();
        if !(step > 0.0) || m < 1.0 || (ratio - m).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::MisalignedGrid { delay, step });
        }
        StepGrid::new(delay, m as usize, intervals)
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// `m`.
    pub fn steps_per_delay(&self) -> usize {
        self.steps_per_delay
    }

    /// `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn step(&self) -> f64 {
        self.delay / self.steps_per_delay as f64
    }

    /// Index of the last node, `N·m`.
    pub fn last(&self) -> usize {
        self.steps_per_delay * self.intervals
    }

    pub fn len(&self) -> usize {
        self.last() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.node(self.last())
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        let q = i / self.steps_per_delay;
        let p = i % self.steps_per_delay;
        q as f64 * self.delay + p as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Delay interval `n` such that `nr < t_i ≤ (n+1)r`; node 0 maps to 0.
    pub fn interval_of(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            (i - 1) / self.steps_per_delay
        }
    }

    /// Node index of time `t` when `t` is a node (within `1e-9·h`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let h = self.step();
        let x = t / h;
        let i = x.round();
        if i < 0.0 || i > self.last() as f64 {
            return None;
        }
        let i = i as usize;
        ((self.node(i) - t).abs() <= 1e-9 * h).then_some(i)
    }

    /// Same horizon with `m → factor·m`.
    pub fn refined(&self, factor: usize) -> StepGrid {
        StepGrid {
            steps_per_delay: self.steps_per_delay * factor,
            ..*self
        }
    }

    /// Same step with a different number of intervals.
    pub fn with_intervals(&self, intervals: usize) -> StepGrid {
        StepGrid { intervals, ..*self }
    }

    /// Largest `L` such that `2^L` divides `N·m` (capped at 30).
    pub fn dyadic_levels(&self) -> u32 {
        self.last().trailing_zeros().min(30)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_points_are_exact_nodes() {
        for (r, m) in [(1.0, 512), (0.3, 7), (0.1, 3), (2.7, 1000)] {
            let g = StepGrid::new(r, m, 4).unwrap();
            for q in 0..=4 {
                assert_eq!(g.node(q * m), q as f64 * r);
            }
            assert_eq!(g.node(0), 0.0);
            assert_eq!(g.horizon(), 4.0 * r);
            let nodes = g.nodes();
            assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn from_step_detects_misalignment() {
        assert!(StepGrid::from_step(1.0, 0.25, 2).is_ok());
        assert!(matches!(
            StepGrid::from_step(1.0, 0.3, 2),
            Err(Error::MisalignedGrid { .. })
        ));
    }

    #[test]
    fn interval_lookup() {
        let g = StepGrid::new(1.0, 4, 3).unwrap();
        assert_eq!(g.interval_of(0), 0);
        assert_eq!(g.interval_of(4), 0);
        assert_eq!(g.interval_of(5), 1);
        assert_eq!(g.index_of(0.75), Some(3));
        assert_eq!(g.index_of(0.7), None);
        assert_eq!(g.refined(2).index_of(0.75), Some(6));
        assert_eq!(StepGrid::new(1.0, 512, 3).unwrap().dyadic_levels(), 9);
    }
}
