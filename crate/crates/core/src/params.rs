//! Tunable protocol constants.

use crate::amplamp::{EpsSchedule, DEFAULT_STEP_BUDGET};

/// Communication charge for an approximate reflection:
/// `⌈slope · log2(1/ε)⌉ + offset` qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCost {
    pub slope: f64,
    pub offset: u64,
}

impl Default for ReflectionCost {
    fn default() -> Self {
        Self {
            slope: 1.0,
            offset: 2,
        }
    }
}

impl ReflectionCost {
    pub fn charge(&self, eps: f64) -> u64 {
        let raw = self.slope * (1.0 / eps).log2();
        // Exact powers of two must not round up.
        (raw - 1e-9).ceil().max(0.0) as u64 + self.offset
    }
}

/// Every constant the protocols leave open, with defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub schedule: EpsSchedule,
    pub reflection: ReflectionCost,
    pub step_budget: u64,
    /// Repetitions per guess in the unknown-count search.
    pub unknown_reps: usize,
    /// Budget factor `c` in the `c·√(2^k n)·q` stopping rule.
    pub part2_budget: f64,
    /// Assumed per-run success floor of the known-count search.
    pub part2_success: f64,
    /// Allowance for missed hits when thresholding the subset filter.
    pub part1_miss: f64,
    /// Target error of the subset filter.
    pub part1_error: f64,
    /// Constant in front of the query count of the per-query baseline.
    pub baseline_c: f64,
    /// Run the AND_2 oracle through its explicit two-qubit protocol.
    pub explicit_and: bool,
    /// Reuse amplification results across runs on identical inputs.
    pub memoize: bool,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            schedule: EpsSchedule::default(),
            reflection: ReflectionCost::default(),
            step_budget: DEFAULT_STEP_BUDGET,
            unknown_reps: 31,
            part2_budget: 200.0,
            part2_success: 0.01,
            part1_miss: 0.03,
            part1_error: 1.0 / 16.0,
            baseline_c: 1.0,
            explicit_and: true,
            memoize: true,
        }
    }
}

/// `⌈ln(1/δ) / ln(1/(1−p))⌉`: repetitions that push a per-run success `p`
/// to overall failure at most `δ`.
pub fn repetitions_for(p: f64, delta: f64) -> usize {
    ((1.0 / delta).ln() / (1.0 / (1.0 - p)).ln()).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_charges() {
        let c = ReflectionCost::default();
        assert_eq!(c.charge(1.0 / 400.0), 11);
        assert_eq!(c.charge(1.0 / 1600.0), 13);
        assert_eq!(c.charge(1.0 / 6400.0), 15);
        assert_eq!(c.charge(1.0 / 1024.0), 12);
    }

    #[test]
    fn repetition_count() {
        assert_eq!(repetitions_for(0.14, 0.01), 31);
    }
}
