//! Seeded Monte-Carlo trials and the small regressions used to read them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials on the rayon pool and returns their
/// results in trial order.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i)))
        .collect()
}

/// `3σ` of a binomial frequency with success probability `p` over `trials`.
pub fn three_sigma(p: f64, trials: usize) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Least-squares fit of `y ≈ c·x` through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalFit {
    pub c: f64,
    /// `|y − c·x| / (c·x)` per point.
    pub residuals: Vec<f64>,
}

impl ProportionalFit {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let c = sxy / sxx;
        let residuals = x.iter().zip(y).map(|(a, b)| (b - c * a).abs() / (c * a)).collect();
        Self { c, residuals }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn trials_are_reproducible_and_ordered() {
        let a = run_trials(20, 9, |i, rng| (i, rng.gen::<u32>()));
        let b = run_trials(20, 9, |i, rng| (i, rng.gen::<u32>()));
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(k, &(i, _))| k as u64 == i));
        assert_ne!(a[0].1, a[1].1);
    }

    #[test]
    fn exact_proportional_fit() {
        let x = [1.0, 2.0, 4.0];
        let fit = ProportionalFit::new(&x, &[3.0, 6.0, 12.0]);
        assert!((fit.c - 3.0).abs() < 1e-12);
        assert!(fit.max_residual() < 1e-12);
    }

    #[test]
    fn slope_sign() {
        assert!(ols_slope(&[1.0, 2.0, 3.0], &[1.0, 1.5, 2.5]) > 0.0);
        assert!((ols_slope(&[0.0, 1.0], &[5.0, 3.0]) + 2.0).abs() < 1e-12);
    }
}
