//! Recursive amplitude amplification with perfect or noisy reflections.
//!
//! `A_0 = I` and `A_{j+1} = A_j R_ψ A_j^* O_𝒢 A_j`, where `R_ψ = 2|ψ⟩⟨ψ| − I`
//! and `O_𝒢` flips the sign of good basis states. With perfect reflections
//! `A_k ψ = sin(3^k θ)|G⟩ + cos(3^k θ)|B⟩`. The reflection at level `j` may
//! be replaced by any `R^ε` with `‖R^ε − R_ψ‖ ≤ ε_j` and `R^ε ψ = ψ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::statevector::{CVec, C64};

/// Default cap on `3^k − 1` elementary steps.
pub const DEFAULT_STEP_BUDGET: u64 = 531_441; // 3^12

/// `θ = arcsin √(t/n)`.
pub fn grover_angle(t: usize, n: usize) -> Result<f64> {
    if n == 0 || t > n {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= t <= n and n >= 1, got t={t}, n={n}"
        )));
    }
    Ok((t as f64 / n as f64).sqrt().asin())
}

/// `k = ⌊log₃(π/(2θ))⌋`, so that `3^k θ ∈ (π/6, π/2]`.
pub fn iteration_count(theta: f64) -> Result<usize> {
    if !(theta > 0.0 && theta <= FRAC_PI_2 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "angle {theta} outside (0, pi/2]"
        )));
    }
    let mut k = ((PI / (2.0 * theta)).ln() / 3f64.ln()).floor().max(0.0) as usize;
    // Guard the floor against roundoff at exact powers of three.
    while k > 0 && 3f64.powi(k as i32) * theta > FRAC_PI_2 + 1e-12 {
        k -= 1;
    }
    while 3f64.powi(k as i32 + 1) * theta <= FRAC_PI_2 + 1e-12 {
        k += 1;
    }
    Ok(k)
}

/// `ε_j = 1/(100·4^j)`.
pub fn epsilon_schedule(j: usize) -> f64 {
    EpsSchedule::default().eps(j)
}

/// `ε_j = 1/(base·4^j)`; the default base is 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSchedule {
    pub base: f64,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        Self { base: 100.0 }
    }
}

impl EpsSchedule {
    pub fn eps(&self, j: usize) -> f64 {
        1.0 / (self.base * 4f64.powi(j as i32))
    }

    /// `Σ_{j=1}^k ε_j`.
    pub fn partial_sum(&self, k: usize) -> f64 {
        (1..=k).map(|j| self.eps(j)).sum()
    }
}

/// Elementary steps (oracle calls plus reflections) in `A_k`.
pub fn total_steps(k: usize) -> u64 {
    3u64.pow(k as u32) - 1
}

/// Oracle calls in one application of `A_k`.
pub fn oracle_calls(k: usize) -> u64 {
    total_steps(k) / 2
}

/// Reflections at level `j` in one application of `A_k`.
pub fn reflections_at_level(k: usize, j: usize) -> u64 {
    if j == 0 || j > k {
        0
    } else {
        3u64.pow((k - j) as u32)
    }
}

pub fn check_step_budget(k: usize, budget: u64) -> Result<()> {
    let steps = 3u64
        .checked_pow(k as u32)
        .map(|s| s - 1)
        .unwrap_or(u64::MAX);
    if steps > budget {
        return Err(Error::StepBudget { k, steps, budget });
    }
    Ok(())
}

/// The two primitive steps of amplification on some state type.
pub trait Amplifier {
    type State;

    /// `O_𝒢`.
    fn oracle(&mut self, state: &mut Self::State) -> Result<()>;

    /// The reflection at `level` (1-based), or its adjoint.
    fn reflect(&mut self, state: &mut Self::State, level: usize, adjoint: bool) -> Result<()>;
}

/// Applies `A_k` to `state` by unfolding the recursion.
pub fn unfold<A: Amplifier>(amp: &mut A, state: &mut A::State, k: usize, budget: u64) -> Result<()> {
    check_step_budget(k, budget)?;
    forward(amp, state, k)
}

fn forward<A: Amplifier>(amp: &mut A, state: &mut A::State, j: usize) -> Result<()> {
    if j == 0 {
        return Ok(());
    }
    forward(amp, state, j - 1)?;
    amp.oracle(state)?;
    adjoint(amp, state, j - 1)?;
    amp.reflect(state, j, false)?;
    forward(amp, state, j - 1)
}

fn adjoint<A: Amplifier>(amp: &mut A, state: &mut A::State, j: usize) -> Result<()> {
    if j == 0 {
        return Ok(());
    }
    adjoint(amp, state, j - 1)?;
    amp.reflect(state, j, true)?;
    forward(amp, state, j - 1)?;
    amp.oracle(state)?;
    adjoint(amp, state, j - 1)
}

/// How the approximate reflections are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseModel {
    Perfect,
    /// `ψ⟨ψ| − e^{iδ}(I − ψ⟨ψ|)` with `|e^{iδ} − 1| = ε`; the seed picks the
    /// sign of `δ`.
    PhaseOnComplement { seed: u64 },
    /// Independent phases `e^{iδ_m}`, `|δ_m| ≤ δ`, on a fixed orthonormal
    /// basis of the complement of `ψ`, drawn per level from the seed.
    RandomPhases { seed: u64 },
}

impl NoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Perfect => "perfect",
            NoiseModel::PhaseOnComplement { .. } => "phase",
            NoiseModel::RandomPhases { .. } => "phases",
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            NoiseModel::Perfect => NoiseModel::Perfect,
            NoiseModel::PhaseOnComplement { .. } => NoiseModel::PhaseOnComplement { seed },
            NoiseModel::RandomPhases { .. } => NoiseModel::RandomPhases { seed },
        }
    }
}

/// `δ` with `|e^{iδ} − 1| = ε`.
pub fn delta_for(eps: f64) -> f64 {
    2.0 * (eps / 2.0).asin()
}

/// Householder reflector `H = I − 2uu^*` with `Hψ = c·e_0`, `|c| = 1`.
#[derive(Debug, Clone)]
struct Householder {
    u: CVec,
}

impl Householder {
    fn new(psi: &CVec) -> Result<Self> {
        let p0 = psi.amps()[0];
        let c = if p0.norm() > 0.0 {
            -p0 / p0.norm()
        } else {
            Complex64::new(-1.0, 0.0)
        };
        let mut u = psi.clone();
        u.amps_mut()[0] -= c;
        u.normalize()?;
        Ok(Self { u })
    }

    fn apply(&self, v: &mut CVec) -> Result<()> {
        let c = self.u.overlap(v)?;
        v.add_scaled(-2.0 * c, &self.u)
    }
}

#[derive(Debug, Clone)]
enum Realized {
    Perfect,
    Phase { phase: C64 },
    Householder { h: Arc<Householder>, deltas: Vec<f64> },
}

/// One realized approximate reflection about `ψ`.
#[derive(Debug, Clone)]
pub struct NoisyReflection {
    psi: Arc<CVec>,
    eps: f64,
    realized: Realized,
}

impl NoisyReflection {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn apply(&self, v: &mut CVec, adjoint: bool) -> Result<()> {
        match &self.realized {
            Realized::Perfect => {
                let c = self.psi.overlap(v)?;
                v.scale(C64::new(-1.0, 0.0));
                v.add_scaled(2.0 * c, &self.psi)
            }
            Realized::Phase { phase } => {
                let p = if adjoint { phase.conj() } else { *phase };
                let c = self.psi.overlap(v)?;
                // ψc − p(v − ψc) = −p·v + (1 + p)c·ψ
                v.scale(-p);
                v.add_scaled((C64::new(1.0, 0.0) + p) * c, &self.psi)
            }
            Realized::Householder { h, deltas } => {
                h.apply(v)?;
                let amps = v.amps_mut();
                for (a, &d) in amps.iter_mut().skip(1).zip(deltas) {
                    let d = if adjoint { -d } else { d };
                    *a *= -C64::from_polar(1.0, d);
                }
                h.apply(v)
            }
        }
    }

    /// Checks `R^ε ψ = ψ` and `‖R^ε − R_ψ‖ ≤ ε`.
    ///
    /// The operator norm is computed from the singular values of the dense
    /// difference when the dimension is at most `dense_limit`; above that the
    /// structural bound (largest `|1 − e^{iδ_m}|` on the complement) is used.
    pub fn verify(&self, dense_limit: usize) -> Result<f64> {
        let mut fixed = (*self.psi).clone();
        self.apply(&mut fixed, false)?;
        let drift = fixed.distance(&self.psi)?;
        if drift > 1e-9 {
            return Err(Error::NoiseContract(format!(
                "reflection moves psi by {drift:.3e}"
            )));
        }
        let dim = self.psi.dim();
        let norm = if dim <= dense_limit {
            self.dense_deviation()?
        } else {
            match &self.realized {
                Realized::Perfect => 0.0,
                Realized::Phase { phase } => (C64::new(1.0, 0.0) - phase).norm(),
                Realized::Householder { deltas, .. } => deltas
                    .iter()
                    .map(|&d| (C64::new(1.0, 0.0) - C64::from_polar(1.0, d)).norm())
                    .fold(0.0, f64::max),
            }
        };
        if norm > self.eps + 1e-9 {
            return Err(Error::NoiseContract(format!(
                "operator distance {norm:.6e} exceeds eps {:.6e}",
                self.eps
            )));
        }
        Ok(norm)
    }

    fn dense_deviation(&self) -> Result<f64> {
        let dim = self.psi.dim();
        let mut diff = DMatrix::<C64>::zeros(dim, dim);
        let perfect = NoisyReflection {
            psi: self.psi.clone(),
            eps: 0.0,
            realized: Realized::Perfect,
        };
        for col in 0..dim {
            let mut a = CVec::basis_state(dim, col)?;
            let mut b = a.clone();
            self.apply(&mut a, false)?;
            perfect.apply(&mut b, false)?;
            for row in 0..dim {
                diff[(row, col)] = a.amps()[row] - b.amps()[row];
            }
        }
        Ok(diff.singular_values().max())
    }
}

/// The per-level reflections used by one amplification run.
#[derive(Debug, Clone)]
pub struct ReflectionSet {
    levels: Vec<NoisyReflection>,
}

impl ReflectionSet {
    /// Realizes levels `1..=k` of `noise` about `psi` with `ε_j` from
    /// `schedule`.
    pub fn new(psi: &CVec, noise: NoiseModel, schedule: EpsSchedule, k: usize) -> Result<Self> {
        if !psi.is_normalized() {
            return Err(Error::InvalidParameter("reflection axis not normalized".into()));
        }
        let psi = Arc::new(psi.clone());
        let householder = match noise {
            NoiseModel::RandomPhases { .. } if k > 0 => Some(Arc::new(Householder::new(&psi)?)),
            _ => None,
        };
        let mut levels = Vec::with_capacity(k);
        for j in 1..=k {
            let eps = schedule.eps(j);
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParameter(format!("eps {eps} outside (0, 1)")));
            }
            let delta = delta_for(eps);
            let realized = match noise {
                NoiseModel::Perfect => Realized::Perfect,
                NoiseModel::PhaseOnComplement { seed } => {
                    let sign = if seed % 2 == 0 { 1.0 } else { -1.0 };
                    Realized::Phase {
                        phase: C64::from_polar(1.0, sign * delta),
                    }
                }
                NoiseModel::RandomPhases { seed } => {
                    let mut rng = level_rng(seed, j);
                    let deltas = (1..psi.dim())
                        .map(|_| rng.gen_range(-delta..=delta))
                        .collect();
                    Realized::Householder {
                        h: householder.clone().expect("built for k > 0"),
                        deltas,
                    }
                }
            };
            levels.push(NoisyReflection {
                psi: psi.clone(),
                eps,
                realized,
            });
        }
        Ok(Self { levels })
    }

    pub fn level(&self, j: usize) -> &NoisyReflection {
        &self.levels[j - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn verify(&self, dense_limit: usize) -> Result<()> {
        for r in &self.levels {
            r.verify(dense_limit)?;
        }
        Ok(())
    }
}

fn level_rng(seed: u64, level: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(level as u64);
    rng
}

pub type GoodPredicate = Arc<dyn Fn(usize) -> bool + Send + Sync>;

/// The good set, initial state and angle of one amplification problem.
#[derive(Clone)]
pub struct AmplSetup {
    good: GoodPredicate,
    initial: CVec,
    theta: f64,
    good_state: Option<CVec>,
    bad_state: Option<CVec>,
}

impl std::fmt::Debug for AmplSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AmplSetup")
            .field("dim", &self.initial.dim())
            .field("theta", &self.theta)
            .finish()
    }
}

impl AmplSetup {
    pub fn new<F>(good: F, initial: CVec) -> Result<Self>
    where
        F: Fn(usize) -> bool + Send + Sync + 'static,
    {
        if !initial.is_normalized() {
            return Err(Error::InvalidParameter("initial state not normalized".into()));
        }
        let split = |want: bool| -> Option<CVec> {
            let amps = initial
                .amps()
                .iter()
                .enumerate()
                .map(|(i, &a)| if good(i) == want { a } else { C64::new(0.0, 0.0) })
                .collect();
            let mut v = CVec::from_amps(amps).ok()?;
            v.normalize().ok()?;
            Some(v)
        };
        let good_state = split(true);
        let bad_state = split(false);
        let p_good: f64 = initial
            .amps()
            .iter()
            .enumerate()
            .filter(|(i, _)| good(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(Self {
            good: Arc::new(good),
            initial,
            theta: p_good.sqrt().min(1.0).asin(),
            good_state,
            bad_state,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn initial(&self) -> &CVec {
        &self.initial
    }

    pub fn is_good(&self, i: usize) -> bool {
        (self.good)(i)
    }

    /// `|G⟩`, or `None` when there are no good states.
    pub fn good_state(&self) -> Option<&CVec> {
        self.good_state.as_ref()
    }

    /// `sin(a)|G⟩ + cos(a)|B⟩`.
    pub fn ideal(&self, angle: f64) -> Result<CVec> {
        let mut v = CVec::zeros(self.initial.dim())?;
        if let Some(g) = &self.good_state {
            v.add_scaled(C64::new(angle.sin(), 0.0), g)?;
        }
        if let Some(b) = &self.bad_state {
            v.add_scaled(C64::new(angle.cos(), 0.0), b)?;
        }
        Ok(v)
    }
}

/// Statevector amplifier with a phase oracle and a fixed reflection set.
pub struct VectorAmplifier<'a> {
    good: &'a GoodPredicate,
    reflections: &'a ReflectionSet,
    pub oracle_calls: u64,
    pub reflection_calls: Vec<u64>,
}

impl<'a> VectorAmplifier<'a> {
    pub fn new(setup: &'a AmplSetup, reflections: &'a ReflectionSet) -> Self {
        Self {
            good: &setup.good,
            reflections,
            oracle_calls: 0,
            reflection_calls: vec![0; reflections.depth() + 1],
        }
    }
}

impl Amplifier for VectorAmplifier<'_> {
    type State = CVec;

    fn oracle(&mut self, state: &mut CVec) -> Result<()> {
        self.oracle_calls += 1;
        for (i, a) in state.amps_mut().iter_mut().enumerate() {
            if (self.good)(i) {
                *a = -*a;
            }
        }
        Ok(())
    }

    fn reflect(&mut self, state: &mut CVec, level: usize, adjoint: bool) -> Result<()> {
        self.reflection_calls[level] += 1;
        self.reflections.level(level).apply(state, adjoint)
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct AmplRun {
    pub final_state: CVec,
    /// `η_j = ‖A_j ψ − (sin(3^j θ)|G⟩ + cos(3^j θ)|B⟩)‖` for `j = 0..=k`.
    pub eta_trace: Vec<f64>,
    /// Oracle calls made while computing `A_k ψ`.
    pub oracle_calls: u64,
    /// Reflection calls per level while computing `A_k ψ` (index 0 unused).
    pub reflection_calls: Vec<u64>,
    pub eps: Vec<f64>,
}

/// Computes `A_k ψ` together with the error trace of every prefix level.
pub fn run(
    setup: &AmplSetup,
    noise: NoiseModel,
    schedule: EpsSchedule,
    k: usize,
    step_budget: u64,
) -> Result<AmplRun> {
    check_step_budget(k, step_budget)?;
    let reflections = ReflectionSet::new(&setup.initial, noise, schedule, k)?;
    run_with(setup, &reflections, k, step_budget)
}

/// [`run`] with caller-supplied reflections.
pub fn run_with(
    setup: &AmplSetup,
    reflections: &ReflectionSet,
    k: usize,
    step_budget: u64,
) -> Result<AmplRun> {
    check_step_budget(k, step_budget)?;
    if reflections.depth() < k {
        return Err(Error::InvalidParameter(format!(
            "{} reflection levels for depth {k}",
            reflections.depth()
        )));
    }
    let mut eta_trace = Vec::with_capacity(k + 1);
    let mut final_state = setup.initial.clone();
    let mut amp = VectorAmplifier::new(setup, reflections);
    for j in 0..=k {
        let mut v = setup.initial.clone();
        amp = VectorAmplifier::new(setup, reflections);
        unfold(&mut amp, &mut v, j, step_budget)?;
        let ideal = setup.ideal(3f64.powi(j as i32) * setup.theta)?;
        eta_trace.push(v.distance(&ideal)?);
        final_state = v;
    }
    Ok(AmplRun {
        final_state,
        eta_trace,
        oracle_calls: amp.oracle_calls,
        reflection_calls: amp.reflection_calls,
        eps: (1..=k).map(|j| reflections.level(j).eps()).collect(),
    })
}

/// The closed-form `η_k ≤ 3θ/100` bound for the default schedule.
pub fn eta_bound(theta: f64) -> f64 {
    3.0 * theta / 100.0
}

/// Checks the single-copy recurrence
/// `η_{j+1} ≤ (1+ε_{j+1})η_j + 2ε_{j+1} sin(3^j θ)` at every level.
pub fn single_copy_recurrence_holds(eta: &[f64], eps: &[f64], theta: f64, tol: f64) -> bool {
    recurrence_holds(eta, eps, theta, 1.0, tol)
}

/// Checks `η_{j+1} ≤ (3+ε_{j+1})η_j + 2ε_{j+1} sin(3^j θ)`.
///
/// `A_j R^ε A_j^*` reflects about the noisy `A_j ψ` rather than the ideal
/// state, which adds up to `2η_j` per level on top of the single-copy terms.
pub fn three_copy_recurrence_holds(eta: &[f64], eps: &[f64], theta: f64, tol: f64) -> bool {
    recurrence_holds(eta, eps, theta, 3.0, tol)
}

fn recurrence_holds(eta: &[f64], eps: &[f64], theta: f64, copies: f64, tol: f64) -> bool {
    (0..eta.len().saturating_sub(1)).all(|j| {
        let e = eps[j];
        eta[j + 1] <= (copies + e) * eta[j] + 2.0 * e * (3f64.powi(j as i32) * theta).sin() + tol
    })
}

/// Unrolls the three-copy recurrence from `η_0 = 0`.
pub fn propagated_eta_bound(theta: f64, eps: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    for (j, &e) in eps.iter().enumerate() {
        let prev = out[j];
        out.push((3.0 + e) * prev + 2.0 * e * (3f64.powi(j as i32) * theta).sin());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_setup(n: usize, t: usize) -> AmplSetup {
        AmplSetup::new(move |i| i < t, CVec::uniform(n).unwrap()).unwrap()
    }

    #[test]
    fn angles() {
        assert!((grover_angle(8, 8).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(grover_angle(0, 8).unwrap(), 0.0);
        assert!((grover_angle(1, 1024).unwrap() - (1.0f64 / 32.0).asin()).abs() < 1e-15);
        assert!(grover_angle(9, 8).is_err());
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(iteration_count(FRAC_PI_2).unwrap(), 0);
        let th = (1.0f64 / 1024.0).sqrt().asin();
        let k = iteration_count(th).unwrap();
        let a = 3f64.powi(k as i32) * th;
        assert!(a > PI / 6.0 && a <= FRAC_PI_2);
        assert_eq!(k, 3);
        assert!(iteration_count(0.0).is_err());
        assert!(iteration_count(-1.0).is_err());
    }

    #[test]
    fn schedule_values() {
        assert_eq!(epsilon_schedule(1), 1.0 / 400.0);
        assert_eq!(epsilon_schedule(2), 1.0 / 1600.0);
        for k in 0..=30 {
            assert!(EpsSchedule::default().partial_sum(k) <= 1.0 / 300.0);
        }
    }

    #[test]
    fn step_counts() {
        assert_eq!(total_steps(0), 0);
        assert_eq!(total_steps(3), 26);
        assert_eq!(oracle_calls(3), 13);
        assert_eq!(reflections_at_level(3, 1), 9);
        assert!(check_step_budget(12, DEFAULT_STEP_BUDGET).is_ok());
        assert!(matches!(
            check_step_budget(13, DEFAULT_STEP_BUDGET),
            Err(Error::StepBudget { k: 13, .. })
        ));
    }

    #[test]
    fn perfect_closed_form() {
        for (n, t) in [(64usize, 1usize), (256, 1), (256, 4), (64, 5)] {
            let s = uniform_setup(n, t);
            for k in 0..=4 {
                let r = run(&s, NoiseModel::Perfect, EpsSchedule::default(), k, DEFAULT_STEP_BUDGET)
                    .unwrap();
                for (j, &eta) in r.eta_trace.iter().enumerate() {
                    assert!(eta < 1e-7, "n={n} t={t} j={j} eta={eta}");
                }
                let ov = s.good_state().unwrap().overlap(&r.final_state).unwrap();
                let want = (3f64.powi(k as i32) * s.theta()).sin();
                assert!((ov.re - want).abs() < 1e-7 && ov.im.abs() < 1e-7);
                assert_eq!(r.oracle_calls, oracle_calls(k));
            }
        }
    }

    #[test]
    fn no_solutions_leaves_psi() {
        let s = uniform_setup(32, 0);
        assert_eq!(s.theta(), 0.0);
        assert!(s.good_state().is_none());
        let r = run(&s, NoiseModel::Perfect, EpsSchedule::default(), 3, DEFAULT_STEP_BUDGET).unwrap();
        assert!(r.final_state.distance(s.initial()).unwrap() < 1e-12);
        let r = run(
            &s,
            NoiseModel::RandomPhases { seed: 4 },
            EpsSchedule::default(),
            3,
            DEFAULT_STEP_BUDGET,
        )
        .unwrap();
        assert!(r.final_state.distance(s.initial()).unwrap() < 1e-9);
    }

    #[test]
    fn noisy_error_within_propagated_bound() {
        for (n, t) in [(64usize, 1usize), (256, 1), (256, 4), (1024, 1)] {
            let s = uniform_setup(n, t);
            let k = iteration_count(s.theta()).unwrap();
            for noise in [
                NoiseModel::PhaseOnComplement { seed: 0 },
                NoiseModel::PhaseOnComplement { seed: 1 },
                NoiseModel::RandomPhases { seed: 9 },
            ] {
                let r = run(&s, noise, EpsSchedule::default(), k, DEFAULT_STEP_BUDGET).unwrap();
                assert!(r.eta_trace[k] > 0.0);
                assert!(three_copy_recurrence_holds(&r.eta_trace, &r.eps, s.theta(), 1e-12));
                let bound = propagated_eta_bound(s.theta(), &r.eps);
                assert!(r.eta_trace[k] <= bound[k] + 1e-12);
                // Enough for the final overlap to stay above 0.4.
                assert!(bound[k] < 0.01);
            }
        }
    }

    #[test]
    fn phase_on_complement_error_triples_per_level() {
        // Values from a direct 2x2 computation in the (|G>, |B>) plane.
        let s = uniform_setup(1024, 1);
        let r = run(&s, NoiseModel::PhaseOnComplement { seed: 0 }, EpsSchedule::default(), 3, DEFAULT_STEP_BUDGET)
            .unwrap();
        let want = [0.0, 1.561736874191355e-4, 5.790382696037889e-4, 1.6384765940599235e-3];
        for (got, want) in r.eta_trace.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(!single_copy_recurrence_holds(&r.eta_trace, &r.eps, s.theta(), 0.0));
        assert!(r.eta_trace[3] > eta_bound(s.theta()));
        let small = uniform_setup(64, 1);
        let r = run(&small, NoiseModel::PhaseOnComplement { seed: 0 }, EpsSchedule::default(), 2, DEFAULT_STEP_BUDGET)
            .unwrap();
        assert!(r.eta_trace[2] <= eta_bound(small.theta()));
    }

    #[test]
    fn reflection_contracts() {
        let psi = CVec::maximally_entangled(4).unwrap();
        for noise in [
            NoiseModel::Perfect,
            NoiseModel::PhaseOnComplement { seed: 3 },
            NoiseModel::RandomPhases { seed: 3 },
        ] {
            let set = ReflectionSet::new(&psi, noise, EpsSchedule::default(), 3).unwrap();
            set.verify(256).unwrap();
            for j in 1..=3 {
                let mut v = psi.clone();
                set.level(j).apply(&mut v, false).unwrap();
                assert!(v.distance(&psi).unwrap() <= 1e-9);
            }
        }
        // Phase-on-complement attains the bound exactly.
        let set = ReflectionSet::new(&psi, NoiseModel::PhaseOnComplement { seed: 0 }, EpsSchedule::default(), 1)
            .unwrap();
        let d = set.level(1).verify(256).unwrap();
        assert!((d - 1.0 / 400.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_inverts_noisy_reflection() {
        let psi = CVec::uniform(16).unwrap();
        let set = ReflectionSet::new(&psi, NoiseModel::RandomPhases { seed: 1 }, EpsSchedule { base: 2.0 }, 2)
            .unwrap();
        let mut v = CVec::basis_state(16, 5).unwrap();
        let orig = v.clone();
        set.level(2).apply(&mut v, false).unwrap();
        assert!(v.distance(&orig).unwrap() > 1e-3);
        set.level(2).apply(&mut v, true).unwrap();
        assert!(v.distance(&orig).unwrap() < 1e-12);
    }

    #[test]
    fn perfect_reflection_matches_statevector_reflection() {
        let psi = CVec::maximally_entangled(4).unwrap();
        let set = ReflectionSet::new(&psi, NoiseModel::Perfect, EpsSchedule::default(), 1).unwrap();
        let op = crate::statevector::UnitaryOp::reflection(psi.clone()).unwrap();
        let mut v = CVec::uniform(16).unwrap();
        v.amps_mut()[3] = C64::new(0.0, 0.7);
        v.normalize().unwrap();
        let mut a = v.clone();
        set.level(1).apply(&mut a, false).unwrap();
        let b = crate::statevector::apply(&v, &op).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn final_overlap_floor_on_theta_grid() {
        for i in 1..=2000 {
            let theta = (PI / 6.0) * i as f64 / 2000.0;
            let k = iteration_count(theta).unwrap();
            let v = (3f64.powi(k as i32) * theta).sin() - eta_bound(theta);
            assert!(v >= 0.4, "theta={theta} value={v}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn iteration_count_window(theta in 1e-6f64..FRAC_PI_2) {
            let k = iteration_count(theta).unwrap();
            let a = 3f64.powi(k as i32) * theta;
            prop_assert!(a <= FRAC_PI_2 + 1e-12);
            prop_assert!(a > PI / 6.0 - 1e-12);
        }
    }
}
