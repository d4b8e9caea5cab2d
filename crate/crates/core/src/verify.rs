//! The acceptance battery: one group of named checks per criterion, with
//! pinned seeds, tolerances and optional fault injection.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::Rng;

use crate::amplamp::{self, AmplSetup, EpsSchedule, NoiseModel};
use crate::boolfn::{
    codeword_from_index, decode_codeword, eval_rtilde_hg, hadamard_codeword_with, string_of,
    transitive_perms, verify_transitive, wht_i64, BitOrder, BooleanFunction, Gadget, Hadamardized,
    SymmetricSpec,
};
use crate::error::Result;
use crate::harness::{ols_slope, run_trials, three_sigma, trial_rng, ProportionalFit};
use crate::lowerbound::disc::{addr_gram, lambda_marginal, max_rectangle};
use crate::lowerbound::{
    approx_degree, balanced_for, check_addr_reduction, check_reduction, discrepancy, dual_witness,
    ip_projection_check, lambda_construct, xor_lemma_check, BoxGate, Distribution,
};
use crate::oracles::{addr_uniform_discrepancy, naive_discrepancy, symmetric_approx_degree, NAIVE_DISC_CAP};
use crate::params::Constants;
use crate::query::{bernstein_vazirani, bernstein_vazirani_state, rtilde_hg_query_algorithm, Equality, QueryOracle};
use crate::search::{SearchInstance, SearchRunner};
use crate::statevector::{log2_exact, CVec};
use crate::symmetric::{bcw_baseline_cost, CountOutcome, Counter, PatchRegistry};

/// Overlap tolerance for perfect amplification.
pub const OVERLAP_TOL: f64 = 1e-7;
/// Floor on the per-run hit frequency of the known-count search.
pub const KNOWN_T_FLOOR: f64 = 0.14;
/// Floor on the success frequency of the unknown-count search.
pub const UNKNOWN_FLOOR: f64 = 0.97;
/// Largest relative residual accepted by the proportional cost fits.
pub const FIT_RESIDUAL: f64 = 0.2;
/// Error allowance of the counting protocol before sampling slack.
pub const COUNT_ERROR: f64 = 1.0 / 8.0;
/// Detection floor on single-corrupted-block inputs.
pub const DETECTION_FLOOR: f64 = 0.60;
pub const WITNESS_L1_TOL: f64 = 1e-9;
pub const WITNESS_LOW_TOL: f64 = 1e-8;
pub const LAMBDA_SUM_TOL: f64 = 1e-12;
pub const MARGINAL_TOL: f64 = 1e-10;

/// Deliberate corruptions used to show the checks are not vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Faults {
    /// Base of the `ε_j = 1/(base·4^j)` schedule.
    pub eps_base: f64,
    /// Bit order used when building Hadamard codewords.
    pub bit_order: BitOrder,
    /// Patch found solutions with blocks that still evaluate to `−1`.
    pub faulty_patches: bool,
}

impl Default for Faults {
    fn default() -> Self {
        Self {
            eps_base: EpsSchedule::default().base,
            bit_order: BitOrder::MsbFirst,
            faulty_patches: false,
        }
    }
}

impl Faults {
    pub fn eps_schedule() -> Self {
        Self {
            eps_base: 10.0,
            ..Self::default()
        }
    }

    pub fn index_convention() -> Self {
        Self {
            bit_order: BitOrder::LsbFirst,
            ..Self::default()
        }
    }

    pub fn patch_registry() -> Self {
        Self {
            faulty_patches: true,
            ..Self::default()
        }
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.eps_base != EpsSchedule::default().base {
            parts.push(format!("eps-base={}", self.eps_base));
        }
        if self.bit_order != BitOrder::MsbFirst {
            parts.push("lsb-first".to_string());
        }
        if self.faulty_patches {
            parts.push("faulty-patches".to_string());
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(",")
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(criterion: u8, name: &str, passed: bool, detail: String) -> Self {
        Self {
            criterion,
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}.{} {}", self.criterion, self.name, self.detail)
    }
}

fn runtime_check(criterion: u8, start: Instant, limit: Duration) -> Check {
    let elapsed = start.elapsed();
    Check::new(
        criterion,
        "runtime",
        elapsed < limit,
        format!("{:.1}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

/// The battery, parameterized by faults, a trial-count scale and a seed.
#[derive(Debug, Clone)]
pub struct Battery {
    pub faults: Faults,
    /// Multiplier on every Monte-Carlo trial count (1 for the full suite).
    pub effort: f64,
    pub seed: u64,
}

impl Default for Battery {
    fn default() -> Self {
        Self {
            faults: Faults::default(),
            effort: 1.0,
            seed: 20_240_601,
        }
    }
}

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Criteria whose checks depend on the injectable faults.
pub const FAULT_SENSITIVE: [u8; 5] = [1, 2, 3, 5, 6];

impl Battery {
    pub fn with_faults(faults: Faults, effort: f64) -> Self {
        Self {
            faults,
            effort,
            ..Self::default()
        }
    }

    fn scaled(&self, trials: usize) -> usize {
        ((trials as f64 * self.effort).ceil() as usize).max(1)
    }

    fn constants(&self) -> Constants {
        let mut c = Constants::default();
        c.schedule.base = self.faults.eps_base;
        c
    }

    fn schedule(&self) -> EpsSchedule {
        EpsSchedule {
            base: self.faults.eps_base,
        }
    }

    fn patches(&self) -> PatchRegistry {
        if self.faults.faulty_patches {
            PatchRegistry::faulty()
        } else {
            PatchRegistry::new()
        }
    }

    fn codeword(&self, s_idx: usize, bits: usize) -> Vec<i8> {
        hadamard_codeword_with(&string_of(s_idx, bits), self.faults.bit_order)
    }

    pub fn run(&self, criterion: u8) -> Result<Vec<Check>> {
        match criterion {
            1 => self.perfect_amplification(),
            2 => self.noisy_amplification(),
            3 => self.search_success(),
            4 => self.cost_scaling(),
            5 => self.counting(),
            6 => self.query_algorithm(),
            7 => self.lower_bounds(),
            8 => self.fault_injection(),
            other => Err(crate::Error::InvalidParameter(format!("no criterion {other}"))),
        }
    }

    pub fn run_all(&self) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for c in CRITERIA {
            out.extend(self.run(c)?);
        }
        Ok(out)
    }

    pub fn perfect_amplification(&self) -> Result<Vec<Check>> {
        let start = Instant::now();
        let mut worst = 0.0f64;
        let mut rows = Vec::new();
        for (n, t) in AMPLIFICATION_GRID {
            let setup = AmplSetup::new(move |i| i < t, CVec::uniform(n)?)?;
            let k = amplamp::iteration_count(setup.theta())?;
            let run = amplamp::run(&setup, NoiseModel::Perfect, self.schedule(), k, amplamp::DEFAULT_STEP_BUDGET)?;
            let good = setup.good_state().expect("t >= 1");
            let overlap = good.overlap(&run.final_state)?.norm();
            let expected = (3f64.powi(k as i32) * setup.theta()).sin();
            let err = (overlap - expected).abs();
            worst = worst.max(err);
            rows.push(format!("({n},{t}) k={k} err={err:.1e}"));
        }
        Ok(vec![
            Check::new(
                1,
                "closed_form_overlap",
                worst <= OVERLAP_TOL,
                format!("max |overlap - sin(3^k theta)| = {worst:.2e} <= {OVERLAP_TOL:.0e}; {}", rows.join(", ")),
            ),
            runtime_check(1, start, Duration::from_secs(10)),
        ])
    }

    pub fn noisy_amplification(&self) -> Result<Vec<Check>> {
        let start = Instant::now();
        let seeds = self.scaled(50) as u64;
        let mut checks = Vec::new();
        for model in [NoiseModel::PhaseOnComplement { seed: 0 }, NoiseModel::RandomPhases { seed: 0 }] {
            let mut violations = Vec::new();
            let mut worst_ratio = 0.0f64;
            for (n, t) in AMPLIFICATION_GRID {
                let setup = AmplSetup::new(move |i| i < t, CVec::uniform(n)?)?;
                let k = amplamp::iteration_count(setup.theta())?;
                let bound = amplamp::eta_bound(setup.theta());
                for seed in 0..seeds {
                    let run = amplamp::run(
                        &setup,
                        model.with_seed(self.seed ^ seed),
                        self.schedule(),
                        k,
                        amplamp::DEFAULT_STEP_BUDGET,
                    )?;
                    let eta = *run.eta_trace.last().expect("k + 1 entries");
                    worst_ratio = worst_ratio.max(eta / bound);
                    if eta > bound {
                        violations.push(format!("({n},{t}) seed {seed}: eta={eta:.3e} > {bound:.3e}"));
                    }
                }
            }
            violations.dedup_by(|a, b| a.split(" seed").next() == b.split(" seed").next());
            let detail = if violations.is_empty() {
                format!("{seeds} seeds, max eta_k/(3 theta/100) = {worst_ratio:.3}")
            } else {
                format!(
                    "{seeds} seeds, max eta_k/(3 theta/100) = {worst_ratio:.3}; first violations: {}",
                    violations.join("; ")
                )
            };
            checks.push(Check::new(2, &format!("eta_bound_{}", model.name()), violations.is_empty(), detail));
        }
        checks.push(runtime_check(2, start, Duration::from_secs(120)));
        Ok(checks)
    }

    pub fn search_success(&self) -> Result<Vec<Check>> {
        let n = 64;
        let g = Arc::new(Gadget::and2());
        let mut checks = Vec::new();
        let mut false_positives = 0usize;
        let mut total_runs = 0usize;
        for (m, model) in [NoiseModel::RandomPhases { seed: 1 }, NoiseModel::PhaseOnComplement { seed: 1 }]
            .into_iter()
            .enumerate()
        {
            let runner = SearchRunner::new(self.constants(), model);
            let trials = self.scaled(2000);
            let seed = self.seed + 100 * m as u64;
            let outcomes = run_trials(trials, seed, |_, rng| -> Result<(bool, bool)> {
                let inst = SearchInstance::planted_count(g.clone(), n, 1, rng)?;
                let out = runner.search_known_t(&inst, 1, rng)?;
                Ok((out.found.is_some(), out.found.is_some_and(|i| inst.value(i) != -1)))
            });
            let outcomes: Vec<(bool, bool)> = outcomes.into_iter().collect::<Result<_>>()?;
            let hits = outcomes.iter().filter(|o| o.0).count();
            false_positives += outcomes.iter().filter(|o| o.1).count();
            total_runs += trials;
            let freq = hits as f64 / trials as f64;
            checks.push(Check::new(
                3,
                &format!("known_t_{}", model.name()),
                freq >= KNOWN_T_FLOOR,
                format!("hit frequency {freq:.4} over {trials} trials (floor {KNOWN_T_FLOOR})"),
            ));

            let trials = self.scaled(1000);
            let outcomes = run_trials(trials, seed + 1, |_, rng| -> Result<(bool, bool)> {
                let inst = SearchInstance::planted_count(g.clone(), n, 1, rng)?;
                let (found, _) = runner.search_unknown(&inst, rng)?;
                Ok((found.is_some(), found.is_some_and(|i| inst.value(i) != -1)))
            });
            let outcomes: Vec<(bool, bool)> = outcomes.into_iter().collect::<Result<_>>()?;
            let hits = outcomes.iter().filter(|o| o.0).count();
            false_positives += outcomes.iter().filter(|o| o.1).count();
            total_runs += trials;
            let freq = hits as f64 / trials as f64;
            checks.push(Check::new(
                3,
                &format!("unknown_{}", model.name()),
                freq >= UNKNOWN_FLOOR,
                format!("success frequency {freq:.4} over {trials} trials (floor {UNKNOWN_FLOOR})"),
            ));

            let trials = self.scaled(200);
            let empty = run_trials(trials, seed + 2, |_, rng| -> Result<bool> {
                let inst = SearchInstance::planted_count(g.clone(), n, 0, rng)?;
                Ok(runner.search_known_t(&inst, 1, rng)?.found.is_some() || runner.search_unknown(&inst, rng)?.0.is_some())
            });
            false_positives += empty.into_iter().collect::<Result<Vec<_>>>()?.iter().filter(|&&b| b).count();
            total_runs += 2 * trials;
        }
        checks.push(Check::new(
            3,
            "one_sided",
            false_positives == 0,
            format!("{false_positives} false positives across {total_runs} runs"),
        ));
        Ok(checks)
    }

    pub fn cost_scaling(&self) -> Result<Vec<Check>> {
        let start = Instant::now();
        let g = Arc::new(Gadget::and2());
        let runner = SearchRunner::new(self.constants(), NoiseModel::RandomPhases { seed: 5 });
        let q = g.q() as f64;
        let mut checks = Vec::new();

        let trials = self.scaled(3);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, &(n, t)) in SEARCH_COST_GRID.iter().enumerate() {
            let costs = run_trials(trials, self.seed + i as u64, |_, rng| -> Result<u64> {
                let inst = SearchInstance::planted_count(g.clone(), n, t, rng)?;
                Ok(runner.search_known_t(&inst, t, rng)?.meter.total())
            });
            let costs: Vec<u64> = costs.into_iter().collect::<Result<_>>()?;
            x.push((n as f64 / t as f64).sqrt() * q);
            y.push(costs.iter().sum::<u64>() as f64 / trials as f64);
            runner.clear_cache();
        }
        let fit = ProportionalFit::new(&x, &y);
        checks.push(Check::new(
            4,
            "search_known_t_fit",
            fit.max_residual() <= FIT_RESIDUAL,
            format!(
                "C = {:.2}, max residual {:.3} over {}",
                fit.c,
                fit.max_residual(),
                describe_grid(&SEARCH_COST_GRID, &y)
            ),
        ));

        let counter = Counter::new(&runner).with_patches(self.patches());
        let trials = self.scaled(2);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, &(n, t)) in EVAL_COST_GRID.iter().enumerate() {
            let f = SymmetricSpec::threshold(n, t)?;
            let costs = run_trials(trials, self.seed + 50 + i as u64, |_, rng| -> Result<(u64, usize)> {
                let inst = SearchInstance::planted_count(g.clone(), n, t / 2, rng)?;
                let rep = counter.eval_symmetric(&f, &inst, rng)?;
                Ok((rep.meter.total(), rep.t))
            });
            let costs: Vec<(u64, usize)> = costs.into_iter().collect::<Result<_>>()?;
            let tf = costs[0].1 as f64;
            x.push((tf * n as f64).sqrt() * q);
            y.push(costs.iter().map(|c| c.0).sum::<u64>() as f64 / trials as f64);
            runner.clear_cache();
        }
        let fit = ProportionalFit::new(&x, &y);
        checks.push(Check::new(
            4,
            "eval_symmetric_fit",
            fit.max_residual() <= FIT_RESIDUAL,
            format!(
                "a = {:.1}, max residual {:.3} over {}",
                fit.c,
                fit.max_residual(),
                describe_grid(&EVAL_COST_GRID, &y)
            ),
        ));

        let mut logs = Vec::new();
        let mut ratios = Vec::new();
        for (i, &n) in BCW_SIZES.iter().enumerate() {
            let t = n / 16;
            let f = SymmetricSpec::threshold(n, t)?;
            let mut rng = trial_rng(self.seed + 90, i as u64);
            let inst = SearchInstance::planted_count(g.clone(), n, t / 2, &mut rng)?;
            let measured = counter.eval_symmetric(&f, &inst, &mut rng)?.meter.total();
            let baseline = bcw_baseline_cost(&f, &g, runner.constants.baseline_c);
            logs.push((n as f64).log2());
            ratios.push(baseline as f64 / measured as f64);
            runner.clear_cache();
        }
        let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
        let slope = ols_slope(&logs, &ratios);
        checks.push(Check::new(
            4,
            "bcw_ratio",
            increasing && slope > 0.0,
            format!(
                "baseline/measured {} at n = {BCW_SIZES:?}, slope vs log2 n = {slope:.2e}",
                ratios.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>().join(", ")
            ),
        ));
        checks.push(runtime_check(4, start, Duration::from_secs(600)));
        Ok(checks)
    }

    pub fn counting(&self) -> Result<Vec<Check>> {
        let g = Arc::new(Gadget::and2());
        let runner = SearchRunner::new(self.constants(), NoiseModel::RandomPhases { seed: 7 });
        let counter = Counter::new(&runner).with_patches(self.patches());
        let trials = self.scaled(500);
        let slack = three_sigma(COUNT_ERROR, trials);
        let mut checks = Vec::new();
        let mut epr_c = None;
        let mut epr_violations = Vec::new();
        for (i, &(n, t, z)) in COUNT_CONFIGS.iter().enumerate() {
            let results = run_trials(trials, self.seed + 200 + i as u64, |_, rng| -> Result<(bool, u64)> {
                let inst = SearchInstance::planted_count(g.clone(), n, z, rng)?;
                let rep = counter.count_or_threshold(&inst, t, rng)?;
                let ok = match rep.outcome {
                    CountOutcome::Exact(c) => c == z,
                    CountOutcome::AboveThreshold(_) => z > t,
                };
                Ok((ok, rep.meter.epr_consumed))
            });
            let results: Vec<(bool, u64)> = results.into_iter().collect::<Result<_>>()?;
            runner.clear_cache();
            let errors = results.iter().filter(|r| !r.0).count();
            let freq = errors as f64 / trials as f64;
            checks.push(Check::new(
                5,
                &format!("error_n{n}_t{t}_z{z}"),
                freq <= COUNT_ERROR + slack,
                format!("error frequency {freq:.4} over {trials} trials (limit {:.4})", COUNT_ERROR + slack),
            ));
            let scale = (t * log2_exact(n)?) as f64;
            let worst = results.iter().map(|r| r.1).max().unwrap_or(0) as f64 / scale;
            match epr_c {
                None => epr_c = Some(worst),
                Some(c) if worst > c => epr_violations.push(format!("(n={n},t={t},z={z}) {worst:.1}")),
                Some(_) => {}
            }
        }
        let c = epr_c.unwrap_or(0.0);
        checks.push(Check::new(
            5,
            "epr_t_log_n",
            epr_violations.is_empty(),
            if epr_violations.is_empty() {
                format!("EPR <= C t log n with C = {c:.1} fitted on the first configuration")
            } else {
                format!("C = {c:.1}; exceeded by {}", epr_violations.join(", "))
            },
        ));
        Ok(checks)
    }

    pub fn query_algorithm(&self) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        let order = self.faults.bit_order;

        let mut roundtrip_failures = 0;
        let mut roundtrip_total = 0;
        for bits in 1..=6 {
            for s in 0..1usize << bits {
                let s_str = string_of(s, bits);
                roundtrip_total += 1;
                if decode_codeword(&hadamard_codeword_with(&s_str, order)) != Some((s_str, 1)) {
                    roundtrip_failures += 1;
                }
            }
        }
        checks.push(Check::new(
            6,
            "codeword_roundtrip",
            roundtrip_failures == 0,
            format!("{roundtrip_failures} of {roundtrip_total} strings fail decode(H(s)) = s"),
        ));

        let mut rng = trial_rng(self.seed + 300, 0);
        let mut bv_bad = 0;
        let mut bv_total = 0;
        for s in 0..16usize {
            for sign in [1i8, -1] {
                let x: Vec<i8> = self.codeword(s, 4).into_iter().map(|v| v * sign).collect();
                let mut oracle = QueryOracle::new(x)?;
                let p = bernstein_vazirani_state(&mut oracle, 0, 16)?.amps()[s].norm_sqr();
                oracle.reset();
                let got = bernstein_vazirani(&mut oracle, &mut rng)?;
                bv_total += 1;
                if got != string_of(s, 4) || oracle.queries() != 1 || (p - 1.0).abs() > 1e-12 {
                    bv_bad += 1;
                }
            }
        }
        checks.push(Check::new(
            6,
            "bernstein_vazirani",
            bv_bad == 0,
            format!("{bv_bad} of {bv_total} signed codewords of length 16 not recovered with probability 1 in one query"),
        ));

        let exact = self.rtilde_exact()?;
        checks.push(exact);

        let (n, b) = (4usize, 2usize);
        let r = BooleanFunction::parity(n)?;
        let g = Gadget::ip(b, 1)?;
        let trials = self.scaled(1000);
        let detected = run_trials(trials, self.seed + 301, |_, rng| -> Result<bool> {
            let mut input = self.random_codeword_input(n, b, rng);
            let pos = rng.gen_range(0..input.len());
            input[pos] = -input[pos];
            let mut oracle = QueryOracle::new(input)?;
            let run = rtilde_hg_query_algorithm(&mut oracle, &r, &g, rng)?;
            Ok(matches!(run.equality, Equality::Differ(_)) && run.value == -1)
        });
        let detected = detected.into_iter().collect::<Result<Vec<_>>>()?.iter().filter(|&&d| d).count();
        let freq = detected as f64 / trials as f64;
        checks.push(Check::new(
            6,
            "corruption_detection",
            freq >= DETECTION_FLOOR,
            format!("detection frequency {freq:.4} over {trials} trials (floor {DETECTION_FLOOR})"),
        ));

        let mut fitted = None;
        let mut rows = Vec::new();
        let mut within = true;
        for (i, &(n, b)) in [(4usize, 2usize), (8, 3), (16, 4)].iter().enumerate() {
            let r = BooleanFunction::parity(n)?;
            let g = Gadget::ip(b, 1)?;
            let trials = self.scaled(if n == 16 { 20 } else { 100 });
            let counts = run_trials(trials, self.seed + 310 + i as u64, |_, rng| -> Result<u64> {
                let mut oracle = QueryOracle::new(self.random_codeword_input(n, b, rng))?;
                Ok(rtilde_hg_query_algorithm(&mut oracle, &r, &g, rng)?.total_queries())
            });
            let worst = counts.into_iter().collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
            let root = ((2 * n * n) as f64).sqrt();
            let c = *fitted.get_or_insert((worst as f64 - 4.0 * n as f64) / root);
            let limit = 4.0 * n as f64 + c * root;
            within &= worst as f64 <= limit + 1e-9;
            rows.push(format!("n={n}: max {worst} <= {limit:.1}"));
        }
        checks.push(Check::new(
            6,
            "query_count",
            within,
            format!("4n + c sqrt(2n^2) with c = {:.3} fitted at n = 4; {}", fitted.unwrap_or(0.0), rows.join(", ")),
        ));
        Ok(checks)
    }

    /// Interleaved blocks `(X_1, Y_1, …)` of uniformly random signed
    /// codewords of length `2^b`.
    fn random_codeword_input<R: Rng + ?Sized>(&self, n: usize, b: usize, rng: &mut R) -> Vec<i8> {
        let mut input = Vec::with_capacity(n << (b + 1));
        for _ in 0..2 * n {
            let sign = if rng.gen::<bool>() { 1 } else { -1 };
            input.extend(self.codeword(rng.gen_range(0..1 << b), b).into_iter().map(|v| v * sign));
        }
        input
    }

    /// Runs the query algorithm on every all-codeword input of
    /// `PARITY_4 ∘̃ h_{IP_2}` (or a sample of them at reduced effort) and
    /// compares with the value intended by the encoder.
    fn rtilde_exact(&self) -> Result<Check> {
        let (n, b) = (4usize, 2usize);
        let r = BooleanFunction::parity(n)?;
        let g = Gadget::ip(b, 1)?;
        let h = Hadamardized::new(&g);
        let choices = 2usize << b;
        let total = choices.pow(2 * n as u32);
        let exhaustive = self.effort >= 1.0;
        let count = if exhaustive { total } else { self.scaled(total / 100) };
        let mut rng = trial_rng(self.seed + 320, 0);
        let mut wrong = 0usize;
        let mut input = Vec::with_capacity((2 * n) << b);
        for step in 0..count {
            let code = if exhaustive { step } else { rng.gen_range(0..total) };
            input.clear();
            let mut z = 0usize;
            let mut rest = code;
            let mut pair = [0usize; 2];
            for half in 0..2 * n {
                let c = rest % choices;
                rest /= choices;
                let (s, sign) = (c >> 1, if c & 1 == 1 { -1 } else { 1 });
                pair[half % 2] = s;
                input.extend(self.codeword(s, b).into_iter().map(|v| v * sign));
                if half % 2 == 1 {
                    z = (z << 1) | usize::from(g.eval(pair[0], pair[1]) == -1);
                }
            }
            let intended = r.eval(z);
            let mut oracle = QueryOracle::new(input.clone())?;
            let run = rtilde_hg_query_algorithm(&mut oracle, &r, &g, &mut rng)?;
            if run.value != intended || eval_rtilde_hg(&r, &h, &input)? != intended {
                wrong += 1;
            }
        }
        Ok(Check::new(
            6,
            "rtilde_exact",
            wrong == 0,
            format!(
                "{wrong} wrong of {count} all-codeword inputs ({})",
                if exhaustive { "exhaustive" } else { "sampled" }
            ),
        ))
    }

    pub fn lower_bounds(&self) -> Result<Vec<Check>> {
        let start = Instant::now();
        let mut checks = Vec::new();
        let eps = 1.0 / 3.0;

        let mut degrees = Vec::new();
        for n in 2..=6 {
            degrees.push((n, approx_degree(&BooleanFunction::parity(n)?, eps)?));
        }
        checks.push(Check::new(
            7,
            "adeg_parity",
            degrees.iter().all(|&(n, d)| n == d),
            format!("(n, adeg) = {degrees:?}"),
        ));

        let mut witness_rows = Vec::new();
        let mut witnesses_hold = true;
        let mut cases: Vec<(String, BooleanFunction, usize)> = (2..=5)
            .map(|n| Ok((format!("PARITY_{n}"), BooleanFunction::parity(n)?, n)))
            .collect::<Result<_>>()?;
        cases.push(("OR_4".into(), BooleanFunction::or(4)?, 2));
        for (name, f, d) in &cases {
            match dual_witness(f, *d, eps)? {
                Some(w) => {
                    let c = w.check(f, eps);
                    let ok = (c.l1 - 1.0).abs() <= WITNESS_L1_TOL
                        && c.max_low_coefficient <= WITNESS_LOW_TOL
                        && c.correlation > eps;
                    witnesses_hold &= ok;
                    witness_rows.push(format!("{name} d={d} corr={:.4}", c.correlation));
                }
                None => {
                    witnesses_hold = false;
                    witness_rows.push(format!("{name} d={d}: no witness"));
                }
            }
        }
        // Symmetric cases against the Chebyshev-style oracle.
        for n in 2..=5 {
            let or = SymmetricSpec::or(n)?;
            let oracle = symmetric_approx_degree(or.weight_values(), &BigRational::new(1.into(), 3.into()));
            let lp = approx_degree(&or.to_function()?, eps)?;
            witnesses_hold &= oracle == lp;
            witness_rows.push(format!("OR_{n} adeg {lp} (oracle {oracle})"));
        }
        checks.push(Check::new(7, "dual_witness", witnesses_hold, witness_rows.join(", ")));

        let mut ip_ok = true;
        for m in 1..=4 {
            let mut v: Vec<i64> = Gadget::ip(m, 1)?.table().iter().map(|&e| e as i64).collect();
            wht_i64(&mut v);
            ip_ok &= v.iter().all(|c| c.unsigned_abs() == 1 << m);
        }
        checks.push(Check::new(
            7,
            "ip_fourier_flat",
            ip_ok,
            "every |IP_m^(S)| = 2^-m exactly for m = 1..4".into(),
        ));

        let mut gram_ok = true;
        for n in [2usize, 4, 8] {
            let gram = addr_gram(n)?;
            gram_ok &= gram.iter().enumerate().all(|(a, row)| {
                row.iter().enumerate().all(|(b, &v)| v == if a == b { 1 << n } else { 0 })
            });
        }
        checks.push(Check::new(7, "addr_gram", gram_ok, "A A^T = 2^n I for n = 2, 4, 8".into()));

        let mut disc_ok = true;
        let mut disc_rows = Vec::new();
        for n in [2usize, 4, 8] {
            let g = Gadget::addr(n, 1)?;
            let u = Distribution::uniform_for(&g)?;
            let value = discrepancy(&g, &u)?;
            let (rows, cols) = (1usize << g.j(), 1usize << g.k());
            let reference = if rows + cols <= NAIVE_DISC_CAP {
                let w = u.weights()[0];
                let m: Vec<f64> = g.table().iter().map(|&v| v as f64 * w).collect();
                naive_discrepancy(&m, rows, cols)?
            } else {
                addr_uniform_discrepancy(n as u64)
            };
            let bound = 1.0 / (n as f64).sqrt();
            disc_ok &= value <= bound && (value - reference).abs() <= 1e-12;
            disc_rows.push(format!("n={n}: {value:.6} (oracle {reference:.6}, bound {bound:.4})"));
        }
        checks.push(Check::new(7, "addr_discrepancy", disc_ok, disc_rows.join(", ")));

        let parity2 = BooleanFunction::parity(2)?;
        let ip1 = Gadget::ip(1, 1)?;
        let witness = dual_witness(&parity2, 2, eps)?.expect("PARITY_2 has a degree-2 witness");
        let nu_w = witness.nu();
        let total: f64 = nu_w.iter().sum();
        let nu = Distribution::new(2, nu_w.iter().map(|v| v / total).collect())?;
        let lambda = lambda_construct(&nu, &balanced_for(&ip1), &ip1)?;
        let marginal = lambda_marginal(&lambda, &ip1, 2)?;
        let sum_err = (lambda.total() - 1.0).abs();
        let marg_err = marginal
            .iter()
            .zip(nu.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(
            7,
            "lambda",
            sum_err <= LAMBDA_SUM_TOL && marg_err <= MARGINAL_TOL,
            format!("|sum - 1| = {sum_err:.1e}, max marginal error {marg_err:.1e}"),
        ));

        let mut xor_ok = true;
        let mut xor_rows = Vec::new();
        for (p, kmax) in [(Gadget::ip(1, 1)?, 3), (Gadget::and2(), 3), (Gadget::ip(2, 1)?, 2)] {
            let mu = Distribution::uniform_for(&p)?;
            for k in 1..=kmax {
                let rep = xor_lemma_check(&p, &mu, k)?;
                xor_ok &= rep.holds();
                xor_rows.push(format!("{} k={k}: {:.4} <= {:.4}", p.name(), rep.lhs, rep.rhs));
            }
        }
        checks.push(Check::new(7, "xor_lemma", xor_ok, xor_rows.join(", ")));

        let and_path = check_reduction(&parity2, &ip1, BoxGate::And)?;
        let xor_path = check_reduction(&parity2, &ip1, BoxGate::Xor)?;
        let addr_path = check_addr_reduction(&parity2, 2)?;
        checks.push(Check::new(
            7,
            "reductions",
            and_path.holds() && xor_path.holds() && addr_path.holds(),
            format!(
                "AND {}/{} XOR {}/{} ADDR {}/{} inputs agree",
                and_path.inputs - and_path.mismatches,
                and_path.inputs,
                xor_path.inputs - xor_path.mismatches,
                xor_path.inputs,
                addr_path.inputs - addr_path.mismatches,
                addr_path.inputs
            ),
        ));

        let mut trans_ok = true;
        let mut trans_rows = Vec::new();
        let mut rng = trial_rng(self.seed + 400, 0);
        for n in [4usize, 8, 16] {
            let b = log2_exact(n)?;
            let h = Hadamardized::new(&Gadget::ip(b, 1)?);
            let perms = transitive_perms(n)?;
            // Random strings are almost never codeword pairs, so every pair of
            // signed codewords is added explicitly.
            let words: Vec<Vec<i8>> = (0..2 << b)
                .map(|c| codeword_from_index(c >> 1, b).into_iter().map(|v| if c & 1 == 1 { -v } else { v }).collect())
                .collect();
            let extra: Vec<Vec<i8>> = words
                .iter()
                .flat_map(|x| words.iter().map(move |y| [x.as_slice(), y.as_slice()].concat()))
                .collect();
            let rep = verify_transitive(|x| h.eval_strs(&x[..n], &x[n..]), 2 * n, &perms, &extra, 4096, &mut rng)?;
            trans_ok &= rep.holds();
            trans_rows.push(format!(
                "n={n}: {} inputs ({}), single orbit {}",
                rep.inputs_checked,
                if rep.exhaustive { "exhaustive" } else { "codeword pairs + random" },
                rep.single_orbit
            ));
        }
        checks.push(Check::new(7, "transitivity", trans_ok, trans_rows.join(", ")));

        let proj = ip_projection_check(2)?;
        checks.push(Check::new(
            7,
            "ip_projection",
            proj.holds(),
            format!("{} free variables, {} assignments", proj.free_variables, proj.assignments),
        ));

        // Subset enumeration agrees with the naive double enumeration.
        let mut naive_ok = true;
        for g in [Gadget::and2(), Gadget::ip(2, 1)?, Gadget::addr(2, 1)?] {
            let u = Distribution::uniform_for(&g)?;
            let m: Vec<f64> = g.table().iter().zip(u.weights()).map(|(&v, w)| v as f64 * w).collect();
            let (rows, cols) = (1usize << g.j(), 1usize << g.k());
            naive_ok &= (max_rectangle(&m, rows, cols)? - naive_discrepancy(&m, rows, cols)?).abs() <= 1e-12;
        }
        checks.push(Check::new(7, "rectangle_oracle", naive_ok, "subset enumeration matches naive".into()));

        checks.push(runtime_check(7, start, Duration::from_secs(300)));
        Ok(checks)
    }

    /// Reruns the fault-sensitive criteria under each fault and reports
    /// which checks that pass cleanly turn red.
    pub fn fault_injection(&self) -> Result<Vec<Check>> {
        let effort = (self.effort * FAULT_EFFORT).min(FAULT_EFFORT);
        let clean = Battery::with_faults(Faults::default(), effort);
        let mut baseline = Vec::new();
        for c in FAULT_SENSITIVE {
            baseline.extend(clean.run(c)?);
        }
        let mut checks = Vec::new();
        for (name, faults) in [
            ("eps_schedule", Faults::eps_schedule()),
            ("index_convention", Faults::index_convention()),
            ("patch_registry", Faults::patch_registry()),
        ] {
            let faulty = Battery::with_faults(faults, effort);
            let mut broken = Vec::new();
            for c in FAULT_SENSITIVE {
                for check in faulty.run(c)? {
                    let was_green = baseline
                        .iter()
                        .any(|b| b.criterion == check.criterion && b.name == check.name && b.passed);
                    if was_green && !check.passed && check.name != "runtime" {
                        broken.push(format!("{}.{}", check.criterion, check.name));
                    }
                }
            }
            checks.push(Check::new(
                8,
                name,
                !broken.is_empty(),
                if broken.is_empty() {
                    format!("fault {} broke no check", faults.label())
                } else {
                    format!("fault {} breaks {}", faults.label(), broken.join(", "))
                },
            ));
        }
        Ok(checks)
    }
}

/// Trial scale used for the reruns in the fault-injection criterion.
pub const FAULT_EFFORT: f64 = 0.2;

/// `(n, t)` grid of the amplification criteria.
pub const AMPLIFICATION_GRID: [(usize, usize); 4] = [(64, 1), (256, 1), (256, 4), (1024, 1)];

/// `(n, t)` grid of the known-count cost fit. The depth
/// `k = ⌊log₃(π/2θ)⌋` is a staircase in `n/t`, so the grid uses two ratios.
pub const SEARCH_COST_GRID: [(usize, usize); 6] = [(64, 1), (128, 2), (256, 4), (1024, 16), (512, 1), (1024, 2)];

/// `(n, t)` grid of the evaluation cost fit; `f` is the threshold function
/// with `t` as its counting threshold.
pub const EVAL_COST_GRID: [(usize, usize); 6] = [(64, 4), (128, 8), (256, 16), (64, 8), (128, 16), (256, 32)];

pub const BCW_SIZES: [usize; 3] = [64, 256, 1024];

/// `(n, t, |z|)` configurations of the counting criterion.
pub const COUNT_CONFIGS: [(usize, usize, usize); 6] =
    [(64, 4, 0), (64, 4, 2), (64, 4, 6), (64, 4, 12), (128, 8, 4), (256, 8, 24)];

fn describe_grid(grid: &[(usize, usize)], values: &[f64]) -> String {
    grid.iter()
        .zip(values)
        .map(|(&(n, t), v)| format!("({n},{t})={v:.0}"))
        .collect::<Vec<_>>()
        .join(" ")
}
