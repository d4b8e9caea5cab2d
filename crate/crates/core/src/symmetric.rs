//! Counting the `−1`s of `z = (G(X_i, Y_i))_i` up to a threshold, and
//! evaluating symmetric functions of `z` with it.
//!
//! The count-or-threshold protocol first runs a subset filter that detects
//! `|z| ≥ 2t`, then repeatedly finds and patches solutions at geometrically
//! decreasing density guesses until every solution has been removed.

use std::collections::BTreeMap;

use rand::Rng;

use crate::boolfn::{Gadget, SymmetricSpec};
use crate::error::{Error, Result};
use crate::runtime::{shared_subset, CostMeter, Transcript};
use crate::search::{SearchInstance, SearchRunner};
use crate::statevector::ceil_log2;

/// Pre-agreed blocks `(X', Y')` with `G(X', Y') = +1`, used to overwrite a
/// found solution.
#[derive(Debug, Clone, Default)]
pub struct PatchRegistry {
    entries: BTreeMap<String, (usize, usize)>,
    faulty: bool,
}

impl PatchRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// A registry whose default rule picks blocks with `G = −1`, for
    /// fault-injection runs.
    pub fn faulty() -> Self {
        Self {
            entries: BTreeMap::new(),
            faulty: true,
        }
    }

    pub fn register(&mut self, gadget: &Gadget, x: usize, y: usize) -> Result<()> {
        if x >= 1 << gadget.j() || y >= 1 << gadget.k() {
            return Err(Error::InvalidParameter("patch block outside the gadget domain".into()));
        }
        if gadget.eval(x, y) != 1 {
            return Err(Error::InvalidParameter(format!(
                "patch for {} must evaluate to +1",
                gadget.name()
            )));
        }
        self.entries.insert(gadget.name().to_string(), (x, y));
        Ok(())
    }

    /// The patch for `gadget`: a registered entry, else the first table
    /// position with value `+1` (for AND_2 this is `X' = Y' = +1`).
    pub fn patch_for(&self, gadget: &Gadget) -> Result<(usize, usize)> {
        if let Some(&p) = self.entries.get(gadget.name()) {
            return Ok(p);
        }
        let want = if self.faulty { -1 } else { 1 };
        let idx = gadget
            .table()
            .iter()
            .position(|&v| v == want)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("gadget {} has no patch input", gadget.name()))
            })?;
        let k = gadget.k();
        Ok((idx >> k, idx & ((1 << k) - 1)))
    }
}

/// `C(n − bad, s) / C(n, s)`: probability that a uniform `s`-subset of `n`
/// positions avoids `bad` marked ones.
pub fn miss_probability(n: usize, bad: usize, s: usize) -> f64 {
    if s + bad > n {
        return 0.0;
    }
    (0..s).map(|i| (n - bad - i) as f64 / (n - i) as f64).product()
}

/// Parameters of the subset filter for threshold `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterPlan {
    pub subset: usize,
    /// Hit probability when `|z| ≥ 2t`.
    pub p_high: f64,
    /// Hit probability when `|z| = t`.
    pub p_low: f64,
    pub threshold: f64,
    pub repetitions: usize,
}

impl FilterPlan {
    pub fn new(n: usize, t: usize, miss: f64, error: f64) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::InvalidParameter(format!("need 1 <= t <= n, got t={t}")));
        }
        let subset = n.div_ceil(2 * t);
        let p_high = 1.0 - miss_probability(n, (2 * t).min(n), subset);
        let p_low = 1.0 - miss_probability(n, t, subset);
        let p_high_eff = p_high * (1.0 - miss);
        let gap = p_high_eff - p_low;
        if gap <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "no separation between {p_high_eff} and {p_low}"
            )));
        }
        let half = gap / 2.0;
        let repetitions = ((1.0 / error).ln() / (2.0 * half * half)).ceil() as usize;
        Ok(Self {
            subset,
            p_high,
            p_low,
            threshold: (p_high_eff + p_low) / 2.0,
            repetitions,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDecision {
    /// `|z| ≥ 2t` (likely).
    Many,
    /// Proceed to exact counting.
    Proceed,
}

#[derive(Debug, Clone)]
pub struct FilterReport {
    pub decision: FilterDecision,
    pub hits: usize,
    pub plan: FilterPlan,
    pub meter: CostMeter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountOutcome {
    Exact(usize),
    AboveThreshold(usize),
}

#[derive(Debug, Clone)]
pub struct CountReport {
    pub outcome: CountOutcome,
    pub meter: CostMeter,
    /// One line per phase decision.
    pub trace: Vec<String>,
    /// Solutions found and patched, in order.
    pub found: Vec<usize>,
    /// The instance after patching.
    pub patched: SearchInstance,
}

/// Result of one call of the fixed-density finder.
#[derive(Debug, Clone)]
pub struct FinderReport {
    pub found: Vec<usize>,
    pub meter: CostMeter,
    pub runs: usize,
    pub budget: f64,
}

/// Counting and evaluation protocols on top of a [`SearchRunner`].
#[derive(Debug)]
pub struct Counter<'a> {
    pub runner: &'a SearchRunner,
    pub patches: PatchRegistry,
}

impl<'a> Counter<'a> {
    pub fn new(runner: &'a SearchRunner) -> Self {
        Self {
            runner,
            patches: PatchRegistry::new(),
        }
    }

    pub fn with_patches(mut self, patches: PatchRegistry) -> Self {
        self.patches = patches;
        self
    }

    /// Decides between `|z| ≥ 2t` and `|z| ≤ t` by testing random subsets of
    /// size `⌈n/(2t)⌉` for a solution.
    pub fn part1_filter<R: Rng + ?Sized>(
        &self,
        inst: &SearchInstance,
        t: usize,
        rng: &mut R,
    ) -> Result<FilterReport> {
        let c = &self.runner.constants;
        let n = inst.n();
        let plan = FilterPlan::new(n, t, c.part1_miss, c.part1_error)?;
        let pad = self.patches.patch_for(inst.gadget())?;
        let mut meter = CostMeter::new();
        let mut log = Transcript::disabled();
        let mut hits = 0;
        for _ in 0..plan.repetitions {
            let subset = shared_subset(&mut meter, &mut log, n, plan.subset, rng);
            let sub = inst.restricted(&subset, pad)?;
            let (hit, m) = self.runner.search_unknown(&sub, rng)?;
            meter.absorb(&m);
            if hit.is_some() {
                hits += 1;
            }
        }
        let decision = if hits as f64 >= plan.threshold * plan.repetitions as f64 {
            FilterDecision::Many
        } else {
            FilterDecision::Proceed
        };
        Ok(FilterReport {
            decision,
            hits,
            plan,
            meter,
        })
    }

    /// Searches with density guess `2^{k−1}` until `c·√(2^k n)·q` qubits are
    /// spent, patching every verified solution.
    pub fn protocol_pk<R: Rng + ?Sized>(
        &self,
        inst: &mut SearchInstance,
        k: usize,
        rng: &mut R,
    ) -> Result<FinderReport> {
        if k == 0 {
            return Err(Error::InvalidParameter("finder level must be >= 1".into()));
        }
        let n = inst.n();
        let c = &self.runner.constants;
        let guess = (1usize << (k - 1)).min(n);
        let budget = c.part2_budget * ((1u64 << k) as f64 * n as f64).sqrt() * inst.gadget().q() as f64;
        let patch = self.patches.patch_for(inst.gadget())?;
        let mut meter = CostMeter::new();
        let mut found = Vec::new();
        let mut runs = 0;
        while (meter.total() as f64) < budget {
            let out = self.runner.search_known_t(inst, guess, rng)?;
            runs += 1;
            meter.absorb(&out.meter);
            if let Some(i) = out.found {
                inst.set_block(i, patch.0, patch.1);
                found.push(i);
            }
        }
        Ok(FinderReport {
            found,
            meter,
            runs,
            budget,
        })
    }

    /// Runs the finder at levels `K = ⌈log2(2t)⌉` down to 1, `K − k + 5` times
    /// each, and reports the number of solutions found.
    pub fn protocol_p<R: Rng + ?Sized>(
        &self,
        inst: &SearchInstance,
        t: usize,
        rng: &mut R,
    ) -> Result<CountReport> {
        if t == 0 {
            return Err(Error::InvalidParameter("threshold must be >= 1".into()));
        }
        let top = ceil_log2(2 * t);
        let mut work = inst.clone();
        let mut meter = CostMeter::new();
        let mut found = Vec::new();
        let mut trace = Vec::new();
        for k in (1..=top).rev() {
            let reps = top - k + 5;
            for _ in 0..reps {
                let rep = self.protocol_pk(&mut work, k, rng)?;
                meter.absorb(&rep.meter);
                found.extend(rep.found);
            }
            trace.push(format!("level {k}: {reps} rounds, {} found so far", found.len()));
        }
        Ok(CountReport {
            outcome: CountOutcome::Exact(found.len()),
            meter,
            trace,
            found,
            patched: work,
        })
    }

    /// Reports `|z|` exactly or that `|z| > t`.
    pub fn count_or_threshold<R: Rng + ?Sized>(
        &self,
        inst: &SearchInstance,
        t: usize,
        rng: &mut R,
    ) -> Result<CountReport> {
        let filter = self.part1_filter(inst, t, rng)?;
        let line = format!(
            "filter: {}/{} hits, threshold {:.4}",
            filter.hits, filter.plan.repetitions, filter.plan.threshold
        );
        if filter.decision == FilterDecision::Many {
            return Ok(CountReport {
                outcome: CountOutcome::AboveThreshold(t),
                meter: filter.meter,
                trace: vec![line, "above threshold".into()],
                found: Vec::new(),
                patched: inst.clone(),
            });
        }
        let mut report = self.protocol_p(inst, t, rng)?;
        report.meter.absorb(&filter.meter);
        report.trace.insert(0, line);
        Ok(report)
    }

    /// Evaluates `f(z)` for symmetric `f` by counting `−1`s and `+1`s up to
    /// `t = ⌈(n − Γ(f))/2⌉`.
    pub fn eval_symmetric<R: Rng + ?Sized>(
        &self,
        f: &SymmetricSpec,
        inst: &SearchInstance,
        rng: &mut R,
    ) -> Result<EvalReport> {
        let n = inst.n();
        if f.n() != n {
            return Err(Error::Arity(format!("f has arity {}, instance has {n} blocks", f.n())));
        }
        let t = f.threshold_t();
        if t == 0 {
            return Ok(EvalReport {
                value: f.at_weight(0),
                path: EvalPath::Constant,
                meter: CostMeter::new(),
                t,
            });
        }
        let minus = self.count_or_threshold(inst, t, rng)?;
        let flipped = SearchInstance::new(
            std::sync::Arc::new(inst.gadget().negated()),
            inst.x().to_vec(),
            inst.y().to_vec(),
        )?;
        let plus = self.count_or_threshold(&flipped, t, rng)?;
        let mut meter = minus.meter.clone();
        meter.absorb(&plus.meter);
        let (value, path) = match (minus.outcome, plus.outcome) {
            (CountOutcome::Exact(c), _) if c <= n => (f.at_weight(c), EvalPath::CountedMinus(c)),
            (_, CountOutcome::Exact(c)) if c <= n => (f.at_weight(n - c), EvalPath::CountedPlus(c)),
            _ => (f.at_weight(t.min(n)), EvalPath::Interior),
        };
        Ok(EvalReport { value, path, meter, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    Constant,
    CountedMinus(usize),
    CountedPlus(usize),
    Interior,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub value: i8,
    pub path: EvalPath,
    pub meter: CostMeter,
    pub t: usize,
}

/// Cost model of simulating a `⌈c√((n−Γ)n)⌉`-query algorithm with
/// `2⌈log n⌉ + 2q` qubits per query. Zero for constant `f`.
pub fn bcw_baseline_cost(f: &SymmetricSpec, gadget: &Gadget, c: f64) -> u64 {
    let n = f.n();
    let gamma = f.gamma();
    if f.is_constant() || gamma >= n {
        return 0;
    }
    let queries = (c * (((n - gamma) * n) as f64).sqrt()).ceil() as u64;
    queries * (2 * ceil_log2(n) as u64 + 2 * gadget.q())
}
