//! Distributed search for an index `i` with `G(X_i, Y_i) = −1`.
//!
//! Both parties start from `⌈log n⌉` EPR pairs and run recursive amplitude
//! amplification where the good set is every pair `(i, j)` with
//! `G(X_i, Y_j) = −1`. The reflection about the shared state is a modeled
//! subprotocol with a communication charge per level; the oracle costs `2q`.
//! After measuring, the parties exchange `i` and `j` and verify a collision
//! classically, so a reported index is always a true solution.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::amplamp::{grover_angle, iteration_count, unfold, Amplifier, NoiseModel, ReflectionSet};
use crate::boolfn::Gadget;
use crate::error::{Error, Result};
use crate::params::Constants;
use crate::runtime::{init_shared, CostMeter, Party, Transcript, TwoPartyState, JOINT_ORACLE, JOINT_REFLECT};
use crate::statevector::{log2_exact, CVec, UnitaryOp};

/// Charge label for classically evaluating `G` on a candidate.
pub const VERIFY: &str = "verify";

/// Inputs of a search: block `i` of Alice is `x[i]`, of Bob `y[i]`, each an
/// index into the gadget's input space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchInstance {
    gadget: Arc<Gadget>,
    x: Vec<usize>,
    y: Vec<usize>,
}

impl SearchInstance {
    pub fn new(gadget: Arc<Gadget>, x: Vec<usize>, y: Vec<usize>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        let n = x.len();
        if n < 2 {
            return Err(Error::InvalidParameter("search needs n >= 2".into()));
        }
        log2_exact(n)?;
        let (xs, ys) = (1usize << gadget.j(), 1usize << gadget.k());
        if let Some(&bad) = x.iter().find(|&&v| v >= xs) {
            return Err(Error::IndexOutOfRange { index: bad, dim: xs });
        }
        if let Some(&bad) = y.iter().find(|&&v| v >= ys) {
            return Err(Error::IndexOutOfRange { index: bad, dim: ys });
        }
        Ok(Self { gadget, x, y })
    }

    /// Random blocks with `G = −1` exactly on `solutions`, each block drawn
    /// uniformly from the inputs with the required value.
    pub fn planted<R: Rng + ?Sized>(
        gadget: Arc<Gadget>,
        n: usize,
        solutions: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        let k = gadget.k();
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (idx, &v) in gadget.table().iter().enumerate() {
            let pair = (idx >> k, idx & ((1 << k) - 1));
            if v == -1 {
                neg.push(pair);
            } else {
                pos.push(pair);
            }
        }
        if (!solutions.is_empty() && neg.is_empty()) || (solutions.len() < n && pos.is_empty()) {
            return Err(Error::InvalidParameter(format!(
                "gadget {} cannot realize the requested pattern",
                gadget.name()
            )));
        }
        let mut is_sol = vec![false; n];
        for &s in solutions {
            *is_sol
                .get_mut(s)
                .ok_or(Error::IndexOutOfRange { index: s, dim: n })? = true;
        }
        let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for &sol in &is_sol {
            let &(a, b) = if sol { &neg } else { &pos }.choose(rng).expect("nonempty");
            x.push(a);
            y.push(b);
        }
        Self::new(gadget, x, y)
    }

    /// Planted instance with `count` solutions at uniformly random positions.
    pub fn planted_count<R: Rng + ?Sized>(
        gadget: Arc<Gadget>,
        n: usize,
        count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if count > n {
            return Err(Error::InvalidParameter(format!("{count} solutions in {n} blocks")));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        Self::planted(gadget, n, &idx[..count], rng)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn gadget(&self) -> &Gadget {
        &self.gadget
    }

    pub fn gadget_arc(&self) -> &Arc<Gadget> {
        &self.gadget
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn value(&self, i: usize) -> i8 {
        self.gadget.eval(self.x[i], self.y[i])
    }

    /// `z_i = G(X_i, Y_i)`.
    pub fn z(&self) -> Vec<i8> {
        (0..self.n()).map(|i| self.value(i)).collect()
    }

    pub fn solutions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.value(i) == -1).collect()
    }

    /// `|z|`, the number of `−1`s.
    pub fn count(&self) -> usize {
        (0..self.n()).filter(|&i| self.value(i) == -1).count()
    }

    /// Overwrites block `i` on both sides.
    pub fn set_block(&mut self, i: usize, x: usize, y: usize) {
        self.x[i] = x;
        self.y[i] = y;
    }

    /// The instance restricted to `positions`, padded to a power of two
    /// (at least 2) with the blocks `pad`.
    pub fn restricted(&self, positions: &[usize], pad: (usize, usize)) -> Result<Self> {
        let size = positions.len().max(2).next_power_of_two();
        let mut x: Vec<usize> = positions.iter().map(|&p| self.x[p]).collect();
        let mut y: Vec<usize> = positions.iter().map(|&p| self.y[p]).collect();
        x.resize(size, pad.0);
        y.resize(size, pad.1);
        Self::new(self.gadget.clone(), x, y)
    }

    fn is_and2(&self) -> bool {
        self.gadget.j() == 1 && self.gadget.k() == 1 && self.gadget.table() == [1, 1, 1, -1]
    }
}

/// How `O_𝒢` is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Alice computes `[x_i = −1]` into an auxiliary qubit, sends it to Bob
    /// who applies the conditional phase, and it comes back to be
    /// uncomputed. Only valid for AND_2.
    ExplicitAnd,
    /// A registered joint diagonal charged `2q`.
    Modeled,
}

/// Applies `O_𝒢` to the index registers (Alice's first, then Bob's).
pub fn oracle_reflection(state: &mut TwoPartyState, inst: &SearchInstance, mode: OracleMode) -> Result<()> {
    let n = inst.n();
    let bits = log2_exact(n)?;
    let alice: Vec<usize> = (0..bits).collect();
    let bob: Vec<usize> = (bits..2 * bits).collect();
    match mode {
        OracleMode::ExplicitAnd => {
            if !inst.is_and2() {
                return Err(Error::InvalidParameter(format!(
                    "explicit oracle protocol needs AND_2, got {}",
                    inst.gadget.name()
                )));
            }
            let aux = state.add_aux(Party::Alice)?;
            let mut regs = alice.clone();
            regs.push(aux);
            let x = inst.x.clone();
            let compute = UnitaryOp::permutation(regs, move |l| l ^ usize::from(x[l >> 1] == 1))?;
            state.local(Party::Alice, &compute)?;
            state.send(&[aux], Party::Bob)?;
            let mut regs = bob.clone();
            regs.push(aux);
            let y = inst.y.clone();
            state.local(
                Party::Bob,
                &UnitaryOp::phase_flip(regs, move |l| l & 1 == 1 && y[l >> 1] == 1),
            )?;
            state.send(&[aux], Party::Alice)?;
            state.local(Party::Alice, &compute)?;
            state.remove_aux(Party::Alice, 1e-9)
        }
        OracleMode::Modeled => {
            let good = good_mask(inst);
            let mut regs = alice;
            regs.extend(bob);
            let op = UnitaryOp::phase_flip(regs, move |l| good[l]);
            state.joint_op(JOINT_ORACLE, &op, 2 * inst.gadget.q())
        }
    }
}

fn good_mask(inst: &SearchInstance) -> Arc<Vec<bool>> {
    let n = inst.n();
    let mut mask = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            mask.push(inst.gadget.eval(inst.x[i], inst.y[j]) == -1);
        }
    }
    Arc::new(mask)
}

/// Applies the level-`level` approximate reflection about the shared state
/// and charges it.
pub fn approx_reflect(
    state: &mut TwoPartyState,
    reflections: &ReflectionSet,
    level: usize,
    adjoint: bool,
    constants: &Constants,
) -> Result<()> {
    let r = reflections.level(level);
    let eps = r.eps();
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} outside (0, 1)")));
    }
    let cost = constants.reflection.charge(eps);
    state.joint_with(JOINT_REFLECT, cost, |v| r.apply(v, adjoint))
}

struct ProtocolAmplifier<'a> {
    inst: &'a SearchInstance,
    reflections: &'a ReflectionSet,
    constants: &'a Constants,
    mode: OracleMode,
}

impl Amplifier for ProtocolAmplifier<'_> {
    type State = TwoPartyState;

    fn oracle(&mut self, state: &mut TwoPartyState) -> Result<()> {
        oracle_reflection(state, self.inst, self.mode)
    }

    fn reflect(&mut self, state: &mut TwoPartyState, level: usize, adjoint: bool) -> Result<()> {
        approx_reflect(state, self.reflections, level, adjoint, self.constants)
    }
}

/// Final measurement distribution of one amplification run, with the cost
/// of producing it.
#[derive(Debug, Clone)]
struct Amplified {
    cdf: Vec<f64>,
    bits: usize,
    meter: CostMeter,
    transcript: Transcript,
}

impl Amplified {
    fn sample(&self, u: f64) -> (usize, usize) {
        let total = *self.cdf.last().expect("nonempty");
        let target = u * total;
        let idx = self
            .cdf
            .partition_point(|&c| c <= target)
            .min(self.cdf.len() - 1);
        (idx >> self.bits, idx & ((1 << self.bits) - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    x: Vec<usize>,
    y: Vec<usize>,
    table: Vec<i8>,
    j: usize,
    q: u64,
    k: usize,
    noise: NoiseModel,
    base_bits: u64,
    verbose: bool,
}

/// Amplitude total kept in the cache before it is flushed.
const CACHE_AMPLITUDES: usize = 1 << 23;

/// Result of one run of the known-count search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    pub alice: usize,
    pub bob: usize,
    pub k: usize,
    pub meter: CostMeter,
}

/// Runs the distributed search with fixed constants and noise model.
///
/// Amplification is a pure function of the instance, depth and noise
/// realization, so its outcome distribution is cached; runs then differ only
/// in the measurement draw.
pub struct SearchRunner {
    pub constants: Constants,
    pub noise: NoiseModel,
    pub verbose: bool,
    cache: Mutex<(HashMap<CacheKey, Arc<Amplified>>, usize)>,
}

impl std::fmt::Debug for SearchRunner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SearchRunner")
            .field("constants", &self.constants)
            .field("noise", &self.noise)
            .finish()
    }
}

impl Clone for SearchRunner {
    fn clone(&self) -> Self {
        Self::new(self.constants.clone(), self.noise)
    }
}

impl SearchRunner {
    pub fn new(constants: Constants, noise: NoiseModel) -> Self {
        Self {
            constants,
            noise,
            verbose: false,
            cache: Mutex::new((HashMap::new(), 0)),
        }
    }

    pub fn verbose(mut self, on: bool) -> Self {
        self.verbose = on;
        self
    }

    fn oracle_mode(&self, inst: &SearchInstance) -> OracleMode {
        if self.constants.explicit_and && inst.is_and2() && inst.gadget.q() == 1 {
            OracleMode::ExplicitAnd
        } else {
            OracleMode::Modeled
        }
    }

    fn amplify(&self, inst: &SearchInstance, k: usize) -> Result<Arc<Amplified>> {
        if !self.constants.memoize {
            return self.amplify_uncached(inst, k).map(Arc::new);
        }
        let key = CacheKey {
            x: inst.x.clone(),
            y: inst.y.clone(),
            table: inst.gadget.table().to_vec(),
            j: inst.gadget.j(),
            q: inst.gadget.q(),
            k,
            noise: self.noise,
            base_bits: self.constants.schedule.base.to_bits(),
            verbose: self.verbose,
        };
        if let Some(hit) = self.cache.lock().expect("cache lock").0.get(&key) {
            return Ok(hit.clone());
        }
        let fresh = Arc::new(self.amplify_uncached(inst, k)?);
        let mut guard = self.cache.lock().expect("cache lock");
        let (map, used) = &mut *guard;
        if *used + fresh.cdf.len() > CACHE_AMPLITUDES {
            map.clear();
            *used = 0;
        }
        *used += fresh.cdf.len();
        map.insert(key, fresh.clone());
        Ok(fresh)
    }

    fn amplify_uncached(&self, inst: &SearchInstance, k: usize) -> Result<Amplified> {
        let n = inst.n();
        let bits = log2_exact(n)?;
        let mut state = init_shared(n, bits as u64)?;
        if self.verbose {
            state = state.verbose();
        }
        let psi: CVec = state.joint().clone();
        let reflections = ReflectionSet::new(&psi, self.noise, self.constants.schedule, k)?;
        let mut amp = ProtocolAmplifier {
            inst,
            reflections: &reflections,
            constants: &self.constants,
            mode: self.oracle_mode(inst),
        };
        unfold(&mut amp, &mut state, k, self.constants.step_budget)?;
        let mut acc = 0.0;
        let cdf = state
            .joint()
            .amps()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Ok(Amplified {
            cdf,
            bits,
            meter: state.meter.clone(),
            transcript: state.transcript.clone(),
        })
    }

    /// One run with the depth chosen for `t` solutions out of `n`, appending
    /// events to `transcript` when enabled.
    pub fn search_known_t_logged<R: Rng + ?Sized>(
        &self,
        inst: &SearchInstance,
        t: usize,
        rng: &mut R,
        transcript: &mut Transcript,
    ) -> Result<SearchOutcome> {
        let n = inst.n();
        if t == 0 || t > n {
            return Err(Error::InvalidParameter(format!("need 1 <= t <= n, got t={t}")));
        }
        let k = iteration_count(grover_angle(t, n)?)?;
        let amp = self.amplify(inst, k)?;
        let (alice, bob) = amp.sample(rng.gen::<f64>());
        let mut meter = amp.meter.clone();
        transcript.extend(&amp.transcript);
        transcript.record(|| format!("MEASURE alice {alice}"));
        transcript.record(|| format!("MEASURE bob {bob}"));
        // Each party announces its outcome.
        let announce = 2 * amp.bits as u64;
        meter.qubits_sent += announce;
        transcript.record(|| format!("SEND {announce}"));
        let mut found = None;
        if alice == bob {
            let q = inst.gadget.q();
            meter.charge(VERIFY, q);
            transcript.record(|| format!("CHARGE {VERIFY} {q}"));
            if inst.value(alice) == -1 {
                found = Some(alice);
            }
        }
        Ok(SearchOutcome {
            found,
            alice,
            bob,
            k,
            meter,
        })
    }

    pub fn search_known_t<R: Rng + ?Sized>(
        &self,
        inst: &SearchInstance,
        t: usize,
        rng: &mut R,
    ) -> Result<SearchOutcome> {
        self.search_known_t_logged(inst, t, rng, &mut Transcript::disabled())
    }

    /// Tries `t = n, n/2, …, 1`, each up to `unknown_reps` times, stopping at
    /// the first verified hit.
    pub fn search_unknown<R: Rng + ?Sized>(
        &self,
        inst: &SearchInstance,
        rng: &mut R,
    ) -> Result<(Option<usize>, CostMeter)> {
        let mut meter = CostMeter::new();
        let mut t = inst.n();
        loop {
            for _ in 0..self.constants.unknown_reps {
                let out = self.search_known_t(inst, t, rng)?;
                meter.absorb(&out.meter);
                if out.found.is_some() {
                    return Ok((out.found, meter));
                }
            }
            if t == 1 {
                return Ok((None, meter));
            }
            t /= 2;
        }
    }

    /// Deterministic part of the cost of one known-count run at depth `k`
    /// (everything except the collision-dependent verification charge).
    pub fn base_cost(&self, n: usize, q: u64, k: usize) -> u64 {
        let bits = log2_exact(n).unwrap_or(0) as u64;
        let oracle = crate::amplamp::oracle_calls(k) * 2 * q;
        let reflect: u64 = (1..=k)
            .map(|j| {
                crate::amplamp::reflections_at_level(k, j)
                    * self.constants.reflection.charge(self.constants.schedule.eps(j))
            })
            .sum();
        oracle + reflect + 2 * bits
    }

    /// Drops every cached amplification.
    pub fn clear_cache(&self) {
        let mut guard = self.cache.lock().expect("cache lock");
        guard.0.clear();
        guard.1 = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn and2() -> Arc<Gadget> {
        Arc::new(Gadget::and2())
    }

    fn single(n: usize, at: usize, seed: u64) -> SearchInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SearchInstance::planted(and2(), n, &[at], &mut rng).unwrap()
    }

    #[test]
    fn planted_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = SearchInstance::planted(and2(), 16, &[3, 7], &mut rng).unwrap();
        assert_eq!(inst.solutions(), vec![3, 7]);
        let inst = SearchInstance::planted_count(Arc::new(Gadget::ip(2, 2).unwrap()), 32, 5, &mut rng)
            .unwrap();
        assert_eq!(inst.count(), 5);
        assert!(SearchInstance::new(and2(), vec![0; 3], vec![0; 3]).is_err());
    }

    #[test]
    fn explicit_and_protocol_matches_modeled_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 8;
        let inst = SearchInstance::planted_count(and2(), n, 3, &mut rng).unwrap();
        let amps: Vec<C64> = (0..n * n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut v = CVec::from_amps(amps).unwrap();
        v.normalize().unwrap();
        let owners = |b| {
            let mut o = vec![Party::Alice; b];
            o.extend(vec![Party::Bob; b]);
            o
        };
        let mut a = TwoPartyState::with_owners(v.clone(), owners(3)).unwrap();
        let mut b = TwoPartyState::with_owners(v, owners(3)).unwrap();
        oracle_reflection(&mut a, &inst, OracleMode::ExplicitAnd).unwrap();
        oracle_reflection(&mut b, &inst, OracleMode::Modeled).unwrap();
        assert!(a.joint().distance(b.joint()).unwrap() < 1e-12);
        assert_eq!(a.meter.qubits_sent, 2);
        assert_eq!(a.meter.total(), 2);
        assert_eq!(b.meter.total(), 2);
        assert_eq!(a.num_qubits(), 6);
    }

    #[test]
    fn oracle_is_identity_without_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = SearchInstance::planted(and2(), 8, &[], &mut rng).unwrap();
        let mut s = init_shared(8, 3).unwrap();
        s.local(Party::Alice, &UnitaryOp::hadamard(0)).unwrap();
        let before = s.joint().clone();
        oracle_reflection(&mut s, &inst, OracleMode::ExplicitAnd).unwrap();
        assert!(s.joint().distance(&before).unwrap() < 1e-15);
    }

    #[test]
    fn explicit_mode_rejects_other_gadgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = SearchInstance::planted(Arc::new(Gadget::xor2()), 4, &[1], &mut rng).unwrap();
        let mut s = init_shared(4, 2).unwrap();
        assert!(oracle_reflection(&mut s, &inst, OracleMode::ExplicitAnd).is_err());
    }

    #[test]
    fn approx_reflect_fixes_shared_state_and_charges() {
        let c = Constants::default();
        for noise in [NoiseModel::Perfect, NoiseModel::RandomPhases { seed: 2 }] {
            let mut s = init_shared(4, 2).unwrap();
            let psi = s.joint().clone();
            let set = ReflectionSet::new(&psi, noise, c.schedule, 1).unwrap();
            approx_reflect(&mut s, &set, 1, false, &c).unwrap();
            assert!(s.joint().distance(&psi).unwrap() < 1e-12);
            assert_eq!(s.meter.total(), 11);
        }
    }

    #[test]
    fn cost_closed_form_matches_meter() {
        let runner = SearchRunner::new(Constants::default(), NoiseModel::Perfect);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // t = 1 out of 64 gives k = 2: 4 oracle calls, 3 level-1 and one
        // level-2 reflection, plus 12 announced bits.
        let inst = single(64, 5, 1);
        let out = runner.search_known_t(&inst, 1, &mut rng).unwrap();
        assert_eq!(out.k, 2);
        assert_eq!(runner.base_cost(64, 1, 2), 4 * 2 + 3 * 11 + 13 + 12);
        let verify = u64::from(out.alice == out.bob);
        assert_eq!(out.meter.total(), runner.base_cost(64, 1, 2) + verify);
        assert_eq!(out.meter.epr_consumed, 6);
    }

    #[test]
    fn perfect_search_always_collides() {
        let runner = SearchRunner::new(Constants::default(), NoiseModel::Perfect);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = single(32, 9, 2);
        for _ in 0..100 {
            let out = runner.search_known_t(&inst, 1, &mut rng).unwrap();
            assert_eq!(out.alice, out.bob);
            if let Some(i) = out.found {
                assert_eq!(i, 9);
            }
        }
    }

    #[test]
    fn no_solution_never_reports() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let inst = SearchInstance::planted(and2(), 16, &[], &mut rng).unwrap();
        for noise in [NoiseModel::Perfect, NoiseModel::RandomPhases { seed: 1 }] {
            let runner = SearchRunner::new(Constants::default(), noise);
            for t in [1, 2, 16] {
                for _ in 0..20 {
                    assert_eq!(runner.search_known_t(&inst, t, &mut rng).unwrap().found, None);
                }
            }
            assert_eq!(runner.search_unknown(&inst, &mut rng).unwrap().0, None);
        }
    }

    #[test]
    fn cached_and_uncached_runs_agree() {
        let inst = single(16, 3, 7);
        for noise in [NoiseModel::PhaseOnComplement { seed: 1 }, NoiseModel::RandomPhases { seed: 5 }] {
            let cached = SearchRunner::new(Constants::default(), noise).verbose(true);
            let plain = SearchRunner::new(
                Constants {
                    memoize: false,
                    ..Constants::default()
                },
                noise,
            )
            .verbose(true);
            let mut r1 = ChaCha8Rng::seed_from_u64(8);
            let mut r2 = ChaCha8Rng::seed_from_u64(8);
            for _ in 0..30 {
                let (mut t1, mut t2) = (Transcript::enabled(), Transcript::enabled());
                let a = cached.search_known_t_logged(&inst, 1, &mut r1, &mut t1).unwrap();
                let b = plain.search_known_t_logged(&inst, 1, &mut r2, &mut t2).unwrap();
                assert_eq!((a.found, a.alice, a.bob), (b.found, b.alice, b.bob));
                assert_eq!(a.meter, b.meter);
                assert_eq!(t1, t2);
            }
        }
    }

    #[test]
    fn transcript_lines() {
        let runner = SearchRunner::new(Constants::default(), NoiseModel::Perfect).verbose(true);
        let inst = single(4, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = Transcript::enabled();
        let out = runner.search_known_t_logged(&inst, 1, &mut rng, &mut t).unwrap();
        assert_eq!(out.k, 1);
        let lines = t.lines();
        assert_eq!(&lines[..3], &["SEND 1", "SEND 1", "CHARGE reflect 11"]);
        assert!(lines.iter().any(|l| l.starts_with("MEASURE alice")));
        assert!(lines.contains(&"SEND 4".to_string()));
    }

    #[test]
    fn unknown_search_finds_solutions() {
        let runner = SearchRunner::new(Constants::default(), NoiseModel::PhaseOnComplement { seed: 0 });
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for count in [1usize, 3, 20] {
            let inst = SearchInstance::planted_count(and2(), 64, count, &mut rng).unwrap();
            let sols = inst.solutions();
            let mut hits = 0;
            for _ in 0..50 {
                if let (Some(i), _) = runner.search_unknown(&inst, &mut rng).unwrap() {
                    assert!(sols.contains(&i));
                    hits += 1;
                }
            }
            assert!(hits >= 48, "count={count} hits={hits}");
        }
    }
}
