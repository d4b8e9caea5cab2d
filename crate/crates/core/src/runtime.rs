//! Two-party protocol substrate: qubit ownership, metered channel, EPR
//! budget, shared randomness and transcripts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::statevector::{ceil_log2, sample_index, CVec, UnitaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Running total of one abstract-charge label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChargeTally {
    pub events: u64,
    pub amount: u64,
}

/// Communication and query counters.
///
/// Abstract charges are aggregated per label rather than kept as an event
/// list, so long Monte-Carlo runs use constant memory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CostMeter {
    pub qubits_sent: u64,
    pub epr_consumed: u64,
    pub shared_random_bits: u64,
    pub queries: u64,
    charges: BTreeMap<String, ChargeTally>,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charges(&self) -> &BTreeMap<String, ChargeTally> {
        &self.charges
    }

    pub fn charge_total(&self) -> u64 {
        self.charges.values().map(|c| c.amount).sum()
    }

    /// Communication cost: qubits sent plus every abstract charge.
    pub fn total(&self) -> u64 {
        self.qubits_sent + self.charge_total()
    }

    pub fn charge(&mut self, label: &str, amount: u64) {
        let tally = self.charges.entry(label.to_string()).or_default();
        tally.events += 1;
        tally.amount += amount;
    }

    /// Adds every counter of `other` into `self`.
    pub fn absorb(&mut self, other: &CostMeter) {
        self.qubits_sent += other.qubits_sent;
        self.epr_consumed += other.epr_consumed;
        self.shared_random_bits += other.shared_random_bits;
        self.queries += other.queries;
        for (label, t) in &other.charges {
            let tally = self.charges.entry(label.clone()).or_default();
            tally.events += t.events;
            tally.amount += t.amount;
        }
    }
}

/// Event log. Lines are recorded only when enabled.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    lines: Option<Vec<String>>,
}

impl Transcript {
    pub fn enabled() -> Self {
        Self {
            lines: Some(Vec::new()),
        }
    }

    pub fn disabled() -> Self {
        Self { lines: None }
    }

    pub fn is_enabled(&self) -> bool {
        self.lines.is_some()
    }

    pub fn record(&mut self, line: impl FnOnce() -> String) {
        if let Some(lines) = &mut self.lines {
            lines.push(line());
        }
    }

    pub fn lines(&self) -> &[String] {
        self.lines.as_deref().unwrap_or(&[])
    }

    pub fn extend(&mut self, other: &Transcript) {
        if let Some(lines) = &mut self.lines {
            lines.extend_from_slice(other.lines());
        }
    }
}

/// Draws `bits` shared uniform bits, metered in `meter`.
pub fn shared_random<R: Rng + ?Sized>(
    meter: &mut CostMeter,
    transcript: &mut Transcript,
    bits: usize,
    rng: &mut R,
) -> Vec<bool> {
    meter.shared_random_bits += bits as u64;
    transcript.record(|| format!("RAND {bits}"));
    (0..bits).map(|_| rng.gen::<bool>()).collect()
}

/// A shared uniform integer in `0..m`, by rejection sampling on
/// `⌈log2 m⌉`-bit draws.
pub fn shared_uniform<R: Rng + ?Sized>(
    meter: &mut CostMeter,
    transcript: &mut Transcript,
    m: usize,
    rng: &mut R,
) -> usize {
    let bits = ceil_log2(m);
    loop {
        let v = shared_random(meter, transcript, bits, rng)
            .into_iter()
            .fold(0usize, |acc, b| (acc << 1) | usize::from(b));
        if v < m {
            return v;
        }
    }
}

/// A shared uniformly random `size`-subset of `0..n` (partial Fisher–Yates).
pub fn shared_subset<R: Rng + ?Sized>(
    meter: &mut CostMeter,
    transcript: &mut Transcript,
    n: usize,
    size: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut items: Vec<usize> = (0..n).collect();
    let size = size.min(n);
    for i in 0..size {
        let j = i + shared_uniform(meter, transcript, n - i, rng);
        items.swap(i, j);
    }
    items.truncate(size);
    items
}

/// Labels of modeled subprotocols that may act across the ownership
/// boundary. Each must charge its declared cost.
pub const JOINT_REFLECT: &str = "reflect";
pub const JOINT_ORACLE: &str = "oracle";

/// A joint statevector whose qubits are each owned by one party.
#[derive(Debug, Clone)]
pub struct TwoPartyState {
    joint: CVec,
    owner: Vec<Party>,
    pub meter: CostMeter,
    pub transcript: Transcript,
    registry: BTreeSet<String>,
}

/// Starts from `(1/√n) Σ_i |i⟩|i⟩`, drawing `⌈log n⌉` EPR pairs from the
/// budget. Alice owns the first `log n` qubits, Bob the rest.
pub fn init_shared(n: usize, epr_budget: u64) -> Result<TwoPartyState> {
    let needed = ceil_log2(n) as u64;
    if needed == 0 || epr_budget < needed {
        return Err(Error::InsufficientEpr {
            needed: needed.max(1),
            available: epr_budget,
        });
    }
    let joint = CVec::maximally_entangled(n)?;
    let bits = needed as usize;
    let mut owner = vec![Party::Alice; bits];
    owner.extend(std::iter::repeat_n(Party::Bob, bits));
    let mut state = TwoPartyState::with_owners(joint, owner)?;
    state.meter.epr_consumed = needed;
    Ok(state)
}

impl TwoPartyState {
    /// Wraps an arbitrary joint state with explicit ownership tags.
    pub fn with_owners(joint: CVec, owner: Vec<Party>) -> Result<Self> {
        match joint.num_qubits() {
            Some(q) if q == owner.len() => {}
            _ => {
                return Err(Error::DimensionMismatch {
                    expected: 1usize << owner.len().min(63),
                    found: joint.dim(),
                })
            }
        }
        Ok(Self {
            joint,
            owner,
            meter: CostMeter::new(),
            transcript: Transcript::disabled(),
            registry: [JOINT_REFLECT, JOINT_ORACLE]
                .into_iter()
                .map(String::from)
                .collect(),
        })
    }

    /// Product start `|0…0⟩` with the given register sizes.
    pub fn product(alice_qubits: usize, bob_qubits: usize) -> Result<Self> {
        let width = alice_qubits + bob_qubits;
        let joint = CVec::basis_state(1usize << width, 0)?;
        let mut owner = vec![Party::Alice; alice_qubits];
        owner.extend(std::iter::repeat_n(Party::Bob, bob_qubits));
        Self::with_owners(joint, owner)
    }

    pub fn verbose(mut self) -> Self {
        self.transcript = Transcript::enabled();
        self
    }

    pub fn joint(&self) -> &CVec {
        &self.joint
    }

    pub fn owner(&self) -> &[Party] {
        &self.owner
    }

    pub fn num_qubits(&self) -> usize {
        self.owner.len()
    }

    /// Qubits currently owned by `party`, in register order.
    pub fn qubits_of(&self, party: Party) -> Vec<usize> {
        (0..self.owner.len())
            .filter(|&q| self.owner[q] == party)
            .collect()
    }

    pub fn register_joint(&mut self, label: &str) {
        self.registry.insert(label.to_string());
    }

    pub fn is_registered(&self, label: &str) -> bool {
        self.registry.contains(label)
    }

    fn check_owned(&self, actor: Party, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            let owner = *self.owner.get(q).ok_or(Error::QubitOutOfRange {
                qubit: q,
                width: self.owner.len(),
            })?;
            if owner != actor {
                return Err(Error::Ownership {
                    actor,
                    qubit: q,
                    owner,
                });
            }
        }
        Ok(())
    }

    /// Applies `op` on behalf of `actor`, who must own every target qubit.
    pub fn local(&mut self, actor: Party, op: &UnitaryOp) -> Result<()> {
        match op.targets() {
            Some(qs) => self.check_owned(actor, qs)?,
            None => {
                let all: Vec<usize> = (0..self.owner.len()).collect();
                self.check_owned(actor, &all)?;
            }
        }
        self.joint.apply(op)
    }

    /// Hands `qubits` to `to`; each costs one qubit of communication.
    pub fn send(&mut self, qubits: &[usize], to: Party) -> Result<()> {
        self.check_owned(to.other(), qubits)?;
        for &q in qubits {
            self.owner[q] = to;
        }
        self.meter.qubits_sent += qubits.len() as u64;
        self.transcript.record(|| format!("SEND {}", qubits.len()));
        Ok(())
    }

    /// Transmits `bits` classical bits, metered like qubits.
    pub fn send_classical(&mut self, bits: u64) {
        self.meter.qubits_sent += bits;
        self.transcript.record(|| format!("SEND {bits}"));
    }

    /// Records a modeled cost without simulating the subprotocol.
    pub fn charge_abstract(&mut self, label: &str, amount: i64) -> Result<()> {
        if amount < 0 {
            return Err(Error::NegativeCharge {
                label: label.to_string(),
                amount,
            });
        }
        self.meter.charge(label, amount as u64);
        self.transcript.record(|| format!("CHARGE {label} {amount}"));
        Ok(())
    }

    /// Applies a cross-boundary operator through a registered modeled
    /// subprotocol, charging `cost`.
    pub fn joint_op(&mut self, label: &str, op: &UnitaryOp, cost: u64) -> Result<()> {
        self.joint_with(label, cost, |v| v.apply(op))
    }

    /// Like [`Self::joint_op`] but with an arbitrary in-place map, for
    /// operators that are not conveniently expressed as a [`UnitaryOp`].
    pub fn joint_with<F>(&mut self, label: &str, cost: u64, f: F) -> Result<()>
    where
        F: FnOnce(&mut CVec) -> Result<()>,
    {
        if !self.is_registered(label) {
            return Err(Error::UnregisteredJointOp(label.to_string()));
        }
        f(&mut self.joint)?;
        self.charge_abstract(label, cost as i64)
    }

    /// Draws `bits` uniform shared bits, seen identically by both parties.
    pub fn shared_random<R: Rng + ?Sized>(&mut self, bits: usize, rng: &mut R) -> Vec<bool> {
        shared_random(&mut self.meter, &mut self.transcript, bits, rng)
    }

    /// `actor` measures its own `qubits`; the outcome is local to `actor`.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        actor: Party,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<usize> {
        self.check_owned(actor, qubits)?;
        let outcome = self.joint.measure(qubits, rng)?;
        self.transcript
            .record(|| format!("MEASURE {} {outcome}", actor.label()));
        Ok(outcome)
    }

    /// Alice measures her register and Bob his, sampled jointly from one
    /// uniform draw. Returns `(i, j)`.
    pub fn measure_both<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(usize, usize)> {
        let alice = self.qubits_of(Party::Alice);
        let bob = self.qubits_of(Party::Bob);
        let mut order = alice.clone();
        order.extend(&bob);
        let probs = self.joint.marginal(&order)?;
        let outcome = sample_index(&probs, rng);
        self.joint.collapse(&order, outcome)?;
        let i = outcome >> bob.len();
        let j = outcome & ((1usize << bob.len()) - 1);
        self.transcript.record(|| format!("MEASURE alice {i}"));
        self.transcript.record(|| format!("MEASURE bob {j}"));
        Ok((i, j))
    }

    /// Appends a fresh `|0⟩` auxiliary qubit owned by `party`.
    pub fn add_aux(&mut self, party: Party) -> Result<usize> {
        let q = self.joint.push_zero_qubit()?;
        self.owner.push(party);
        Ok(q)
    }

    /// Discards the most recently added auxiliary qubit, which must be back
    /// in `|0⟩` and held by `party`.
    pub fn remove_aux(&mut self, party: Party, tol: f64) -> Result<()> {
        let q = self.owner.len() - 1;
        self.check_owned(party, &[q])?;
        self.joint.pop_zero_qubit(tol)?;
        self.owner.pop();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn init_shared_layout_and_budget() {
        let s = init_shared(4, 2).unwrap();
        assert_eq!(s.joint().dim(), 16);
        assert_eq!(s.meter.epr_consumed, 2);
        assert_eq!(
            s.owner(),
            &[Party::Alice, Party::Alice, Party::Bob, Party::Bob]
        );
        assert!(s
            .joint()
            .distance(&CVec::maximally_entangled(4).unwrap())
            .unwrap()
            < 1e-15);
        assert_eq!(
            init_shared(2, 0).unwrap_err(),
            Error::InsufficientEpr {
                needed: 1,
                available: 0
            }
        );
        assert!(init_shared(8, 2).is_err());
    }

    #[test]
    fn send_meters_and_checks_ownership() {
        let mut s = init_shared(4, 2).unwrap();
        s.send(&[0], Party::Bob).unwrap();
        assert_eq!(s.meter.qubits_sent, 1);
        assert_eq!(s.owner()[0], Party::Bob);
        let err = s.send(&[2], Party::Bob).unwrap_err();
        assert!(matches!(err, Error::Ownership { .. }));
        assert_eq!(s.meter.qubits_sent, 1);
    }

    #[test]
    fn aux_round_trip_costs_two() {
        let mut s = init_shared(2, 1).unwrap().verbose();
        let aux = s.add_aux(Party::Alice).unwrap();
        s.send(&[aux], Party::Bob).unwrap();
        s.send(&[aux], Party::Alice).unwrap();
        s.remove_aux(Party::Alice, 1e-12).unwrap();
        assert_eq!(s.meter.qubits_sent, 2);
        assert_eq!(s.transcript.lines(), &["SEND 1", "SEND 1"]);
    }

    #[test]
    fn local_ops_respect_ownership() {
        let mut s = init_shared(2, 1).unwrap();
        s.local(Party::Alice, &UnitaryOp::hadamard(0)).unwrap();
        assert!(matches!(
            s.local(Party::Alice, &UnitaryOp::hadamard(1)),
            Err(Error::Ownership { .. })
        ));
        let psi = CVec::maximally_entangled(2).unwrap();
        let r = UnitaryOp::reflection(psi).unwrap();
        assert!(s.local(Party::Bob, &r).is_err());
    }

    #[test]
    fn charges_accumulate() {
        let mut s = init_shared(2, 1).unwrap();
        s.charge_abstract("reflect", 11).unwrap();
        s.charge_abstract("reflect", 0).unwrap();
        assert_eq!(s.meter.total(), 11);
        s.charge_abstract("oracle", 2).unwrap();
        assert_eq!(s.meter.total(), 13);
        assert_eq!(s.meter.charges()["reflect"].events, 2);
        assert!(matches!(
            s.charge_abstract("reflect", -1),
            Err(Error::NegativeCharge { .. })
        ));
        assert_eq!(s.meter.total(), 13);
    }

    #[test]
    fn unregistered_joint_ops_rejected() {
        let mut s = init_shared(2, 1).unwrap();
        let op = UnitaryOp::phase_flip(vec![0, 1], |l| l == 3);
        assert_eq!(
            s.joint_op("mystery", &op, 3).unwrap_err(),
            Error::UnregisteredJointOp("mystery".into())
        );
        assert_eq!(s.meter.total(), 0);
        s.joint_op(JOINT_ORACLE, &op, 2).unwrap();
        assert_eq!(s.meter.total(), 2);
    }

    #[test]
    fn shared_random_is_seeded_and_metered() {
        let mut s = init_shared(2, 1).unwrap().verbose();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(s.shared_random(0, &mut rng).is_empty());
        let a = s.shared_random(40, &mut rng);
        assert_eq!(s.meter.shared_random_bits, 40);
        let mut s2 = init_shared(2, 1).unwrap();
        let mut rng2 = ChaCha8Rng::seed_from_u64(11);
        s2.shared_random(0, &mut rng2);
        assert_eq!(s2.shared_random(40, &mut rng2), a);
        assert_eq!(s.transcript.lines(), &["RAND 0", "RAND 40"]);
    }

    #[test]
    fn shared_subsets_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (mut meter, mut log) = (CostMeter::new(), Transcript::disabled());
        let mut counts = [0usize; 5];
        let trials = 20_000;
        for _ in 0..trials {
            let s = shared_subset(&mut meter, &mut log, 5, 2, &mut rng);
            assert_eq!(s.len(), 2);
            assert_ne!(s[0], s[1]);
            for v in s {
                counts[v] += 1;
            }
        }
        for c in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.4).abs() < 0.02, "{f}");
        }
        assert!(meter.shared_random_bits >= 2 * 3 * trials as u64);
        assert_eq!(shared_uniform(&mut meter, &mut log, 1, &mut rng), 0);
    }

    #[test]
    fn measure_both_on_entangled_state_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut s = init_shared(8, 3).unwrap();
            let (i, j) = s.measure_both(&mut rng).unwrap();
            assert_eq!(i, j);
        }
    }

    #[test]
    fn meter_absorb_adds_everything() {
        let mut a = CostMeter::new();
        a.qubits_sent = 3;
        a.charge("reflect", 11);
        let mut b = CostMeter::new();
        b.epr_consumed = 2;
        b.charge("reflect", 13);
        b.charge("oracle", 2);
        a.absorb(&b);
        assert_eq!(a.total(), 3 + 11 + 13 + 2);
        assert_eq!(a.epr_consumed, 2);
        assert_eq!(a.charges()["reflect"].events, 2);
    }
}
