//! Dense complex statevectors.
//!
//! A register of `m` qubits is a vector of `2^m` amplitudes. Qubit `0` is the
//! most significant bit of the basis index, matching the crate-wide index
//! convention (see [`crate::boolfn::index_of`]).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hard cap on the number of amplitudes held by one vector.
pub const MAX_AMPLITUDES: usize = 1 << 24;

/// Tolerance used for norm and unitarity checks.
pub const TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Returns `log2(n)` when `n` is a power of two.
pub fn log2_exact(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// `⌈log2 n⌉`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// A complex vector. Used both for normalized quantum states and for the
/// unnormalized error vectors that appear in amplitude-amplification analysis.
#[derive(Clone, PartialEq)]
pub struct CVec {
    amps: Vec<C64>,
}

impl fmt::Debug for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amps.len() <= 16 {
            f.debug_struct("CVec").field("amps", &self.amps).finish()
        } else {
            f.debug_struct("CVec")
                .field("dim", &self.amps.len())
                .field("norm", &self.norm())
                .finish()
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if dim > MAX_AMPLITUDES {
        return Err(Error::DimensionCap {
            requested: dim,
            cap: MAX_AMPLITUDES,
        });
    }
    Ok(())
}

impl CVec {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            amps: vec![ZERO; dim],
        })
    }

    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amps(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// The standard basis vector `e_index`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut v = Self::zeros(dim)?;
        v.amps[index] = ONE;
        Ok(v)
    }

    /// Uniform superposition over `dim` basis states.
    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let a = 1.0 / (dim as f64).sqrt();
        Ok(Self {
            amps: vec![C64::new(a, 0.0); dim],
        })
    }

    /// `(1/√n) Σ_i |i⟩|i⟩` on `2 log n` qubits; the first `log n` qubits are
    /// Alice's register and the next `log n` Bob's.
    pub fn maximally_entangled(n: usize) -> Result<Self> {
        let bits = log2_exact(n)?;
        if n < 2 {
            return Err(Error::InvalidParameter(
                "maximally entangled state needs n >= 2".into(),
            ));
        }
        let mut v = Self::zeros(n.checked_mul(n).ok_or(Error::DimensionCap {
            requested: usize::MAX,
            cap: MAX_AMPLITUDES,
        })?)?;
        let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        for i in 0..n {
            v.amps[(i << bits) | i] = a;
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        log2_exact(self.amps.len()).ok()
    }

    fn qubits(&self) -> Result<usize> {
        log2_exact(self.amps.len())
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOL
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &CVec) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &CVec) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn scale(&mut self, c: C64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: C64, other: &CVec) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
        Ok(())
    }

    /// Applies `op` in place.
    pub fn apply(&mut self, op: &UnitaryOp) -> Result<()> {
        match op {
            UnitaryOp::Dense { qubits, matrix } => self.apply_dense(qubits, matrix),
            UnitaryOp::PhaseFlip { qubits, marked } => {
                let layout = Layout::new(self.qubits()?, qubits)?;
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    if marked(layout.local(idx)) {
                        *a = -*a;
                    }
                }
                Ok(())
            }
            UnitaryOp::Permutation { qubits, map } => {
                let layout = Layout::new(self.qubits()?, qubits)?;
                let mut out = vec![ZERO; self.amps.len()];
                for (idx, &a) in self.amps.iter().enumerate() {
                    let local = layout.local(idx);
                    out[layout.replace(idx, map(local))] = a;
                }
                self.amps = out;
                Ok(())
            }
            UnitaryOp::Reflection { about } => {
                let c = about.overlap(self)?;
                for (a, p) in self.amps.iter_mut().zip(&about.amps) {
                    *a = 2.0 * c * p - *a;
                }
                Ok(())
            }
        }
    }

    fn apply_dense(&mut self, qubits: &[usize], matrix: &[C64]) -> Result<()> {
        let layout = Layout::new(self.qubits()?, qubits)?;
        let size = 1usize << qubits.len();
        let target_mask: usize = layout.masks.iter().fold(0, |m, b| m | b);
        let offsets: Vec<usize> = (0..size).map(|l| layout.replace(0, l)).collect();
        let mut buf = vec![ZERO; size];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                buf[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &matrix[r * size..(r + 1) * size];
                self.amps[base | off] = row.iter().zip(&buf).map(|(m, v)| m * v).sum();
            }
        }
        Ok(())
    }

    /// Applies `H` to every listed qubit. Self-inverse.
    pub fn hadamard_transform(&mut self, qubits: &[usize]) -> Result<()> {
        let layout = Layout::new(self.qubits()?, qubits)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for &mask in &layout.masks {
            for idx in 0..self.amps.len() {
                if idx & mask == 0 {
                    let (a, b) = (self.amps[idx], self.amps[idx | mask]);
                    self.amps[idx] = (a + b) * s;
                    self.amps[idx | mask] = (a - b) * s;
                }
            }
        }
        Ok(())
    }

    /// Born probabilities of the outcomes on `qubits`, indexed by the local
    /// outcome (first listed qubit most significant).
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        let layout = Layout::new(self.qubits()?, qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[layout.local(idx)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Measures `qubits` in the computational basis, collapsing the state.
    /// Returns the outcome as a local index (first listed qubit most
    /// significant).
    pub fn measure<R: Rng + ?Sized>(&mut self, qubits: &[usize], rng: &mut R) -> Result<usize> {
        let probs = self.marginal(qubits)?;
        let outcome = sample_index(&probs, rng);
        self.collapse(qubits, outcome)?;
        Ok(outcome)
    }

    /// Projects onto `outcome` for `qubits` and renormalizes.
    pub fn collapse(&mut self, qubits: &[usize], outcome: usize) -> Result<()> {
        let layout = Layout::new(self.qubits()?, qubits)?;
        if outcome >= 1 << qubits.len() {
            return Err(Error::IndexOutOfRange {
                index: outcome,
                dim: 1 << qubits.len(),
            });
        }
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if layout.local(idx) != outcome {
                *a = ZERO;
            }
        }
        self.normalize()
    }

    /// Appends a fresh `|0⟩` qubit as the new least significant qubit.
    pub fn push_zero_qubit(&mut self) -> Result<usize> {
        let q = self.qubits()?;
        check_dim(self.amps.len() * 2)?;
        let mut out = vec![ZERO; self.amps.len() * 2];
        for (idx, &a) in self.amps.iter().enumerate() {
            out[idx << 1] = a;
        }
        self.amps = out;
        Ok(q)
    }

    /// Removes the least significant qubit, which must be in `|0⟩` up to
    /// `tol` residual norm.
    pub fn pop_zero_qubit(&mut self, tol: f64) -> Result<()> {
        if self.amps.len() < 2 {
            return Err(Error::InvalidParameter("no qubit to remove".into()));
        }
        let residual: f64 = self
            .amps
            .iter()
            .skip(1)
            .step_by(2)
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > tol {
            return Err(Error::DirtyAuxiliary { residual });
        }
        self.amps = self.amps.iter().step_by(2).copied().collect();
        Ok(())
    }
}

/// Functional form of [`CVec::apply`].
pub fn apply(state: &CVec, op: &UnitaryOp) -> Result<CVec> {
    let mut out = state.clone();
    out.apply(op)?;
    Ok(out)
}

/// Functional form of [`CVec::hadamard_transform`].
pub fn hadamard_transform(state: &CVec, qubits: &[usize]) -> Result<CVec> {
    let mut out = state.clone();
    out.hadamard_transform(qubits)?;
    Ok(out)
}

/// `⟨a|b⟩`.
pub fn overlap(a: &CVec, b: &CVec) -> Result<C64> {
    a.overlap(b)
}

/// Samples an index from (possibly slightly unnormalized) weights.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
            if u < p {
                return i;
            }
            u -= p;
        }
    }
    last_nonzero
}

/// Maps between global basis indices and the local index of a qubit subset.
struct Layout {
    masks: Vec<usize>,
}

impl Layout {
    fn new(width: usize, qubits: &[usize]) -> Result<Self> {
        let mut seen = 0u64;
        let mut masks = Vec::with_capacity(qubits.len());
        for &q in qubits {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
            masks.push(1usize << (width - 1 - q));
        }
        Ok(Self { masks })
    }

    fn local(&self, idx: usize) -> usize {
        self.masks
            .iter()
            .fold(0, |acc, &m| (acc << 1) | usize::from(idx & m != 0))
    }

    fn replace(&self, idx: usize, local: usize) -> usize {
        let k = self.masks.len();
        self.masks.iter().enumerate().fold(idx, |acc, (a, &m)| {
            if (local >> (k - 1 - a)) & 1 == 1 {
                acc | m
            } else {
                acc & !m
            }
        })
    }
}

pub type LocalPredicate = Arc<dyn Fn(usize) -> bool + Send + Sync>;
pub type LocalMap = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// An operator acting on a statevector.
///
/// Dense and permutation operators are validated when constructed; phase
/// flips and reflections are unitary by construction.
#[derive(Clone)]
pub enum UnitaryOp {
    /// Row-major `2^q × 2^q` matrix on the listed qubits.
    Dense { qubits: Vec<usize>, matrix: Vec<C64> },
    /// Diagonal `±1` map: `−1` on local basis states where `marked` holds.
    PhaseFlip {
        qubits: Vec<usize>,
        marked: LocalPredicate,
    },
    /// Basis permutation of the listed qubits' local index.
    Permutation { qubits: Vec<usize>, map: LocalMap },
    /// `2|φ⟩⟨φ| − I` on the whole register.
    Reflection { about: CVec },
}

impl fmt::Debug for UnitaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitaryOp::Dense { qubits, .. } => write!(f, "Dense{qubits:?}"),
            UnitaryOp::PhaseFlip { qubits, .. } => write!(f, "PhaseFlip{qubits:?}"),
            UnitaryOp::Permutation { qubits, .. } => write!(f, "Permutation{qubits:?}"),
            UnitaryOp::Reflection { about } => write!(f, "Reflection(dim {})", about.dim()),
        }
    }
}

impl UnitaryOp {
    pub fn dense(qubits: Vec<usize>, matrix: Vec<C64>) -> Result<Self> {
        let size = 1usize << qubits.len();
        if matrix.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: matrix.len(),
            });
        }
        let mut deviation = 0.0f64;
        for c1 in 0..size {
            for c2 in c1..size {
                let dot: C64 = (0..size)
                    .map(|r| matrix[r * size + c1].conj() * matrix[r * size + c2])
                    .sum();
                let want = if c1 == c2 { ONE } else { ZERO };
                deviation = deviation.max((dot - want).norm());
            }
        }
        if deviation > TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self::Dense { qubits, matrix })
    }

    pub fn hadamard(qubit: usize) -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::Dense {
            qubits: vec![qubit],
            matrix: vec![s, s, s, -s],
        }
    }

    pub fn pauli_x(qubit: usize) -> Self {
        Self::Dense {
            qubits: vec![qubit],
            matrix: vec![ZERO, ONE, ONE, ZERO],
        }
    }

    pub fn phase_flip<F>(qubits: Vec<usize>, marked: F) -> Self
    where
        F: Fn(usize) -> bool + Send + Sync + 'static,
    {
        Self::PhaseFlip {
            qubits,
            marked: Arc::new(marked),
        }
    }

    pub fn permutation<F>(qubits: Vec<usize>, map: F) -> Result<Self>
    where
        F: Fn(usize) -> usize + Send + Sync + 'static,
    {
        let size = 1usize << qubits.len();
        let mut hit = vec![false; size];
        for l in 0..size {
            let m = map(l);
            if m >= size || hit[m] {
                return Err(Error::NotPermutation { size });
            }
            hit[m] = true;
        }
        Ok(Self::Permutation {
            qubits,
            map: Arc::new(map),
        })
    }

    pub fn reflection(about: CVec) -> Result<Self> {
        if !about.is_normalized() {
            return Err(Error::InvalidParameter(format!(
                "reflection axis has norm {}",
                about.norm()
            )));
        }
        Ok(Self::Reflection { about })
    }

    /// Qubits touched by the operator, or `None` for whole-register operators.
    pub fn targets(&self) -> Option<&[usize]> {
        match self {
            UnitaryOp::Dense { qubits, .. }
            | UnitaryOp::PhaseFlip { qubits, .. }
            | UnitaryOp::Permutation { qubits, .. } => Some(qubits),
            UnitaryOp::Reflection { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &CVec, b: &CVec, tol: f64) -> bool {
        a.distance(b).unwrap() <= tol
    }

    #[test]
    fn basis_states() {
        let v = CVec::basis_state(4, 0).unwrap();
        assert_eq!(v.amps()[0], ONE);
        assert!(v.amps()[1..].iter().all(|a| *a == ZERO));
        let v = CVec::basis_state(2, 1).unwrap();
        assert_eq!(v.amps(), &[ZERO, ONE]);
        let v = CVec::basis_state(8, 7).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(
            CVec::basis_state(4, 4).unwrap_err(),
            Error::IndexOutOfRange { index: 4, dim: 4 }
        );
    }

    #[test]
    fn maximally_entangled_layout() {
        let bell = CVec::maximally_entangled(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell.amps()[0].re - h).abs() < 1e-15);
        assert!((bell.amps()[3].re - h).abs() < 1e-15);
        assert_eq!(bell.amps()[1], ZERO);
        for n in [2usize, 4, 8] {
            let psi = CVec::maximally_entangled(n).unwrap();
            let bits = log2_exact(n).unwrap();
            for i in 0..n {
                let e = CVec::basis_state(n * n, (i << bits) | i).unwrap();
                let ov = psi.overlap(&e).unwrap();
                assert!((ov.norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
            }
        }
        let psi = CVec::maximally_entangled(4).unwrap();
        let e22 = CVec::basis_state(16, (2 << 2) | 2).unwrap();
        assert!((psi.overlap(&e22).unwrap().norm() - 0.5).abs() < 1e-12);
        assert_eq!(
            CVec::maximally_entangled(6).unwrap_err(),
            Error::NotPowerOfTwo(6)
        );
    }

    #[test]
    fn hadamard_gate_and_transform() {
        let e0 = CVec::basis_state(2, 0).unwrap();
        let plus = apply(&e0, &UnitaryOp::hadamard(0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&plus, &CVec::from_real(&[h, h]).unwrap(), 1e-12));

        let uni = CVec::uniform(8).unwrap();
        let back = hadamard_transform(&uni, &[0, 1, 2]).unwrap();
        assert!(close(&back, &CVec::basis_state(8, 0).unwrap(), 1e-12));
    }

    #[test]
    fn hadamard_maps_codeword_superposition_to_its_index() {
        // (1/2) Σ_t H(s)_t |t⟩ for s = (−1, 1): H(s) = (1, 1, −1, −1), so the
        // transform lands on index 0b10.
        let v = CVec::from_real(&[0.5, 0.5, -0.5, -0.5]).unwrap();
        let out = hadamard_transform(&v, &[0, 1]).unwrap();
        assert!(close(&out, &CVec::basis_state(4, 2).unwrap(), 1e-12));
    }

    #[test]
    fn reflection_fixed_point_and_antifixed() {
        let psi = CVec::maximally_entangled(4).unwrap();
        let r = UnitaryOp::reflection(psi.clone()).unwrap();
        assert!(close(&apply(&psi, &r).unwrap(), &psi, 1e-12));
        // (|00⟩ − |11⟩)/√2 on the first pair is orthogonal to psi.
        let mut perp = CVec::zeros(16).unwrap();
        perp.amps_mut()[0] = C64::new(0.5f64.sqrt(), 0.0);
        perp.amps_mut()[5] = C64::new(-0.5f64.sqrt(), 0.0);
        assert!(psi.overlap(&perp).unwrap().norm() < 1e-15);
        let mut neg = perp.clone();
        neg.scale(-ONE);
        assert!(close(&apply(&perp, &r).unwrap(), &neg, 1e-12));
    }

    #[test]
    fn dense_rejects_non_unitary() {
        let err = UnitaryOp::dense(vec![0], vec![ONE, ONE, ZERO, ONE]).unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));
        assert!(UnitaryOp::dense(vec![0], vec![ONE]).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(UnitaryOp::permutation(vec![0, 1], |l| l ^ 1).is_ok());
        assert!(UnitaryOp::permutation(vec![0, 1], |_| 0).is_err());
    }

    #[test]
    fn dimension_mismatch_and_cap() {
        let a = CVec::basis_state(2, 0).unwrap();
        let b = CVec::basis_state(4, 0).unwrap();
        assert!(matches!(
            a.overlap(&b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            CVec::zeros(MAX_AMPLITUDES + 1),
            Err(Error::DimensionCap { .. })
        ));
        let mut v = CVec::basis_state(4, 0).unwrap();
        assert!(matches!(
            v.apply(&UnitaryOp::hadamard(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn overlap_basics() {
        let e0 = CVec::basis_state(2, 0).unwrap();
        let e1 = CVec::basis_state(2, 1).unwrap();
        assert_eq!(e0.overlap(&e1).unwrap(), ZERO);
        let v = CVec::from_real(&[0.6, 0.8]).unwrap();
        assert!((v.overlap(&v).unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn measure_deterministic_outcome() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut v = CVec::basis_state(8, 5).unwrap();
        assert_eq!(v.measure(&[0, 1, 2], &mut rng).unwrap(), 5);
    }

    #[test]
    fn measure_bell_statistics_and_collapse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bell = CVec::maximally_entangled(2).unwrap();
        let trials = 10_000;
        let mut ones = 0;
        for _ in 0..trials {
            let mut v = bell.clone();
            let out = v.measure(&[0], &mut rng).unwrap();
            if out == 1 {
                ones += 1;
                assert!(close(&v, &CVec::basis_state(4, 3).unwrap(), 1e-12));
            } else {
                assert!(close(&v, &CVec::basis_state(4, 0).unwrap(), 1e-12));
            }
        }
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn measurement_is_seed_deterministic() {
        let v = CVec::uniform(16).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| v.clone().measure(&[0, 1, 2, 3], &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
    }

    #[test]
    fn auxiliary_qubit_round_trip() {
        let mut v = CVec::uniform(4).unwrap();
        let q = v.push_zero_qubit().unwrap();
        assert_eq!(q, 2);
        assert_eq!(v.dim(), 8);
        v.pop_zero_qubit(1e-12).unwrap();
        assert!(close(&v, &CVec::uniform(4).unwrap(), 1e-15));

        let mut v = CVec::uniform(4).unwrap();
        v.push_zero_qubit().unwrap();
        v.apply(&UnitaryOp::pauli_x(2)).unwrap();
        assert!(matches!(
            v.pop_zero_qubit(1e-12),
            Err(Error::DirtyAuxiliary { .. })
        ));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }
}
