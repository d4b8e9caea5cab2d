//! Query-model simulation with counted phase oracles.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::Rng;

use crate::boolfn::{codeword_from_index, BooleanFunction, Gadget, Hadamardized};
use crate::error::{Error, Result};
use crate::statevector::{log2_exact, CVec};

/// A hidden `±1` string reachable only through counted queries.
#[derive(Debug, Clone)]
pub struct QueryOracle {
    x: Vec<i8>,
    queries: u64,
}

impl QueryOracle {
    pub fn new(x: Vec<i8>) -> Result<Self> {
        if let Some(position) = x.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::BadTableEntry {
                position,
                value: x[position] as i64,
            });
        }
        Ok(Self { x, queries: 0 })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn reset(&mut self) {
        self.queries = 0;
    }

    /// Classical query of `x_i`.
    pub fn query(&mut self, i: usize) -> i8 {
        self.queries += 1;
        self.x[i]
    }

    /// `|i⟩ → x_{offset+i}|i⟩` on every amplitude of `state`.
    pub fn phase_block(&mut self, state: &mut CVec, offset: usize) -> Result<()> {
        let dim = state.dim();
        if offset + dim > self.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x.len(),
                found: offset + dim,
            });
        }
        self.queries += 1;
        for (a, &v) in state.amps_mut().iter_mut().zip(&self.x[offset..]) {
            if v == -1 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// One query on `|i⟩ → x_i·b_i|i⟩` for `i < len(b)`, identity on padding.
    fn phase_against(&mut self, state: &mut CVec, b: &[i8]) {
        self.queries += 1;
        for (i, a) in state.amps_mut().iter_mut().enumerate().take(b.len()) {
            if self.x[i] != b[i] {
                *a = -*a;
            }
        }
    }
}

/// The state of the BV circuit just before measurement, for a block of
/// `2^b` positions starting at `offset`.
pub fn bernstein_vazirani_state(oracle: &mut QueryOracle, offset: usize, len: usize) -> Result<CVec> {
    let bits = log2_exact(len)?;
    let mut state = CVec::uniform(len)?;
    oracle.phase_block(&mut state, offset)?;
    let all: Vec<usize> = (0..bits).collect();
    state.hadamard_transform(&all)?;
    Ok(state)
}

/// Recovers `s` (as an index) from a block in `±H(s)` with one query.
pub fn bernstein_vazirani_block<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    offset: usize,
    len: usize,
    rng: &mut R,
) -> Result<usize> {
    let mut state = bernstein_vazirani_state(oracle, offset, len)?;
    let all: Vec<usize> = (0..log2_exact(len)?).collect();
    state.measure(&all, rng)
}

/// BV on the whole oracle string; returns `s` as a `±1` string.
pub fn bernstein_vazirani<R: Rng + ?Sized>(oracle: &mut QueryOracle, rng: &mut R) -> Result<Vec<i8>> {
    let len = oracle.len();
    let bits = log2_exact(len)?;
    let idx = bernstein_vazirani_block(oracle, 0, len, rng)?;
    Ok(crate::boolfn::string_of(idx, bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equality {
    Equal,
    Differ(usize),
}

/// Grover iterations used for a guess of `g` marked items out of `dim`.
pub fn grover_iterations(dim: usize, g: usize) -> usize {
    (FRAC_PI_4 * (dim as f64 / g as f64).sqrt() + 1e-12).floor() as usize
}

/// Searches for an index with `x_i ≠ b_i`, trying density guesses
/// `M, M/2, …, 1`. A reported index is confirmed by a classical query, so
/// equal strings always yield [`Equality::Equal`].
pub fn grover_equality<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    b: &[i8],
    rng: &mut R,
) -> Result<Equality> {
    let m = b.len();
    if m != oracle.len() {
        return Err(Error::DimensionMismatch {
            expected: oracle.len(),
            found: m,
        });
    }
    if m == 0 {
        return Ok(Equality::Equal);
    }
    let dim = m.next_power_of_two();
    let bits = log2_exact(dim)?;
    let all: Vec<usize> = (0..bits).collect();
    let mut guess = dim;
    loop {
        let mut state = CVec::uniform(dim)?;
        for _ in 0..grover_iterations(dim, guess) {
            oracle.phase_against(&mut state, b);
            diffuse(&mut state);
        }
        let i = state.measure(&all, rng)?;
        if i < m && oracle.query(i) != b[i] {
            return Ok(Equality::Differ(i));
        }
        if guess == 1 {
            return Ok(Equality::Equal);
        }
        guess /= 2;
    }
}

/// Inversion about the uniform superposition.
fn diffuse(state: &mut CVec) {
    let amps = state.amps_mut();
    let mean = amps.iter().sum::<Complex64>() / amps.len() as f64;
    for a in amps.iter_mut() {
        *a = 2.0 * mean - *a;
    }
}

/// Decomposition of one run of the `r ∘̃ h_G` algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtildeRun {
    pub value: i8,
    pub equality: Equality,
    pub bv_queries: u64,
    pub sign_queries: u64,
    pub grover_queries: u64,
}

impl RtildeRun {
    pub fn total_queries(&self) -> u64 {
        self.bv_queries + self.sign_queries + self.grover_queries
    }
}

/// Evaluates `(r ∘̃ h_G)` on interleaved blocks `(X_1, Y_1, …, X_n, Y_n)`:
/// BV on every block, one sign query per block at the all-`+1` position,
/// then Grover equality against the reconstructed codewords.
pub fn rtilde_hg_query_algorithm<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    r: &BooleanFunction,
    g: &Gadget,
    rng: &mut R,
) -> Result<RtildeRun> {
    let h = Hadamardized::new(g);
    let (xl, yl) = (h.x_len(), h.y_len());
    let n = r.n();
    if oracle.len() != n * (xl + yl) {
        return Err(Error::Arity(format!(
            "oracle of length {} for {n} blocks of {}",
            oracle.len(),
            xl + yl
        )));
    }
    let start = oracle.queries();
    let mut decoded = Vec::with_capacity(2 * n);
    for i in 0..n {
        let base = i * (xl + yl);
        decoded.push((base, xl, bernstein_vazirani_block(oracle, base, xl, rng)?));
        decoded.push((base + xl, yl, bernstein_vazirani_block(oracle, base + xl, yl, rng)?));
    }
    let after_bv = oracle.queries();
    let mut expected = Vec::with_capacity(oracle.len());
    for &(base, len, s) in &decoded {
        let sign = oracle.query(base);
        expected.extend(
            codeword_from_index(s, len.trailing_zeros() as usize)
                .into_iter()
                .map(|v| v * sign),
        );
    }
    let after_sign = oracle.queries();
    let equality = grover_equality(oracle, &expected, rng)?;
    let value = match equality {
        Equality::Equal => {
            let z = (0..n).fold(0usize, |acc, i| {
                let v = g.eval(decoded[2 * i].2, decoded[2 * i + 1].2);
                (acc << 1) | usize::from(v == -1)
            });
            r.eval(z)
        }
        Equality::Differ(_) => -1,
    };
    Ok(RtildeRun {
        value,
        equality,
        bv_queries: after_bv - start,
        sign_queries: after_sign - after_bv,
        grover_queries: oracle.queries() - after_sign,
    })
}

/// Worst-case Grover-equality query count on strings of length `m`. Equal
/// strings of power-of-two length attain it; padding outcomes skip the check.
pub fn grover_equality_worst_case(m: usize) -> u64 {
    let dim = m.next_power_of_two();
    let mut guess = dim;
    let mut total = 0;
    loop {
        total += grover_iterations(dim, guess) as u64 + 1;
        if guess == 1 {
            return total;
        }
        guess /= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{eval_rtilde_hg, hadamard_codeword, string_of};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bv_recovers_all_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in 0..16 {
            for sign in [1i8, -1] {
                let x: Vec<i8> = codeword_from_index(s, 4).into_iter().map(|v| v * sign).collect();
                let mut o = QueryOracle::new(x).unwrap();
                let state = bernstein_vazirani_state(&mut o, 0, 16).unwrap();
                assert!((state.amps()[s].norm() - 1.0).abs() < 1e-9);
                o.reset();
                assert_eq!(bernstein_vazirani(&mut o, &mut rng).unwrap(), string_of(s, 4));
                assert_eq!(o.queries(), 1);
            }
        }
        let mut o = QueryOracle::new(vec![1; 8]).unwrap();
        assert_eq!(bernstein_vazirani(&mut o, &mut rng).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn equality_is_one_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [1usize, 5, 64, 100] {
            let x: Vec<i8> = (0..m).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
            for _ in 0..20 {
                let mut o = QueryOracle::new(x.clone()).unwrap();
                assert_eq!(grover_equality(&mut o, &x, &mut rng).unwrap(), Equality::Equal);
                if m.is_power_of_two() {
                    assert_eq!(o.queries(), grover_equality_worst_case(m));
                } else {
                    assert!(o.queries() <= grover_equality_worst_case(m));
                }
            }
        }
    }

    #[test]
    fn equality_finds_a_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = vec![1i8; 64];
        let mut x = b.clone();
        x[37] = -1;
        let mut hits = 0;
        for _ in 0..200 {
            let mut o = QueryOracle::new(x.clone()).unwrap();
            if grover_equality(&mut o, &b, &mut rng).unwrap() == Equality::Differ(37) {
                hits += 1;
            }
        }
        assert!(hits >= 180, "{hits}");
    }

    #[test]
    fn rtilde_matches_classical_on_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = BooleanFunction::parity(2).unwrap();
        let g = Gadget::ip(1, 1).unwrap();
        let h = Hadamardized::new(&g);
        for code in 0..16usize {
            let mut input = Vec::new();
            for i in 0..4 {
                let s = (code >> i) & 1;
                let sign = if (code + i) % 3 == 0 { -1 } else { 1 };
                input.extend(hadamard_codeword(&string_of(s, 1)).into_iter().map(|v| v * sign));
            }
            let expected = eval_rtilde_hg(&r, &h, &input).unwrap();
            let mut o = QueryOracle::new(input).unwrap();
            let run = rtilde_hg_query_algorithm(&mut o, &r, &g, &mut rng).unwrap();
            assert_eq!(run.value, expected);
            assert_eq!(run.bv_queries, 4);
            assert_eq!(run.sign_queries, 4);
        }
    }
}
