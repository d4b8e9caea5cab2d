//! Fourier expansion over `{−1,1}^n` with `f̂(S) = E_x[f(x)χ_S(x)]`.

use crate::boolfn::{wht_i64, BooleanFunction, MAX_TABLE_BITS};
use crate::error::{Error, Result};

/// `χ_S(x)` for subset mask `S` and input index `x` (same bit convention).
pub fn chi(s: usize, x: usize) -> f64 {
    if (s & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// In-place unnormalized fast transform on reals.
pub fn wht_f64(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, s: usize) -> f64 {
        self.coeffs[s]
    }

    /// `Σ_S |f̂(S)|`.
    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Largest `|f̂(S)|` over `|S| < d`.
    pub fn max_below_degree(&self, d: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| (s.count_ones() as usize) < d)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    pub fn degree(&self, tol: f64) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `p(x) = Σ_S f̂(S)χ_S(x)` for every `x`.
    pub fn inverse(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        wht_f64(&mut v);
        v
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_TABLE_BITS {
        return Err(Error::TableCap {
            bits: n,
            cap_bits: MAX_TABLE_BITS,
        });
    }
    Ok(())
}

/// Spectrum of a Boolean function; coefficients are exact dyadic rationals.
pub fn walsh_hadamard(f: &BooleanFunction) -> Result<Spectrum> {
    let n = f.n();
    check_n(n)?;
    let mut v: Vec<i64> = f.table().iter().map(|&b| b as i64).collect();
    wht_i64(&mut v);
    let scale = (1u64 << n) as f64;
    Ok(Spectrum {
        n,
        coeffs: v.into_iter().map(|c| c as f64 / scale).collect(),
    })
}

/// Spectrum of an arbitrary real function given as a table of length `2^n`.
pub fn walsh_hadamard_real(values: &[f64]) -> Result<Spectrum> {
    if !values.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(values.len()));
    }
    let n = values.len().trailing_zeros() as usize;
    check_n(n)?;
    let mut v = values.to_vec();
    wht_f64(&mut v);
    let scale = values.len() as f64;
    v.iter_mut().for_each(|c| *c /= scale);
    Ok(Spectrum { n, coeffs: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Gadget;
    use proptest::prelude::*;

    #[test]
    fn parity_is_a_character() {
        for n in 1..=6 {
            let s = walsh_hadamard(&BooleanFunction::parity(n).unwrap()).unwrap();
            for (mask, &c) in s.coeffs().iter().enumerate() {
                assert_eq!(c, if mask == (1 << n) - 1 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn inner_product_is_flat() {
        for m in 1..=4 {
            let g = Gadget::ip(m, 1).unwrap();
            let f = BooleanFunction::new(2 * m, g.table().to_vec()).unwrap();
            let s = walsh_hadamard(&f).unwrap();
            let want = 1.0 / (1u64 << m) as f64;
            assert!(s.coeffs().iter().all(|c| c.abs() == want));
        }
    }

    /// Direct `O(4^n)` coefficient sum.
    fn naive(table: &[i8]) -> Vec<f64> {
        let len = table.len();
        (0..len)
            .map(|s| (0..len).map(|x| table[x] as f64 * chi(s, x)).sum::<f64>() / len as f64)
            .collect()
    }

    proptest! {
        #[test]
        fn matches_naive_and_round_trips(n in 0usize..=6, seed in any::<u64>()) {
            let f = BooleanFunction::from_fn(n, |x| {
                let h = (x as u64 ^ seed).wrapping_mul(0x9E3779B97F4A7C15);
                if h >> 63 == 1 { -1 } else { 1 }
            }).unwrap();
            let s = walsh_hadamard(&f).unwrap();
            prop_assert_eq!(s.coeffs(), &naive(f.table())[..]);
            let back = s.inverse();
            for (a, &b) in back.iter().zip(f.table()) {
                prop_assert_eq!(*a, b as f64);
            }
            // Plancherel in expectation form: E[f·f] = Σ f̂².
            let energy: f64 = s.coeffs().iter().map(|c| c * c).sum();
            prop_assert!((energy - 1.0).abs() < 1e-12);
        }
    }
}
