//! Reference computations that share no code with the routines they check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Largest `rows + cols` accepted by [`naive_discrepancy`].
pub const NAIVE_DISC_CAP: usize = 22;

/// `max_{S,T} |Σ_{x∈S,y∈T} M(x,y)|` by enumerating every pair of subsets.
pub fn naive_discrepancy(m: &[f64], rows: usize, cols: usize) -> Result<f64> {
    if rows + cols > NAIVE_DISC_CAP {
        return Err(Error::DimensionCap {
            requested: rows + cols,
            cap: NAIVE_DISC_CAP,
        });
    }
    let mut best = 0.0f64;
    for s in 0u64..1 << rows {
        for t in 0u64..1 << cols {
            let mut acc = 0.0;
            for x in (0..rows).filter(|x| s >> x & 1 == 1) {
                for y in (0..cols).filter(|y| t >> y & 1 == 1) {
                    acc += m[x * cols + y];
                }
            }
            best = best.max(acc.abs());
        }
    }
    Ok(best)
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E|y_1 + … + y_s|` for independent uniform signs.
pub fn expected_abs_walk(s: u64) -> f64 {
    if s == 0 {
        return 0.0;
    }
    s as f64 * binomial(s - 1, (s - 1) / 2) / 2f64.powi(s as i32 - 1)
}

/// `disc_U(ADDR_n)` in closed form: a row set of size `s` attains
/// `E|S_s| / (2n)` with the best column set, maximized at `s = n`.
pub fn addr_uniform_discrepancy(n: u64) -> f64 {
    (1..=n).map(expected_abs_walk).fold(0.0, f64::max) / (2 * n) as f64
}

/// Best uniform error of degree-`d` polynomials on `{0, …, n}` against the
/// weight profile `values`, as the maximum levelled error over every
/// `(d + 2)`-point reference (discrete Chebyshev alternation).
pub fn minimax_error_on_weights(values: &[i8], d: usize) -> BigRational {
    let points = values.len();
    if d + 2 > points {
        return BigRational::zero();
    }
    let mut best = BigRational::zero();
    let mut idx: Vec<usize> = (0..d + 2).collect();
    loop {
        let mut num = BigRational::zero();
        let mut den = BigRational::zero();
        for (a, &wa) in idx.iter().enumerate() {
            let mut prod = BigInt::from(1);
            for (b, &wb) in idx.iter().enumerate() {
                if a != b {
                    prod *= BigInt::from(wa as i64 - wb as i64);
                }
            }
            let lambda = BigRational::new(BigInt::from(1), prod);
            num += lambda.clone() * BigRational::from_integer(BigInt::from(values[wa]));
            den += lambda.abs();
        }
        let err = num.abs() / den;
        if err > best {
            best = err;
        }
        // Next combination in lexicographic order.
        let mut i = idx.len();
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < points - (idx.len() - i) {
                break;
            }
        }
        idx[i] += 1;
        for k in i + 1..idx.len() {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

/// Approximate degree of a symmetric function from its weight profile.
pub fn symmetric_approx_degree(values: &[i8], eps: &BigRational) -> usize {
    (0..values.len())
        .find(|&d| minimax_error_on_weights(values, d) <= *eps)
        .unwrap_or(values.len() - 1)
}
