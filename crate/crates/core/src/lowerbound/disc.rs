//! Distributions, discrepancy and the constructions built on it.

use crate::boolfn::{compose, BooleanFunction, Gadget, MAX_TABLE_BITS};
use crate::error::{Error, Result};

use super::degree::DualWitness;

/// Probability weights on `2^n` points. Two-party distributions use the
/// gadget index `(x << k) | y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    weights: Vec<f64>,
}

pub const SUM_TOL: f64 = 1e-12;

impl Distribution {
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n > MAX_TABLE_BITS {
            return Err(Error::TableCap {
                bits: n,
                cap_bits: MAX_TABLE_BITS,
            });
        }
        if weights.len() != 1 << n {
            return Err(Error::TableLength {
                expected: 1 << n,
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(Self { n, weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, vec![1.0 / (1u64 << n) as f64; 1 << n])
    }

    /// Uniform over a gadget's `(x, y)` domain.
    pub fn uniform_for(g: &Gadget) -> Result<Self> {
        Self::uniform(g.j() + g.k())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `μ^{⊗copies}` on `copies` blocks, Alice's parts concatenated first.
    pub fn product_two_party(&self, j: usize, k: usize, copies: usize) -> Result<Self> {
        if j + k != self.n {
            return Err(Error::Arity(format!("distribution on {} bits, gadget on {}", self.n, j + k)));
        }
        let bits = copies * (j + k);
        if bits > MAX_TABLE_BITS {
            return Err(Error::TableCap {
                bits,
                cap_bits: MAX_TABLE_BITS,
            });
        }
        let (jm, km) = ((1usize << j) - 1, (1usize << k) - 1);
        let ybits = copies * k;
        let weights = (0..1usize << bits)
            .map(|idx| {
                let (x, y) = (idx >> ybits, idx & ((1 << ybits) - 1));
                (0..copies)
                    .map(|i| {
                        let xi = (x >> ((copies - 1 - i) * j)) & jm;
                        let yi = (y >> ((copies - 1 - i) * k)) & km;
                        self.weights[(xi << k) | yi]
                    })
                    .product()
            })
            .collect();
        Ok(Self { n: bits, weights })
    }
}

/// Largest number of rows (of the smaller side) enumerated as subsets.
pub const MAX_SUBSET_ROWS: usize = 20;

/// Maximum of `|Σ_{x∈S, y∈T} M(x, y)|` over all rectangles, for a row-major
/// `rows × cols` matrix. Subsets of the smaller side are enumerated in Gray
/// code order; the other side is optimized through signed column sums.
pub fn max_rectangle(m: &[f64], rows: usize, cols: usize) -> Result<f64> {
    if m.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            found: m.len(),
        });
    }
    let (r, c, at): (usize, usize, Box<dyn Fn(usize, usize) -> f64 + '_>) = if rows <= cols {
        (rows, cols, Box::new(|i, j| m[i * cols + j]))
    } else {
        (cols, rows, Box::new(|i, j| m[j * cols + i]))
    };
    if r > MAX_SUBSET_ROWS {
        return Err(Error::DimensionCap {
            requested: r,
            cap: MAX_SUBSET_ROWS,
        });
    }
    let mut sums = vec![0.0f64; c];
    let mut best = 0.0f64;
    for step in 1u64..1 << r {
        let bit = step.trailing_zeros() as usize;
        let gray = step ^ (step >> 1);
        let sign = if gray >> bit & 1 == 1 { 1.0 } else { -1.0 };
        for (j, s) in sums.iter_mut().enumerate() {
            *s += sign * at(bit, j);
        }
        let (pos, neg) = sums.iter().fold((0.0, 0.0), |(p, q), &v| {
            if v > 0.0 {
                (p + v, q)
            } else {
                (p, q - v)
            }
        });
        best = best.max(pos).max(neg);
    }
    Ok(best)
}

fn signed_weights(g: &Gadget, lambda: &Distribution) -> Result<Vec<f64>> {
    if lambda.n() != g.j() + g.k() {
        return Err(Error::Arity(format!(
            "distribution on {} bits for a gadget on {}+{}",
            lambda.n(),
            g.j(),
            g.k()
        )));
    }
    Ok(g.table().iter().zip(lambda.weights()).map(|(&v, w)| v as f64 * w).collect())
}

/// `disc_λ(G)`: the largest `|Σ_{S×T} G·λ|` over rectangles.
pub fn discrepancy(g: &Gadget, lambda: &Distribution) -> Result<f64> {
    let m = signed_weights(g, lambda)?;
    max_rectangle(&m, 1 << g.j(), 1 << g.k())
}

/// Tolerance of the balance test.
pub const BALANCE_TOL: f64 = 1e-12;

/// `Σ G·μ` vanishes.
pub fn is_balanced(mu: &Distribution, g: &Gadget) -> Result<bool> {
    Ok(bias(mu, g)?.abs() <= BALANCE_TOL)
}

pub fn bias(mu: &Distribution, g: &Gadget) -> Result<f64> {
    Ok(signed_weights(g, mu)?.iter().sum())
}

/// `λ(X, Y) = 2^n ν(z) Π μ(X_i, Y_i)` with `z_i = G(X_i, Y_i)`, laid out
/// like [`compose`] (Alice's blocks first, block 1 most significant).
pub fn lambda_construct(nu: &Distribution, mu: &Distribution, g: &Gadget) -> Result<Distribution> {
    let b = bias(mu, g)?;
    if b.abs() > BALANCE_TOL {
        return Err(Error::Unbalanced { bias: b });
    }
    let n = nu.n();
    let (j, k) = (g.j(), g.k());
    let product = mu.product_two_party(j, k, n)?;
    let ybits = n * k;
    let (jm, km) = ((1usize << j) - 1, (1usize << k) - 1);
    let scale = (1u64 << n) as f64;
    let weights = product
        .weights()
        .iter()
        .enumerate()
        .map(|(idx, &p)| {
            let (x, y) = (idx >> ybits, idx & ((1 << ybits) - 1));
            let z = block_values(x, y, n, j, k, jm, km, g);
            scale * nu.weights()[z] * p
        })
        .collect::<Vec<_>>();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidParameter(format!("lambda sums to {total}")));
    }
    Ok(Distribution {
        n: product.n(),
        weights,
    })
}

#[allow(clippy::too_many_arguments)]
fn block_values(x: usize, y: usize, n: usize, j: usize, k: usize, jm: usize, km: usize, g: &Gadget) -> usize {
    (0..n).fold(0usize, |acc, i| {
        let xi = (x >> ((n - 1 - i) * j)) & jm;
        let yi = (y >> ((n - 1 - i) * k)) & km;
        (acc << 1) | usize::from(g.eval(xi, yi) == -1)
    })
}

/// `Σ_{G(X,Y)=z} λ(X, Y)` for every `z ∈ {−1,1}^n`.
pub fn lambda_marginal(lambda: &Distribution, g: &Gadget, n: usize) -> Result<Vec<f64>> {
    let (j, k) = (g.j(), g.k());
    if lambda.n() != n * (j + k) {
        return Err(Error::Arity(format!("lambda on {} bits for {n} blocks", lambda.n())));
    }
    let ybits = n * k;
    let (jm, km) = ((1usize << j) - 1, (1usize << k) - 1);
    let mut out = vec![0.0; 1 << n];
    for (idx, &w) in lambda.weights().iter().enumerate() {
        let z = block_values(idx >> ybits, idx & ((1 << ybits) - 1), n, j, k, jm, km, g);
        out[z] += w;
    }
    Ok(out)
}

/// `Σ λ·f·h` for two tables on the same domain.
pub fn correlation(f: &[i8], h: &[i8], lambda: &Distribution) -> Result<f64> {
    if f.len() != lambda.weights().len() || h.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: lambda.weights().len(),
            found: f.len().min(h.len()),
        });
    }
    Ok(f.iter()
        .zip(h)
        .zip(lambda.weights())
        .map(|((&a, &b), w)| (a * b) as f64 * w)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XorLemmaReport {
    pub k: usize,
    pub disc: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl XorLemmaReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-12
    }
}

/// Both sides of `disc_{μ⊗k}(PARITY_k ∘ P) ≤ (8 disc_μ(P))^k`.
pub fn xor_lemma_check(p: &Gadget, mu: &Distribution, k: usize) -> Result<XorLemmaReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let rows = (p.j() * k).min(p.k() * k);
    if 1usize.checked_shl(rows as u32).unwrap_or(usize::MAX) > MAX_SUBSET_ROWS {
        return Err(Error::DimensionCap {
            requested: 1 << rows.min(60),
            cap: MAX_SUBSET_ROWS,
        });
    }
    let disc = discrepancy(p, mu)?;
    let composed = compose(&BooleanFunction::parity(k)?, p)?;
    let product = mu.product_two_party(p.j(), p.k(), k)?;
    let lhs = discrepancy(&composed, &product)?;
    Ok(XorLemmaReport {
        k,
        disc,
        lhs,
        rhs: (8.0 * disc).powi(k as i32),
    })
}

/// `log2((δ + 2ε − 1) / disc)`, the argument of the generalized discrepancy
/// bound.
pub fn gdm_bound(delta: f64, eps: f64, disc: f64) -> Result<f64> {
    let num = delta + 2.0 * eps - 1.0;
    if num <= 0.0 {
        return Err(Error::InvalidParameter(format!("delta + 2 eps - 1 = {num} is not positive")));
    }
    if disc <= 0.0 {
        return Err(Error::InvalidParameter("discrepancy must be positive".into()));
    }
    Ok((num / disc).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// `corr(r∘G, h∘G)` under `λ`.
    pub correlation: f64,
    /// `disc_λ(h∘G)`.
    pub lhs: f64,
    /// `disc_μ(G)^{dβ} / (1 − disc_μ(G)^β)`.
    pub rhs: f64,
    pub disc_mu: f64,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-12
    }
}

/// Builds `λ` from a dual witness of `r` and compares `disc_λ(h∘G)` with the
/// composed bound at exponent `beta`.
pub fn composed_discrepancy_check(
    r: &BooleanFunction,
    witness: &DualWitness,
    g: &Gadget,
    mu: &Distribution,
    beta: f64,
) -> Result<ChainReport> {
    let n = witness.n;
    if r.n() != n {
        return Err(Error::Arity(format!("r on {} bits, witness on {n}", r.n())));
    }
    let nu = Distribution::new(n, normalized(witness.nu()))?;
    let h = witness.sign_function()?;
    let lambda = lambda_construct(&nu, mu, g)?;
    let rg = compose(r, g)?;
    let hg = compose(&h, g)?;
    let correlation = correlation(rg.table(), hg.table(), &lambda)?;
    let lhs = discrepancy(&hg, &lambda)?;
    let disc_mu = discrepancy(g, mu)?;
    let d = witness.degree as f64;
    let rhs = disc_mu.powf(d * beta) / (1.0 - disc_mu.powf(beta));
    Ok(ChainReport {
        correlation,
        lhs,
        rhs,
        disc_mu,
    })
}

/// Rescales to sum exactly 1 in floating point (witness weights carry
/// roundoff from the LP).
fn normalized(mut w: Vec<f64>) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= t);
    w
}

/// The distribution giving each sign class of `G` total mass `1/2`, uniform
/// within the class. Balanced for every non-constant `G`.
pub fn balanced_for(g: &Gadget) -> Distribution {
    let minus = g.table().iter().filter(|&&v| v == -1).count();
    let plus = g.table().len() - minus;
    let weights = g
        .table()
        .iter()
        .map(|&v| {
            if minus == 0 || plus == 0 {
                1.0 / g.table().len() as f64
            } else if v == -1 {
                0.5 / minus as f64
            } else {
                0.5 / plus as f64
            }
        })
        .collect();
    Distribution {
        n: g.j() + g.k(),
        weights,
    }
}

/// The `±1` sign matrix of `ADDR_n` times its transpose.
pub fn addr_gram(n: usize) -> Result<Vec<Vec<i64>>> {
    let g = Gadget::addr(n, 1)?;
    let a = g.sign_matrix();
    Ok(a.iter()
        .map(|r1| {
            a.iter()
                .map(|r2| r1.iter().zip(r2).map(|(&x, &y)| (x * y) as i64).sum())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gadget_has_full_discrepancy() {
        let g = Gadget::constant(2, 3, 1).unwrap();
        let u = Distribution::uniform_for(&g).unwrap();
        assert!((discrepancy(&g, &u).unwrap() - 1.0).abs() < 1e-15);
        assert!(!is_balanced(&u, &g).unwrap());
    }

    #[test]
    fn transposed_matrices_agree() {
        let m: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let mut t = vec![0.0; 12];
        for r in 0..3 {
            for c in 0..4 {
                t[c * 3 + r] = m[r * 4 + c];
            }
        }
        assert_eq!(max_rectangle(&m, 3, 4).unwrap(), max_rectangle(&t, 4, 3).unwrap());
    }

    #[test]
    fn balanced_gadgets() {
        for g in [Gadget::addr(2, 1).unwrap(), Gadget::addr(4, 1).unwrap(), Gadget::xor2()] {
            let u = Distribution::uniform_for(&g).unwrap();
            assert!(is_balanced(&u, &g).unwrap(), "{}", g.name());
        }
        // Uniform carries bias 2^{-m} against IP_m.
        for m in 1..=3 {
            let g = Gadget::ip(m, 1).unwrap();
            let u = Distribution::uniform_for(&g).unwrap();
            assert_eq!(bias(&u, &g).unwrap(), 1.0 / (1u64 << m) as f64);
            assert!(!is_balanced(&u, &g).unwrap());
            assert!(is_balanced(&balanced_for(&g), &g).unwrap());
        }
        let and = Gadget::and2();
        assert!(!is_balanced(&Distribution::uniform_for(&and).unwrap(), &and).unwrap());
    }

    #[test]
    fn lambda_with_one_block_tilts_mu() {
        let g = Gadget::ip(1, 1).unwrap();
        let mu = balanced_for(&g);
        assert_eq!(mu.weights(), &[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5]);
        let nu = Distribution::new(1, vec![0.25, 0.75]).unwrap();
        let lambda = lambda_construct(&nu, &mu, &g).unwrap();
        for (idx, &w) in lambda.weights().iter().enumerate() {
            let z = usize::from(g.eval(idx >> 1, idx & 1) == -1);
            assert!((w - 2.0 * nu.weights()[z] * mu.weights()[idx]).abs() < 1e-15);
        }
        let uniform = Distribution::uniform(1).unwrap();
        assert_eq!(lambda_construct(&uniform, &mu, &g).unwrap(), mu);
        let and = Gadget::and2();
        assert!(matches!(
            lambda_construct(&nu, &Distribution::uniform_for(&and).unwrap(), &and),
            Err(Error::Unbalanced { .. })
        ));
    }

    #[test]
    fn gdm_arithmetic() {
        let b1 = gdm_bound(1.0 / 3.0, 0.4, 0.1).unwrap();
        let b2 = gdm_bound(1.0 / 3.0, 0.4, 0.05).unwrap();
        assert!((b2 - b1 - 1.0).abs() < 1e-12);
        assert!(((b1.exp2() * 0.1) - 2.0 / 15.0).abs() < 1e-12);
        assert!(gdm_bound(0.1, 0.2, 0.1).is_err());
    }

    #[test]
    fn addr_gram_is_scaled_identity() {
        for n in [2, 4, 8] {
            let gram = addr_gram(n).unwrap();
            for (i, row) in gram.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert_eq!(v, if i == j { 1 << n } else { 0 });
                }
            }
        }
    }
}
