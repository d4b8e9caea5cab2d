//! Approximate degree, dual witnesses and approximate spectral norm by
//! linear programming.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

use super::fourier::{chi, walsh_hadamard_real};
use super::simplex::{max_violation, Cmp, Lp, LpOutcome, Scalar};
use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};

/// Largest arity accepted by the LP routines.
pub const MAX_LP_ARITY: usize = 8;
/// Largest arity solved in exact rational arithmetic.
pub const MAX_EXACT_ARITY: usize = 5;
/// Feasibility tolerance for floating-point solves and post-hoc checks.
pub const FLOAT_TOL: f64 = 1e-7;

fn check_arity(f: &BooleanFunction) -> Result<()> {
    if f.n() > MAX_LP_ARITY {
        return Err(Error::TableCap {
            bits: f.n(),
            cap_bits: MAX_LP_ARITY,
        });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// The simplest fraction within a relative `1e-15` of `eps`, so that decimal
/// inputs like `1/3` are compared exactly in the rational path.
pub fn eps_rational(eps: f64) -> BigRational {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut x = eps;
    for _ in 0..64 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = BigRational::new(h1.clone(), k1.clone());
        if (num_traits::ToPrimitive::to_f64(&approx).unwrap_or(f64::NAN) - eps).abs() <= 1e-15 * eps || x == a {
            return approx;
        }
        x = 1.0 / (x - a);
    }
    <BigRational as FromPrimitive>::from_f64(eps).expect("finite eps")
}

fn tolerance(n: usize) -> f64 {
    if n <= MAX_EXACT_ARITY {
        1e-12
    } else {
        FLOAT_TOL
    }
}

fn monomials(n: usize, d: usize) -> Vec<usize> {
    (0..1usize << n).filter(|s| s.count_ones() as usize <= d).collect()
}

/// Best uniform approximation of `f` by degree-`d` polynomials: the optimal
/// error and the Fourier coefficients of an optimal `p` (indexed by subset).
fn best_approximation<T: Scalar>(f: &BooleanFunction, d: usize) -> Result<(T, Vec<f64>)> {
    let n = f.n();
    let monos = monomials(n, d);
    let e = monos.len();
    let mut obj = vec![T::zero(); e + 1];
    obj[e] = T::one();
    let mut lp = Lp::minimize(obj);
    for v in 0..e {
        lp.set_free(v);
    }
    for x in 0..1usize << n {
        let mut row: Vec<T> = monos.iter().map(|&s| T::from_f64(chi(s, x))).collect();
        let fx = T::from_i64(f.eval(x) as i64);
        row.push(-T::one());
        lp.add_row(row.clone(), Cmp::Le, fx.clone())?;
        row[e] = T::one();
        lp.add_row(row, Cmp::Ge, fx)?;
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, value } => {
            let mut coeffs = vec![0.0; 1 << n];
            for (i, &s) in monos.iter().enumerate() {
                coeffs[s] = x[i].to_f64();
            }
            Ok((value, coeffs))
        }
        other => Err(Error::Lp(format!("approximation program ended {other:?}"))),
    }
}

/// `min_p max_x |p(x) − f(x)|` over polynomials of degree at most `d`.
pub fn best_error(f: &BooleanFunction, d: usize) -> Result<f64> {
    check_arity(f)?;
    Ok(if f.n() <= MAX_EXACT_ARITY {
        best_approximation::<BigRational>(f, d)?.0.to_f64()
    } else {
        best_approximation::<f64>(f, d)?.0
    })
}

fn evaluate(coeffs: &[f64]) -> Vec<f64> {
    let mut v = coeffs.to_vec();
    super::fourier::wht_f64(&mut v);
    v
}

/// Least `d` such that some degree-`d` polynomial is within `eps` of `f`
/// everywhere. Every answer is confirmed post hoc: the approximant at `d` is
/// re-evaluated and a dual witness for `d` is extracted and checked.
pub fn approx_degree(f: &BooleanFunction, eps: f64) -> Result<usize> {
    check_arity(f)?;
    check_eps(eps)?;
    let n = f.n();
    let tol = tolerance(n);
    for d in 0..=n {
        let (err, coeffs) = if n <= MAX_EXACT_ARITY {
            let (v, c) = best_approximation::<BigRational>(f, d)?;
            (v <= eps_rational(eps), c)
        } else {
            let (v, c) = best_approximation::<f64>(f, d)?;
            (v <= eps + FLOAT_TOL, c)
        };
        if !err {
            continue;
        }
        let p = evaluate(&coeffs);
        let worst = p
            .iter()
            .zip(f.table())
            .map(|(a, &b)| (a - b as f64).abs())
            .fold(0.0, f64::max);
        if worst > eps + tol.max(1e-9) {
            return Err(Error::Lp(format!(
                "approximant at degree {d} misses by {worst} against eps {eps}"
            )));
        }
        if d > 0 {
            let w = dual_witness(f, d, eps)?.ok_or_else(|| {
                Error::Lp(format!("no dual witness at degree {d} despite primal infeasibility"))
            })?;
            if !w.check(f, eps).holds() {
                return Err(Error::Lp(format!("dual witness at degree {d} fails its checks")));
            }
        }
        return Ok(d);
    }
    Err(Error::Lp("no degree up to n reaches the target error".into()))
}

/// A certificate that `f` has `eps`-approximate degree at least `degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualWitness {
    pub n: usize,
    pub psi: Vec<f64>,
    pub degree: usize,
    pub correlation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessCheck {
    pub l1: f64,
    pub max_low_coefficient: f64,
    pub correlation: f64,
    pub eps: f64,
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        (self.l1 - 1.0).abs() <= 1e-9 && self.max_low_coefficient <= 1e-8 && self.correlation > self.eps
    }
}

impl DualWitness {
    /// Recomputes the three witness conditions from `ψ` alone.
    pub fn check(&self, f: &BooleanFunction, eps: f64) -> WitnessCheck {
        let l1 = self.psi.iter().map(|v| v.abs()).sum();
        let spectrum = walsh_hadamard_real(&self.psi).expect("power-of-two table");
        // ψ̂ is reported unnormalized so that the check does not shrink with n.
        let scale = self.psi.len() as f64;
        let max_low_coefficient = spectrum.max_below_degree(self.degree) * scale;
        let correlation = self
            .psi
            .iter()
            .zip(f.table())
            .map(|(p, &b)| p * b as f64)
            .sum();
        WitnessCheck {
            l1,
            max_low_coefficient,
            correlation,
            eps,
        }
    }

    /// `ν = |ψ|` as a distribution.
    pub fn nu(&self) -> Vec<f64> {
        self.psi.iter().map(|v| v.abs()).collect()
    }

    /// `h = sgn(ψ)`, with `+1` where `ψ` vanishes.
    pub fn sign_function(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_fn(self.n, |x| if self.psi[x] < 0.0 { -1 } else { 1 })
    }
}

fn witness_program<T: Scalar>(f: &BooleanFunction, d: usize) -> Result<Option<(Vec<f64>, T)>> {
    let n = f.n();
    let size = 1usize << n;
    let mut obj = Vec::with_capacity(2 * size);
    for x in 0..size {
        obj.push(T::from_i64(-(f.eval(x) as i64)));
    }
    for x in 0..size {
        obj.push(T::from_i64(f.eval(x) as i64));
    }
    let mut lp = Lp::minimize(obj);
    lp.add_row(vec![T::one(); 2 * size], Cmp::Eq, T::one())?;
    for s in (0..size).filter(|s| (s.count_ones() as usize) < d) {
        let mut row = Vec::with_capacity(2 * size);
        row.extend((0..size).map(|x| T::from_f64(chi(s, x))));
        row.extend((0..size).map(|x| T::from_f64(-chi(s, x))));
        lp.add_row(row, Cmp::Eq, T::zero())?;
    }
    let LpOutcome::Optimal { x, value } = lp.solve()? else {
        return Ok(None);
    };
    let psi: Vec<T> = (0..size).map(|i| x[i].clone() - x[size + i].clone()).collect();
    let l1 = psi.iter().fold(T::zero(), |acc, v| acc + v.abs_val());
    if !l1.is_positive() {
        return Ok(None);
    }
    let psi: Vec<f64> = psi.into_iter().map(|v| (v / l1.clone()).to_f64()).collect();
    Ok(Some((psi, -value)))
}

/// Solves the dual program directly: maximizes `Σ f(x)ψ(x)` over `ψ` with
/// `Σ|ψ| = 1` and `ψ̂(S) = 0` for `|S| < d`. Returns `None` when the optimum
/// does not exceed `eps`.
pub fn dual_witness(f: &BooleanFunction, d: usize, eps: f64) -> Result<Option<DualWitness>> {
    check_arity(f)?;
    check_eps(eps)?;
    let n = f.n();
    let solved = if n <= MAX_EXACT_ARITY {
        witness_program::<BigRational>(f, d)?.map(|(p, v)| (p, v > eps_rational(eps)))
    } else {
        witness_program::<f64>(f, d)?.map(|(p, v)| (p, v > eps + FLOAT_TOL))
    };
    let Some((psi, above)) = solved else {
        return Ok(None);
    };
    if !above {
        return Ok(None);
    }
    let correlation = psi.iter().zip(f.table()).map(|(p, &b)| p * b as f64).sum();
    Ok(Some(DualWitness {
        n,
        psi,
        degree: d,
        correlation,
    }))
}

fn spectral_program<T: Scalar>(f: &BooleanFunction, eps: f64) -> Result<(T, f64)> {
    let n = f.n();
    let size = 1usize << n;
    let mut lp = Lp::minimize(vec![T::one(); 2 * size]);
    let e = T::from_f64(eps);
    for x in 0..size {
        let mut row = Vec::with_capacity(2 * size);
        row.extend((0..size).map(|s| T::from_f64(chi(s, x))));
        row.extend((0..size).map(|s| T::from_f64(-chi(s, x))));
        let fx = T::from_i64(f.eval(x) as i64);
        lp.add_row(row.clone(), Cmp::Le, fx.clone() + e.clone())?;
        lp.add_row(row, Cmp::Ge, fx - e.clone())?;
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, value } => {
            let xf: Vec<f64> = x.iter().map(|v| v.to_f64()).collect();
            Ok((value, max_violation(&lp, &xf)))
        }
        other => Err(Error::Lp(format!("spectral-norm program ended {other:?}"))),
    }
}

/// `min Σ_S |p̂(S)|` over real `p` with `|p(x) − f(x)| ≤ eps` everywhere.
pub fn approx_spectral_norm(f: &BooleanFunction, eps: f64) -> Result<f64> {
    check_arity(f)?;
    check_eps(eps)?;
    let n = f.n();
    let (value, violation) = if n <= MAX_EXACT_ARITY {
        let (v, viol) = spectral_program::<BigRational>(f, eps)?;
        (v.to_f64(), viol)
    } else {
        spectral_program::<f64>(f, eps)?
    };
    if violation > FLOAT_TOL {
        return Err(Error::Lp(format!("spectral-norm solution violates a row by {violation}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_eps_is_exact() {
        assert_eq!(eps_rational(1.0 / 3.0), BigRational::new(1.into(), 3.into()));
        assert_eq!(eps_rational(0.1), BigRational::new(1.into(), 10.into()));
        assert_eq!(eps_rational(0.25), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn or4_error_exactly_one_third() {
        // E_2(OR_4) = 1/3 is attained, so the degree-2 approximant counts.
        let f = BooleanFunction::or(4).unwrap();
        let (v, _) = best_approximation::<BigRational>(&f, 2).unwrap();
        assert_eq!(v, BigRational::new(1.into(), 3.into()));
        assert_eq!(approx_degree(&f, 1.0 / 3.0).unwrap(), 2);
        assert!(dual_witness(&f, 3, 1.0 / 3.0).unwrap().is_none());
    }

    #[test]
    fn parity_and_constants() {
        for n in 2..=4 {
            let f = BooleanFunction::parity(n).unwrap();
            assert_eq!(approx_degree(&f, 1.0 / 3.0).unwrap(), n);
        }
        let c = BooleanFunction::constant(3, -1).unwrap();
        assert_eq!(approx_degree(&c, 1.0 / 3.0).unwrap(), 0);
        assert!(dual_witness(&c, 1, 1.0 / 3.0).unwrap().is_none());
    }

    #[test]
    fn witness_conditions_for_parity() {
        let f = BooleanFunction::parity(3).unwrap();
        let w = dual_witness(&f, 3, 1.0 / 3.0).unwrap().unwrap();
        let c = w.check(&f, 1.0 / 3.0);
        assert!(c.holds(), "{c:?}");
        assert!((c.correlation - 1.0).abs() < 1e-12);
        assert!(dual_witness(&f, 4, 1.0 / 3.0).unwrap().is_none());
    }

    #[test]
    fn spectral_norm_of_constant() {
        let f = BooleanFunction::constant(3, 1).unwrap();
        for eps in [0.1, 0.25, 1.0 / 3.0] {
            assert!((approx_spectral_norm(&f, eps).unwrap() - (1.0 - eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = BooleanFunction::parity(9).unwrap();
        assert!(approx_degree(&f, 0.3).is_err());
        let g = BooleanFunction::parity(2).unwrap();
        assert!(approx_degree(&g, 1.0).is_err());
    }
}
