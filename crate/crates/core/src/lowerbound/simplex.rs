//! Dense two-phase primal simplex with Bland's rule.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Ordered field used by the solver.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact for rationals, identity for floats.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Zero test used for pivoting (tolerant for floats).
    fn is_negligible(&self) -> bool;
    /// Among tied ratios, prefer the largest pivot before the smallest
    /// basis index. Only sensible for inexact arithmetic.
    const PREFER_LARGE_PIVOT: bool = false;

    fn is_positive(&self) -> bool {
        !self.is_negligible() && *self > Self::zero()
    }

    fn is_negative(&self) -> bool {
        !self.is_negligible() && *self < Self::zero()
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Pivot tolerance of the floating-point solver.
pub const F64_PIVOT_TOL: f64 = 1e-10;

impl Scalar for f64 {
    const PREFER_LARGE_PIVOT: bool = true;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self) -> bool {
        self.abs() <= F64_PIVOT_TOL
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row<T> {
    coeffs: Vec<T>,
    cmp: Cmp,
    rhs: T,
}

/// `minimize c·x` over linear rows; variables are nonnegative unless marked
/// free.
#[derive(Debug, Clone)]
pub struct Lp<T> {
    objective: Vec<T>,
    free: Vec<bool>,
    rows: Vec<Row<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

/// Hard cap on pivots; exceeding it is reported as non-convergence.
pub const MAX_PIVOTS: usize = 200_000;

impl<T: Scalar> Lp<T> {
    pub fn minimize(objective: Vec<T>) -> Self {
        let n = objective.len();
        Self {
            objective,
            free: vec![false; n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn add_row(&mut self, coeffs: Vec<T>, cmp: Cmp, rhs: T) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                found: coeffs.len(),
            });
        }
        self.rows.push(Row { coeffs, cmp, rhs });
        Ok(())
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        let nv = self.num_vars();
        // Column layout: one column per nonnegative variable, two per free
        // variable, then slacks, then artificials.
        let mut col_of = Vec::with_capacity(nv);
        let mut ncols = 0;
        for &f in &self.free {
            col_of.push(ncols);
            ncols += if f { 2 } else { 1 };
        }
        let structural = ncols;
        let slacks = self.rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
        let m = self.rows.len();
        let width = structural + slacks + m + 1;
        let rhs_col = width - 1;
        let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut slack = structural;
        for (i, row) in self.rows.iter().enumerate() {
            let mut t = vec![T::zero(); width];
            for (v, c) in row.coeffs.iter().enumerate() {
                t[col_of[v]] = c.clone();
                if self.free[v] {
                    t[col_of[v] + 1] = -c.clone();
                }
            }
            match row.cmp {
                Cmp::Le => {
                    t[slack] = T::one();
                    slack += 1;
                }
                Cmp::Ge => {
                    t[slack] = -T::one();
                    slack += 1;
                }
                Cmp::Eq => {}
            }
            t[rhs_col] = row.rhs.clone();
            if row.rhs < T::zero() {
                for e in t.iter_mut() {
                    *e = -e.clone();
                }
            }
            t[structural + slacks + i] = T::one();
            tab.push(t);
        }
        let art0 = structural + slacks;
        let mut basis: Vec<usize> = (art0..art0 + m).collect();

        // Phase 1: minimize the sum of artificials.
        let mut cost1 = vec![T::zero(); width];
        for c in cost1.iter_mut().skip(art0).take(m) {
            *c = T::one();
        }
        let mut tableau = Tableau {
            tab,
            basis,
            rhs_col,
            allowed: art0 + m,
        };
        let phase1 = tableau.optimize(&cost1)?;
        if phase1 == Step::Unbounded {
            return Err(Error::Lp("phase one unbounded".into()));
        }
        let infeas = tableau.objective_value(&cost1);
        if infeas.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tableau.tab.len() {
            if tableau.basis[r] >= art0 {
                let col = (0..art0).find(|&c| !tableau.tab[r][c].is_negligible());
                match col {
                    Some(c) => tableau.pivot(r, c),
                    None => {
                        tableau.tab.remove(r);
                        tableau.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        tableau.allowed = art0;

        let mut cost2 = vec![T::zero(); width];
        for (v, c) in self.objective.iter().enumerate() {
            cost2[col_of[v]] = c.clone();
            if self.free[v] {
                cost2[col_of[v] + 1] = -c.clone();
            }
        }
        if tableau.optimize(&cost2)? == Step::Unbounded {
            return Ok(LpOutcome::Unbounded);
        }
        basis = tableau.basis.clone();
        let mut cols = vec![T::zero(); art0];
        for (r, &b) in basis.iter().enumerate() {
            if b < art0 {
                cols[b] = tableau.tab[r][rhs_col].clone();
            }
        }
        let x: Vec<T> = (0..nv)
            .map(|v| {
                let c = col_of[v];
                if self.free[v] {
                    cols[c].clone() - cols[c + 1].clone()
                } else {
                    cols[c].clone()
                }
            })
            .collect();
        let value = x
            .iter()
            .zip(&self.objective)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        Ok(LpOutcome::Optimal { x, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

struct Tableau<T> {
    tab: Vec<Vec<T>>,
    basis: Vec<usize>,
    rhs_col: usize,
    /// Columns at or beyond this index may not enter.
    allowed: usize,
}

impl<T: Scalar> Tableau<T> {
    fn objective_value(&self, cost: &[T]) -> T {
        self.basis
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (r, &b)| {
                acc + cost[b].clone() * self.tab[r][self.rhs_col].clone()
            })
    }

    fn reduced_cost(&self, cost: &[T], col: usize) -> T {
        self.basis
            .iter()
            .enumerate()
            .fold(cost[col].clone(), |acc, (r, &b)| {
                if self.tab[r][col].is_negligible() || cost[b].is_negligible() {
                    acc
                } else {
                    acc - cost[b].clone() * self.tab[r][col].clone()
                }
            })
    }

    fn optimize(&mut self, cost: &[T]) -> Result<Step> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.allowed)
                .filter(|c| !self.basis.contains(c))
                .find(|&c| self.reduced_cost(cost, c).is_negative());
            let Some(col) = entering else {
                return Ok(Step::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.tab.len() {
                let a = &self.tab[r][col];
                if !a.is_positive() {
                    continue;
                }
                let rhs = &self.tab[r][self.rhs_col];
                let ratio = if rhs.is_negligible() {
                    T::zero()
                } else {
                    rhs.clone() / a.clone()
                };
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        let diff = ratio.clone() - best.clone();
                        if diff.is_negative() {
                            true
                        } else if !diff.is_negligible() {
                            false
                        } else if T::PREFER_LARGE_PIVOT {
                            let (cur, old) = (a.to_f64(), self.tab[*lr][col].to_f64());
                            cur > old * (1.0 + 1e-9) || (cur >= old * (1.0 - 1e-9) && self.basis[r] < self.basis[*lr])
                        } else {
                            self.basis[r] < self.basis[*lr]
                        }
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Ok(Step::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::Lp(format!("no convergence within {MAX_PIVOTS} pivots")))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tab[row][col].clone();
        for e in self.tab[row].iter_mut() {
            if !e.is_negligible() {
                *e = e.clone() / p.clone();
            }
        }
        self.tab[row][col] = T::one();
        let pivot_row = self.tab[row].clone();
        for (r, t) in self.tab.iter_mut().enumerate() {
            if r == row || t[col].is_negligible() {
                continue;
            }
            let f = t[col].clone();
            for (e, pv) in t.iter_mut().zip(&pivot_row) {
                if !pv.is_negligible() {
                    *e = e.clone() - f.clone() * pv.clone();
                }
            }
            t[col] = T::zero();
        }
        self.basis[row] = col;
    }
}

/// Maximal absolute violation of `lp`'s rows at `x`, in `f64`.
pub fn max_violation<T: Scalar>(lp: &Lp<T>, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (v, &free) in lp.free.iter().enumerate() {
        if !free {
            worst = worst.max(-x[v]);
        }
    }
    for row in &lp.rows {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(c, xi)| c.to_f64() * xi).sum();
        let rhs = row.rhs.to_f64();
        let v = match row.cmp {
            Cmp::Le => lhs - rhs,
            Cmp::Ge => rhs - lhs,
            Cmp::Eq => (lhs - rhs).abs(),
        };
        worst = worst.max(v);
    }
    worst
}
