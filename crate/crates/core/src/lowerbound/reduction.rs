//! Embeddings of `r∘G` into `(r ∘̃ h_G)∘□` and the monomial projection onto
//! inner product.

use crate::boolfn::{
    codeword_from_index, decode_codeword_index, eval_rtilde_hg, string_of, BooleanFunction, Gadget,
    Hadamardized, MAX_TABLE_BITS,
};
use crate::error::{Error, Result};

/// The two-party gate applied bitwise between the parties' strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxGate {
    And,
    Xor,
}

impl BoxGate {
    pub fn apply(self, a: i8, b: i8) -> i8 {
        match self {
            BoxGate::And => {
                if a == -1 && b == -1 {
                    -1
                } else {
                    1
                }
            }
            BoxGate::Xor => a * b,
        }
    }

    /// Neutral padding: `box(a, pad) = a`.
    pub fn pad(self) -> i8 {
        match self {
            BoxGate::And => -1,
            BoxGate::Xor => 1,
        }
    }

    pub fn combine(self, x: &[i8], y: &[i8]) -> Vec<i8> {
        x.iter().zip(y).map(|(&a, &b)| self.apply(a, b)).collect()
    }
}

fn split_blocks(v: usize, blocks: usize, width: usize) -> Vec<usize> {
    let mask = (1usize << width) - 1;
    (0..blocks).map(|i| (v >> ((blocks - 1 - i) * width)) & mask).collect()
}

/// Maps `(x, y)` of `r∘G` (block indices concatenated, block 1 most
/// significant) to inputs `(X, Y)` of `(r ∘̃ h_G)∘□`.
pub fn embed_reduction(r: &BooleanFunction, g: &Gadget, x: usize, y: usize, gate: BoxGate) -> (Vec<i8>, Vec<i8>) {
    let n = r.n();
    let (j, k) = (g.j(), g.k());
    let pad = gate.pad();
    let mut xs = Vec::with_capacity(n * ((1 << j) + (1 << k)));
    let mut ys = Vec::with_capacity(xs.capacity());
    for (xi, yi) in split_blocks(x, n, j).into_iter().zip(split_blocks(y, n, k)) {
        xs.extend(codeword_from_index(xi, j));
        xs.extend(std::iter::repeat_n(pad, 1 << k));
        ys.extend(std::iter::repeat_n(pad, 1 << j));
        ys.extend(codeword_from_index(yi, k));
    }
    (xs, ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionReport {
    pub inputs: u64,
    pub mismatches: u64,
}

impl ReductionReport {
    pub fn holds(&self) -> bool {
        self.mismatches == 0 && self.inputs > 0
    }
}

fn check_size(bits: usize) -> Result<()> {
    if bits > MAX_TABLE_BITS {
        return Err(Error::TableCap {
            bits,
            cap_bits: MAX_TABLE_BITS,
        });
    }
    Ok(())
}

fn eval_composed(r: &BooleanFunction, g: &Gadget, x: usize, y: usize) -> i8 {
    let n = r.n();
    let z = split_blocks(x, n, g.j())
        .into_iter()
        .zip(split_blocks(y, n, g.k()))
        .fold(0usize, |acc, (a, b)| (acc << 1) | usize::from(g.eval(a, b) == -1));
    r.eval(z)
}

/// Checks `(r∘G)(x, y) = ((r ∘̃ h_G)∘□)(X, Y)` on every `(x, y)`.
pub fn check_reduction(r: &BooleanFunction, g: &Gadget, gate: BoxGate) -> Result<ReductionReport> {
    let n = r.n();
    check_size(n * (g.j() + g.k()))?;
    let h = Hadamardized::new(g);
    let mut report = ReductionReport { inputs: 0, mismatches: 0 };
    for x in 0..1usize << (n * g.j()) {
        for y in 0..1usize << (n * g.k()) {
            let (xs, ys) = embed_reduction(r, g, x, y, gate);
            let lifted = eval_rtilde_hg(r, &h, &gate.combine(&xs, &ys))?;
            report.inputs += 1;
            if lifted != eval_composed(r, g, x, y) {
                report.mismatches += 1;
            }
        }
    }
    Ok(report)
}

/// Variant for `ADDR_m` where Bob's data bits enter raw: blocks are
/// `(H(x_i), y_i)` with only Alice's address Hadamard-encoded, combined
/// through AND.
pub fn embed_addr_reduction(r: &BooleanFunction, m: usize, x: usize, y: usize) -> Result<(Vec<i8>, Vec<i8>)> {
    let g = Gadget::addr(m, 1)?;
    let n = r.n();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (xi, yi) in split_blocks(x, n, g.j()).into_iter().zip(split_blocks(y, n, m)) {
        xs.extend(codeword_from_index(xi, g.j()));
        xs.extend(std::iter::repeat_n(-1, m));
        ys.extend(std::iter::repeat_n(-1, m));
        ys.extend(string_of(yi, m));
    }
    Ok((xs, ys))
}

/// `r` applied to `ADDR(dec X_i, Y_i)` over blocks of `m + m` bits, `−1`
/// when some `X_i` is not a codeword.
pub fn eval_addr_lifted(r: &BooleanFunction, m: usize, input: &[i8]) -> Result<i8> {
    let n = r.n();
    if input.len() != n * 2 * m {
        return Err(Error::Arity(format!("input of length {} for {n} blocks", input.len())));
    }
    let g = Gadget::addr(m, 1)?;
    let mut z = 0usize;
    for block in input.chunks(2 * m) {
        let Some((a, _)) = decode_codeword_index(&block[..m]) else {
            return Ok(-1);
        };
        let data = crate::boolfn::index_of(&block[m..]);
        z = (z << 1) | usize::from(g.eval(a, data) == -1);
    }
    Ok(r.eval(z))
}

/// Exhaustive check of the ADDR variant.
pub fn check_addr_reduction(r: &BooleanFunction, m: usize) -> Result<ReductionReport> {
    let g = Gadget::addr(m, 1)?;
    let n = r.n();
    check_size(n * (g.j() + g.k()))?;
    let mut report = ReductionReport { inputs: 0, mismatches: 0 };
    for x in 0..1usize << (n * g.j()) {
        for y in 0..1usize << (n * g.k()) {
            let (xs, ys) = embed_addr_reduction(r, m, x, y)?;
            let lifted = eval_addr_lifted(r, m, &BoxGate::And.combine(&xs, &ys))?;
            report.inputs += 1;
            if lifted != eval_composed(r, &g, x, y) {
                report.mismatches += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionReport {
    pub free_variables: usize,
    pub assignments: u64,
    pub all_codewords: bool,
    pub matches: bool,
}

impl ProjectionReport {
    pub fn holds(&self) -> bool {
        self.all_codewords && self.matches
    }
}

/// Largest `n` accepted by [`ip_projection_check`].
pub const MAX_PROJECTION_N: usize = 4;

/// Restricts `PARITY_n ∘̃ h_{IP_{log n}}` to blocks whose weight-one
/// coordinates are free, whose `1^{log n}` coordinate is `1` and whose other
/// coordinates are products of the free ones, then compares with
/// `IP_{n log n}` on every assignment of the free variables.
pub fn ip_projection_check(n: usize) -> Result<ProjectionReport> {
    if !(2..=MAX_PROJECTION_N).contains(&n) || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("projection check needs n in {{2, 4}}, got {n}")));
    }
    let b = n.trailing_zeros() as usize;
    let free = 2 * n * b;
    let r = BooleanFunction::parity(n)?;
    let g = Gadget::ip(b, 1)?;
    let h = Hadamardized::new(&g);
    let target = Gadget::ip(n * b, 1)?;
    let mut all_codewords = true;
    let mut matches = true;
    for assignment in 0..1usize << free {
        let half = n * b;
        let (a, c) = (assignment >> half, assignment & ((1 << half) - 1));
        let mut input = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for part in [a, c] {
                let vars = (part >> ((n - 1 - i) * b)) & ((1 << b) - 1);
                let block = monomial_block(vars, b);
                all_codewords &= decode_codeword_index(&block).is_some();
                input.extend(block);
            }
        }
        if eval_rtilde_hg(&r, &h, &input)? != target.eval(a, c) {
            matches = false;
        }
    }
    Ok(ProjectionReport {
        free_variables: free,
        assignments: 1 << free,
        all_codewords,
        matches,
    })
}

/// Block of length `2^b` with coordinate `u` set to `Π_{l : u_l = −1} v_l`.
fn monomial_block(vars: usize, b: usize) -> Vec<i8> {
    (0..1usize << b)
        .map(|u| if (u & vars).count_ones() % 2 == 1 { -1 } else { 1 })
        .collect()
}
