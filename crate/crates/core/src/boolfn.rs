//! Boolean functions on `{−1,+1}^n`, two-party gadgets, Hadamard codewords,
//! hadamardization, composition and transitivity checks.
//!
//! Index convention: a string `x` maps to the integer whose bit `i` (most
//! significant first) is 1 iff `x_i = −1`. The Hamming weight `|x|` is the
//! number of `−1` entries, i.e. the popcount of the index.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::statevector::log2_exact;

/// Largest table handled, in index bits.
pub const MAX_TABLE_BITS: usize = 20;

fn check_bits(bits: usize) -> Result<()> {
    if bits > MAX_TABLE_BITS {
        return Err(Error::TableCap {
            bits,
            cap_bits: MAX_TABLE_BITS,
        });
    }
    Ok(())
}

fn check_sign(position: usize, v: i8) -> Result<()> {
    if v != 1 && v != -1 {
        return Err(Error::BadTableEntry {
            position,
            value: v as i64,
        });
    }
    Ok(())
}

/// Integer index of a `±1` string.
pub fn index_of(x: &[i8]) -> usize {
    x.iter()
        .fold(0, |acc, &v| (acc << 1) | usize::from(v == -1))
}

/// The `±1` string of length `m` with index `idx`.
pub fn string_of(idx: usize, m: usize) -> Vec<i8> {
    (0..m)
        .map(|i| if (idx >> (m - 1 - i)) & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// Hamming weight (number of `−1`s) of the string with index `idx`.
pub fn weight(idx: usize) -> usize {
    idx.count_ones() as usize
}

fn parity_sign(bits: usize) -> i8 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// How a string `s` is turned into the integer that selects its parity.
/// Only [`BitOrder::MsbFirst`] matches the crate convention; the other
/// variant exists for fault-injection runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitOrder {
    #[default]
    MsbFirst,
    LsbFirst,
}

impl BitOrder {
    pub fn index(self, s: &[i8]) -> usize {
        match self {
            BitOrder::MsbFirst => index_of(s),
            BitOrder::LsbFirst => s
                .iter()
                .rev()
                .fold(0, |acc, &v| (acc << 1) | usize::from(v == -1)),
        }
    }
}

/// `H(s)_u = ∏_{i: s_i = −1} u_i`, listed over `u` in index order.
pub fn hadamard_codeword(s: &[i8]) -> Vec<i8> {
    hadamard_codeword_with(s, BitOrder::MsbFirst)
}

pub fn hadamard_codeword_with(s: &[i8], order: BitOrder) -> Vec<i8> {
    codeword_from_index(order.index(s), s.len())
}

/// The codeword of length `2^bits` selected by the index `s_idx`.
pub fn codeword_from_index(s_idx: usize, bits: usize) -> Vec<i8> {
    (0..1usize << bits)
        .map(|u| parity_sign(s_idx & u))
        .collect()
}

/// In-place unnormalized Walsh–Hadamard transform of an integer vector.
pub fn wht_i64(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Returns `(s, b)` with `x = b·H(s)`, if `x` is a signed codeword.
pub fn decode_codeword(x: &[i8]) -> Option<(Vec<i8>, i8)> {
    let (s_idx, b) = decode_codeword_index(x)?;
    Some((string_of(s_idx, log2_exact(x.len()).ok()?), b))
}

/// Index form of [`decode_codeword`].
pub fn decode_codeword_index(x: &[i8]) -> Option<(usize, i8)> {
    let n = x.len();
    log2_exact(n).ok()?;
    let mut v: Vec<i64> = x.iter().map(|&e| e as i64).collect();
    wht_i64(&mut v);
    let hit = v.iter().position(|c| c.unsigned_abs() as usize == n)?;
    Some((hit, if v[hit] > 0 { 1 } else { -1 }))
}

/// A total function `{−1,+1}^n → {−1,+1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<i8>,
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={})", self.n)
    }
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<i8>) -> Result<Self> {
        check_bits(n)?;
        if table.len() != 1 << n {
            return Err(Error::TableLength {
                expected: 1 << n,
                found: table.len(),
            });
        }
        for (i, &v) in table.iter().enumerate() {
            check_sign(i, v)?;
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> i8) -> Result<Self> {
        check_bits(n)?;
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        check_sign(0, value)?;
        Self::from_fn(n, |_| value)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, parity_sign)
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| if x != 0 { -1 } else { 1 })
    }

    pub fn nor(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| if x == 0 { -1 } else { 1 })
    }

    /// `−1` iff at least half the inputs are `−1` (ties go to `−1`).
    pub fn maj(n: usize) -> Result<Self> {
        SymmetricSpec::maj(n)?.to_function()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    pub fn eval(&self, idx: usize) -> i8 {
        self.table[idx]
    }

    pub fn eval_str(&self, x: &[i8]) -> Result<i8> {
        if x.len() != self.n {
            return Err(Error::Arity(format!(
                "input of length {} for a function of arity {}",
                x.len(),
                self.n
            )));
        }
        Ok(self.table[index_of(x)])
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&v| v == self.table[0])
    }

    /// Checks whether the table only depends on the Hamming weight and, if so,
    /// returns its weight profile.
    pub fn as_symmetric(&self) -> Option<SymmetricSpec> {
        let mut values: Vec<Option<i8>> = vec![None; self.n + 1];
        for (idx, &v) in self.table.iter().enumerate() {
            let w = weight(idx);
            match values[w] {
                None => values[w] = Some(v),
                Some(prev) if prev != v => return None,
                _ => {}
            }
        }
        SymmetricSpec::new(self.n, values.into_iter().map(|v| v.unwrap()).collect()).ok()
    }
}

/// A partial function with values in `{−1, +1, ⋆}`; `None` is `⋆`.
#[derive(Clone, PartialEq, Eq)]
pub struct PartialBooleanFunction {
    n: usize,
    table: Vec<Option<i8>>,
}

impl fmt::Debug for PartialBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialBooleanFunction(n={})", self.n)
    }
}

impl PartialBooleanFunction {
    pub fn new(n: usize, table: Vec<Option<i8>>) -> Result<Self> {
        check_bits(n)?;
        if table.len() != 1 << n {
            return Err(Error::TableLength {
                expected: 1 << n,
                found: table.len(),
            });
        }
        for (i, v) in table.iter().enumerate() {
            if let Some(v) = v {
                check_sign(i, *v)?;
            }
        }
        Ok(Self { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[Option<i8>] {
        &self.table
    }

    pub fn eval(&self, idx: usize) -> Option<i8> {
        self.table[idx]
    }

    pub fn defined_count(&self) -> usize {
        self.table.iter().filter(|v| v.is_some()).count()
    }
}

impl From<&BooleanFunction> for PartialBooleanFunction {
    fn from(f: &BooleanFunction) -> Self {
        Self {
            n: f.n,
            table: f.table.iter().map(|&v| Some(v)).collect(),
        }
    }
}

/// A two-party function `G: {−1,+1}^j × {−1,+1}^k → {−1,+1}` with a declared
/// exact quantum communication cost `q`.
///
/// The table is indexed by `(x << k) | y`.
#[derive(Clone, PartialEq, Eq)]
pub struct Gadget {
    name: String,
    j: usize,
    k: usize,
    table: Vec<i8>,
    q: u64,
}

impl fmt::Debug for Gadget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gadget({}, j={}, k={}, q={})", self.name, self.j, self.k, self.q)
    }
}

impl Gadget {
    pub fn new(name: impl Into<String>, j: usize, k: usize, table: Vec<i8>, q: u64) -> Result<Self> {
        check_bits(j + k)?;
        if table.len() != 1 << (j + k) {
            return Err(Error::TableLength {
                expected: 1 << (j + k),
                found: table.len(),
            });
        }
        for (i, &v) in table.iter().enumerate() {
            check_sign(i, v)?;
        }
        let g = Self {
            name: name.into(),
            j,
            k,
            table,
            q,
        };
        if q == 0 && !g.is_constant() {
            return Err(Error::InvalidParameter(format!(
                "non-constant gadget {} needs q >= 1",
                g.name
            )));
        }
        Ok(g)
    }

    pub fn from_fn(
        name: impl Into<String>,
        j: usize,
        k: usize,
        q: u64,
        f: impl Fn(usize, usize) -> i8,
    ) -> Result<Self> {
        check_bits(j + k)?;
        let mask = (1usize << k) - 1;
        let table = (0..1usize << (j + k)).map(|i| f(i >> k, i & mask)).collect();
        Self::new(name, j, k, table, q)
    }

    pub fn and2() -> Self {
        Self::from_fn("and2", 1, 1, 1, |x, y| if x == 1 && y == 1 { -1 } else { 1 })
            .expect("static gadget")
    }

    pub fn xor2() -> Self {
        Self::from_fn("xor2", 1, 1, 1, |x, y| parity_sign(x ^ y)).expect("static gadget")
    }

    /// `IP_m(x, y) = ∏_i AND(x_i, y_i)` in `±1` form. The declared cost is the
    /// caller's `q`.
    pub fn ip(m: usize, q: u64) -> Result<Self> {
        Self::from_fn(format!("ip{m}"), m, m, q, |x, y| parity_sign(x & y))
    }

    /// `ADDR_n(x, y) = y_{idx(x)}`: Alice holds `log n` address bits, Bob the
    /// `n` data bits.
    pub fn addr(n: usize, q: u64) -> Result<Self> {
        let a = log2_exact(n)?;
        Self::from_fn(format!("addr{n}"), a, n, q, move |x, y| {
            if (y >> (n - 1 - x)) & 1 == 1 {
                -1
            } else {
                1
            }
        })
    }

    pub fn constant(j: usize, k: usize, value: i8) -> Result<Self> {
        check_sign(0, value)?;
        Self::from_fn(format!("const{value}"), j, k, 0, |_, _| value)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn with_cost(mut self, q: u64) -> Self {
        self.q = q;
        self
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    pub fn eval(&self, x: usize, y: usize) -> i8 {
        self.table[(x << self.k) | y]
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&v| v == self.table[0])
    }

    /// The gadget with its output sign flipped.
    pub fn negated(&self) -> Self {
        Self {
            name: format!("neg-{}", self.name),
            j: self.j,
            k: self.k,
            table: self.table.iter().map(|&v| -v).collect(),
            q: self.q,
        }
    }

    /// The `2^j × 2^k` sign matrix, row `x`, column `y`.
    pub fn sign_matrix(&self) -> Vec<Vec<i8>> {
        let cols = 1usize << self.k;
        self.table.chunks(cols).map(|r| r.to_vec()).collect()
    }
}

/// A symmetric function described by its value at each Hamming weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricSpec {
    n: usize,
    weight_values: Vec<i8>,
}

impl SymmetricSpec {
    pub fn new(n: usize, weight_values: Vec<i8>) -> Result<Self> {
        if weight_values.len() != n + 1 {
            return Err(Error::TableLength {
                expected: n + 1,
                found: weight_values.len(),
            });
        }
        for (i, &v) in weight_values.iter().enumerate() {
            check_sign(i, v)?;
        }
        Ok(Self { n, weight_values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> i8) -> Result<Self> {
        Self::new(n, (0..=n).map(f).collect())
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| if w % 2 == 0 { 1 } else { -1 })
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| if w > 0 { -1 } else { 1 })
    }

    pub fn nor(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| if w == 0 { -1 } else { 1 })
    }

    /// `−1` iff `2|x| ≥ n`.
    pub fn maj(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| if 2 * w >= n { -1 } else { 1 })
    }

    /// `−1` iff `|x| ≥ w0`.
    pub fn threshold(n: usize, w0: usize) -> Result<Self> {
        Self::from_fn(n, |w| if w >= w0 { -1 } else { 1 })
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight_values(&self) -> &[i8] {
        &self.weight_values
    }

    pub fn at_weight(&self, w: usize) -> i8 {
        self.weight_values[w]
    }

    pub fn is_constant(&self) -> bool {
        self.weight_values.iter().all(|&v| v == self.weight_values[0])
    }

    pub fn to_function(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_fn(self.n, |x| self.weight_values[weight(x)])
    }

    /// `Γ(f) = min{|2k − n + 1| : f_k ≠ f_{k+1}}`; `n + 1` for constants.
    pub fn gamma(&self) -> usize {
        (0..self.n)
            .filter(|&k| self.weight_values[k] != self.weight_values[k + 1])
            .map(|k| (2 * k as i64 - self.n as i64 + 1).unsigned_abs() as usize)
            .min()
            .unwrap_or(self.n + 1)
    }

    /// `t = ⌈(n − Γ)/2⌉`; `f` is constant on weights `t ..= n − t`.
    pub fn threshold_t(&self) -> usize {
        let g = self.gamma();
        if g >= self.n {
            0
        } else {
            (self.n - g).div_ceil(2)
        }
    }
}

/// `Γ` of a symmetric function (free-function form).
pub fn gamma(f: &SymmetricSpec) -> usize {
    f.gamma()
}

/// Functions and gadgets by name, as accepted on the command line.
///
/// Gadgets: `and2`, `xor2`, `ip:<m>`, `addr:<n>`. Functions: `parity`, `or`,
/// `nor`, `maj`. Gadgets other than `and2`/`xor2` take the caller's cost.
pub fn gadget_by_name(spec: &str, q: Option<u64>) -> Result<Gadget> {
    let (name, arg) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let size = || -> Result<usize> {
        arg.ok_or_else(|| Error::InvalidParameter(format!("gadget `{name}` needs a size")))?
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad size in `{spec}`")))
    };
    let need_q = || -> Result<u64> {
        q.ok_or_else(|| Error::InvalidParameter(format!("gadget `{spec}` needs a declared cost q")))
    };
    let g = match name {
        "and2" => Gadget::and2(),
        "xor2" => Gadget::xor2(),
        "ip" => Gadget::ip(size()?, need_q()?)?,
        "addr" => Gadget::addr(size()?, need_q()?)?,
        _ => {
            return Err(Error::UnknownName {
                kind: "gadget",
                name: spec.to_string(),
            })
        }
    };
    Ok(match q {
        Some(q) if name == "and2" || name == "xor2" => g.with_cost(q),
        _ => g,
    })
}

pub fn symmetric_by_name(name: &str, n: usize) -> Result<SymmetricSpec> {
    match name {
        "parity" => SymmetricSpec::parity(n),
        "or" => SymmetricSpec::or(n),
        "nor" => SymmetricSpec::nor(n),
        "maj" => SymmetricSpec::maj(n),
        _ => Err(Error::UnknownName {
            kind: "function",
            name: name.to_string(),
        }),
    }
}

/// `h_G(x, y)` for `x ∈ {±1}^{2^j}`, `y ∈ {±1}^{2^k}` given as indices.
/// Evaluated lazily, so large lifted arities are fine.
#[derive(Debug, Clone)]
pub struct Hadamardized {
    gadget: Gadget,
}

impl Hadamardized {
    pub fn new(gadget: &Gadget) -> Self {
        Self {
            gadget: gadget.clone(),
        }
    }

    pub fn gadget(&self) -> &Gadget {
        &self.gadget
    }

    /// Alice's block length `2^j`.
    pub fn x_len(&self) -> usize {
        1 << self.gadget.j
    }

    /// Bob's block length `2^k`.
    pub fn y_len(&self) -> usize {
        1 << self.gadget.k
    }

    pub fn arity(&self) -> usize {
        self.x_len() + self.y_len()
    }

    pub fn eval_strs(&self, x: &[i8], y: &[i8]) -> Option<i8> {
        let (s, _) = decode_codeword_index(x)?;
        let (t, _) = decode_codeword_index(y)?;
        Some(self.gadget.eval(s, t))
    }

    /// Evaluates on the concatenated index `(x << 2^k) | y`.
    pub fn eval(&self, idx: usize) -> Option<i8> {
        let yl = self.y_len();
        let x = string_of(idx >> yl, self.x_len());
        let y = string_of(idx & ((1 << yl) - 1), yl);
        self.eval_strs(&x, &y)
    }

    pub fn to_partial(&self) -> Result<PartialBooleanFunction> {
        let m = self.arity();
        check_bits(m)?;
        PartialBooleanFunction::new(m, (0..1usize << m).map(|i| self.eval(i)).collect())
    }
}

/// The hadamardization `h_G` as a partial table on `2^j + 2^k` bits.
pub fn hadamardize(g: &Gadget) -> Result<PartialBooleanFunction> {
    Hadamardized::new(g).to_partial()
}

/// `f ∘ G`: Alice holds blocks `X_1 … X_n`, Bob `Y_1 … Y_n`, each block
/// concatenated with `X_1` most significant. The declared cost is `n·q`.
pub fn compose(f: &BooleanFunction, g: &Gadget) -> Result<Gadget> {
    let n = f.n();
    let (j, k) = (g.j, g.k);
    check_bits(n * (j + k))?;
    let (jm, km) = ((1usize << j) - 1, (1usize << k) - 1);
    Gadget::from_fn(
        format!("f{n}-{}", g.name),
        n * j,
        n * k,
        n as u64 * g.q,
        |x, y| {
            let z = (0..n).fold(0usize, |acc, i| {
                let xi = (x >> ((n - 1 - i) * j)) & jm;
                let yi = (y >> ((n - 1 - i) * k)) & km;
                (acc << 1) | usize::from(g.eval(xi, yi) == -1)
            });
            f.eval(z)
        },
    )
}

/// `r ∘̃ g`: blocks of `g.n()` bits are concatenated (first block most
/// significant); the value is `r(g(B_1), …)` when every block is defined and
/// `−1` otherwise.
pub fn compose_tilde(r: &BooleanFunction, g: &PartialBooleanFunction) -> Result<BooleanFunction> {
    let (n, m) = (r.n(), g.n());
    check_bits(n * m)?;
    let mask = (1usize << m) - 1;
    BooleanFunction::from_fn(n * m, |x| {
        let mut z = 0usize;
        for i in 0..n {
            match g.eval((x >> ((n - 1 - i) * m)) & mask) {
                Some(v) => z = (z << 1) | usize::from(v == -1),
                None => return -1,
            }
        }
        r.eval(z)
    })
}

/// `r ∘̃ h_G` on `n` interleaved blocks `(X_1, Y_1, …, X_n, Y_n)`, evaluated
/// lazily from a `±1` string.
pub fn eval_rtilde_hg(r: &BooleanFunction, h: &Hadamardized, input: &[i8]) -> Result<i8> {
    let (xl, yl) = (h.x_len(), h.y_len());
    let n = r.n();
    if input.len() != n * (xl + yl) {
        return Err(Error::Arity(format!(
            "input of length {} for {} blocks of {}",
            input.len(),
            n,
            xl + yl
        )));
    }
    let mut z = 0usize;
    for block in input.chunks(xl + yl) {
        match h.eval_strs(&block[..xl], &block[xl..]) {
            Some(v) => z = (z << 1) | usize::from(v == -1),
            None => return Ok(-1),
        }
    }
    Ok(r.eval(z))
}

/// A permutation of coordinates: coordinate `c` moves to `map[c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordPerm {
    pub name: String,
    pub map: Vec<usize>,
}

impl CoordPerm {
    pub fn new(name: impl Into<String>, map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || seen[m] {
                return Err(Error::NotPermutation { size: map.len() });
            }
            seen[m] = true;
        }
        Ok(Self {
            name: name.into(),
            map,
        })
    }

    /// `(x∘p)`: the string whose coordinate `map[c]` is `x_c`.
    pub fn apply(&self, x: &[i8]) -> Vec<i8> {
        let mut out = vec![0; x.len()];
        for (c, &v) in x.iter().enumerate() {
            out[self.map[c]] = v;
        }
        out
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn after(&self, other: &CoordPerm) -> CoordPerm {
        CoordPerm {
            name: format!("{}*{}", self.name, other.name),
            map: other.map.iter().map(|&c| self.map[c]).collect(),
        }
    }
}

/// Generators on `2n` coordinates `(x_0 … x_{n−1}, y_0 … y_{n−1})`: the block
/// swap `π` and `σ_ℓ(i) = i ⊕ ℓ` applied to both blocks.
pub fn transitive_perms(n: usize) -> Result<Vec<CoordPerm>> {
    log2_exact(n)?;
    let mut gens = Vec::with_capacity(n + 1);
    gens.push(CoordPerm::new(
        "pi",
        (0..2 * n).map(|c| (c + n) % (2 * n)).collect(),
    )?);
    for l in 0..n {
        gens.push(sigma(n, l)?);
    }
    Ok(gens)
}

pub fn sigma(n: usize, l: usize) -> Result<CoordPerm> {
    CoordPerm::new(
        format!("sigma{l}"),
        (0..2 * n).map(|c| (c / n) * n + ((c % n) ^ l)).collect(),
    )
}

/// Orbit of coordinate `start` under the group generated by `perms`.
pub fn orbit(perms: &[CoordPerm], start: usize) -> Vec<usize> {
    let size = perms.first().map_or(0, |p| p.map.len());
    if size == 0 {
        return vec![start];
    }
    let mut seen = vec![false; size];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(c) = queue.pop_front() {
        for p in perms {
            let d = p.map[c];
            if !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    (0..size).filter(|&c| seen[c]).collect()
}

/// Outcome of a transitivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitivityReport {
    pub invariant: bool,
    pub single_orbit: bool,
    pub inputs_checked: u64,
    pub exhaustive: bool,
}

impl TransitivityReport {
    pub fn holds(&self) -> bool {
        self.invariant && self.single_orbit
    }
}

/// Largest arity checked exhaustively by [`verify_transitive`].
pub const EXHAUSTIVE_TRANSITIVITY_BITS: usize = 16;

/// Checks `f(x∘p) = f(x)` for each generator and that the generated group
/// acts on coordinates with a single orbit.
///
/// Arity up to [`EXHAUSTIVE_TRANSITIVITY_BITS`] is checked on every input;
/// above that the caller's `extra` inputs plus `samples` uniform random
/// strings are used.
pub fn verify_transitive<F, R>(
    f: F,
    arity: usize,
    perms: &[CoordPerm],
    extra: &[Vec<i8>],
    samples: usize,
    rng: &mut R,
) -> Result<TransitivityReport>
where
    F: Fn(&[i8]) -> Option<i8>,
    R: Rng + ?Sized,
{
    if let Some(p) = perms.iter().find(|p| p.map.len() != arity) {
        return Err(Error::Arity(format!(
            "permutation {} on {} coordinates for arity {arity}",
            p.name,
            p.map.len()
        )));
    }
    let single_orbit = orbit(perms, 0).len() == arity;
    let check = |x: &[i8]| perms.iter().all(|p| f(&p.apply(x)) == f(x));
    let mut invariant = true;
    let mut count = 0u64;
    let exhaustive = arity <= EXHAUSTIVE_TRANSITIVITY_BITS;
    if exhaustive {
        for idx in 0..1usize << arity {
            count += 1;
            if !check(&string_of(idx, arity)) {
                invariant = false;
                break;
            }
        }
    } else {
        let random = (0..samples).map(|_| {
            (0..arity)
                .map(|_| if rng.gen::<bool>() { -1 } else { 1 })
                .collect::<Vec<i8>>()
        });
        for x in extra.iter().cloned().chain(random.collect::<Vec<_>>()) {
            count += 1;
            if !check(&x) {
                invariant = false;
                break;
            }
        }
    }
    Ok(TransitivityReport {
        invariant,
        single_orbit,
        inputs_checked: count,
        exhaustive,
    })
}

/// Parses the truth-table format: a line `n=<arity>` followed by `2^n`
/// whitespace-separated entries from `{-1, 1, *}`.
pub fn parse_table(text: &str) -> Result<PartialBooleanFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            line: ln + 1,
            message: format!("expected `n=<arity>`, found `{}`", header.trim()),
        })?;
    check_bits(n)?;
    let mut table = Vec::with_capacity(1 << n);
    for (ln, line) in lines {
        for tok in line.split_whitespace() {
            table.push(match tok {
                "1" | "+1" => Some(1),
                "-1" => Some(-1),
                "*" => None,
                _ => {
                    return Err(Error::Parse {
                        line: ln + 1,
                        message: format!("bad entry `{tok}`"),
                    })
                }
            });
        }
    }
    PartialBooleanFunction::new(n, table)
}

pub fn format_table(f: &PartialBooleanFunction) -> String {
    let body: Vec<&str> = f
        .table()
        .iter()
        .map(|v| match v {
            Some(1) => "1",
            Some(_) => "-1",
            None => "*",
        })
        .collect();
    format!("n={}\n{}\n", f.n(), body.join(" "))
}

/// Reads a total function from a truth-table file.
pub fn load_function(path: &Path) -> Result<BooleanFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let p = parse_table(&text)?;
    let table = p
        .table()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or(Error::Parse {
                line: 2,
                message: format!("entry {i} is `*` in a total function"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BooleanFunction::new(p.n(), table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_convention() {
        assert_eq!(index_of(&[-1, 1]), 2);
        assert_eq!(index_of(&[1, -1, -1]), 3);
        assert_eq!(string_of(2, 2), vec![-1, 1]);
        assert_eq!(weight(index_of(&[-1, 1, -1])), 2);
    }

    #[test]
    fn codeword_examples() {
        assert_eq!(hadamard_codeword(&[1, 1]), vec![1, 1, 1, 1]);
        assert_eq!(hadamard_codeword(&[-1, 1]), vec![1, 1, -1, -1]);
        // The fault-injection ordering breaks the fixed example.
        assert_ne!(
            hadamard_codeword_with(&[-1, 1], BitOrder::LsbFirst),
            vec![1, 1, -1, -1]
        );
    }

    #[test]
    fn codeword_character_property() {
        for s in 0..8 {
            let h = codeword_from_index(s, 3);
            for u in 0..8 {
                for v in 0..8 {
                    assert_eq!(h[u] * h[v], h[u ^ v]);
                }
            }
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_codeword(&[1, 1, 1, 1]), Some((vec![1, 1], 1)));
        assert_eq!(decode_codeword(&[-1, -1, 1, 1]), Some((vec![-1, 1], -1)));
        for idx in 0..16usize {
            let x = string_of(idx, 4);
            for flip in 0..4 {
                let mut y = x.clone();
                y[flip] = -y[flip];
                if decode_codeword(&x).is_some() {
                    assert_eq!(decode_codeword(&y), None);
                }
            }
        }
        assert_eq!(decode_codeword(&[1, 1, 1]), None);
    }

    #[test]
    fn codeword_round_trip_exhaustive() {
        for bits in 1..=4 {
            for s in 0..1usize << bits {
                let s_str = string_of(s, bits);
                for b in [1i8, -1] {
                    let x: Vec<i8> = hadamard_codeword(&s_str).iter().map(|v| v * b).collect();
                    assert_eq!(decode_codeword(&x), Some((s_str.clone(), b)));
                }
            }
        }
    }

    #[test]
    fn gadget_library_examples() {
        let and2 = Gadget::and2();
        assert_eq!(and2.table(), &[1, 1, 1, -1]);
        assert_eq!(Gadget::ip(1, 1).unwrap().table(), and2.table());
        assert_eq!(Gadget::xor2().table(), &[1, -1, -1, 1]);
        // ADDR_2 with x = +1 (index 0) selects y_1, the first data bit.
        let addr = Gadget::addr(2, 2).unwrap();
        for y in 0..4 {
            assert_eq!(addr.eval(0, y), string_of(y, 2)[0]);
            assert_eq!(addr.eval(1, y), string_of(y, 2)[1]);
        }
        assert_eq!(BooleanFunction::parity(2).unwrap().eval_str(&[-1, -1]).unwrap(), 1);
        assert!(matches!(
            gadget_by_name("nand", None),
            Err(Error::UnknownName { .. })
        ));
        assert!(gadget_by_name("ip:2", None).is_err());
        assert_eq!(gadget_by_name("ip:2", Some(3)).unwrap().q(), 3);
        assert_eq!(gadget_by_name("and2", None).unwrap().q(), 1);
    }

    #[test]
    fn gamma_values() {
        for n in [2usize, 4, 6, 8, 10] {
            assert_eq!(SymmetricSpec::parity(n).unwrap().gamma(), 1);
            assert_eq!(SymmetricSpec::maj(n).unwrap().gamma(), 1);
            assert_eq!(SymmetricSpec::or(n).unwrap().gamma(), n - 1);
            assert_eq!(SymmetricSpec::constant(n, 1).unwrap().gamma(), n + 1);
        }
        // For odd n the parity flip at k = (n−1)/2 gives |2k − n + 1| = 0.
        assert_eq!(SymmetricSpec::parity(5).unwrap().gamma(), 0);
        assert_eq!(SymmetricSpec::parity(2).unwrap().threshold_t(), 1);
        assert_eq!(SymmetricSpec::constant(6, -1).unwrap().threshold_t(), 0);
    }

    #[test]
    fn gamma_constant_interval() {
        for n in 1..=10usize {
            for mask in 0..1u32 << (n + 1) {
                let f = SymmetricSpec::from_fn(n, |w| if mask >> w & 1 == 1 { -1 } else { 1 })
                    .unwrap();
                let t = f.threshold_t();
                if t == 0 {
                    assert!(f.is_constant());
                    continue;
                }
                for w in t..(n - t) {
                    assert_eq!(f.at_weight(w), f.at_weight(w + 1), "n={n} mask={mask}");
                }
            }
        }
    }

    #[test]
    fn symmetric_detection() {
        let f = SymmetricSpec::maj(6).unwrap().to_function().unwrap();
        assert_eq!(f.as_symmetric(), Some(SymmetricSpec::maj(6).unwrap()));
        let dictator = BooleanFunction::from_fn(2, |x| if x & 2 != 0 { -1 } else { 1 }).unwrap();
        assert_eq!(dictator.as_symmetric(), None);
    }

    #[test]
    fn parity_of_ip_is_ip() {
        for (k, t) in [(2usize, 1usize), (2, 2), (3, 1)] {
            let composed = compose(&BooleanFunction::parity(k).unwrap(), &Gadget::ip(t, 1).unwrap())
                .unwrap();
            assert_eq!(composed.table(), Gadget::ip(k * t, 1).unwrap().table());
        }
    }

    #[test]
    fn nor_of_and_is_disjointness() {
        let disj = compose(&BooleanFunction::nor(3).unwrap(), &Gadget::and2()).unwrap();
        for x in 0..8usize {
            for y in 0..8usize {
                let want = if x & y == 0 { -1 } else { 1 };
                assert_eq!(disj.eval(x, y), want);
            }
        }
    }

    #[test]
    fn hadamardize_matches_gadget_on_codewords() {
        let g = Gadget::ip(2, 1).unwrap();
        let h = Hadamardized::new(&g);
        let table = hadamardize(&g).unwrap();
        assert_eq!(table.n(), 8);
        assert_eq!(table.defined_count(), 8 * 8);
        for s in 0..4 {
            for t in 0..4 {
                let x = codeword_from_index(s, 2);
                let y = codeword_from_index(t, 2);
                let neg = |v: &[i8]| v.iter().map(|e| -e).collect::<Vec<_>>();
                assert_eq!(h.eval_strs(&x, &y), Some(g.eval(s, t)));
                assert_eq!(h.eval_strs(&neg(&x), &y), Some(g.eval(s, t)));
                assert_eq!(h.eval_strs(&x, &neg(&y)), Some(g.eval(s, t)));
                let idx = (index_of(&x) << 4) | index_of(&y);
                assert_eq!(table.eval(idx), Some(g.eval(s, t)));
            }
        }
        assert_eq!(h.eval_strs(&[1, 1, 1, -1], &[1, 1, 1, 1]), None);
        let big = Gadget::ip(5, 1).unwrap();
        assert!(matches!(hadamardize(&big), Err(Error::TableCap { .. })));
    }

    #[test]
    fn compose_tilde_undefined_block_gives_minus_one() {
        let g = hadamardize(&Gadget::and2()).unwrap();
        let r = BooleanFunction::parity(2).unwrap();
        let f = compose_tilde(&r, &g).unwrap();
        assert_eq!(f.n(), 8);
        // Block 1: x=(1,1) y=(1,−1) is H(0), H(1): AND(+1,−1) = +1.
        // Block 2: x=(1,−1) y=(1,−1): AND(−1,−1) = −1. Parity = −1.
        let input = [1, 1, 1, -1, 1, -1, 1, -1];
        assert_eq!(f.eval_str(&input).unwrap(), -1);
        // With every block defined the sign follows r; now break nothing and
        // flip block 2 to H(0),H(0): parity(+1,+1) = +1.
        let input = [1, 1, 1, -1, 1, 1, 1, 1];
        assert_eq!(f.eval_str(&input).unwrap(), 1);
        // Length-2 strings are all ± codewords, so h_AND is total. A partial
        // inner function exercises the ⋆ branch.
        let g = PartialBooleanFunction::new(1, vec![Some(1), None]).unwrap();
        let f = compose_tilde(&BooleanFunction::parity(2).unwrap(), &g).unwrap();
        assert_eq!(f.table(), &[1, -1, -1, -1]);
    }

    #[test]
    fn transitivity_of_hadamardized_ip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [4usize, 8] {
            let h = Hadamardized::new(&Gadget::ip(log2_exact(n).unwrap(), 1).unwrap());
            let perms = transitive_perms(n).unwrap();
            let rep = verify_transitive(
                |x| h.eval_strs(&x[..n], &x[n..]),
                2 * n,
                &perms,
                &[],
                0,
                &mut rng,
            )
            .unwrap();
            assert!(rep.holds() && rep.exhaustive, "{rep:?}");
        }
    }

    #[test]
    fn sigma_pi_moves_coordinates() {
        let n = 8;
        let pi = &transitive_perms(n).unwrap()[0];
        for i in 0..n {
            for j in 0..n {
                let p = sigma(n, i ^ j).unwrap().after(pi);
                assert_eq!(p.map[i], n + j);
            }
        }
    }

    #[test]
    fn dictator_is_not_transitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let swap = CoordPerm::new("swap", vec![1, 0]).unwrap();
        let rep = verify_transitive(|x| Some(x[0]), 2, &[swap], &[], 0, &mut rng).unwrap();
        assert!(!rep.invariant);
        assert!(!rep.holds());
    }

    #[test]
    fn table_file_round_trip() {
        let f = PartialBooleanFunction::new(2, vec![Some(1), None, Some(-1), Some(1)]).unwrap();
        let text = format_table(&f);
        assert_eq!(text, "n=2\n1 * -1 1\n");
        assert_eq!(parse_table(&text).unwrap(), f);
        assert!(matches!(parse_table("n=2\n1 1 1"), Err(Error::TableLength { .. })));
        assert!(matches!(parse_table("2\n1 1 1 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_table("n=1\n1 0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn table_validation() {
        assert!(matches!(
            BooleanFunction::new(1, vec![1, 0]),
            Err(Error::BadTableEntry { position: 1, .. })
        ));
        assert!(matches!(
            BooleanFunction::new(21, vec![]),
            Err(Error::TableCap { .. })
        ));
        assert!(Gadget::new("bad", 1, 1, vec![1, 1, 1, -1], 0).is_err());
    }

    proptest! {
        #[test]
        fn hadamardize_sign_invariance(s in 0usize..8, t in 0usize..8, bx: bool, by: bool) {
            let g = Gadget::ip(3, 1).unwrap();
            let h = Hadamardized::new(&g);
            let sx = if bx { -1 } else { 1 };
            let sy = if by { -1 } else { 1 };
            let x: Vec<i8> = codeword_from_index(s, 3).iter().map(|v| v * sx).collect();
            let y: Vec<i8> = codeword_from_index(t, 3).iter().map(|v| v * sy).collect();
            prop_assert_eq!(h.eval_strs(&x, &y), Some(g.eval(s, t)));
        }

        #[test]
        fn decode_rejects_or_recovers(x in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 8)) {
            match decode_codeword(&x) {
                Some((s, b)) => {
                    let back: Vec<i8> = hadamard_codeword(&s).iter().map(|v| v * b).collect();
                    prop_assert_eq!(back, x);
                }
                None => {
                    for s in 0..8 {
                        let c = codeword_from_index(s, 3);
                        let neg: Vec<i8> = c.iter().map(|v| -v).collect();
                        prop_assert!(c != x && neg != x);
                    }
                }
            }
        }
    }
}
