use thiserror::Error;

use crate::runtime::Party;

/// Errors raised anywhere in the simulator and the lower-bound toolbox.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("requested {requested} amplitudes, above the cap of {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("qubit {qubit} outside a register of {width} qubits")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("qubit {0} listed twice in one operator")]
    DuplicateQubit(usize),

    #[error("dense operator is not unitary (column deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("map is not a permutation of {size} local basis states")]
    NotPermutation { size: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },

    #[error("table entry {value} at position {position} is not in {{-1, +1}}")]
    BadTableEntry { position: usize, value: i64 },

    #[error("table with 2^{bits} entries exceeds the cap of 2^{cap_bits}")]
    TableCap { bits: usize, cap_bits: usize },

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("insufficient EPR budget: need {needed}, have {available}")]
    InsufficientEpr { needed: u64, available: u64 },

    #[error("{actor:?} cannot act on qubit {qubit} owned by {owner:?}")]
    Ownership { actor: Party, qubit: usize, owner: Party },

    #[error("joint operation `{0}` is not a registered modeled subprotocol")]
    UnregisteredJointOp(String),

    #[error("negative charge {amount} for `{label}`")]
    NegativeCharge { label: String, amount: i64 },

    #[error("auxiliary qubit left entangled (residual norm {residual:.3e})")]
    DirtyAuxiliary { residual: f64 },

    #[error("recursion depth {k} needs {steps} steps, over the budget of {budget}")]
    StepBudget { k: usize, steps: u64, budget: u64 },

    #[error("noise realization violates its contract: {0}")]
    NoiseContract(String),

    #[error("linear program {0}")]
    Lp(String),

    #[error("distribution is not balanced with respect to the gadget (bias {bias:.3e})")]
    Unbalanced { bias: f64 },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
