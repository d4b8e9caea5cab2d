//! Lower-bound toolbox: Fourier spectra, LP-based approximate degree and
//! spectral norm, discrepancy and reductions.

pub mod degree;
pub mod disc;
pub mod fourier;
pub mod reduction;
pub mod simplex;

pub use degree::{approx_degree, approx_spectral_norm, best_error, dual_witness, DualWitness};
pub use disc::{
    balanced_for, composed_discrepancy_check, discrepancy, gdm_bound, is_balanced, lambda_construct, xor_lemma_check,
    Distribution,
};
pub use fourier::{walsh_hadamard, Spectrum};
pub use reduction::{check_addr_reduction, check_reduction, embed_reduction, ip_projection_check, BoxGate};
