//! Dense finite-dimensional density matrices over labelled tensor layouts.
//!
//! All entropies are in bits. Spectra are computed block by block: a matrix
//! whose nonzero pattern splits into independent blocks (classical registers,
//! orthogonal erasure flags) is never diagonalized as a whole.

mod layout;
mod random;
mod spectrum;
mod state;

pub use layout::{Placement, SystemLayout};
pub use random::{conjugate, random_mixed, random_pure, random_unit_vector, random_unitary};
pub use spectrum::{hermitian_eigenvalues, shannon_bits};
pub use state::{
    conditional_entropy, conditional_mutual_information, coherent_information, entropy,
    marginal_entropy, mutual_information, partial_trace, tensor, trace_distance, CQEnsemble,
    DensityMatrix,
};
pub(crate) use state::{matrix_from_json, matrix_to_json, spectrum_entropy};

use crate::error::{domain_err, Result};

pub type C64 = num_complex::Complex<f64>;

/// H₂(x) = −x log x − (1−x) log(1−x), for x ∈ [0, 1].
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain_err(format!("binary entropy argument {x} outside [0, 1]"));
    }
    Ok(shannon_bits([x, 1.0 - x]))
}

/// g(x) = (x+1) log(x+1) − x log x, for x ≥ 0.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain_err(format!("g argument {x} must be a finite non-negative number"));
    }
    let xlogx = if x > 0.0 { x * x.log2() } else { 0.0 };
    Ok((x + 1.0) * (x + 1.0).log2() - xlogx)
}

#[cfg(test)]
mod tests;
