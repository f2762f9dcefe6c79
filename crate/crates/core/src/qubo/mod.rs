//! QUBO encoding of modularity maximization.
//!
//! Node `i` in group `k` is the binary variable `x_ik`. The assembled
//! Hamiltonian adds a one-hot penalty per node and a non-empty penalty per
//! group to the negated modularity.

mod build;
pub mod ising;
mod layout;
mod matrix;
mod model;

pub use build::{
    build_assignment_constraint, build_modularity_objective, build_nonempty_constraint,
    dense_objective_terms, max_abs_modularity_coefficient, FactoredModularity, InequalityPenalty,
    NonEmptyPenalty,
};
pub use ising::ising_to_qubo;
pub use layout::{ConstraintMode, VariableLayout};
pub use matrix::{QuboBuilder, QuboMatrix};
pub use model::{
    assemble, decode, encode, CommunityFields, CommunityModel, Decoded, Objective, PenaltyWeights,
    DEFAULT_DENSE_TERM_LIMIT,
};

use crate::error::{Error, Result};

/// A binary quadratic model the annealer can drive.
///
/// `Fields` is whatever per-state cache makes [`flip_delta`] `O(1)`;
/// [`commit_flip`] must be called with the bits as they were *before* the
/// flip.
///
/// [`flip_delta`]: Hamiltonian::flip_delta
/// [`commit_flip`]: Hamiltonian::commit_flip
pub trait Hamiltonian: Sync {
    type Fields: Clone + Send + Sync;

    fn dimension(&self) -> usize;

    /// Full recomputation of the energy.
    fn energy(&self, bits: &[bool]) -> f64;

    fn init_fields(&self, bits: &[bool]) -> Self::Fields;

    fn flip_delta(&self, fields: &Self::Fields, bits: &[bool], a: usize) -> f64;

    fn commit_flip(&self, fields: &mut Self::Fields, bits: &[bool], a: usize);

    /// Calls `visit(a, Δ(a))` for every `a` in `range`, in increasing order.
    /// Values must equal [`flip_delta`](Hamiltonian::flip_delta) exactly.
    #[inline]
    fn visit_deltas<F: FnMut(usize, f64)>(
        &self,
        fields: &Self::Fields,
        bits: &[bool],
        range: std::ops::Range<usize>,
        mut visit: F,
    ) {
        for a in range {
            visit(a, self.flip_delta(fields, bits, a));
        }
    }
}

/// Energy of `bits`, checking the length first.
pub fn energy<H: Hamiltonian + ?Sized>(model: &H, bits: &[bool]) -> Result<f64> {
    if bits.len() != model.dimension() {
        return Err(Error::Dimension {
            expected: model.dimension(),
            got: bits.len(),
        });
    }
    Ok(model.energy(bits))
}
