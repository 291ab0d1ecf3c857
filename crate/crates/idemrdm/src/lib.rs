//! Reduced density matrices and entanglement entropies of identical-particle
//! states, computed along two independently implemented routes that are
//! machine-checked against each other.
//!
//! The fast route works in the occupation-number (Fock) basis: a mode
//! bipartition factorizes every occupation exactly, up to a fermionic
//! crossing sign, and the reduced state falls out of the factorized
//! coefficients (`entanglement`). The oracle route represents the same
//! states as dense first-quantized slot tensors, imposes exchange symmetry
//! by explicit permutation sums, and traces subsystems by contracting
//! slot-subset states (`dense`). The `verify` module drives randomized
//! cross-checks of the two, including invariance under arbitrary phase
//! twists of the slot-subset decomposition, and `gns_restriction_check`
//! ties both to the operational definition of a reduced state: equal
//! expectations for all observables supported on one side.
//!
//! Overlaps of product states reduce to matrix permanents (bosons) or
//! determinants (fermions) of orbital Gram matrices (`kernels`), and
//! entropies come from a cyclic Jacobi eigensolver (`eigen`).
//!
//! ```
//! use idemrdm::{
//!     reduced_density_matrix, two_branch_bipartition, two_branch_state,
//!     von_neumann_entropy, Side,
//! };
//!
//! let rho = reduced_density_matrix(
//!     &two_branch_state(),
//!     &two_branch_bipartition(),
//!     Side::Right,
//! )?;
//! let entropy = von_neumann_entropy(&rho)?;
//! assert!((entropy - 1.0).abs() < 1e-9);
//! # Ok::<(), idemrdm::Error>(())
//! ```

pub mod dense;
pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod fixtures;
pub mod fock;
pub mod kernels;
pub mod statefile;
pub mod verify;

pub use dense::{
    basis_product_tensor, dense_from_graded, elementary_symmetrize, partial_trace_explicit,
    sea_correspondence, slot_partial_trace, subsystem_basis_states, symmetrize_explicit,
    symmetrize_raw, unit_symmetric_basis_tensor, CorrespondenceReport, LabeledTensor,
    PartialSlotVector, PhaseAssignment, DENSE_SIZE_GUARD,
};
pub use eigen::hermitian_eigenvalues;
pub use entanglement::{
    gns_restriction_check, lift_apply, lifted_expectation, reduced_density_matrix,
    reduced_density_matrix_mixed, restricted_expectation, ssr_project,
    two_particle_restriction_identity, von_neumann_entropy, Bipartition, DensityMatrix, GnsReport,
    LocalObservable, Side,
};
pub use error::{Error, Result};
pub use fixtures::{
    two_branch_bipartition, two_branch_state, two_branch_statefile_json, TWO_BRANCH_DIM,
};
pub use fock::{
    annihilate_apply, create_apply, from_orbitals, inner_product, occupation_states,
    transition_amplitude, GradedVector, OccupationState, Orbital, SingleParticleSpace, Statistics,
};
pub use kernels::{
    determinant, gram_matrix, permanent_naive, permanent_ryser, SquareMatrix, NAIVE_MAX_ORDER,
    RYSER_MAX_ORDER,
};
pub use statefile::{
    parse_state_file, parse_state_str, to_json, LoadedState, MixtureComponent, Modes, StateFile,
    TermSpec,
};
pub use verify::{
    bench_permanent_rows, equivalence_instance, equivalence_suite, BenchRow, EquivalenceOutcome,
    InstanceOutcome,
};
