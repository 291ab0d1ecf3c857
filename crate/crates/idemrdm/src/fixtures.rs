//! The two-branch reference fixture used across tests and examples.
//!
//! Eight fermionic modes, the first four on the left. The state is an equal
//! superposition of two three-particle branches that share mode 0, each
//! pairing a distinct second left mode with a distinct right mode:
//!
//!   (|{0,1,4}> + |{0,2,5}>) / sqrt(2)
//!
//! Tracing out either side leaves an equal mixture of two orthogonal
//! occupations, so the entanglement entropy is exactly one bit.

use num_complex::Complex64;

use crate::entanglement::Bipartition;
use crate::fock::{GradedVector, OccupationState, Statistics};

pub const TWO_BRANCH_DIM: usize = 8;

pub fn two_branch_state() -> GradedVector {
    let amp = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let stats = Statistics::Fermion;
    GradedVector::from_terms(
        stats,
        TWO_BRANCH_DIM,
        [
            (
                OccupationState::new(vec![0, 1, 4], stats, TWO_BRANCH_DIM).unwrap(),
                amp,
            ),
            (
                OccupationState::new(vec![0, 2, 5], stats, TWO_BRANCH_DIM).unwrap(),
                amp,
            ),
        ],
    )
    .expect("fixture terms are canonical")
}

pub fn two_branch_bipartition() -> Bipartition {
    Bipartition::new(TWO_BRANCH_DIM, vec![0, 1, 2, 3]).expect("fixture split is valid")
}

/// The fixture as a state file, for the command-line interface and tests.
pub fn two_branch_statefile_json() -> String {
    let amp = 1.0 / 2f64.sqrt();
    serde_json::json!({
        "statistics": "fermion",
        "dim": TWO_BRANCH_DIM,
        "modes": {"L": [0, 1, 2, 3], "R": [4, 5, 6, 7]},
        "terms": [
            {"amplitude": [amp, 0.0], "orbitals": [0, 1, 4]},
            {"amplitude": [amp, 0.0], "orbitals": [0, 2, 5]}
        ]
    })
    .to_string()
}
