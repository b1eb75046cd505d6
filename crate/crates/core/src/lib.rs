//! Six-vertex model on a `2n x m` lattice with domain-wall boundaries and a
//! partially reflecting end: state enumeration, brute-force and determinant
//! partition functions, exact state counts, the matrix bijection and a seeded
//! verification suite.

pub mod asm;
pub mod counting;
pub mod detform;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod linalg;
pub mod rng;
pub mod tolerances;
pub mod verify;
pub mod weights;

pub use asm::{
    enumerate_matrices, matrix_to_state, state_to_matrix, validate_matrix, AsmMatrix,
    MatrixViolation,
};
pub use counting::{
    count_nk, count_nk_hypersum, count_total, count_total_with, CountMethod, CountReport,
};
pub use detform::{
    det_partition, det_partition_appendix, homogeneous_limit, DetReport, Formula, LimitScheme,
};
pub use error::{Error, Result};
pub use lattice::{
    enumerate_states, parse_state, serialize_state, validate_state, ArrowDir, LatticeSize,
    LatticeState, TurnKind, VertexKind, Violation,
};
pub use linalg::C64;
pub use tolerances::Tolerances;
pub use verify::{run_check, run_suite, CheckReport, SuiteReport, VerifyConfig};
pub use weights::{partition_brute, partition_brute_fixed_k, sample_params, ModelParams};
