//! Distance-preserving and distance-increasing mappings from ternary words
//! to permutations.
//!
//! The crate ships the explicit building-block tables, the one-trit
//! extension operator, the overlay compositions built from the tables,
//! exhaustive and sampled verifiers, a backtracking table search, and
//! permutation-array construction with the resulting `P(n, d)` bounds.

pub mod compose;
pub mod error;
pub mod mapping;
pub mod packed;
pub mod pa;
pub mod recursion;
pub mod search;
pub mod tables;
pub mod verify;
pub mod word;

pub use compose::{compose_p130, compose_p91, compose_u, compose_v, Composite, OverlaySpec};
pub use error::{Error, Result, TableProblem};
pub use mapping::{Mapping, MappingKind};
pub use pa::{
    bound, build_code, build_pa, A3Table, Bound, Clause, CodeSpec, PermutationArray, TernaryCode,
};
pub use recursion::{certify_base, extend_once, extend_to, EligibilityCertificate};
pub use search::{portfolio, search, SearchOutcome, SearchProblem, SearchRun, SearchStats};
pub use tables::{builtin_constraints, check_constraints, ConstraintSet, MappingTable};
pub use verify::{
    verify, verify_pa, verify_projected, PaReport, Strategy, Verdict, VerificationJob,
    VerificationReport,
};
pub use word::{
    hamming_distance, project_out, swap_values, DistanceMode, IndexSet, Permutation, TernaryWord,
};
