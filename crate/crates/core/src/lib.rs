//! Local eigenstructure of complex matrix pencils `L(λ) = L0 + λ·L1`.
//!
//! Given a pencil and an expansion point `λ0`, the crate computes the right
//! minimal indices, the partial multiplicities at `λ0`, a right minimal
//! basis, a maximal set of root polynomials at `λ0` and a polynomial right
//! inverse of the singular part. The route is
//!
//! 1. a unitary staircase reduction of the shifted pencil ([`staircase`]),
//! 2. triangular stairs, block bidiagonalization with unit upper triangular
//!    transformations, iterative refinement and the split into a singular
//!    and a nilpotent part ([`bidiag`]),
//! 3. closed-form recurrences on the two bidiagonal pieces ([`extract`]).
//!
//! [`oracle`] recomputes the same integers from ranks of block Toeplitz
//! matrices and evaluates residual diagnostics; it shares no code path with
//! the reduction beyond the SVD-based rank primitive.

pub mod bidiag;
pub mod error;
pub mod extract;
pub mod generate;
pub mod linalg;
pub mod oracle;
pub mod pencil;
pub mod pipeline;
pub mod staircase;

pub use error::{PencilError, Result};
pub use linalg::{CMatrix, RankDecision, C64};
pub use pencil::{make_shifted, LocalIndices, Pencil, PolyMatrix, ShiftedPencil, StructuralIndices};
pub use pipeline::{analyze, Analysis, AnalysisOptions};
