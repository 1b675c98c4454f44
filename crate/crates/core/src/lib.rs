//! Negative-partial-transpose detection for two-mode bosonic states.
//!
//! The crate builds Hermitian matrices of partially transposed moments
//! `⟨f_i† f_j⟩^PT` over bases of normally ordered operators and inspects their
//! minors. A negative minor proves that the partial transpose of the state is
//! not positive, which certifies entanglement. A dense partial-transpose
//! eigenvalue computation on the simulated state serves as an independent check.
//!
//! * [`opalg`]: normally ordered two-mode polynomials and their canonical order.
//! * [`states`]: truncated Fock-space density matrices and the eigenvalue oracle.
//! * [`moments`]: memoized moment tables, simulated or imported.
//! * [`criteria`]: moment matrices, the determinant hierarchy and named criteria.
//! * [`cli`]: the `ptwitness` command-line front end.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod json;
pub mod moments;
pub mod opalg;
pub mod states;

pub use criteria::{
    build_matrix, det_d, det_s, duan, duan_min, hierarchy_scan, principal_minor_search, simon_s,
    two_term_condition, MomentMatrix, OperatorBasis, Verdict, VerdictKind,
};
pub use error::{Error, Result};
pub use moments::MomentTable;
pub use opalg::{MultiIndex, NormalPolynomial};
pub use states::{FockState, StateKind, StateSpec};
