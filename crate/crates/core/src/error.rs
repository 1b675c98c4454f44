use thiserror::Error;

use crate::opalg::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    /// Total operator degree above what the reordering coefficients support.
    #[error("operator degree {degree} exceeds the supported limit {limit}")]
    DegreeLimit { degree: u32, limit: u32 },

    #[error("moment of degree {degree} requested for {index}, but only degree <= {max_degree} is reliable")]
    MomentDegree {
        index: MultiIndex,
        degree: u32,
        max_degree: u32,
    },

    #[error("basis pair ({i}, {j}) needs moments of degree {degree}, above the table limit {max_degree}")]
    BasisDegree {
        i: usize,
        j: usize,
        degree: u32,
        max_degree: u32,
    },

    #[error("moment {0} is missing from the imported table")]
    MissingMoment(MultiIndex),

    #[error(
        "Fock truncation inadequate: tail mass {tail_mass:.3e} above threshold {threshold:.1e}"
    )]
    Truncation { tail_mass: f64, threshold: f64 },

    #[error("operator degree {degree} exceeds the cutoff margin {limit}")]
    CutoffMargin { degree: u32, limit: u32 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("determinant has imaginary residue {imag:.3e} (scale {scale:.3e})")]
    ComplexDeterminant { imag: f64, scale: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
