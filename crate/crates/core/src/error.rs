use std::fmt;

use thiserror::Error;

use crate::multicopy::Observable;

/// One violated density-matrix invariant, with the measured size of the violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    /// Largest `|m_ij - conj(m_ji)|`.
    NotHermitian(f64),
    /// Measured `|tr m - 1|`.
    TraceNotOne(f64),
    /// Most negative eigenvalue of the Hermitian part.
    NotPositive(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotHermitian(d) => write!(f, "not Hermitian (max deviation {d:e})"),
            Violation::TraceNotOne(d) => write!(f, "trace differs from 1 by {d:e}"),
            Violation::NotPositive(l) => write!(f, "not positive (min eigenvalue {l:e})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density matrix: {}", join(.0))]
    InvalidState(Vec<Violation>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("ambiguous negativity: {} positive roots {roots:?}", .roots.len())]
    AmbiguousRoots { roots: Vec<f64> },

    #[error("invalid event count Z = {0}, need Z >= 1")]
    InvalidZ(u64),

    #[error("unknown interferometer configuration {0:?}")]
    UnknownConfiguration(String),

    #[error("missing observables: {}", .0.iter().map(|o| o.name()).collect::<Vec<_>>().join(", "))]
    MissingObservable(Vec<Observable>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// The violations carried by an [`Error::InvalidState`], empty otherwise.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::InvalidState(v) => v,
            _ => &[],
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
