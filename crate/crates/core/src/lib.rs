//! Two-qubit entanglement from multicopy singlet projections.
//!
//! The negativity of a two-qubit state is the positive root of a quartic whose
//! coefficients are fixed by 11 expectations of products of singlet
//! projectors on up to four copies of the state; the sign of the lowest
//! coefficient (8 of those expectations) witnesses entanglement. Singlet
//! projections are what a balanced beam splitter measures through
//! anti-coalescence, and [`interferometer`] simulates the four interferometer
//! configurations that collect all of them.
//!
//! Every quantity is also computed through an independent route (Pauli
//! decomposition, dense `rho^{⊗k}` traces, or an eigensolver on the partial
//! transpose) so the multicopy formulas can be checked against ground truth.

pub mod cli;
pub mod error;
pub mod generators;
pub mod interferometer;
pub mod invariants;
pub mod multicopy;
pub mod negativity;
pub mod qstate;
pub mod quartic;
pub mod report;

pub use error::{Error, Result, Violation};
pub use generators::BellKind;
pub use invariants::InvariantSet;
pub use multicopy::{GTable, Observable, Pairing};
pub use negativity::{QuarticCoefficients, WitnessResult};
pub use qstate::{DensityMatrix, PTMoments, PauliDecomposition};
