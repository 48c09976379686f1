//! Two-qubit density matrices.
//!
//! Basis order is `|HH>, |HV>, |VH>, |VV>` with qubit 1 as the first tensor
//! factor, so the row index of an entry is `2 * q1 + q2`.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub type CMatrix2 = Matrix2<Complex64>;
pub type CMatrix4 = Matrix4<Complex64>;

pub const TOL_HERMITIAN: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `sigma_0..sigma_3` (identity, X, Y, Z).
pub fn pauli(mu: usize) -> CMatrix2 {
    match mu {
        0 => CMatrix2::new(ONE, ZERO, ZERO, ONE),
        1 => CMatrix2::new(ZERO, ONE, ONE, ZERO),
        2 => CMatrix2::new(ZERO, -I, I, ZERO),
        3 => CMatrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {mu} out of range"),
    }
}

/// `a ⊗ b` for single-qubit operators.
pub fn kron2(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    CMatrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending. Only the Hermitian part
/// of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix4) -> [f64; 4] {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigenvalues();
    let mut out = [eig[0], eig[1], eig[2], eig[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// A validated two-qubit state: Hermitian, unit trace and positive
/// semidefinite, each within `1e-10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMatrix4);

impl DensityMatrix {
    /// Checks every invariant and reports all violations together.
    pub fn validate(m: CMatrix4) -> Result<Self> {
        let mut violations = Vec::new();

        let mut herm = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                herm = herm.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        if !herm.is_finite() || herm > TOL_HERMITIAN {
            violations.push(Violation::NotHermitian(herm));
        }

        let trace_dev = (m.trace() - ONE).norm();
        if !trace_dev.is_finite() || trace_dev > TOL_TRACE {
            violations.push(Violation::TraceNotOne(trace_dev));
        }

        if herm.is_finite() {
            let lmin = hermitian_eigenvalues(&m)[0];
            if lmin < -TOL_PSD {
                violations.push(Violation::NotPositive(lmin));
            }
        }

        if violations.is_empty() {
            Ok(DensityMatrix(m))
        } else {
            Err(Error::InvalidState(violations))
        }
    }

    /// Wraps a matrix that is a density matrix by construction.
    pub(crate) fn new_unchecked(m: CMatrix4) -> Self {
        DensityMatrix(m)
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Eigenvalues in ascending order, with values inside the PSD tolerance
    /// clamped to zero.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.0).map(|l| if l < 0.0 { 0.0 } else { l })
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    /// `U rho U^dagger`. `U` must be unitary.
    pub fn conjugate_by(&self, u: &CMatrix4) -> DensityMatrix {
        let m = u * self.0 * u.adjoint();
        DensityMatrix(m)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(s)?;
        Self::validate(file.to_matrix())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from(self)).expect("state file serializes")
    }
}

/// On-disk state schema: `{ "matrix": [[ [re, im] x4 ] x4] }`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub matrix: [[[f64; 2]; 4]; 4],
}

impl StateFile {
    pub fn to_matrix(&self) -> CMatrix4 {
        CMatrix4::from_fn(|r, c| {
            let [re, im] = self.matrix[r][c];
            Complex64::new(re, im)
        })
    }
}

impl From<&DensityMatrix> for StateFile {
    fn from(rho: &DensityMatrix) -> Self {
        let mut matrix = [[[0.0; 2]; 4]; 4];
        for (r, row) in matrix.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let z = rho.0[(r, c)];
                *cell = [z.re, z.im];
            }
        }
        StateFile { matrix }
    }
}

/// Transposes the second qubit: `(2i+j, 2k+l) -> (2i+l, 2k+j)`.
pub fn partial_transpose(rho: &DensityMatrix) -> CMatrix4 {
    partial_transpose_matrix(&rho.0)
}

pub fn partial_transpose_matrix(m: &CMatrix4) -> CMatrix4 {
    let mut out = CMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + l, 2 * k + j)] = m[(2 * i + j, 2 * k + l)];
                }
            }
        }
    }
    out
}

/// `Pi_n = tr[(rho^Gamma)^n]` for n = 2, 3, 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PTMoments {
    pub pi2: f64,
    pub pi3: f64,
    pub pi4: f64,
}

pub fn pt_moments(rho: &DensityMatrix) -> PTMoments {
    let r = partial_transpose(rho);
    let r2 = r * r;
    PTMoments {
        pi2: r2.trace().re,
        pi3: (r2 * r).trace().re,
        pi4: (r2 * r2).trace().re,
    }
}

/// Reference negativity `2 max(0, -lambda_min(rho^Gamma))` from a dense
/// Hermitian eigensolver.
pub fn negativity_oracle(rho: &DensityMatrix) -> f64 {
    let lmin = hermitian_eigenvalues(&partial_transpose(rho))[0];
    (2.0 * (-lmin).max(0.0)).min(1.0)
}

/// Determinant of `rho^Gamma` computed directly.
pub fn pt_determinant(rho: &DensityMatrix) -> f64 {
    partial_transpose(rho).determinant().re
}

/// Full Pauli correlation tensor `T[mu][nu] = tr[(sigma_mu ⊗ sigma_nu) rho]`.
///
/// `T[0][0] = 1`, row 0 holds `p`, column 0 holds `s` and the 3×3 block is
/// `beta`.
pub fn correlation_tensor(rho: &DensityMatrix) -> Matrix4<f64> {
    Matrix4::from_fn(|mu, nu| (kron2(&pauli(mu), &pauli(nu)) * rho.0).trace().re)
}

/// Bloch vectors `s` (qubit 1), `p` (qubit 2) and correlation matrix `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    pub s: Vector3<f64>,
    pub p: Vector3<f64>,
    pub beta: Matrix3<f64>,
}

impl PauliDecomposition {
    pub fn from_correlation_tensor(t: &Matrix4<f64>) -> Self {
        PauliDecomposition {
            s: Vector3::new(t[(1, 0)], t[(2, 0)], t[(3, 0)]),
            p: Vector3::new(t[(0, 1)], t[(0, 2)], t[(0, 3)]),
            beta: t.fixed_view::<3, 3>(1, 1).into_owned(),
        }
    }

    /// `1/4 (1⊗1 + s_i sigma_i⊗1 + p_j 1⊗sigma_j + beta_ij sigma_i⊗sigma_j)`.
    pub fn reconstruct(&self) -> CMatrix4 {
        let mut m = kron2(&pauli(0), &pauli(0));
        for i in 0..3 {
            m += kron2(&pauli(i + 1), &pauli(0)) * Complex64::from(self.s[i]);
            m += kron2(&pauli(0), &pauli(i + 1)) * Complex64::from(self.p[i]);
            for j in 0..3 {
                m += kron2(&pauli(i + 1), &pauli(j + 1)) * Complex64::from(self.beta[(i, j)]);
            }
        }
        m * Complex64::from(0.25)
    }
}

pub fn pauli_decompose(rho: &DensityMatrix) -> PauliDecomposition {
    PauliDecomposition::from_correlation_tensor(&correlation_tensor(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{bell, werner, BellKind};

    fn max_abs(m: &CMatrix4) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityMatrix::validate(CMatrix4::identity() * Complex64::from(0.25)).unwrap();
        for l in rho.eigenvalues() {
            assert!((l - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn singlet_is_rank_one() {
        let rho = DensityMatrix::validate(*bell(BellKind::PsiMinus).matrix()).unwrap();
        assert_eq!(rho.rank(1e-9), 1);
    }

    #[test]
    fn constructed_violation_reports_every_invariant() {
        let diag =
            |d: [f64; 4]| CMatrix4::from_diagonal(&nalgebra::Vector4::from(d.map(Complex64::from)));
        // trace is exactly 1 here, so only positivity fails
        let err = DensityMatrix::validate(diag([0.6, 0.6, -0.1, -0.1])).unwrap_err();
        assert_eq!(err.violations().len(), 1);
        assert!(
            matches!(err.violations()[0], Violation::NotPositive(l) if (l + 0.1).abs() < 1e-12)
        );

        let err = DensityMatrix::validate(diag([0.7, 0.6, -0.1, -0.1])).unwrap_err();
        let v = err.violations();
        assert_eq!(v.len(), 2);
        assert!(matches!(v[0], Violation::TraceNotOne(d) if (d - 0.1).abs() < 1e-12));
        assert!(matches!(v[1], Violation::NotPositive(l) if (l + 0.1).abs() < 1e-12));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = CMatrix4::identity() * Complex64::from(0.25);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        let err = DensityMatrix::validate(m).unwrap_err();
        assert!(
            matches!(err.violations()[0], Violation::NotHermitian(d) if (d - 0.1).abs() < 1e-12)
        );
    }

    #[test]
    fn singlet_partial_transpose_spectrum() {
        let pt = partial_transpose(&bell(BellKind::PsiMinus));
        let ev = hermitian_eigenvalues(&pt);
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn identity_partial_transpose_is_identity() {
        let rho = werner(0.0).unwrap();
        assert!(max_abs(&(partial_transpose(&rho) - rho.matrix())) < 1e-15);
    }

    #[test]
    fn moments_of_endpoints() {
        let m = pt_moments(&werner(0.0).unwrap());
        assert!((m.pi2 - 0.25).abs() < 1e-15);
        assert!((m.pi3 - 1.0 / 16.0).abs() < 1e-15);
        assert!((m.pi4 - 1.0 / 64.0).abs() < 1e-15);
        let m = pt_moments(&bell(BellKind::PsiMinus));
        assert!((m.pi2 - 1.0).abs() < 1e-14);
        assert!((m.pi3 - 0.25).abs() < 1e-14);
        assert!((m.pi4 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn werner_moments_match_spectrum() {
        let p: f64 = 0.5;
        let m = pt_moments(&werner(p).unwrap());
        let ev = [
            (1.0 + p) / 4.0,
            (1.0 + p) / 4.0,
            (1.0 + p) / 4.0,
            (1.0 - 3.0 * p) / 4.0,
        ];
        let pow = |n: i32| ev.iter().map(|l| l.powi(n)).sum::<f64>();
        assert!((m.pi2 - pow(2)).abs() < 1e-14);
        assert!((m.pi3 - pow(3)).abs() < 1e-14);
        assert!((m.pi4 - pow(4)).abs() < 1e-14);
    }

    #[test]
    fn oracle_on_bell_and_werner() {
        assert!((negativity_oracle(&bell(BellKind::PsiMinus)) - 1.0).abs() < 1e-12);
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let n = negativity_oracle(&werner(p).unwrap());
            assert!((n - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_decomposition_examples() {
        let d = pauli_decompose(&werner(0.0).unwrap());
        assert!(d.s.norm() < 1e-15 && d.p.norm() < 1e-15 && d.beta.norm() < 1e-15);

        let d = pauli_decompose(&bell(BellKind::PsiMinus));
        assert!(d.s.norm() < 1e-15 && d.p.norm() < 1e-15);
        assert!((d.beta + Matrix3::identity()).norm() < 1e-14);

        let mut hh = CMatrix4::zeros();
        hh[(0, 0)] = ONE;
        let d = pauli_decompose(&DensityMatrix::validate(hh).unwrap());
        assert_eq!(d.s, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(d.p, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(d.beta, Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0)));
    }

    #[test]
    fn state_file_round_trip() {
        let rho = werner(0.3).unwrap();
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert_eq!(rho, back);
    }

    #[test]
    fn state_file_rejects_invalid_state() {
        let json = r#"{"matrix": [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(matches!(
            DensityMatrix::from_json(json),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            DensityMatrix::from_json("{\"matrix\": []}"),
            Err(Error::Json(_))
        ));
    }
}
