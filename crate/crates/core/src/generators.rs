//! State generators: Bell states, Werner family, products and seeded random
//! ensembles (Haar pure states, Ginibre-induced mixed states).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qstate::{kron2, CMatrix2, CMatrix4, DensityMatrix, TOL_HERMITIAN, TOL_PSD, TOL_TRACE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];

    /// Amplitudes over `|HH>, |HV>, |VH>, |VV>`.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellKind::PsiPlus => [0.0, h, h, 0.0],
            BellKind::PsiMinus => [0.0, h, -h, 0.0],
            BellKind::PhiPlus => [h, 0.0, 0.0, h],
            BellKind::PhiMinus => [h, 0.0, 0.0, -h],
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        })
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psi+" | "psiplus" => Ok(BellKind::PsiPlus),
            "psi-" | "psiminus" | "singlet" => Ok(BellKind::PsiMinus),
            "phi+" | "phiplus" => Ok(BellKind::PhiPlus),
            "phi-" | "phiminus" => Ok(BellKind::PhiMinus),
            _ => Err(Error::InvalidParameter(format!("unknown Bell state {s:?}"))),
        }
    }
}

fn projector(amps: &[Complex64; 4]) -> CMatrix4 {
    CMatrix4::from_fn(|r, c| amps[r] * amps[c].conj())
}

pub fn bell(kind: BellKind) -> DensityMatrix {
    DensityMatrix::new_unchecked(projector(&kind.amplitudes().map(Complex64::from)))
}

/// `p |Psi-><Psi-| + (1 - p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "Werner weight p = {p} outside [0, 1]"
        )));
    }
    let singlet = *bell(BellKind::PsiMinus).matrix();
    let mixed = CMatrix4::identity() * Complex64::from(0.25);
    Ok(DensityMatrix::new_unchecked(
        singlet * Complex64::from(p) + mixed * Complex64::from(1.0 - p),
    ))
}

/// Checks a single-qubit density matrix.
pub fn validate_qubit(m: &CMatrix2) -> Result<()> {
    let herm = (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let trace = (m.trace() - Complex64::from(1.0)).norm();
    // eigenvalues of a 2x2 Hermitian matrix
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let lmin = 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt();
    if herm > TOL_HERMITIAN || trace > TOL_TRACE || lmin < -TOL_PSD {
        return Err(Error::InvalidParameter(format!(
            "invalid single-qubit state (hermiticity {herm:e}, trace error {trace:e}, min eigenvalue {lmin:e})"
        )));
    }
    Ok(())
}

/// `rho_A ⊗ rho_B`.
pub fn product(rho_a: &CMatrix2, rho_b: &CMatrix2) -> Result<DensityMatrix> {
    validate_qubit(rho_a)?;
    validate_qubit(rho_b)?;
    DensityMatrix::validate(kron2(rho_a, rho_b))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random `n × n` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::from(1.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary_2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix2 {
    let u = haar_unitary(2, rng);
    CMatrix2::from_fn(|r, c| u[(r, c)])
}

/// `U_A ⊗ U_B` with independent Haar factors.
pub fn random_local_unitary<R: Rng + ?Sized>(rng: &mut R) -> CMatrix4 {
    let ua = haar_unitary_2(rng);
    let ub = haar_unitary_2(rng);
    kron2(&ua, &ub)
}

pub fn random_pure_with<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let u = haar_unitary(4, rng);
    let psi = [u[(0, 0)], u[(1, 0)], u[(2, 0)], u[(3, 0)]];
    DensityMatrix::new_unchecked(projector(&psi))
}

pub fn random_mixed_with<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let g = CMatrix4::from_fn(|_, _| complex_gaussian(rng));
    let w = g * g.adjoint();
    let tr = w.trace().re;
    let mut m = w / Complex64::from(tr);
    // exact Hermitian symmetry regardless of rounding in the product
    m = (m + m.adjoint()) * Complex64::from(0.5);
    DensityMatrix::new_unchecked(m)
}

/// Ginibre-induced single-qubit mixed state.
pub fn random_qubit_with<R: Rng + ?Sized>(rng: &mut R) -> CMatrix2 {
    let g = CMatrix2::from_fn(|_, _| complex_gaussian(rng));
    let w = g * g.adjoint();
    let m = w / Complex64::from(w.trace().re);
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// Convex mixture of `terms` random product states with random weights.
pub fn random_separable_with<R: Rng + ?Sized>(rng: &mut R, terms: usize) -> DensityMatrix {
    let weights: Vec<f64> = (0..terms.max(1))
        .map(|_| rng.random::<f64>() + 1e-3)
        .collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix4::zeros();
    for w in weights {
        let a = random_qubit_with(rng);
        let b = random_qubit_with(rng);
        m += kron2(&a, &b) * Complex64::from(w / total);
    }
    DensityMatrix::new_unchecked(m)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random pure state, deterministic in `seed`.
pub fn random_pure(seed: u64) -> DensityMatrix {
    random_pure_with(&mut rng_from_seed(seed))
}

/// Ginibre-induced mixed state `G G† / tr(G G†)`, deterministic in `seed`.
pub fn random_mixed(seed: u64) -> DensityMatrix {
    random_mixed_with(&mut rng_from_seed(seed))
}
