//! Negativity as the positive root of the characteristic quartic
//! `3N^4 + 6N^3 + a2 N^2 + a1 N + a0 = 0`, and the determinant witness.
//!
//! The quartic is `48 det(rho^Gamma + N/2)`, so its roots are `-2 lambda_i` for
//! the eigenvalues of the partial transpose and at most one is positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multicopy::GTable;
use crate::qstate::PTMoments;
use crate::quartic::{bracketed_root, quartic_roots};

pub const A3: f64 = 6.0;
pub const A4: f64 = 3.0;

/// Roots at or below this are not counted as positive.
pub const TOL_ROOT: f64 = 1e-6;
/// Largest imaginary part accepted for a real root.
pub const TOL_IMAG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl QuarticCoefficients {
    /// `[a0, a1, a2, a3, a4]`.
    pub fn as_array(&self) -> [f64; 5] {
        [self.a0, self.a1, self.a2, A3, A4]
    }

    pub fn eval(&self, n: f64) -> f64 {
        crate::quartic::eval_real(&self.as_array(), n)
    }

    pub fn max_abs_diff(&self, other: &QuarticCoefficients) -> f64 {
        (self.a0 - other.a0)
            .abs()
            .max((self.a1 - other.a1).abs())
            .max((self.a2 - other.a2).abs())
    }
}

/// `det rho^Gamma` from the moments of the partial transpose.
pub fn det_pt_from_moments(m: &PTMoments) -> f64 {
    (1.0 - 6.0 * m.pi4 + 8.0 * m.pi3 + 3.0 * m.pi2 * m.pi2 - 6.0 * m.pi2) / 24.0
}

pub fn coeffs_from_moments(m: &PTMoments, det_pt: f64) -> QuarticCoefficients {
    QuarticCoefficients {
        a0: 48.0 * det_pt,
        a1: 4.0 * (1.0 - 3.0 * m.pi2 + 2.0 * m.pi3),
        a2: 6.0 * (1.0 - m.pi2),
    }
}

/// The eight observables that fix `a0 = 48 det rho^Gamma`.
///
/// `g13`, `g24` and `g13_46` are deliberately absent: detecting entanglement
/// needs fewer measurements than quantifying it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessObservables {
    pub g12: f64,
    pub g14: f64,
    pub g13_24: f64,
    pub g14_23: f64,
    pub g14_36: f64,
    pub g14_36_52: f64,
    pub g13_46_57_28: f64,
    pub g14_36_58: f64,
}

impl From<&GTable> for WitnessObservables {
    fn from(g: &GTable) -> Self {
        WitnessObservables {
            g12: g.g12,
            g14: g.g14,
            g13_24: g.g13_24,
            g14_23: g.g14_23,
            g14_36: g.g14_36,
            g14_36_52: g.g14_36_52,
            g13_46_57_28: g.g13_46_57_28,
            g14_36_58: g.g14_36_58,
        }
    }
}

impl WitnessObservables {
    pub fn a0(&self) -> f64 {
        let (g12, g14) = (self.g12, self.g14);
        -16.0
            * (g12.powi(3)
                + 2.0 * self.g14_36_52
                + 3.0
                    * (self.g13_24 * self.g13_24 - g12 * g12 * g14 - g12 * self.g14_23
                        + g14 * self.g14_23)
                - 6.0 * (self.g13_46_57_28 - g12 * self.g14_36 + self.g14_36_58))
    }
}

pub fn coeffs_from_g(g: &GTable) -> QuarticCoefficients {
    let g12 = g.g12;
    let a1 = 24.0 * (g12 * g12 - g.g14_23 - g.g13_24 + 2.0 * (g.g13_46 - g12 * g.g14 + g.g14_36))
        - 32.0 * (g12.powi(3) - 3.0 * g12 * g.g14_23 + 2.0 * g.g14_36_52);
    QuarticCoefficients {
        a0: WitnessObservables::from(g).a0(),
        a1,
        a2: 12.0 * (g.g13 - 2.0 * g.g13_24 + g.g24),
    }
}

/// Distinct positive real roots, ascending. Roots closer than `TOL_ROOT` are
/// merged into their largest member.
pub fn positive_roots(c: &QuarticCoefficients) -> Vec<f64> {
    let mut pos: Vec<f64> = quartic_roots(c.as_array())
        .iter()
        .filter(|z| z.im.abs() < TOL_IMAG && z.re > TOL_ROOT)
        .map(|z| z.re)
        .collect();
    pos.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(pos.len());
    for r in pos {
        match merged.last_mut() {
            Some(last) if r - *last <= TOL_ROOT => *last = r,
            _ => merged.push(r),
        }
    }
    if merged.is_empty() && c.a0 < 0.0 {
        // p(0) = a0 < 0 and p -> +inf, so a positive root exists even when the
        // closed form returned it with a spurious imaginary part
        let hi = 1.0
            + [c.a0, c.a1, c.a2, A3]
                .iter()
                .map(|a| a.abs())
                .fold(0.0, f64::max)
                / A4;
        let r = bracketed_root(&c.as_array(), 0.0, hi);
        if r > 0.0 {
            merged.push(r);
        }
    }
    merged
}

/// The unique positive root clamped to `[0, 1]`, or 0 when there is none.
pub fn solve_negativity(c: &QuarticCoefficients) -> Result<f64> {
    let roots = positive_roots(c);
    match roots.as_slice() {
        [] => Ok(0.0),
        [r] => Ok(r.clamp(0.0, 1.0)),
        _ => Err(Error::AmbiguousRoots { roots }),
    }
}

/// Negativity with the finite-statistics policy applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativitySolution {
    pub negativity: f64,
    /// Several distinct positive roots were found and the largest was taken.
    pub ambiguous: bool,
}

/// Like [`solve_negativity`], but resolves multiple positive roots (only
/// possible with noisy coefficients) by taking the largest.
pub fn solve_negativity_lenient(c: &QuarticCoefficients) -> NegativitySolution {
    match solve_negativity(c) {
        Ok(n) => NegativitySolution {
            negativity: n,
            ambiguous: false,
        },
        Err(Error::AmbiguousRoots { roots }) => NegativitySolution {
            negativity: roots.iter().copied().fold(0.0, f64::max).clamp(0.0, 1.0),
            ambiguous: true,
        },
        Err(e) => unreachable!("solve_negativity only reports ambiguity: {e}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub det_pt: f64,
    pub entangled: bool,
    /// `|det_pt|`.
    pub margin: f64,
}

/// Anything that determines `a0 = 48 det rho^Gamma`.
pub trait WitnessInput {
    fn a0(&self) -> f64;
}

impl WitnessInput for PTMoments {
    fn a0(&self) -> f64 {
        48.0 * det_pt_from_moments(self)
    }
}

impl WitnessInput for WitnessObservables {
    fn a0(&self) -> f64 {
        WitnessObservables::a0(self)
    }
}

impl WitnessInput for QuarticCoefficients {
    fn a0(&self) -> f64 {
        self.a0
    }
}

/// Exact-data witness: entangled iff `det rho^Gamma < 0`.
pub fn witness<W: WitnessInput + ?Sized>(input: &W) -> WitnessResult {
    witness_with_tolerance(input, 0.0)
}

/// Entangled iff `det rho^Gamma < -tol`.
pub fn witness_with_tolerance<W: WitnessInput + ?Sized>(input: &W, tol: f64) -> WitnessResult {
    let det_pt = input.a0() / 48.0;
    WitnessResult {
        det_pt,
        entangled: det_pt < -tol,
        margin: det_pt.abs(),
    }
}
