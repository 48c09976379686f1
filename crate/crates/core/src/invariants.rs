//! The nine local-unitary (Makhlin) invariants that determine the negativity,
//! evaluated from the Pauli decomposition and, independently, from the
//! multicopy table.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::multicopy::GTable;
use crate::qstate::{PTMoments, PauliDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantSet {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i7: f64,
    pub i8: f64,
    pub i12: f64,
    pub i14: f64,
}

impl InvariantSet {
    pub const FIELD_NAMES: [&'static str; 9] =
        ["i1", "i2", "i3", "i4", "i5", "i7", "i8", "i12", "i14"];

    pub fn values(&self) -> [f64; 9] {
        [
            self.i1, self.i2, self.i3, self.i4, self.i5, self.i7, self.i8, self.i12, self.i14,
        ]
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &InvariantSet) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn x_combos(&self) -> XCombos {
        XCombos {
            x1: self.i2 + self.i4 + self.i7,
            x2: self.i1 + self.i12,
            x3: self.i2 * self.i2 - self.i3
                + 2.0 * (self.i5 + self.i8 + self.i14 + self.i4 * self.i7),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XCombos {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

/// `eps_ijk eps_lmn s_i p_l beta_jm beta_kn`, with the Levi-Civita product
/// replaced by its six Kronecker-delta terms.
pub fn i14_kronecker(s: &Vector3<f64>, p: &Vector3<f64>, beta: &Matrix3<f64>) -> f64 {
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                // + d_il d_jm d_kn
                total += s[i] * p[i] * beta[(j, j)] * beta[(k, k)];
                // + d_im d_jn d_kl
                total += s[i] * p[k] * beta[(j, i)] * beta[(k, j)];
                // + d_in d_jl d_km
                total += s[i] * p[j] * beta[(j, k)] * beta[(k, i)];
                // - d_il d_jn d_km
                total -= s[i] * p[i] * beta[(j, k)] * beta[(k, j)];
                // - d_im d_jl d_kn
                total -= s[i] * p[j] * beta[(j, i)] * beta[(k, k)];
                // - d_in d_jm d_kl
                total -= s[i] * p[k] * beta[(j, j)] * beta[(k, i)];
            }
        }
    }
    total
}

pub fn invariants_from_decomposition(d: &PauliDecomposition) -> InvariantSet {
    let b = &d.beta;
    let btb = b.transpose() * b;
    let sb = d.s.transpose() * b;
    let bp = b * d.p;
    InvariantSet {
        i1: b.determinant(),
        i2: btb.trace(),
        i3: (btb * btb).trace(),
        i4: d.s.norm_squared(),
        i5: sb.norm_squared(),
        i7: d.p.norm_squared(),
        i8: bp.norm_squared(),
        i12: (sb * d.p)[0],
        i14: i14_kronecker(&d.s, &d.p, b),
    }
}

pub fn invariants_from_g(g: &GTable) -> InvariantSet {
    let (g12, g13, g14, g24) = (g.g12, g.g13, g.g14, g.g24);
    InvariantSet {
        i1: -8.0 / 3.0
            * (g12 * (g12 * (4.0 * g12 - 3.0) + 6.0 * (g14 - 2.0 * g.g14_23)) + 3.0 * g.g14_23
                - 6.0 * g.g14_36
                + 8.0 * g.g14_36_52),
        i2: 1.0 + 16.0 * g.g13_24 - 4.0 * (g13 + g24),
        // expansion of <(1-4P17)(1-4P24)(1-4P35)(1-4P68)> on four copies
        i3: 1.0 - 8.0 * (g13 + g24) + 16.0 * (g13 * g13 + 4.0 * g.g13_46 + g24 * g24)
            - 128.0 * (g.g13_46_57 + g.g24_35_68)
            + 256.0 * g.g13_46_57_28,
        i4: 1.0 - 4.0 * g13,
        i5: -4.0 * g24 + 32.0 * g.g13_46 - 64.0 * g.g13_46_57 + (1.0 - 4.0 * g13).powi(2),
        i7: 1.0 - 4.0 * g24,
        i8: -4.0 * g13 + 32.0 * g.g13_46 - 64.0 * g.g24_35_68 + (1.0 - 4.0 * g24).powi(2),
        i12: 1.0 + 16.0 * g.g13_46 - 4.0 * (g13 + g24),
        i14: 16.0
            * (g12 * g12 * (1.0 - 4.0 * g14) + 2.0 * g12 * (4.0 * g.g14_36 - g14) - g.g14_23
                + 4.0 * g14 * g.g14_23
                + 2.0 * g.g14_36
                - 8.0 * g.g14_36_58),
    }
}

/// `det beta` from its power-sum moments.
pub fn det_beta_from_moments(trb1: f64, trb2: f64, trb3: f64) -> f64 {
    trb1.powi(3) / 6.0 + trb3 / 3.0 - trb1 * trb2 / 2.0
}

/// `Pi_2, Pi_3, Pi_4` of the partial transpose from the invariants.
pub fn moments_from_invariants(inv: &InvariantSet) -> PTMoments {
    let XCombos { x1, x2, x3 } = inv.x_combos();
    PTMoments {
        pi2: (1.0 + x1) / 4.0,
        pi3: (1.0 + 3.0 * x1 + 6.0 * x2) / 16.0,
        pi4: (1.0 + 6.0 * x1 + 24.0 * x2 + x1 * x1 + 2.0 * x3) / 64.0,
    }
}
