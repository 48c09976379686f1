//! Multicopy singlet-projection expectations.
//!
//! A [`Pairing`] names a product of singlet projectors `P_{a,b}` acting on the
//! qubits of `rho^{⊗k}`. Qubit `q` (1-based) belongs to copy `ceil(q/2)`; odd
//! `q` is that copy's first subsystem and even `q` its second.
//!
//! Two evaluators are provided. [`g_exact`] expands every projector as
//! `P = (1⊗1 - sum_i sigma_i⊗sigma_i)/4` and contracts the resulting Pauli
//! labels against the single-copy correlation tensor, so no `4^k`-dimensional
//! operator is ever built. [`dense::g_exact_dense`] materialises `rho^{⊗k}`
//! and traces it against the projector product, and serves as the reference.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{correlation_tensor, CMatrix4, DensityMatrix};

pub const MAX_COPIES: usize = 4;

/// Unordered set of disjoint, unordered qubit pairs over `n_copies` copies.
///
/// Pairs are stored as `(a, b)` with `a < b` and sorted, so two pairings are
/// equal exactly when they name the same projector product.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    n_copies: usize,
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn new(n_copies: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if !(1..=MAX_COPIES).contains(&n_copies) {
            return Err(Error::InvalidPairing(format!(
                "n_copies = {n_copies}, expected 1..={MAX_COPIES}"
            )));
        }
        let n_qubits = 2 * n_copies;
        let mut seen = [false; 2 * MAX_COPIES + 1];
        let mut norm = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for q in [a, b] {
                if q == 0 || q > n_qubits {
                    return Err(Error::InvalidPairing(format!(
                        "qubit {q} outside 1..={n_qubits}"
                    )));
                }
                if seen[q] {
                    return Err(Error::InvalidPairing(format!("qubit {q} used twice")));
                }
                seen[q] = true;
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(Pairing {
            n_copies,
            pairs: norm,
        })
    }

    /// Smallest copy count that covers every index.
    pub fn minimal(pairs: &[(usize, usize)]) -> Result<Self> {
        let max = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(1);
        Self::new(max.div_ceil(2).max(1), pairs)
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_copies
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Shifts every index by `by` modulo the qubit count, mapping into `1..=N`.
    pub fn shifted(&self, by: usize) -> Pairing {
        let n = self.n_qubits();
        let shift = |q: usize| (q - 1 + by) % n + 1;
        let pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|&(a, b)| (shift(a), shift(b)))
            .collect();
        Pairing::new(self.n_copies, &pairs).expect("shift is a bijection")
    }

    /// Relabels whole copies: copy `c` (1-based) becomes copy `perm[c - 1]`.
    pub fn permute_copies(&self, perm: &[usize]) -> Result<Pairing> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=self.n_copies).collect::<Vec<_>>() {
            return Err(Error::InvalidPairing(format!(
                "{perm:?} is not a copy permutation"
            )));
        }
        let map = |q: usize| {
            let copy = q.div_ceil(2);
            let sub = (q + 1) % 2;
            2 * perm[copy - 1] - 1 + sub
        };
        let pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (map(a), map(b))).collect();
        Pairing::new(self.n_copies, &pairs)
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .pairs
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        write!(f, "{{{}}}/{}", body.join(","), self.n_copies)
    }
}

/// True iff shifting `p1` by `2k` (k = 1..4) modulo the qubit count gives `p2`.
pub fn cyclically_equivalent(p1: &Pairing, p2: &Pairing) -> bool {
    if p1.n_copies != p2.n_copies {
        return false;
    }
    (1..=4).any(|k| p1.shifted(2 * k) == *p2)
}

/// The multicopy observables used by the measurement scheme. The first 13
/// form the minimal set; `G14_36_58_72` is only ever measured as a
/// consistency check or derived by the Cayley–Hamilton closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    G12,
    G13,
    G14,
    G24,
    G13_24,
    G13_46,
    G14_23,
    G14_36,
    G14_36_52,
    G13_46_57,
    G24_35_68,
    G13_46_57_28,
    G14_36_58,
    G14_36_58_72,
}

impl Observable {
    /// The 13 observables of the minimal set, in canonical field order.
    pub const CANONICAL: [Observable; 13] = [
        Observable::G12,
        Observable::G13,
        Observable::G14,
        Observable::G24,
        Observable::G13_24,
        Observable::G13_46,
        Observable::G14_23,
        Observable::G14_36,
        Observable::G14_36_52,
        Observable::G13_46_57,
        Observable::G24_35_68,
        Observable::G13_46_57_28,
        Observable::G14_36_58,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::G12 => "g12",
            Observable::G13 => "g13",
            Observable::G14 => "g14",
            Observable::G24 => "g24",
            Observable::G13_24 => "g13_24",
            Observable::G13_46 => "g13_46",
            Observable::G14_23 => "g14_23",
            Observable::G14_36 => "g14_36",
            Observable::G14_36_52 => "g14_36_52",
            Observable::G13_46_57 => "g13_46_57",
            Observable::G24_35_68 => "g24_35_68",
            Observable::G13_46_57_28 => "g13_46_57_28",
            Observable::G14_36_58 => "g14_36_58",
            Observable::G14_36_58_72 => "g14_36_58_72",
        }
    }

    pub fn pairs(self) -> &'static [(usize, usize)] {
        match self {
            Observable::G12 => &[(1, 2)],
            Observable::G13 => &[(1, 3)],
            Observable::G14 => &[(1, 4)],
            Observable::G24 => &[(2, 4)],
            Observable::G13_24 => &[(1, 3), (2, 4)],
            Observable::G13_46 => &[(1, 3), (4, 6)],
            Observable::G14_23 => &[(1, 4), (2, 3)],
            Observable::G14_36 => &[(1, 4), (3, 6)],
            Observable::G14_36_52 => &[(1, 4), (3, 6), (5, 2)],
            Observable::G13_46_57 => &[(1, 3), (4, 6), (5, 7)],
            Observable::G24_35_68 => &[(2, 4), (3, 5), (6, 8)],
            Observable::G13_46_57_28 => &[(1, 3), (4, 6), (5, 7), (2, 8)],
            Observable::G14_36_58 => &[(1, 4), (3, 6), (5, 8)],
            Observable::G14_36_58_72 => &[(1, 4), (3, 6), (5, 8), (7, 2)],
        }
    }

    /// Pairing on the fewest copies that hold it.
    pub fn pairing(self) -> Pairing {
        Pairing::minimal(self.pairs()).expect("static pairings are valid")
    }

    /// Number of singlet projectors in the product.
    pub fn order(self) -> usize {
        self.pairs().len()
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::CANONICAL
            .iter()
            .chain(std::iter::once(&Observable::G14_36_58_72))
            .copied()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown observable {s:?}")))
    }
}

/// Values of the 13 minimal-set observables.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GTable {
    pub g12: f64,
    pub g13: f64,
    pub g14: f64,
    pub g24: f64,
    pub g13_24: f64,
    pub g13_46: f64,
    pub g14_23: f64,
    pub g14_36: f64,
    pub g14_36_52: f64,
    pub g13_46_57: f64,
    pub g24_35_68: f64,
    pub g13_46_57_28: f64,
    pub g14_36_58: f64,
}

impl GTable {
    pub fn from_fn(mut f: impl FnMut(Observable) -> f64) -> Self {
        let v = Observable::CANONICAL.map(&mut f);
        Self::from_values(v)
    }

    pub fn from_values(v: [f64; 13]) -> Self {
        GTable {
            g12: v[0],
            g13: v[1],
            g14: v[2],
            g24: v[3],
            g13_24: v[4],
            g13_46: v[5],
            g14_23: v[6],
            g14_36: v[7],
            g14_36_52: v[8],
            g13_46_57: v[9],
            g24_35_68: v[10],
            g13_46_57_28: v[11],
            g14_36_58: v[12],
        }
    }

    /// Values in canonical order.
    pub fn values(&self) -> [f64; 13] {
        [
            self.g12,
            self.g13,
            self.g14,
            self.g24,
            self.g13_24,
            self.g13_46,
            self.g14_23,
            self.g14_36,
            self.g14_36_52,
            self.g13_46_57,
            self.g24_35_68,
            self.g13_46_57_28,
            self.g14_36_58,
        ]
    }

    /// `None` for observables outside the minimal set.
    pub fn get(&self, o: Observable) -> Option<f64> {
        Observable::CANONICAL
            .iter()
            .position(|&c| c == o)
            .map(|i| self.values()[i])
    }

    pub fn field_names() -> [&'static str; 13] {
        Observable::CANONICAL.map(Observable::name)
    }
}

/// `|Psi-><Psi-|` in the two-qubit basis.
pub fn singlet_projector() -> CMatrix4 {
    *crate::generators::bell(crate::generators::BellKind::PsiMinus).matrix()
}

/// `c_mu` in `P = 1/4 sum_mu c_mu sigma_mu ⊗ sigma_mu`.
const SINGLET_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Evaluates a pairing against a precomputed correlation tensor.
pub fn g_from_tensor(t: &Matrix4<f64>, pairing: &Pairing) -> f64 {
    let pairs = pairing.pairs();
    let m = pairs.len();
    let k = pairing.n_copies();
    let mut labels = [0usize; 2 * MAX_COPIES + 1];
    let mut total = 0.0;
    for combo in 0..(1usize << (2 * m)) {
        let mut sign = 1.0;
        for (j, &(a, b)) in pairs.iter().enumerate() {
            let mu = (combo >> (2 * j)) & 3;
            sign *= SINGLET_SIGNS[mu];
            labels[a] = mu;
            labels[b] = mu;
        }
        let mut prod = sign;
        for c in 1..=k {
            prod *= t[(labels[2 * c - 1], labels[2 * c])];
        }
        total += prod;
    }
    total / (1u64 << (2 * m)) as f64
}

/// `tr[(⊗ P_{a,b}) rho^{⊗k}]`.
pub fn g_exact(rho: &DensityMatrix, pairing: &Pairing) -> f64 {
    g_from_tensor(&correlation_tensor(rho), pairing)
}

/// All 13 minimal-set expectations.
pub fn g_table(rho: &DensityMatrix) -> GTable {
    let t = correlation_tensor(rho);
    GTable::from_fn(|o| g_from_tensor(&t, &o.pairing()))
}

/// `(tr beta, tr beta^2, tr beta^3)` from the multicopy data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaMoments {
    pub tr1: f64,
    pub tr2: f64,
    pub tr3: f64,
}

pub fn beta_moments_from_g(g: &GTable) -> BetaMoments {
    BetaMoments {
        tr1: 1.0 - 4.0 * g.g12,
        tr2: 1.0 - 8.0 * g.g14 + 16.0 * g.g14_23,
        // g_{14,36,25} is the same unordered pairing as g_{14,36,52}
        tr3: 1.0 - 12.0 * g.g14 + 48.0 * g.g14_36 - 64.0 * g.g14_36_52,
    }
}

/// `tr beta^4` from lower moments and the determinant (Cayley–Hamilton for 3×3).
pub fn beta_fourth_moment(m: &BetaMoments, det_beta: f64) -> f64 {
    m.tr1 * m.tr3 - 0.5 * m.tr2 * (m.tr1 * m.tr1 - m.tr2) + m.tr1 * det_beta
}

/// `g_{14,36,58,72}` predicted from the minimal set via the fourth moment of
/// `beta`.
pub fn g_closure_14365872(g: &GTable, det_beta: f64) -> f64 {
    let tr4 = beta_fourth_moment(&beta_moments_from_g(g), det_beta);
    (tr4 - 1.0 + 16.0 * g.g14 - 32.0 * (2.0 * g.g14_36 + g.g14 * g.g14)) / 256.0 + g.g14_36_58
}

/// Reference evaluation on the full `rho^{⊗k}` operator.
pub mod dense {
    use num_complex::Complex64;

    use super::{singlet_projector, Pairing};
    use crate::qstate::{CMatrix4, DensityMatrix};

    /// Bit of qubit `q` (1-based) in a `2k`-qubit basis index; qubit 1 is the
    /// most significant, matching `rho ⊗ rho ⊗ ...`.
    #[inline]
    fn bit(index: usize, q: usize, n_qubits: usize) -> usize {
        (index >> (n_qubits - q)) & 1
    }

    /// Row-major `rho^{⊗k}`, dimension `4^k`.
    pub fn tensor_power(rho: &DensityMatrix, k: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::from(1.0)];
        let mut dim = 1usize;
        for _ in 0..k {
            let nd = dim * 4;
            let mut next = vec![Complex64::from(0.0); nd * nd];
            for r in 0..nd {
                for c in 0..nd {
                    next[r * nd + c] = out[(r / 4) * dim + c / 4] * rho.entry(r % 4, c % 4);
                }
            }
            out = next;
            dim = nd;
        }
        out
    }

    /// `tr[(⊗_j F_j on pair_j) rho^{⊗k}]` with identity on unpaired qubits.
    /// The first index of each pair is the first tensor factor of `F_j`.
    pub fn expectation(
        rho: &DensityMatrix,
        n_copies: usize,
        factors: &[((usize, usize), CMatrix4)],
    ) -> Complex64 {
        let n = 2 * n_copies;
        let dim = 1usize << n;
        let big = tensor_power(rho, n_copies);
        let mut paired_mask = 0usize;
        for &((a, b), _) in factors {
            paired_mask |= 1 << (n - a);
            paired_mask |= 1 << (n - b);
        }
        let m = factors.len();
        let mut total = Complex64::from(0.0);
        for x in 0..dim {
            // y agrees with x on unpaired qubits; enumerate the paired bits
            for combo in 0..(1usize << (2 * m)) {
                let mut y = x & !paired_mask;
                let mut elem = Complex64::from(1.0);
                for (j, &((a, b), ref f)) in factors.iter().enumerate() {
                    let ya = (combo >> (2 * j)) & 1;
                    let yb = (combo >> (2 * j + 1)) & 1;
                    y |= ya << (n - a);
                    y |= yb << (n - b);
                    let row = 2 * bit(x, a, n) + bit(x, b, n);
                    elem *= f[(row, 2 * ya + yb)];
                }
                total += elem * big[y * dim + x];
            }
        }
        total
    }

    pub fn g_exact_dense(rho: &DensityMatrix, pairing: &Pairing) -> f64 {
        let p = singlet_projector();
        let factors: Vec<_> = pairing.pairs().iter().map(|&ab| (ab, p)).collect();
        expectation(rho, pairing.n_copies(), &factors).re
    }
}
