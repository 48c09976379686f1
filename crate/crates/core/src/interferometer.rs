//! The four four-copy interferometer configurations, their detection
//! statistics and the reconstruction of the multicopy table from counts.
//!
//! Each detector module `D_k` sits behind a balanced beam splitter fed by one
//! pair of qubits. Anti-coalescence (`a`) is the singlet projection `P` on that
//! pair and coalescence (`c`) is `1 - P`, so one trial lands in exactly one of
//! the 16 outcomes `{c,a}^4`. Outcome indices are bitmasks with bit `k` set
//! when `D_{k+1}` saw anti-coalescence; keys are written `D1 D2 D3 D4`, e.g.
//! `"acca"`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::invariants::{invariants_from_g, InvariantSet};
use crate::multicopy::{g_from_tensor, GTable, Observable, Pairing};
use crate::negativity::{
    coeffs_from_g, solve_negativity_lenient, witness, NegativitySolution, QuarticCoefficients,
    WitnessObservables, WitnessResult,
};
use crate::qstate::{correlation_tensor, DensityMatrix};

pub const N_DETECTORS: usize = 4;
pub const N_OUTCOMES: usize = 16;
pub const N_COPIES: usize = 4;

/// Events per independently seeded sampling batch.
pub const DEFAULT_BATCH_SIZE: u64 = 1 << 18;
pub const DEFAULT_BOOTSTRAP: usize = 200;
pub const DEFAULT_Z: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigId {
    A,
    B,
    C,
    D,
}

impl ConfigId {
    pub const ALL: [ConfigId; 4] = [ConfigId::A, ConfigId::B, ConfigId::C, ConfigId::D];

    pub fn as_str(self) -> &'static str {
        match self {
            ConfigId::A => "a",
            ConfigId::B => "b",
            ConfigId::C => "c",
            ConfigId::D => "d",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfigId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ConfigId::A),
            "b" => Ok(ConfigId::B),
            "c" => Ok(ConfigId::C),
            "d" => Ok(ConfigId::D),
            _ => Err(Error::UnknownConfiguration(s.to_string())),
        }
    }
}

impl Serialize for ConfigId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ConfigId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Which qubit pair feeds each detector module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Configuration {
    pub id: ConfigId,
    pub detector_pairs: [(usize, usize); N_DETECTORS],
}

impl Configuration {
    /// Detector assignments consistent with every detection-event row.
    pub fn canonical(id: ConfigId) -> Self {
        let detector_pairs = match id {
            ConfigId::A => [(1, 3), (4, 6), (5, 7), (2, 8)],
            ConfigId::B => [(1, 4), (3, 6), (5, 8), (2, 7)],
            ConfigId::C => [(1, 4), (3, 6), (2, 5), (7, 8)],
            ConfigId::D => [(1, 3), (2, 4), (5, 8), (6, 7)],
        };
        Configuration { id, detector_pairs }
    }

    pub fn all() -> [Configuration; 4] {
        ConfigId::ALL.map(Configuration::canonical)
    }

    /// Pairing of the detectors selected by `mask` on four copies.
    pub fn pairing(&self, mask: usize) -> Pairing {
        let pairs: Vec<_> = (0..N_DETECTORS)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| self.detector_pairs[k])
            .collect();
        Pairing::new(N_COPIES, &pairs).expect("detector pairs are disjoint")
    }
}

/// `"cccc"`..`"aaaa"`, detector D1 first.
pub fn outcome_key(index: usize) -> String {
    (0..N_DETECTORS)
        .map(|k| if index & (1 << k) != 0 { 'a' } else { 'c' })
        .collect()
}

pub fn parse_outcome_key(key: &str) -> Option<usize> {
    let bytes = key.as_bytes();
    if bytes.len() != N_DETECTORS {
        return None;
    }
    let mut index = 0;
    for (k, b) in bytes.iter().enumerate() {
        match b {
            b'a' => index |= 1 << k,
            b'c' => {}
            _ => return None,
        }
    }
    Some(index)
}

/// A detection pattern over `{s, a}^4`: `a` demands anti-coalescence at that
/// detector, `s` accepts either outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(pub usize);

impl Pattern {
    pub fn anti_mask(self) -> usize {
        self.0
    }

    pub fn matches(self, outcome: usize) -> bool {
        outcome & self.0 == self.0
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..N_DETECTORS {
            f.write_str(if self.0 & (1 << k) != 0 { "a" } else { "s" })?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if letters.len() != N_DETECTORS {
            return Err(Error::InvalidParameter(format!(
                "bad detection pattern {s:?}"
            )));
        }
        let mut mask = 0;
        for (k, c) in letters.into_iter().enumerate() {
            match c {
                'a' => mask |= 1 << k,
                's' => {}
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "bad detection pattern {s:?}"
                    )))
                }
            }
        }
        Ok(Pattern(mask))
    }
}

use Observable as O;

/// Detection-event interpretation: for every `{s,a}^4` row (D1 slowest), the
/// product of multicopy observables its pattern-marginal equals. An empty
/// product is the `ssss` row (all `Z` events).
pub fn table1(id: ConfigId) -> [(&'static str, &'static [Observable]); 16] {
    match id {
        ConfigId::A => [
            ("ssss", &[]),
            ("sssa", &[O::G24]),
            ("ssas", &[O::G13]),
            ("ssaa", &[O::G13_46]),
            ("sass", &[O::G24]),
            ("sasa", &[O::G24, O::G24]),
            ("saas", &[O::G13_46]),
            ("saaa", &[O::G24_35_68]),
            ("asss", &[O::G13]),
            ("assa", &[O::G13_46]),
            ("asas", &[O::G13, O::G13]),
            ("asaa", &[O::G13_46_57]),
            ("aass", &[O::G13_46]),
            ("aasa", &[O::G24_35_68]),
            ("aaas", &[O::G13_46_57]),
            ("aaaa", &[O::G13_46_57_28]),
        ],
        ConfigId::B => [
            ("ssss", &[]),
            ("sssa", &[O::G14]),
            ("ssas", &[O::G14]),
            ("ssaa", &[O::G14_36]),
            ("sass", &[O::G14]),
            ("sasa", &[O::G14, O::G14]),
            ("saas", &[O::G14_36]),
            ("saaa", &[O::G14_36_58]),
            ("asss", &[O::G14]),
            ("assa", &[O::G14_36]),
            ("asas", &[O::G14, O::G14]),
            ("asaa", &[O::G14_36_58]),
            ("aass", &[O::G14_36]),
            ("aasa", &[O::G14_36_58]),
            ("aaas", &[O::G14_36_58]),
            ("aaaa", &[O::G14_36_58_72]),
        ],
        ConfigId::C => [
            ("ssss", &[]),
            ("sssa", &[O::G12]),
            ("ssas", &[O::G14]),
            ("ssaa", &[O::G14, O::G12]),
            ("sass", &[O::G14]),
            ("sasa", &[O::G14, O::G12]),
            ("saas", &[O::G14_36]),
            ("saaa", &[O::G14_36, O::G12]),
            ("asss", &[O::G14]),
            ("assa", &[O::G14, O::G12]),
            ("asas", &[O::G14_36]),
            ("asaa", &[O::G14_36, O::G12]),
            ("aass", &[O::G14_36]),
            ("aasa", &[O::G14_36, O::G12]),
            ("aaas", &[O::G14_36_52]),
            ("aaaa", &[O::G14_36_52, O::G12]),
        ],
        ConfigId::D => [
            ("ssss", &[]),
            ("sssa", &[O::G14]),
            ("ssas", &[O::G14]),
            ("ssaa", &[O::G14_23]),
            ("sass", &[O::G24]),
            ("sasa", &[O::G24, O::G14]),
            ("saas", &[O::G24, O::G14]),
            ("saaa", &[O::G24, O::G14_23]),
            ("asss", &[O::G13]),
            ("assa", &[O::G13, O::G14]),
            ("asas", &[O::G13, O::G14]),
            ("asaa", &[O::G13, O::G14_23]),
            ("aass", &[O::G13_24]),
            // D3 and D4 form g14,23 on copies 3-4, so D4 alone contributes g14
            ("aasa", &[O::G13_24, O::G14]),
            ("aaas", &[O::G13_24, O::G14]),
            ("aaaa", &[O::G13_24, O::G14_23]),
        ],
    }
}

/// Exact probabilities of the 16 outcomes of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub config: ConfigId,
    pub probs: [f64; N_OUTCOMES],
}

impl OutcomeDistribution {
    /// Total probability of the outcomes matching `pattern`.
    pub fn marginal(&self, pattern: Pattern) -> f64 {
        (0..N_OUTCOMES)
            .filter(|&x| pattern.matches(x))
            .map(|x| self.probs[x])
            .sum()
    }
}

/// `probs[x] = tr[rho^{⊗4} ⊗_k M_k(x_k)]` with `M(a) = P`, `M(c) = 1 - P`.
pub fn outcome_distribution(rho: &DensityMatrix, cfg: &Configuration) -> OutcomeDistribution {
    outcome_distribution_from_tensor(&correlation_tensor(rho), cfg)
}

pub fn outcome_distribution_from_tensor(
    t: &Matrix4<f64>,
    cfg: &Configuration,
) -> OutcomeDistribution {
    // anti-coalescence marginals of every detector subset
    let marg: Vec<f64> = (0..N_OUTCOMES)
        .map(|s| g_from_tensor(t, &cfg.pairing(s)))
        .collect();
    let mut probs = [0.0; N_OUTCOMES];
    for (x, p) in probs.iter_mut().enumerate() {
        // inclusion-exclusion over the coalescing detectors
        let mut v = 0.0;
        for (s, m) in marg.iter().enumerate() {
            if s & x == x {
                let extra = (s & !x).count_ones();
                v += if extra % 2 == 0 { *m } else { -*m };
            }
        }
        *p = if v < 0.0 { 0.0 } else { v };
    }
    OutcomeDistribution {
        config: cfg.id,
        probs,
    }
}

/// Counts of one simulated or measured run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub config: ConfigId,
    pub z: u64,
    pub seed: u64,
    pub counts: [u64; N_OUTCOMES],
}

impl ExperimentRecord {
    pub fn frequencies(&self) -> [f64; N_OUTCOMES] {
        self.counts.map(|n| n as f64 / self.z as f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    /// Parses and checks a record: known configuration, all 16 outcome keys
    /// and counts summing to `Z`.
    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            config: String,
            #[serde(rename = "Z")]
            z: u64,
            seed: u64,
            counts: HashMap<String, u64>,
        }
        let raw: Raw = serde_json::from_str(s)?;
        let config: ConfigId = raw.config.parse()?;
        if raw.z < 1 {
            return Err(Error::InvalidZ(raw.z));
        }
        let mut counts = [0u64; N_OUTCOMES];
        let mut seen = [false; N_OUTCOMES];
        for (k, n) in raw.counts {
            let i = parse_outcome_key(&k)
                .ok_or_else(|| Error::InvalidParameter(format!("bad outcome key {k:?}")))?;
            counts[i] = n;
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "missing outcome {}",
                outcome_key(i)
            )));
        }
        let total: u64 = counts.iter().sum();
        if total != raw.z {
            return Err(Error::InvalidParameter(format!(
                "counts sum to {total}, Z = {}",
                raw.z
            )));
        }
        Ok(ExperimentRecord {
            config,
            z: raw.z,
            seed: raw.seed,
            counts,
        })
    }
}

impl Serialize for ExperimentRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Counts<'a>(&'a [u64; N_OUTCOMES]);
        impl Serialize for Counts<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(N_OUTCOMES))?;
                for (i, n) in self.0.iter().enumerate() {
                    m.serialize_entry(&outcome_key(i), n)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("config", &self.config)?;
        m.serialize_entry("Z", &self.z)?;
        m.serialize_entry("seed", &self.seed)?;
        m.serialize_entry("counts", &Counts(&self.counts))?;
        m.end()
    }
}

/// SplitMix64 finaliser, used to derive independent seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Multinomial draw of `n` events by sequential conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(
    n: u64,
    probs: &[f64; N_OUTCOMES],
    rng: &mut R,
) -> [u64; N_OUTCOMES] {
    let mut counts = [0u64; N_OUTCOMES];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for k in 0..N_OUTCOMES - 1 {
        if remaining == 0 {
            break;
        }
        let p = if mass > 0.0 {
            (probs[k] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, p)
            .expect("p in [0, 1]")
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= probs[k];
    }
    counts[N_OUTCOMES - 1] += remaining;
    counts
}

/// Batch `i` draws from ChaCha8 seeded with `seed`, stream `i`.
fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Draws `z` events in batches of `batch_size`; the result depends only on
/// `(dist, z, seed, batch_size)`, not on how rayon schedules the batches.
pub fn sample_batched(
    dist: &OutcomeDistribution,
    z: u64,
    seed: u64,
    batch_size: u64,
) -> Result<ExperimentRecord> {
    if z < 1 {
        return Err(Error::InvalidZ(z));
    }
    if batch_size < 1 {
        return Err(Error::InvalidParameter(
            "batch size must be positive".into(),
        ));
    }
    let n_batches = z.div_ceil(batch_size);
    let counts = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let size = batch_size.min(z - b * batch_size);
            multinomial(size, &dist.probs, &mut batch_rng(seed, b))
        })
        .reduce(
            || [0u64; N_OUTCOMES],
            |mut acc, c| {
                for (a, n) in acc.iter_mut().zip(c) {
                    *a += n;
                }
                acc
            },
        );
    Ok(ExperimentRecord {
        config: dist.config,
        z,
        seed,
        counts,
    })
}

pub fn sample(dist: &OutcomeDistribution, z: u64, seed: u64) -> Result<ExperimentRecord> {
    sample_batched(dist, z, seed, DEFAULT_BATCH_SIZE)
}

/// One detection-event row turned into an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEstimate {
    pub config: ConfigId,
    pub pattern: String,
    /// A single observable for primary estimates, several for the product
    /// cells that are only used as consistency checks.
    pub factors: Vec<Observable>,
    pub value: f64,
    pub std_error: f64,
    /// Events behind the estimate; 0 for the infinite-statistics limit.
    pub z_used: u64,
}

impl GEstimate {
    pub fn is_primary(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn label(&self) -> String {
        self.factors
            .iter()
            .map(|o| o.name())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Estimates from outcome frequencies; `z = None` means exact probabilities.
pub fn interpret_frequencies(
    config: ConfigId,
    freqs: &[f64; N_OUTCOMES],
    z: Option<u64>,
) -> Vec<GEstimate> {
    table1(config)
        .iter()
        .filter(|(_, factors)| !factors.is_empty())
        .map(|(pat, factors)| {
            let pattern: Pattern = pat.parse().expect("static patterns are valid");
            let value: f64 = (0..N_OUTCOMES)
                .filter(|&x| pattern.matches(x))
                .map(|x| freqs[x])
                .sum();
            let std_error = match z {
                Some(z) => (value * (1.0 - value) / z as f64).max(0.0).sqrt(),
                None => 0.0,
            };
            GEstimate {
                config,
                pattern: pattern.to_string(),
                factors: factors.to_vec(),
                value,
                std_error,
                z_used: z.unwrap_or(0),
            }
        })
        .collect()
}

pub fn interpret_counts(rec: &ExperimentRecord) -> Result<Vec<GEstimate>> {
    if rec.z < 1 {
        return Err(Error::InvalidZ(rec.z));
    }
    Ok(interpret_frequencies(
        rec.config,
        &rec.frequencies(),
        Some(rec.z),
    ))
}

/// Like [`interpret_counts`] for a record whose configuration is given by name.
pub fn interpret_counts_for(config: &str, counts: &[u64; N_OUTCOMES]) -> Result<Vec<GEstimate>> {
    let config: ConfigId = config.parse()?;
    let z: u64 = counts.iter().sum();
    interpret_counts(&ExperimentRecord {
        config,
        z,
        seed: 0,
        counts: *counts,
    })
}

/// The multicopy table rebuilt from detection estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembledG {
    pub table: GTable,
    pub std_error: GTable,
    /// Configurations that contributed to each canonical observable.
    pub sources: BTreeMap<String, Vec<ConfigId>>,
    /// Combined values that fell outside `[0, 1]` and were clamped.
    pub clamped: usize,
}

struct Pooled {
    value: f64,
    std_error: f64,
    z: u64,
}

/// Fills the 13 canonical observables from primary estimates.
///
/// Rows of one configuration that name the same observable come from the same
/// events and are averaged, with the single-row binomial error. Independent
/// configurations are then combined by inverse-variance weighting.
pub fn assemble_g(estimates: &[GEstimate]) -> Result<AssembledG> {
    let mut groups: BTreeMap<(Observable, ConfigId), Vec<&GEstimate>> = BTreeMap::new();
    for e in estimates.iter().filter(|e| e.is_primary()) {
        groups.entry((e.factors[0], e.config)).or_default().push(e);
    }

    let mut values = [0.0; 13];
    let mut errors = [0.0; 13];
    let mut sources = BTreeMap::new();
    let mut missing = Vec::new();
    let mut clamped = 0;

    for (i, obs) in Observable::CANONICAL.iter().enumerate() {
        let pooled: Vec<(ConfigId, Pooled)> = groups
            .range((*obs, ConfigId::A)..=(*obs, ConfigId::D))
            .map(|(&(_, cfg), rows)| {
                let value = rows.iter().map(|e| e.value).sum::<f64>() / rows.len() as f64;
                let z = rows[0].z_used;
                let std_error = if z > 0 {
                    (value * (1.0 - value) / z as f64).max(0.0).sqrt()
                } else {
                    0.0
                };
                (
                    cfg,
                    Pooled {
                        value,
                        std_error,
                        z,
                    },
                )
            })
            .collect();
        if pooled.is_empty() {
            missing.push(*obs);
            continue;
        }

        let (value, std_error) = if pooled.iter().all(|(_, p)| p.std_error == 0.0) {
            let mean = pooled.iter().map(|(_, p)| p.value).sum::<f64>() / pooled.len() as f64;
            (mean, 0.0)
        } else {
            // a frequency of exactly 0 or 1 still carries resolution 1/(2Z)
            let weights: Vec<f64> = pooled
                .iter()
                .map(|(_, p)| {
                    let floor = if p.z > 0 {
                        0.25 / (p.z as f64 * p.z as f64)
                    } else {
                        f64::MIN_POSITIVE
                    };
                    1.0 / (p.std_error * p.std_error).max(floor)
                })
                .collect();
            let wsum: f64 = weights.iter().sum();
            let v = pooled
                .iter()
                .zip(&weights)
                .map(|((_, p), w)| p.value * w)
                .sum::<f64>()
                / wsum;
            (v, (1.0 / wsum).sqrt())
        };

        let c = value.clamp(0.0, 1.0);
        if c != value {
            clamped += 1;
        }
        values[i] = c;
        errors[i] = std_error;
        sources.insert(
            obs.name().to_string(),
            pooled.iter().map(|(cfg, _)| *cfg).collect(),
        );
    }

    if !missing.is_empty() {
        return Err(Error::MissingObservable(missing));
    }
    Ok(AssembledG {
        table: GTable::from_values(values),
        std_error: GTable::from_values(errors),
        sources,
        clamped,
    })
}

/// Everything derived from one assembled table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledAnalysis {
    pub g: AssembledG,
    pub invariants: InvariantSet,
    pub coefficients: QuarticCoefficients,
    pub negativity: NegativitySolution,
    pub witness: WitnessResult,
}

pub fn analyze_estimates(estimates: &[GEstimate]) -> Result<SampledAnalysis> {
    let g = assemble_g(estimates)?;
    let coefficients = coeffs_from_g(&g.table);
    Ok(SampledAnalysis {
        invariants: invariants_from_g(&g.table),
        coefficients,
        negativity: solve_negativity_lenient(&coefficients),
        witness: witness(&WitnessObservables::from(&g.table)),
        g,
    })
}

pub fn analyze_records(records: &[ExperimentRecord]) -> Result<SampledAnalysis> {
    let mut estimates = Vec::new();
    for r in records {
        estimates.extend(interpret_counts(r)?);
    }
    analyze_estimates(&estimates)
}

/// Infinite-statistics limit: outcome probabilities used as frequencies.
pub fn analyze_exact_limit(rho: &DensityMatrix) -> Result<SampledAnalysis> {
    let t = correlation_tensor(rho);
    let mut estimates = Vec::new();
    for cfg in Configuration::all() {
        let dist = outcome_distribution_from_tensor(&t, &cfg);
        estimates.extend(interpret_frequencies(cfg.id, &dist.probs, None));
    }
    analyze_estimates(&estimates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Events per configuration.
    pub z: u64,
    pub seed: u64,
    /// Bootstrap resamples; 0 disables the uncertainty estimate.
    pub bootstrap: usize,
    pub batch_size: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            z: DEFAULT_Z,
            seed: 0,
            bootstrap: DEFAULT_BOOTSTRAP,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub resamples: usize,
    pub negativity_std: f64,
    pub det_pt_std: f64,
    /// Resamples whose quartic had several positive roots.
    pub ambiguous: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub records: Vec<ExperimentRecord>,
    pub estimates: Vec<GEstimate>,
    pub analysis: SampledAnalysis,
    pub uncertainty: Uncertainty,
}

impl PipelineReport {
    pub fn negativity(&self) -> f64 {
        self.analysis.negativity.negativity
    }

    pub fn det_pt(&self) -> f64 {
        self.analysis.witness.det_pt
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Resamples every record's counts `b` times and reports the spread of the
/// negativity and of `det rho^Gamma`.
pub fn bootstrap(records: &[ExperimentRecord], resamples: usize, seed: u64) -> Result<Uncertainty> {
    let boot_seed = mix_seed(seed, 0xB007_57A9);
    let runs: Vec<Result<(f64, f64, bool)>> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(boot_seed, b as u64);
            let resampled: Vec<ExperimentRecord> = records
                .iter()
                .map(|r| {
                    let counts = multinomial(r.z, &r.frequencies(), &mut rng);
                    ExperimentRecord {
                        counts,
                        ..r.clone()
                    }
                })
                .collect();
            let a = analyze_records(&resampled)?;
            Ok((
                a.negativity.negativity,
                a.witness.det_pt,
                a.negativity.ambiguous,
            ))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let negs: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let dets: Vec<f64> = runs.iter().map(|r| r.1).collect();
    Ok(Uncertainty {
        resamples,
        negativity_std: std_dev(&negs),
        det_pt_std: std_dev(&dets),
        ambiguous: runs.iter().filter(|r| r.2).count(),
    })
}

/// Simulates all four configurations and runs the full reconstruction.
pub fn run_pipeline(rho: &DensityMatrix, opts: &PipelineOptions) -> Result<PipelineReport> {
    if opts.z < 1 {
        return Err(Error::InvalidZ(opts.z));
    }
    let t = correlation_tensor(rho);
    let records = Configuration::all()
        .iter()
        .map(|cfg| {
            let dist = outcome_distribution_from_tensor(&t, cfg);
            let seed = mix_seed(opts.seed, cfg.id.index() as u64 + 1);
            sample_batched(&dist, opts.z, seed, opts.batch_size)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut estimates = Vec::new();
    for r in &records {
        estimates.extend(interpret_counts(r)?);
    }
    let analysis = analyze_estimates(&estimates)?;
    let uncertainty = bootstrap(&records, opts.bootstrap, opts.seed)?;
    Ok(PipelineReport {
        records,
        estimates,
        analysis,
        uncertainty,
    })
}
