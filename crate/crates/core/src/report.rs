//! Report records and their JSON/CSV emission.
//!
//! CSV layouts (all floats at 12 significant digits):
//!
//! - GTable: one header row with the 13 observable names, one value row.
//! - InvariantSet: header `i1,i2,i3,i4,i5,i7,i8,i12,i14`, one value row.
//! - Result record: `negativity,det_pt,entangled,path`.
//! - Exact and simulation reports: two columns `name,value`, one row per
//!   quantity, in the order the quantities appear in the JSON report.
//! - Sweep: `p,negativity_exact,det_pt_exact,entangled_exact,negativity_sampled,
//!   negativity_error,det_pt_sampled,det_pt_error,entangled_sampled`; the
//!   sampled columns are empty in exact-only sweeps.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::interferometer::{
    outcome_key, run_pipeline, ExperimentRecord, GEstimate, PipelineOptions, PipelineReport,
};
use crate::invariants::{invariants_from_decomposition, invariants_from_g, InvariantSet};
use crate::multicopy::{g_table, GTable};
use crate::negativity::{
    coeffs_from_g, coeffs_from_moments, det_pt_from_moments, solve_negativity_lenient, witness,
    QuarticCoefficients, WitnessObservables, WitnessResult,
};
use crate::qstate::{negativity_oracle, pauli_decompose, pt_moments, DensityMatrix, PTMoments};

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 <= |x| < 1e12`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultPath {
    Moments,
    G,
    Sampled,
}

impl fmt::Display for ResultPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResultPath::Moments => "moments",
            ResultPath::G => "g",
            ResultPath::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub negativity: f64,
    pub det_pt: f64,
    pub entangled: bool,
    pub path: ResultPath,
}

impl ResultRecord {
    pub fn new(negativity: f64, w: &WitnessResult, path: ResultPath) -> Self {
        ResultRecord {
            negativity,
            det_pt: w.det_pt,
            entangled: w.entangled,
            path,
        }
    }
}

/// Exact analysis of one state through every available route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    pub g: GTable,
    pub invariants_decomposition: InvariantSet,
    pub invariants_g: InvariantSet,
    pub invariant_discrepancy: f64,
    pub moments: PTMoments,
    pub coefficients_moments: QuarticCoefficients,
    pub coefficients_g: QuarticCoefficients,
    pub negativity_quartic: f64,
    pub negativity_oracle: f64,
    /// The quartic had several positive roots and the largest was kept.
    pub ambiguous_roots: bool,
    pub witness: WitnessResult,
    pub result: ResultRecord,
}

pub fn exact_report(rho: &DensityMatrix) -> ExactReport {
    let g = g_table(rho);
    let inv_d = invariants_from_decomposition(&pauli_decompose(rho));
    let inv_g = invariants_from_g(&g);
    let moments = pt_moments(rho);
    let coefficients_moments = coeffs_from_moments(&moments, det_pt_from_moments(&moments));
    let coefficients_g = coeffs_from_g(&g);
    let solution = solve_negativity_lenient(&coefficients_g);
    let w = witness(&WitnessObservables::from(&g));
    ExactReport {
        g,
        invariants_decomposition: inv_d,
        invariants_g: inv_g,
        invariant_discrepancy: inv_d.max_abs_diff(&inv_g),
        moments,
        coefficients_moments,
        coefficients_g,
        negativity_quartic: solution.negativity,
        negativity_oracle: negativity_oracle(rho),
        ambiguous_roots: solution.ambiguous,
        witness: w,
        result: ResultRecord::new(solution.negativity, &w, ResultPath::G),
    }
}

/// Sampled pipeline output in report form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub z: u64,
    pub seed: u64,
    pub bootstrap: usize,
    pub records: Vec<ExperimentRecord>,
    pub estimates: Vec<GEstimate>,
    pub g: GTable,
    pub g_std_error: GTable,
    pub clamped: usize,
    pub invariants: InvariantSet,
    pub coefficients: QuarticCoefficients,
    pub negativity: f64,
    pub negativity_std: f64,
    pub det_pt_std: f64,
    pub ambiguous_roots: bool,
    pub ambiguous_resamples: usize,
    pub witness: WitnessResult,
    pub result: ResultRecord,
}

impl SimulationReport {
    pub fn from_pipeline(p: PipelineReport, opts: &PipelineOptions) -> Self {
        let a = p.analysis;
        SimulationReport {
            z: opts.z,
            seed: opts.seed,
            bootstrap: opts.bootstrap,
            records: p.records,
            estimates: p.estimates,
            g: a.g.table,
            g_std_error: a.g.std_error,
            clamped: a.g.clamped,
            invariants: a.invariants,
            coefficients: a.coefficients,
            negativity: a.negativity.negativity,
            negativity_std: p.uncertainty.negativity_std,
            det_pt_std: p.uncertainty.det_pt_std,
            ambiguous_roots: a.negativity.ambiguous,
            ambiguous_resamples: p.uncertainty.ambiguous,
            witness: a.witness,
            result: ResultRecord::new(a.negativity.negativity, &a.witness, ResultPath::Sampled),
        }
    }
}

pub fn simulation_report(rho: &DensityMatrix, opts: &PipelineOptions) -> Result<SimulationReport> {
    Ok(SimulationReport::from_pipeline(
        run_pipeline(rho, opts)?,
        opts,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub negativity_exact: f64,
    pub det_pt_exact: f64,
    pub entangled_exact: bool,
    pub negativity_sampled: Option<f64>,
    pub negativity_error: Option<f64>,
    pub det_pt_sampled: Option<f64>,
    pub det_pt_error: Option<f64>,
    pub entangled_sampled: Option<bool>,
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "p",
    "negativity_exact",
    "det_pt_exact",
    "entangled_exact",
    "negativity_sampled",
    "negativity_error",
    "det_pt_sampled",
    "det_pt_error",
    "entangled_sampled",
];

/// `steps` evenly spaced points from `p_min` to `p_max`, both included.
pub fn sweep_points(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                p_max
            } else {
                p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

/// A `name,value` view used for the long-format CSV reports.
pub trait Rows {
    fn rows(&self) -> Vec<(String, String)>;
}

fn push_named(out: &mut Vec<(String, String)>, prefix: &str, names: &[&str], values: &[f64]) {
    for (n, v) in names.iter().zip(values) {
        out.push((format!("{prefix}.{n}"), fmt_float(*v)));
    }
}

fn push_coeffs(out: &mut Vec<(String, String)>, prefix: &str, c: &QuarticCoefficients) {
    push_named(out, prefix, &["a0", "a1", "a2"], &[c.a0, c.a1, c.a2]);
}

fn push_witness(out: &mut Vec<(String, String)>, w: &WitnessResult) {
    out.push(("witness.det_pt".into(), fmt_float(w.det_pt)));
    out.push(("witness.entangled".into(), w.entangled.to_string()));
    out.push(("witness.margin".into(), fmt_float(w.margin)));
}

fn push_result(out: &mut Vec<(String, String)>, r: &ResultRecord) {
    out.push(("result.negativity".into(), fmt_float(r.negativity)));
    out.push(("result.det_pt".into(), fmt_float(r.det_pt)));
    out.push(("result.entangled".into(), r.entangled.to_string()));
    out.push(("result.path".into(), r.path.to_string()));
}

impl Rows for ExactReport {
    fn rows(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        push_named(&mut out, "g", &GTable::field_names(), &self.g.values());
        let inv = &InvariantSet::FIELD_NAMES;
        push_named(
            &mut out,
            "invariants_decomposition",
            inv,
            &self.invariants_decomposition.values(),
        );
        push_named(&mut out, "invariants_g", inv, &self.invariants_g.values());
        out.push((
            "invariant_discrepancy".into(),
            fmt_float(self.invariant_discrepancy),
        ));
        let m = &self.moments;
        push_named(
            &mut out,
            "moments",
            &["pi2", "pi3", "pi4"],
            &[m.pi2, m.pi3, m.pi4],
        );
        push_coeffs(&mut out, "coefficients_moments", &self.coefficients_moments);
        push_coeffs(&mut out, "coefficients_g", &self.coefficients_g);
        out.push((
            "negativity_quartic".into(),
            fmt_float(self.negativity_quartic),
        ));
        out.push((
            "negativity_oracle".into(),
            fmt_float(self.negativity_oracle),
        ));
        out.push(("ambiguous_roots".into(), self.ambiguous_roots.to_string()));
        push_witness(&mut out, &self.witness);
        push_result(&mut out, &self.result);
        out
    }
}

impl Rows for SimulationReport {
    fn rows(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("z".to_string(), self.z.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("bootstrap".to_string(), self.bootstrap.to_string()),
        ];
        for r in &self.records {
            for (i, n) in r.counts.iter().enumerate() {
                out.push((
                    format!("counts.{}.{}", r.config, outcome_key(i)),
                    n.to_string(),
                ));
            }
        }
        for e in &self.estimates {
            let key = format!("estimate.{}.{}.{}", e.config, e.pattern, e.label());
            out.push((format!("{key}.value"), fmt_float(e.value)));
            out.push((format!("{key}.std_error"), fmt_float(e.std_error)));
        }
        push_named(&mut out, "g", &GTable::field_names(), &self.g.values());
        push_named(
            &mut out,
            "g_std_error",
            &GTable::field_names(),
            &self.g_std_error.values(),
        );
        out.push(("clamped".into(), self.clamped.to_string()));
        push_named(
            &mut out,
            "invariants",
            &InvariantSet::FIELD_NAMES,
            &self.invariants.values(),
        );
        push_coeffs(&mut out, "coefficients", &self.coefficients);
        out.push(("negativity".into(), fmt_float(self.negativity)));
        out.push(("negativity_std".into(), fmt_float(self.negativity_std)));
        out.push(("det_pt_std".into(), fmt_float(self.det_pt_std)));
        out.push(("ambiguous_roots".into(), self.ambiguous_roots.to_string()));
        out.push((
            "ambiguous_resamples".into(),
            self.ambiguous_resamples.to_string(),
        ));
        push_witness(&mut out, &self.witness);
        push_result(&mut out, &self.result);
        out
    }
}

pub fn write_rows_csv<W: Write, R: Rows + ?Sized>(w: W, report: &R) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["name", "value"])?;
    for (n, v) in report.rows() {
        wr.write_record([n, v])?;
    }
    wr.flush()?;
    Ok(())
}

fn write_single_row<W: Write>(w: W, header: &[&str], row: Vec<String>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header)?;
    wr.write_record(row)?;
    wr.flush()?;
    Ok(())
}

pub fn write_gtable_csv<W: Write>(w: W, g: &GTable) -> Result<()> {
    write_single_row(
        w,
        &GTable::field_names(),
        g.values().iter().map(|v| fmt_float(*v)).collect(),
    )
}

pub fn write_invariants_csv<W: Write>(w: W, inv: &InvariantSet) -> Result<()> {
    write_single_row(
        w,
        &InvariantSet::FIELD_NAMES,
        inv.values().iter().map(|v| fmt_float(*v)).collect(),
    )
}

pub fn write_result_csv<W: Write>(w: W, r: &ResultRecord) -> Result<()> {
    write_single_row(
        w,
        &["negativity", "det_pt", "entangled", "path"],
        vec![
            fmt_float(r.negativity),
            fmt_float(r.det_pt),
            r.entangled.to_string(),
            r.path.to_string(),
        ],
    )
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        wr.write_record([
            fmt_float(r.p),
            fmt_float(r.negativity_exact),
            fmt_float(r.det_pt_exact),
            r.entangled_exact.to_string(),
            opt(r.negativity_sampled),
            opt(r.negativity_error),
            opt(r.det_pt_sampled),
            opt(r.det_pt_error),
            r.entangled_sampled
                .map(|b| b.to_string())
                .unwrap_or_default(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
