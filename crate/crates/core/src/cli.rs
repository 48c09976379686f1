//! Command-line front end: `gen`, `exact`, `simulate` and `sweep`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{bell, random_mixed, random_pure, werner, BellKind};
use crate::interferometer::{mix_seed, PipelineOptions, DEFAULT_BATCH_SIZE, DEFAULT_BOOTSTRAP};
use crate::qstate::DensityMatrix;
use crate::report::{
    exact_report, simulation_report, sweep_points, write_rows_csv, write_sweep_csv, SweepRow,
};

/// State source: `bell:psi-|psi+|phi+|phi-`, `werner:P`, `random-pure:SEED`,
/// `random-mixed:SEED` or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Bell(BellKind),
    Werner(f64),
    RandomPure(u64),
    RandomMixed(u64),
    File(PathBuf),
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad generator spec {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "bell" => Ok(GenSpec::Bell(arg.parse().map_err(|_| bad())?)),
            "werner" => Ok(GenSpec::Werner(arg.parse().map_err(|_| bad())?)),
            "random-pure" => Ok(GenSpec::RandomPure(arg.parse().map_err(|_| bad())?)),
            "random-mixed" => Ok(GenSpec::RandomMixed(arg.parse().map_err(|_| bad())?)),
            "file" if !arg.is_empty() => Ok(GenSpec::File(arg.into())),
            _ => Err(bad()),
        }
    }
}

impl GenSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            GenSpec::Bell(k) => Ok(bell(*k)),
            GenSpec::Werner(p) => werner(*p),
            GenSpec::RandomPure(seed) => Ok(random_pure(*seed)),
            GenSpec::RandomMixed(seed) => Ok(random_mixed(*seed)),
            GenSpec::File(path) => read_state(path),
        }
    }
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::from_json(&fs::read_to_string(path)?)
}

/// Accepts plain integers and integral floats such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "hom-negativity",
    version,
    about = "Two-qubit negativity from multicopy singlet projections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state file.
    Gen {
        /// Generator spec, e.g. `werner:0.5`.
        #[arg(
            value_name = "SPEC",
            required_unless_present = "gen",
            conflicts_with = "gen"
        )]
        spec: Option<String>,
        #[arg(long, value_name = "SPEC")]
        gen: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact analysis through every route.
    Exact {
        #[command(flatten)]
        input: StateInput,
        #[command(flatten)]
        output: Output,
    },
    /// Sampled interferometer pipeline.
    Simulate {
        #[command(flatten)]
        input: StateInput,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Werner-family sweep.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        /// Skip the sampled columns.
        #[arg(long)]
        exact_only: bool,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, required_unless_present = "exact_only")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StateInput {
    /// JSON state file.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Generator spec instead of a file.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
}

impl StateInput {
    fn load(&self) -> Result<DensityMatrix> {
        match (&self.state, &self.gen) {
            (Some(path), _) => read_state(path),
            (None, Some(spec)) => spec.parse::<GenSpec>()?.build(),
            (None, None) => unreachable!("clap requires one input"),
        }
    }
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Events per configuration.
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    z: u64,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
    bootstrap: usize,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen { spec, gen, out } => {
            let spec = spec
                .as_deref()
                .or(gen.as_deref())
                .expect("clap requires a spec");
            let rho = spec.parse::<GenSpec>()?.build()?;
            let mut w = open_out(out.as_deref())?;
            writeln!(w, "{}", rho.to_json())?;
            w.flush()?;
        }
        Command::Exact { input, output } => {
            let report = exact_report(&input.load()?);
            let w = open_out(output.out.as_deref())?;
            match output.format {
                Format::Json => write_json(w, &report)?,
                Format::Csv => write_rows_csv(w, &report)?,
            }
        }
        Command::Simulate {
            input,
            sampling,
            seed,
            output,
        } => {
            let rho = input.load()?;
            let opts = PipelineOptions {
                z: sampling.z,
                seed: *seed,
                bootstrap: sampling.bootstrap,
                batch_size: DEFAULT_BATCH_SIZE,
            };
            let report = simulation_report(&rho, &opts)?;
            let w = open_out(output.out.as_deref())?;
            match output.format {
                Format::Json => write_json(w, &report)?,
                Format::Csv => write_rows_csv(w, &report)?,
            }
        }
        Command::Sweep {
            p_min,
            p_max,
            steps,
            exact_only,
            sampling,
            seed,
            out,
            format,
        } => {
            if !(0.0 <= *p_min && p_min <= p_max && *p_max <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "sweep range must satisfy 0 <= p_min <= p_max <= 1, got [{p_min}, {p_max}]"
                )));
            }
            let rows = sweep(
                *p_min,
                *p_max,
                *steps as usize,
                (!exact_only).then(|| {
                    (
                        sampling.z,
                        seed.expect("clap requires a seed"),
                        sampling.bootstrap,
                    )
                }),
            )?;
            let w = open_out(out.as_deref())?;
            match format {
                Format::Json => write_json(w, &rows)?,
                Format::Csv => write_sweep_csv(w, &rows)?,
            }
        }
    }
    Ok(())
}

/// Rows of a Werner sweep; `sampled = Some((z, seed, bootstrap))` adds the
/// pipeline columns, with point `i` simulated under seed `mix_seed(seed, i)`.
pub fn sweep(
    p_min: f64,
    p_max: f64,
    steps: usize,
    sampled: Option<(u64, u64, usize)>,
) -> Result<Vec<SweepRow>> {
    sweep_points(p_min, p_max, steps)
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let rho = werner(p)?;
            let exact = exact_report(&rho);
            let mut row = SweepRow {
                p,
                negativity_exact: exact.negativity_quartic,
                det_pt_exact: exact.witness.det_pt,
                entangled_exact: exact.witness.entangled,
                negativity_sampled: None,
                negativity_error: None,
                det_pt_sampled: None,
                det_pt_error: None,
                entangled_sampled: None,
            };
            if let Some((z, seed, bootstrap)) = sampled {
                let opts = PipelineOptions {
                    z,
                    seed: mix_seed(seed, i as u64),
                    bootstrap,
                    batch_size: DEFAULT_BATCH_SIZE,
                };
                let s = simulation_report(&rho, &opts)?;
                row.negativity_sampled = Some(s.negativity);
                row.negativity_error = Some(s.negativity_std);
                row.det_pt_sampled = Some(s.witness.det_pt);
                row.det_pt_error = Some(s.det_pt_std);
                row.entangled_sampled = Some(s.witness.entangled);
            }
            Ok(row)
        })
        .collect()
}
