use std::path::PathBuf;

use clap::{Args, ValueEnum};
use compacton::exec::with_threads;
use compacton::similarity::{build_relation, sweep, Branch, Crossing, CurveTable, Divergence, VelocitySpec};
use serde::Serialize;

use crate::args::{load_equation, parse_span, JobArgs, ParamArgs, Span};
use crate::error::{CliError, Result};
use crate::output::{to_json, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CsvOrJson {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Equation text or alias.
    #[arg(long)]
    pub eq: String,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Amplitudes as min:max:n.
    #[arg(long = "A", value_parser = parse_span)]
    pub a: Span,
    /// Velocities as min:max:n, paired with every amplitude.
    #[arg(long = "V", value_parser = parse_span, allow_hyphen_values = true, conflicts_with = "v_factor")]
    pub v: Option<Span>,
    /// Use the single velocity V = factor*A instead of a velocity grid.
    #[arg(long = "V-factor", allow_hyphen_values = true)]
    pub v_factor: Option<f64>,
    /// Sign branch (repeatable); default all canonical branches.
    #[arg(long = "branch", allow_hyphen_values = true)]
    pub branches: Vec<String>,
    /// Report where each curve crosses L = L0 (JSON output).
    #[arg(long = "L0")]
    pub l0: Option<f64>,
    #[arg(long, value_enum, default_value_t = CsvOrJson::Csv)]
    pub format: CsvOrJson,
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: JobArgs,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    equation: String,
    relation: String,
    reference_width: Option<f64>,
    crossings: Vec<Crossing>,
    divergences: Vec<Divergence>,
    table: &'a CurveTable,
}

pub fn run(args: &SweepArgs, run: &mut Run) -> Result<()> {
    let bindings = args.params.bindings();
    let (equation, ast) = load_equation(run, &args.eq, &bindings)?;
    let rel = build_relation(&ast)?;
    let velocities = match (args.v, args.v_factor) {
        (Some(s), None) => VelocitySpec::Range { min: s.min, max: s.max, samples: s.n },
        (None, Some(f)) => VelocitySpec::Proportional { factor: f },
        _ => return Err(CliError::usage("sweep needs exactly one of --V or --V-factor")),
    };
    let branches: Vec<Branch> = if args.branches.is_empty() {
        Branch::canonical(rel.slots())
    } else {
        args.branches.iter().map(|b| b.parse::<Branch>()).collect::<std::result::Result<_, _>>()?
    };
    for b in &branches {
        rel.check_branch(b)?;
    }
    let amplitudes = args.a.values();
    if amplitudes.iter().any(|a| !(*a > 0.0)) {
        return Err(CliError::usage("amplitudes must be positive"));
    }
    let exec = args.jobs.execution();
    let table = with_threads(args.jobs.jobs, || sweep(&rel, &bindings, &amplitudes, &velocities, &branches, exec))?;
    let out = match args.format {
        CsvOrJson::Csv => table.to_csv(),
        CsvOrJson::Json => to_json(&SweepReport {
            equation,
            relation: rel.text(),
            reference_width: args.l0,
            crossings: args.l0.map(|l| table.crossings(l)).unwrap_or_default(),
            divergences: table.divergences(),
            table: &table,
        }),
    };
    run.emit_or_print(args.emit.as_deref(), &out)
}
