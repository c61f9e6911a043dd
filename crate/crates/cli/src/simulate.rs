use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use compacton::exec::with_threads;
use compacton::numerics::fmt17;
use compacton::simulator::{
    run as simulate, snapshot_binary, snapshot_csv, CompactonInventory, ConservationLaw, Extremum, InitialData, SimConfig,
    SimError, SimTrace, TimeStep,
};
use serde::Serialize;

use crate::args::{load_equation, JobArgs, ParamArgs};
use crate::error::{CliError, Result};
use crate::output::{to_json, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SnapshotFormat {
    Csv,
    Bin,
    None,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Equation text or alias; must be in conservation form.
    #[arg(long, default_value = "K22")]
    pub eq: String,
    #[command(flatten)]
    pub params: ParamArgs,
    /// compacton:V[@x] or stretched:s[:A][@x]; the default center is -domain/4.
    #[arg(long)]
    pub init: String,
    #[arg(long, default_value_t = 50.0)]
    pub tend: f64,
    /// Grid points (a power of two).
    #[arg(long, default_value_t = 2048)]
    pub points: usize,
    /// Length of the periodic domain, centred on 0.
    #[arg(long, default_value_t = 256.0)]
    pub domain: f64,
    /// Hyperviscosity coefficient; default 1e-2*dx^2.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Fixed time step; default chooses a stable step per output interval.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub cfl: f64,
    #[arg(long, default_value_t = 1.0)]
    pub output_interval: f64,
    /// Detection threshold as a fraction of the initial max |u|.
    #[arg(long, default_value_t = 0.1)]
    pub detect: f64,
    /// Declare blow-up when max |u| exceeds this multiple of its initial value.
    #[arg(long, default_value_t = 1e3)]
    pub blow_up_factor: f64,
    /// Directory for diagnostics, mass history, snapshots and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SnapshotFormat::None)]
    pub snapshots: SnapshotFormat,
    #[command(flatten)]
    pub jobs: JobArgs,
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    equation: String,
    config: &'a SimConfig,
    hyperviscosity: f64,
    steps: usize,
    blow_up: bool,
    blow_up_time: Option<f64>,
    blow_up_max_abs: Option<f64>,
    max_mass_drift: f64,
    mass_violation: bool,
    warnings: &'a [String],
    final_inventory: Option<&'a CompactonInventory>,
    inventories: &'a [CompactonInventory],
    extrema: &'a [Extremum],
}

pub fn run(args: &SimulateArgs, run: &mut Run) -> Result<()> {
    if let Some(dir) = &args.out {
        run.declare_dir(dir)?;
    }
    let bindings = args.params.bindings();
    let (equation, ast) = load_equation(run, &args.eq, &bindings)?;
    let law = ConservationLaw::from_ast(&ast, &bindings).map_err(|e| match e {
        SimError::NotConservative(_) => CliError::usage(e.to_string()),
        other => other.into(),
    })?;
    let exec = args.jobs.execution();
    let cfg = SimConfig {
        domain_length: args.domain,
        points: args.points,
        dt: args.dt.map_or(TimeStep::Auto, TimeStep::Fixed),
        t_end: args.tend,
        hyperviscosity: args.mu,
        output_interval: args.output_interval,
        cfl: args.cfl,
        detect_fraction: args.detect,
        blow_up_factor: args.blow_up_factor,
        exec,
    };
    let init: InitialData = args.init.parse()?;
    run.input("init", args.init.as_bytes());
    let u0 = init.with_default_center(cfg.domain_length).sample(&cfg)?;
    let outcome = with_threads(args.jobs.jobs, || simulate(&u0, &law, &cfg));
    let (trace, failure) = match outcome {
        Ok(trace) => (trace, None),
        Err(SimError::BlowUp { t, max_abs, trace }) => (*trace, Some(CliError::BlowUp { t, max_abs })),
        Err(e) => return Err(e.into()),
    };
    report(args, run, &equation, &cfg, &trace, failure.as_ref())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn report(
    args: &SimulateArgs,
    run: &mut Run,
    equation: &str,
    cfg: &SimConfig,
    trace: &SimTrace,
    failure: Option<&CliError>,
) -> Result<()> {
    let (blow_up_time, blow_up_max_abs) = match failure {
        Some(CliError::BlowUp { t, max_abs }) => (Some(*t), Some(*max_abs)),
        _ => (None, None),
    };
    let diag = Diagnostics {
        equation: equation.to_string(),
        config: cfg,
        hyperviscosity: cfg.mu(),
        steps: trace.steps,
        blow_up: trace.blow_up,
        blow_up_time,
        blow_up_max_abs,
        max_mass_drift: trace.max_mass_drift,
        mass_violation: trace.mass_violation,
        warnings: &trace.warnings,
        final_inventory: trace.inventories.last(),
        inventories: &trace.inventories,
        extrema: &trace.extrema,
    };
    let json = to_json(&diag);
    let Some(dir) = &args.out else {
        print!("{json}");
        return Ok(());
    };
    run.write(&dir.join("diagnostics.json"), json.as_bytes())?;
    let mut mass = String::from("t,mass\n");
    for (t, m) in &trace.mass {
        let _ = writeln!(mass, "{},{}", fmt17(*t), fmt17(*m));
    }
    run.write(&dir.join("mass.csv"), mass.as_bytes())?;
    match args.snapshots {
        SnapshotFormat::None => {}
        SnapshotFormat::Csv => run.write(&dir.join("snapshots.csv"), snapshot_csv(&trace.snapshots, &cfg.grid()).as_bytes())?,
        SnapshotFormat::Bin => {
            for (i, s) in trace.snapshots.iter().enumerate() {
                run.write(&dir.join(format!("snapshot_{i:05}.bin")), &snapshot_binary(s))?;
            }
        }
    }
    Ok(())
}
