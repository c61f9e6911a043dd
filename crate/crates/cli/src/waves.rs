//! `exact` and `residual`: sampling closed-form waves and checking them
//! against their equation.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use compacton::closed_forms::{profile_csv, residual, Grid, ResidualReport, TravelingWave, WaveFamily};
use compacton::numerics::fmt17;
use serde::Serialize;

use crate::args::{load_equation, parse_interval, parse_span, ParamArgs, Span};
use crate::error::{CliError, Result};
use crate::output::{to_json, Run};
use crate::sweep::CsvOrJson;

#[derive(Debug, Args)]
pub struct WaveArgs {
    /// One of kdv-sech2, mkdv-sech, mkdv-exotic, k22-compacton, k22-kak,
    /// k22-comp-on-kak, k22-offset-compacton, knn-compacton.
    #[arg(long)]
    pub family: String,
    #[arg(long = "V", allow_hyphen_values = true)]
    pub v: Option<f64>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Plateau length of a kink-antikink pair.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Offset of the secondary compacton.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Exponent of K(n,n).
    #[arg(long)]
    pub n: Option<u32>,
    /// Wavenumber of the compact MKdV lobe.
    #[arg(long)]
    pub k: Option<f64>,
    /// Amplitude of the compacton riding on the plateau.
    #[arg(long)]
    pub top: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
}

impl WaveArgs {
    pub fn build(&self) -> Result<TravelingWave> {
        let family: WaveFamily = self.family.parse()?;
        let need = |x: Option<f64>, flag: &str| {
            x.ok_or_else(|| CliError::usage(format!("family {family} needs --{flag}")))
        };
        let w = match family {
            WaveFamily::KdvSech2 => TravelingWave::kdv_sech2(need(self.a, "A")?)?,
            WaveFamily::MkdvSech => TravelingWave::mkdv_sech(need(self.a, "A")?)?,
            WaveFamily::MkdvExotic => TravelingWave::mkdv_exotic(need(self.k, "k")?)?,
            WaveFamily::K22Compacton => TravelingWave::k22_compacton(need(self.v, "V")?)?,
            WaveFamily::K22Kak => TravelingWave::k22_kak(need(self.v, "V")?, need(self.lambda, "lambda")?)?,
            WaveFamily::K22OffsetCompacton => TravelingWave::k22_offset(need(self.a, "A")?, need(self.delta, "delta")?)?,
            WaveFamily::KnnCompacton => {
                let n = self.n.ok_or_else(|| CliError::usage("family knn-compacton needs --n"))?;
                TravelingWave::knn(n, need(self.v, "V")?)?
            }
            WaveFamily::K22CompOnKak => TravelingWave::k22_compound(
                need(self.v, "V")?,
                need(self.lambda, "lambda")?,
                need(self.top, "top")?,
                need(self.delta, "delta")?,
            )?,
        };
        Ok(w)
    }
}

/// Support at `t` with a margin, or a fixed window for non-compact waves.
fn default_window(w: &TravelingWave, t: f64) -> (f64, f64) {
    match w.support(t) {
        Some((lo, hi)) => {
            let pad = 0.1 * (hi - lo) + 1.0;
            (lo - pad, hi + pad)
        }
        None => (w.velocity * t - 20.0, w.velocity * t + 20.0),
    }
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Sample grid a:b:n; default covers the support with a margin.
    #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
    pub range: Option<Span>,
    #[arg(long, value_enum, default_value_t = CsvOrJson::Csv)]
    pub format: CsvOrJson,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct Profile<'a> {
    wave: &'a TravelingWave,
    equation: String,
    t: f64,
    support: Option<(f64, f64)>,
    samples: Vec<(f64, f64)>,
}

pub fn exact(args: &ExactArgs, run: &mut Run) -> Result<()> {
    let w = args.wave.build()?;
    let t = args.wave.t;
    w.eval_checked(0.0, t)?;
    let span = args.range.unwrap_or_else(|| {
        let (a, b) = default_window(&w, t);
        Span { min: a, max: b, n: 1001 }
    });
    let samples = w.sample(t, span.min, span.max, span.n);
    let out = match args.format {
        CsvOrJson::Csv => profile_csv(&samples),
        CsvOrJson::Json => to_json(&Profile { wave: &w, equation: w.equation_alias(), t, support: w.support(t), samples }),
    };
    run.emit_or_print(args.emit.as_deref(), &out)
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Check against this equation instead of the wave's own.
    #[arg(long)]
    pub eq: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Evaluate with this velocity instead of the wave's (a control that
    /// should fail).
    #[arg(long = "set-V", allow_hyphen_values = true)]
    pub set_v: Option<f64>,
    /// Coarsest grid spacing.
    #[arg(long, default_value_t = 1e-3)]
    pub dx: f64,
    /// Number of additional halvings of dx.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    /// Window a:b; default covers the support with a margin.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value_t = CsvOrJson::Csv)]
    pub format: CsvOrJson,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct ResidualRow {
    #[serde(flatten)]
    report: ResidualReport,
    /// log2 of the interior residual ratio to the previous (coarser) row.
    observed_order: Option<f64>,
}

#[derive(Serialize)]
struct ResidualDoc<'a> {
    wave: &'a TravelingWave,
    equation: String,
    t: f64,
    rows: Vec<ResidualRow>,
}

pub fn residuals(args: &ResidualArgs, run: &mut Run) -> Result<()> {
    let mut w = args.wave.build()?;
    if let Some(v) = args.set_v {
        w.velocity = v;
    }
    if !(args.dx > 0.0 && args.dx.is_finite()) {
        return Err(CliError::usage("--dx must be positive"));
    }
    if args.refine > 8 {
        return Err(CliError::usage("--refine is limited to 8 halvings"));
    }
    let bindings = args.params.bindings();
    let eq = args.eq.clone().unwrap_or_else(|| w.equation_alias());
    let (equation, ast) = load_equation(run, &eq, &bindings)?;
    let t = args.wave.t;
    let (x0, x1) = args.range.unwrap_or_else(|| default_window(&w, t));
    let mut rows: Vec<ResidualRow> = Vec::new();
    for i in 0..=args.refine {
        let dx = args.dx / (i as f64).exp2();
        let report = residual(&w, &ast, &bindings, &Grid { x0, x1, dx, t })?;
        let observed_order = rows.last().map(|p| (p.report.interior_max_abs / report.interior_max_abs).log2());
        rows.push(ResidualRow { report, observed_order });
    }
    let out = match args.format {
        CsvOrJson::Json => to_json(&ResidualDoc { wave: &w, equation, t, rows }),
        CsvOrJson::Csv => {
            let mut s = String::from("dx,max_abs,interior_max_abs,points,interior_points,observed_order\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt17(r.report.dx),
                    fmt17(r.report.max_abs),
                    fmt17(r.report.interior_max_abs),
                    r.report.points,
                    r.report.interior_points,
                    r.observed_order.map(fmt17).unwrap_or_default()
                );
            }
            s
        }
    };
    run.emit_or_print(args.emit.as_deref(), &out)
}
