use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use compacton::closed_forms::TravelingWave;
use compacton::frame::morlet::{derivative_estimate, MorletParams};
use compacton::frame::{
    children, expand, expand_fn, reconstruction_csv, square_expand, two_scale_check, ExpandMethod, ExpandOptions,
    FrameElement, FrameExpansion, SquareExpansion,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{parse_interval, JobArgs};
use crate::error::{CliError, Result};
use crate::output::{to_json, Run};

#[derive(Debug, Subcommand)]
pub enum FrameCommand {
    /// Two-scale defects and children() against brute-force cell overlap.
    Check(CheckArgs),
    /// Expand sampled data or a named function in the frame.
    Expand(ExpandArgs),
    /// Square an expansion in the frame, or check squaring on random ones.
    Square(SquareArgs),
    /// Multi-scale Morlet derivative estimate.
    Morlet(MorletArgs),
}

pub fn run(cmd: &FrameCommand, run: &mut Run) -> Result<()> {
    match cmd {
        FrameCommand::Check(a) => check(a, run),
        FrameCommand::Expand(a) => expand_cmd(a, run),
        FrameCommand::Square(a) => square(a, run),
        FrameCommand::Morlet(a) => morlet(a, run),
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Largest scale index for the children check (from 0).
    #[arg(long, default_value_t = 5)]
    pub j_max: i32,
    /// Translations |k| ≤ k_max are checked.
    #[arg(long, default_value_t = 16)]
    pub k_max: i64,
    /// Sample points per two-scale defect.
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct CheckReport {
    two_scale_cases: usize,
    two_scale_max_defect: f64,
    children_cases: usize,
    children_mismatches: Vec<(i64, i32, i32)>,
    passed: bool,
}

/// Fine translations whose cells overlap the coarse cell, by scanning.
fn brute_children(k: i64, j: i32, jf: i32) -> Vec<i64> {
    let s = (-(j as f64)).exp2();
    let sf = (-(jf as f64)).exp2();
    let (a, b) = (k as f64 * s, (k + 1) as f64 * s);
    let reach = (b.abs().max(a.abs()) / sf).ceil() as i64 + 2;
    (-reach..=reach)
        .filter(|&kf| {
            let (c, d) = (kf as f64 * sf, (kf + 1) as f64 * sf);
            c < b && a < d
        })
        .collect()
}

fn check(args: &CheckArgs, run: &mut Run) -> Result<()> {
    if !(0..=12).contains(&args.j_max) {
        return Err(CliError::usage("--j-max must lie in 0..=12"));
    }
    let mut max_defect = 0.0f64;
    let mut cases = 0;
    for j in -args.j_max..=args.j_max {
        for k in -6..=6 {
            max_defect = max_defect.max(two_scale_check(j, k, args.points));
            cases += 1;
        }
    }
    let mut mismatches = Vec::new();
    let mut children_cases = 0;
    for j in 0..=args.j_max {
        for jf in j..=args.j_max {
            for k in -args.k_max..=args.k_max {
                let got: Vec<i64> = children(k, j, jf)?.collect();
                if got != brute_children(k, j, jf) {
                    mismatches.push((k, j, jf));
                }
                children_cases += 1;
            }
        }
    }
    let passed = max_defect < args.tolerance && mismatches.is_empty();
    let report = CheckReport {
        two_scale_cases: cases,
        two_scale_max_defect: max_defect,
        children_cases,
        children_mismatches: mismatches,
        passed,
    };
    run.emit_or_print(args.emit.as_deref(), &to_json(&report))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Numeric("frame check failed".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Greedy,
    LeastSquares,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// CSV with header `x,u` on a uniform grid.
    #[arg(long, conflicts_with = "function")]
    pub input: Option<PathBuf>,
    /// gaussian, compacton (K(2,2), V = 0.75) or eta:k,j.
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Sampling window a:b for --fn.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true, default_value = "-8:8")]
    pub window: (f64, f64),
    /// Grid spacing for --fn.
    #[arg(long, default_value_t = 1.0 / 256.0)]
    pub h: f64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub j_min: i32,
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    pub j_max: i32,
    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    pub method: Method,
    /// Relative size below which data counts as zero at the window edges.
    #[arg(long, default_value_t = 1e-12)]
    pub edge_tolerance: f64,
    /// Drop coefficients with |c| at or below this.
    #[arg(long)]
    pub prune: Option<f64>,
    /// Coefficient JSON destination (default stdout).
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Also write the reconstruction on the input grid as CSV.
    #[arg(long)]
    pub reconstruct: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: JobArgs,
}

fn named_function(name: &str) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    if let Some(rest) = name.strip_prefix("eta:") {
        let bad = || CliError::usage(format!("expected eta:k,j, got '{name}'"));
        let (k, j) = rest.split_once(',').ok_or_else(bad)?;
        let el = FrameElement::new(k.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?);
        return Ok(Box::new(move |x| el.eval(x)));
    }
    match name {
        "gaussian" => Ok(Box::new(|x: f64| (-x * x).exp())),
        "compacton" => {
            let w = TravelingWave::k22_compacton(0.75)?;
            Ok(Box::new(move |x| w.eval(x, 0.0)))
        }
        _ => Err(CliError::usage(format!("unknown function '{name}' (gaussian, compacton, eta:k,j)"))),
    }
}

fn read_xu_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic())) {
            continue;
        }
        let bad = || CliError::usage(format!("line {}: expected 'x,u'", i + 1));
        let (x, u) = line.split_once(',').ok_or_else(bad)?;
        xs.push(x.trim().parse().map_err(|_| bad())?);
        us.push(u.trim().parse().map_err(|_| bad())?);
    }
    Ok((xs, us))
}

fn expand_cmd(args: &ExpandArgs, run: &mut Run) -> Result<()> {
    let opts = ExpandOptions {
        j_min: args.j_min,
        j_max: args.j_max,
        method: match args.method {
            Method::Greedy => ExpandMethod::Greedy,
            Method::LeastSquares => ExpandMethod::LeastSquares,
        },
        edge_tolerance: args.edge_tolerance,
        exec: args.jobs.execution(),
    };
    let (xs, expansion) = match (&args.input, &args.function) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            run.input(&path.display().to_string(), text.as_bytes());
            let (xs, us) = read_xu_csv(&text)?;
            let e = compacton::exec::with_threads(args.jobs.jobs, || expand(&xs, &us, &opts))?;
            (xs, e)
        }
        (None, Some(name)) => {
            run.input("fn", format!("{name}|{:?}|{}", args.window, args.h).as_bytes());
            let f = named_function(name)?;
            let (a, b) = args.window;
            if !(args.h > 0.0) {
                return Err(CliError::usage("--h must be positive"));
            }
            let n = ((b - a) / args.h).round() as usize;
            let xs: Vec<f64> = (0..=n).map(|i| a + i as f64 * args.h).collect();
            let e = compacton::exec::with_threads(args.jobs.jobs, || expand_fn(&f, args.window, args.h, &opts))?;
            (xs, e)
        }
        _ => return Err(CliError::usage("frame expand needs exactly one of --input or --fn")),
    };
    let expansion = match args.prune {
        Some(tol) => {
            let mut p = expansion.pruned(tol);
            p.reconstruction_error = expansion.reconstruction_error;
            p
        }
        None => expansion,
    };
    run.emit_or_print(args.emit.as_deref(), &to_json(&expansion))?;
    if let Some(path) = &args.reconstruct {
        run.write(path, reconstruction_csv(&expansion, &xs).as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct SquareArgs {
    /// Coefficient JSON as written by `frame expand`.
    #[arg(long, conflicts_with = "random")]
    pub input: Option<PathBuf>,
    /// Check this many random expansions against direct squaring instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 17)]
    pub seed: u64,
    /// Check points on [-5, 5].
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct SquareReport<'a> {
    self_terms: usize,
    cross_terms: usize,
    max_error: f64,
    square: &'a SquareExpansion,
}

#[derive(Serialize)]
struct RandomSquareReport {
    seed: u64,
    expansions: usize,
    points: usize,
    max_error: f64,
    passed: bool,
}

fn random_expansion(rng: &mut ChaCha8Rng) -> FrameExpansion {
    let mut e = FrameExpansion::new(-1, 3);
    for _ in 0..rng.gen_range(5..=12) {
        let j = rng.gen_range(-1..=3);
        let span = 1i64 << (j + 1).max(0);
        let k = rng.gen_range(-span..=span);
        e.add(FrameElement::new(k, j), rng.gen_range(-2.0..2.0));
    }
    e
}

fn square_error(e: &FrameExpansion, sq: &SquareExpansion, points: usize) -> f64 {
    let n = points.max(2);
    (0..n)
        .map(|i| -5.0 + 10.0 * i as f64 / (n - 1) as f64)
        .map(|x| (sq.eval(x) - e.eval(x).powi(2)).abs())
        .fold(0.0, f64::max)
}

fn square(args: &SquareArgs, run: &mut Run) -> Result<()> {
    let (out, max_error) = match (&args.input, args.random) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            run.input(&path.display().to_string(), text.as_bytes());
            let e: FrameExpansion = serde_json::from_str(&text)?;
            let sq = square_expand(&e);
            let max_error = square_error(&e, &sq, args.points);
            let report =
                SquareReport { self_terms: sq.self_terms(), cross_terms: sq.cross_terms(), max_error, square: &sq };
            (to_json(&report), max_error)
        }
        (None, Some(count)) => {
            run.input("seed", args.seed.to_string().as_bytes());
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let max_error = (0..count)
                .map(|_| {
                    let e = random_expansion(&mut rng);
                    square_error(&e, &square_expand(&e), args.points)
                })
                .fold(0.0, f64::max);
            let report = RandomSquareReport {
                seed: args.seed,
                expansions: count,
                points: args.points,
                max_error,
                passed: max_error < args.tolerance,
            };
            (to_json(&report), max_error)
        }
        _ => return Err(CliError::usage("frame square needs exactly one of --input or --random")),
    };
    run.emit_or_print(args.emit.as_deref(), &out)?;
    if max_error < args.tolerance {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("squaring error {max_error:e} exceeds {:e}", args.tolerance)))
    }
}

#[derive(Debug, Args)]
pub struct MorletArgs {
    /// Parameter JSON: {"alpha": .., "coefficients": [{"j", "k", "c": [re, im]}]}.
    #[arg(long, conflicts_with_all = ["alpha", "terms"])]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Coefficient j:k:re[:im] (repeatable).
    #[arg(long = "term", allow_hyphen_values = true)]
    pub terms: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    /// Derivative order.
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

fn parse_term(s: &str) -> Result<(i32, i64, Complex64)> {
    let bad = || CliError::usage(format!("expected j:k:re[:im], got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let j = parts[0].trim().parse().map_err(|_| bad())?;
    let k = parts[1].trim().parse().map_err(|_| bad())?;
    let re = parts[2].trim().parse().map_err(|_| bad())?;
    let im = parts.get(3).map_or(Ok(0.0), |p| p.trim().parse().map_err(|_| bad()))?;
    Ok((j, k, Complex64::new(re, im)))
}

fn morlet(args: &MorletArgs, run: &mut Run) -> Result<()> {
    let params = match (&args.params, args.alpha) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            run.input(&path.display().to_string(), text.as_bytes());
            serde_json::from_str::<MorletParams>(&text)?
        }
        (None, Some(alpha)) => {
            let mut p = MorletParams::new(alpha);
            for t in &args.terms {
                let (j, k, c) = parse_term(t)?;
                p.set(j, k, c);
            }
            run.input("params", to_json(&p).as_bytes());
            p
        }
        (None, None) => return Err(CliError::usage("frame morlet needs --params or --alpha with --term")),
    };
    let est = derivative_estimate(&params, args.x0, args.order)?;
    run.emit_or_print(args.emit.as_deref(), &to_json(&est))
}
