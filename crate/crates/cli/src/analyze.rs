use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use compacton::dsl::validate;
use compacton::numerics::fmt17;
use compacton::similarity::{
    build_relation, classify, compat_text, paper_compat, solve_width, Branch, Classification, SimilarityError,
    WidthSolution,
};
use serde::Serialize;

use crate::args::{load_equation, ParamArgs};
use crate::error::{CliError, Result};
use crate::output::{to_json, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextOrJson {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Equation text or alias (KdV, MKdV, MKdV6, K22, Knm:n,m, Knn:n, NLS:n, SG, K212, CurvKdV).
    pub equation: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Restrict the report to this sign branch (repeatable).
    #[arg(long = "branch", allow_hyphen_values = true)]
    pub branches: Vec<String>,
    /// Reference half-width for constant-width laws and rest amplitudes.
    #[arg(long = "L0", default_value_t = 0.707)]
    pub l0: f64,
    /// Amplitude at which to solve for widths (needs --V).
    #[arg(long = "A", requires = "v")]
    pub a: Option<f64>,
    /// Velocity at which to solve for widths (needs --A).
    #[arg(long = "V", requires = "a", allow_hyphen_values = true)]
    pub v: Option<f64>,
    /// Print the engine relation next to the literature width law for every
    /// tabulated family (or only the one matching EQUATION).
    #[arg(long)]
    pub paper_compat: bool,
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    pub format: TextOrJson,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    equation: String,
    relation: String,
    raw_relation: String,
    width_formula: Option<String>,
    validation: compacton::dsl::ValidationReport,
    branches: Vec<BranchText>,
    classification: Option<Classification>,
    classification_error: Option<String>,
    solutions: Vec<WidthSolution>,
}

#[derive(Serialize)]
struct BranchText {
    branch: Branch,
    relation: String,
}

pub fn run(args: &AnalyzeArgs, run: &mut Run) -> Result<()> {
    if args.paper_compat {
        return compat(args, run);
    }
    let text = args.equation.as_deref().ok_or_else(|| CliError::usage("analyze needs an EQUATION (or --paper-compat)"))?;
    let bindings = args.params.bindings();
    let (equation, ast) = load_equation(run, text, &bindings)?;
    let rel = build_relation(&ast)?;
    let selected: Vec<Branch> = if args.branches.is_empty() {
        Branch::canonical(rel.slots())
    } else {
        let bs = args.branches.iter().map(|b| b.parse::<Branch>()).collect::<std::result::Result<Vec<_>, _>>()?;
        for b in &bs {
            rel.check_branch(b)?;
        }
        bs
    };
    let branches = selected
        .iter()
        .map(|b| Ok(BranchText { branch: b.clone(), relation: rel.signed_text(b)? }))
        .collect::<Result<Vec<_>>>()?;
    let (classification, classification_error) = match classify(&rel, &bindings, args.l0) {
        Ok(mut c) => {
            c.branches.retain(|r| selected.iter().any(|b| *b == r.branch || *b == r.branch.flipped()));
            (Some(c), None)
        }
        Err(e @ SimilarityError::UnboundParameter(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut solutions = Vec::new();
    if let (Some(a), Some(v)) = (args.a, args.v) {
        for b in &selected {
            solutions.push(solve_width(&rel, &bindings, a, v, b)?);
        }
    }
    let mut validation = validate(&ast);
    if ast.parameters.iter().all(|p| bindings.contains_key(p)) {
        validation.warnings.retain(|w| !w.starts_with("symbolic parameters"));
    }
    let report = Report {
        equation,
        relation: rel.text(),
        raw_relation: rel.raw_text(),
        width_formula: rel.width_formula(),
        validation,
        branches,
        classification,
        classification_error,
        solutions,
    };
    let out = match args.format {
        TextOrJson::Json => to_json(&report),
        TextOrJson::Text => render(&report, args),
    };
    run.emit_or_print(args.emit.as_deref(), &out)
}

fn render(r: &Report, args: &AnalyzeArgs) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "equation: {}", r.equation);
    let _ = writeln!(s, "relation: {}", r.relation);
    match &r.width_formula {
        Some(w) => {
            let _ = writeln!(s, "width:    {w}");
        }
        None if !r.relation.contains('L') => {
            let _ = writeln!(s, "width:    any L (the relation does not involve L)");
        }
        None => {
            let _ = writeln!(s, "width:    no closed form");
        }
    }
    if let Some(f) = r.validation.family {
        let _ = writeln!(s, "family:   {f:?}");
    }
    for w in &r.validation.warnings {
        let _ = writeln!(s, "warning:  {w}");
    }
    for b in &r.branches {
        let _ = writeln!(s, "branch {}: {}", b.branch, b.relation);
        let Some(c) = &r.classification else { continue };
        let Some(q) = c.branches.iter().find(|q| q.branch == b.branch || q.branch == b.branch.flipped()) else {
            continue;
        };
        if let Some(law) = &q.constant_width_law {
            let _ = writeln!(
                s,
                "  constant width: V = ({})*A^{} + ({}); at L = {}: alpha = {}, beta = {}",
                law.alpha,
                law.p,
                law.beta,
                fmt17(law.width),
                fmt17(law.alpha_value),
                fmt17(law.beta_value)
            );
        }
        if let Some(a) = q.rest_amplitude {
            let _ = writeln!(s, "  rest amplitude (V = 0, L = {}): {}", fmt17(args.l0), fmt17(a));
        }
        if let Some(p) = &q.velocity_law {
            let _ = writeln!(s, "  velocity law: V = {}*A^{}", fmt17(p.alpha), p.p);
        }
        if let Some(f) = &q.bifurcation {
            let _ = writeln!(
                s,
                "  fold along V = {}*A: critical amplitude {}, width {}, roots {} -> {}",
                fmt17(f.velocity_factor),
                fmt17(f.critical_amplitude),
                fmt17(f.width),
                f.roots_below,
                f.roots_above
            );
        }
    }
    if let Some(e) = &r.classification_error {
        let _ = writeln!(s, "classification unavailable: {e}");
    }
    for sol in &r.solutions {
        let roots: Vec<String> = sol
            .roots
            .iter()
            .map(|x| if x.multiplicity > 1 { format!("{} (x{})", fmt17(x.value), x.multiplicity) } else { fmt17(x.value) })
            .collect();
        let _ = writeln!(
            s,
            "widths on {} at A = {}, V = {}: {}",
            sol.branch,
            fmt17(args.a.unwrap_or(f64::NAN)),
            fmt17(args.v.unwrap_or(f64::NAN)),
            if roots.is_empty() { format!("none ({:?})", sol.method) } else { roots.join(", ") }
        );
    }
    s
}

fn compat(args: &AnalyzeArgs, run: &mut Run) -> Result<()> {
    let mut rows = paper_compat()?;
    if let Some(text) = &args.equation {
        let (equation, _) = load_equation(run, text, &args.params.bindings())?;
        rows.retain(|r| r.equation == equation);
        if rows.is_empty() {
            return Err(CliError::usage(format!("no tabulated family has equation '{equation}'")));
        }
    }
    let out = match args.format {
        TextOrJson::Json => to_json(&rows),
        TextOrJson::Text => compat_text(&rows),
    };
    run.emit_or_print(args.emit.as_deref(), &out)
}
