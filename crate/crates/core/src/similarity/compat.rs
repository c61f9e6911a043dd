//! Side-by-side comparison of engine relations with the width laws printed
//! in the literature table for the same families.

use serde::{Deserialize, Serialize};

use super::relation::{build_relation, Branch, SimilarityRelation};
use super::{Bindings, SimilarityError};
use crate::dsl::{expand_alias, parse_equation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Discrepant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatRow {
    pub family: String,
    pub equation: String,
    pub engine_relation: String,
    pub engine_width: Option<String>,
    pub printed_width: String,
    pub verdict: Verdict,
}

type Candidates = fn(a: f64, v: f64, eps: f64) -> Vec<f64>;

struct Printed {
    family: String,
    alias: String,
    printed: String,
    /// Squared widths the printed law allows, one per sign choice.
    l_squared: Box<dyn Fn(f64, f64, f64) -> Vec<f64>>,
}

const SIGNS: [f64; 2] = [1.0, -1.0];

fn all_signs2(f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    SIGNS.iter().flat_map(|&s| SIGNS.iter().map(move |&t| (s, t))).map(|(s, t)| f(s, t)).collect()
}

fn printed_rows() -> Vec<Printed> {
    let mut rows: Vec<Printed> = Vec::new();
    let kdv: Candidates = |a, v, _| all_signs2(|s, t| 1.0 / (s * v + t * 6.0 * a));
    rows.push(Printed {
        family: "KdV".into(),
        alias: "KdV".into(),
        printed: "L = 1/sqrt(|±V ± 6*A|)".into(),
        l_squared: Box::new(kdv),
    });
    let mkdv: Candidates = |a, v, _| all_signs2(|s, t| 1.0 / (s * v + t * 6.0 * a * a));
    for alias in ["MKdV", "MKdV6"] {
        rows.push(Printed {
            family: if alias == "MKdV" { "MKdV".into() } else { "MKdV (6u^2 u_x form)".into() },
            alias: alias.into(),
            printed: "L = 1/sqrt(|±V ± 6*A^2|)".into(),
            l_squared: Box::new(mkdv),
        });
    }
    let k22: Candidates = |a, v, _| all_signs2(|s, t| 8.0 * a / (s * v + t * 2.0 * a));
    rows.push(Printed {
        family: "K(2,2)".into(),
        alias: "K22".into(),
        printed: "L = sqrt(8*A/|±V ± 2*A|)".into(),
        l_squared: Box::new(k22),
    });
    for n in 2..=4u32 {
        let nf = n as f64;
        rows.push(Printed {
            family: format!("K(n,n), n={n}"),
            alias: format!("Knn:{n}"),
            printed: "L = sqrt(n(n^2+1)/(±α ± n)), V = α*A^(n-1)".into(),
            l_squared: Box::new(move |a, v, _| {
                let alpha = v / a.powf(nf - 1.0);
                all_signs2(|s, t| nf * (nf * nf + 1.0) / (s * alpha + t * nf))
            }),
        });
    }
    for (n, m) in [(2u32, 3u32), (3, 2)] {
        let (nf, mf) = (n as f64, m as f64);
        rows.push(Printed {
            family: format!("K({n},{m})"),
            alias: format!("Knm:{n},{m}"),
            printed: "L = sqrt(n(n^2+1)*A^(n-1)/(±V ± m*A^(m-1)))".into(),
            l_squared: Box::new(move |a, v, _| {
                all_signs2(|s, t| nf * (nf * nf + 1.0) * a.powf(nf - 1.0) / (s * v + t * mf * a.powf(mf - 1.0)))
            }),
        });
    }
    for n in 3..=5u32 {
        let nf = n as f64;
        let q = if n == 3 { "2" } else { "n" };
        rows.push(Printed {
            family: format!("NLS(n={n})"),
            alias: format!("NLS:{n}"),
            printed: format!("L = (±V ± sqrt(|V^2 - 4*A^{q}|))/(2*A^{q})"),
            l_squared: Box::new(move |a, v, _| {
                // The n = 3 row is printed with A^2, the general row with A^n.
                let an = if n == 3 { a * a } else { a.powf(nf) };
                // Under the modulus only the real-root case solves anything.
                let d = (v * v - 4.0 * an).sqrt();
                all_signs2(|s, t| (s * v + t * d) / (2.0 * an)).into_iter().map(|l| l * l.abs()).collect()
            }),
        });
    }
    rows.push(Printed {
        family: "K(2,1,2)".into(),
        alias: "K212".into(),
        printed: "L = sqrt((±A + eps)/(V ± A))".into(),
        l_squared: Box::new(|a, v, eps| all_signs2(|s, t| (s * a + eps) / (v + t * a))),
    });
    rows.push(Printed {
        family: "curvature KdV".into(),
        alias: "CurvKdV".into(),
        printed: "L = sqrt(4*eps*A/(±sqrt(1 - 8*eps*A*(A ± V)) - 1))".into(),
        l_squared: Box::new(|a, v, eps| {
            all_signs2(|s, t| {
                let d = 1.0 - 8.0 * eps * a * (a + t * v);
                if d < 0.0 {
                    f64::NAN
                } else {
                    4.0 * eps * a / (s * d.sqrt() - 1.0)
                }
            })
        }),
    });
    rows
}

/// Sample points where both laws are compared.
const SAMPLES: [(f64, f64); 4] = [(0.3, 0.9), (0.7, 2.3), (1.7, -1.1), (0.45, 0.2)];
const EPS: f64 = 0.1;

/// Whether every printed width is a root of some engine branch at each
/// sample point. The printed laws cover fewer sign choices than the engine,
/// so inclusion, not equality, is the test.
fn agrees(rel: &SimilarityRelation, printed: &Printed) -> Result<bool, SimilarityError> {
    let bindings = Bindings::from([("eps".to_string(), EPS)]);
    let branches = Branch::all(rel.slots());
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs());
    let mut checked = 0;
    for (a, v) in SAMPLES {
        let mut engine = Vec::new();
        for b in &branches {
            for r in super::solve_width(rel, &bindings, a, v, b)?.roots {
                engine.push(r.value);
            }
        }
        let paper: Vec<f64> = (printed.l_squared)(a, v, EPS)
            .into_iter()
            .filter(|l2| l2.is_finite() && *l2 > 0.0)
            .map(f64::sqrt)
            .collect();
        if paper.iter().any(|p| !engine.iter().any(|e| close(*e, *p))) {
            return Ok(false);
        }
        checked += paper.len();
    }
    Ok(checked > 0)
}

/// One row per family with a printed width law.
pub fn paper_compat() -> Result<Vec<CompatRow>, SimilarityError> {
    printed_rows()
        .into_iter()
        .map(|p| {
            let equation = expand_alias(&p.alias).expect("built-in alias");
            let ast = parse_equation(&equation).expect("built-in alias parses");
            let rel = build_relation(&ast)?;
            let verdict = if agrees(&rel, &p)? { Verdict::Consistent } else { Verdict::Discrepant };
            Ok(CompatRow {
                family: p.family,
                equation,
                engine_relation: rel.text(),
                engine_width: rel.width_formula(),
                printed_width: p.printed,
                verdict,
            })
        })
        .collect()
}

/// Plain-text table of [`paper_compat`].
pub fn compat_text(rows: &[CompatRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "{} [{}]\n  equation: {}\n  engine:   {}\n            {}\n  printed:  {}\n",
            r.family,
            match r.verdict {
                Verdict::Consistent => "consistent",
                Verdict::Discrepant => "discrepant",
            },
            r.equation,
            r.engine_relation,
            r.engine_width.as_deref().unwrap_or("(no closed form)"),
            r.printed_width,
        ));
    }
    out
}
