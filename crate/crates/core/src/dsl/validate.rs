use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::aliases::expand_alias;
use super::ast::{EquationAst, Term};
use super::parse_equation;

/// Equation families the library knows by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    KdV,
    /// `u_t + u²u_x + u_xxx = 0`
    MKdV,
    /// `u_t + 6u²u_x + u_xxx = 0`
    MKdV6,
    K22,
    Knn { n: u32 },
    Knm { n: u32, m: u32 },
    Nls { n: u32 },
    SineGordon,
    K212,
    CurvatureKdV,
}

impl Family {
    /// Alias string understood by [`expand_alias`].
    pub fn alias(self) -> String {
        match self {
            Family::KdV => "KdV".into(),
            Family::MKdV => "MKdV".into(),
            Family::MKdV6 => "MKdV6".into(),
            Family::K22 => "K22".into(),
            Family::Knn { n } => format!("Knn:{n}"),
            Family::Knm { n, m } => format!("Knm:{n},{m}"),
            Family::Nls { n } => format!("NLS:{n}"),
            Family::SineGordon => "SG".into(),
            Family::K212 => "K212".into(),
            Family::CurvatureKdV => "CurvKdV".into(),
        }
    }

    /// Whether closed-form traveling solutions are implemented.
    pub fn has_closed_form(self) -> bool {
        matches!(
            self,
            Family::KdV | Family::MKdV | Family::MKdV6 | Family::K22 | Family::Knn { .. } | Family::SineGordon
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::KdV => f.write_str("KdV"),
            Family::MKdV => f.write_str("MKdV"),
            Family::MKdV6 => f.write_str("MKdV (6u^2 u_x)"),
            Family::K22 => f.write_str("K(2,2)"),
            Family::Knn { n } => write!(f, "K({n},{n})"),
            Family::Knm { n, m } => write!(f, "K({n},{m})"),
            Family::Nls { n } => write!(f, "NLS(n={n})"),
            Family::SineGordon => f.write_str("sine-Gordon"),
            Family::K212 => f.write_str("K(2,1,2)"),
            Family::CurvatureKdV => f.write_str("curvature KdV"),
        }
    }
}

/// Which downstream capabilities apply to an equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub similarity: bool,
    pub simulate: bool,
    pub family: Option<Family>,
    pub closed_form: Option<Family>,
    pub warnings: Vec<String>,
}

pub fn validate(ast: &EquationAst) -> ValidationReport {
    let family = recognize(ast);
    let mut warnings = Vec::new();
    let simulate = match conservation_form(ast) {
        Ok(()) => true,
        Err(reason) => {
            warnings.push(format!("simulation unavailable: {reason}"));
            false
        }
    };
    if !ast.parameters.is_empty() {
        let names: Vec<&str> = ast.parameters.iter().map(String::as_str).collect();
        warnings.push(format!("symbolic parameters must be bound before numeric work: {}", names.join(", ")));
    }
    ValidationReport {
        similarity: true,
        simulate,
        family,
        closed_form: family.filter(|f| f.has_closed_form()),
        warnings,
    }
}

/// `u_t + Σ c·∂x^q(u^p) = 0` with every flux term differentiated at least
/// once. `u^a·u_x` counts as `(u^(a+1))_x/(a+1)`.
pub(crate) fn conservation_form(ast: &EquationAst) -> Result<(), String> {
    for term in &ast.terms {
        if term.is_time_term() {
            if term.factors[0].x_order + term.outer_x_order != 0 {
                return Err("time derivative is not u_t".into());
            }
            continue;
        }
        if term.transcendental.is_some() {
            return Err("transcendental term".into());
        }
        if flux_shape(term).is_none() {
            return Err(format!("term '{}' is not an x-derivative of a power of u", single(term)));
        }
    }
    Ok(())
}

/// (power p, derivative count q, extra factor) with `term = factor·c·∂x^q(u^p)`.
pub(crate) fn flux_shape(term: &Term) -> Option<(u32, u32, f64)> {
    match term.factors.as_slice() {
        [a] if a.t_order == 0 && a.x_order == 0 && term.outer_x_order >= 1 => Some((a.power, term.outer_x_order, 1.0)),
        [a] if a.t_order == 0 && a.power == 1 && a.x_order + term.outer_x_order >= 1 => {
            Some((1, a.x_order + term.outer_x_order, 1.0))
        }
        [a, b] if term.outer_x_order == 0
            && a.x_order == 0
            && a.t_order == 0
            && b.x_order == 1
            && b.t_order == 0
            && b.power == 1 =>
        {
            Some((a.power + 1, 1, 1.0 / (a.power + 1) as f64))
        }
        _ => None,
    }
}

fn single(term: &Term) -> String {
    let mut t = term.clone();
    t.coefficient.value = t.coefficient.value.abs();
    let ast = EquationAst { terms: vec![t], parameters: Default::default(), source_text: String::new() };
    ast.to_string().trim_end_matches(" = 0").to_string()
}

fn recognize(ast: &EquationAst) -> Option<Family> {
    let mut candidates = vec![
        Family::KdV,
        Family::MKdV,
        Family::MKdV6,
        Family::K22,
        Family::SineGordon,
        Family::K212,
        Family::CurvatureKdV,
    ];
    // Pull the integer parameters of the indexed families from the terms.
    for term in &ast.terms {
        if let [a] = term.factors.as_slice() {
            if a.x_order == 0 && a.t_order == 0 && term.transcendental.is_none() {
                if term.outer_x_order == 0 && a.power >= 2 {
                    candidates.push(Family::Nls { n: a.power });
                }
                if term.outer_x_order == 1 {
                    for m in 1..=8 {
                        candidates.push(Family::Knm { n: a.power, m });
                    }
                    candidates.push(Family::Knn { n: a.power });
                }
            }
        }
    }
    candidates.into_iter().find(|f| {
        let Ok(text) = expand_alias(&f.alias()) else { return false };
        let Ok(reference) = parse_equation(&text) else { return false };
        matches_up_to_order(ast, &reference)
    })
    .map(|f| match f {
        Family::Knm { n: 2, m: 2 } | Family::Knn { n: 2 } => Family::K22,
        Family::Knm { n, m } if n == m => Family::Knn { n },
        other => other,
    })
}

/// Same multiset of terms, allowing a global sign flip.
fn matches_up_to_order(a: &EquationAst, b: &EquationAst) -> bool {
    if a.terms.len() != b.terms.len() {
        return false;
    }
    let same = |flip: bool| {
        let mut used = vec![false; b.terms.len()];
        a.terms.iter().all(|ta| {
            let ta = if flip {
                Term { coefficient: ta.coefficient.negated(), ..ta.clone() }
            } else {
                ta.clone()
            };
            match (0..b.terms.len()).find(|&i| !used[i] && b.terms[i] == ta) {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
    };
    same(false) || same(true)
}
