use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

/// `∂x^x_order ∂t^t_order u`, raised to `power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub x_order: u32,
    pub t_order: u32,
    pub power: u32,
}

impl Atom {
    pub const U: Atom = Atom { x_order: 0, t_order: 0, power: 1 };

    pub fn derivative_order(&self) -> u32 {
        self.x_order + self.t_order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transcendental {
    Sin,
    Cos,
}

impl Transcendental {
    pub fn name(self) -> &'static str {
        match self {
            Transcendental::Sin => "sin",
            Transcendental::Cos => "cos",
        }
    }

    pub fn apply<F: num_traits::Float>(self, x: F) -> F {
        match self {
            Transcendental::Sin => x.sin(),
            Transcendental::Cos => x.cos(),
        }
    }
}

/// Signed numeric factor times an optional named parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: Ratio<i64>,
    pub symbol: Option<String>,
}

impl Coefficient {
    pub fn one() -> Coefficient {
        Coefficient { value: Ratio::one(), symbol: None }
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn negated(&self) -> Coefficient {
        Coefficient { value: -self.value, symbol: self.symbol.clone() }
    }

    /// Text of `|coefficient|` followed by `*`, or empty when it is 1.
    fn magnitude_prefix(&self) -> String {
        let m = self.value.abs();
        let mut out = String::new();
        if !m.is_one() {
            out.push_str(&format_ratio(&m));
            out.push('*');
        }
        if let Some(s) = &self.symbol {
            out.push_str(s);
            out.push('*');
        }
        out
    }
}

pub fn format_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One additive term: `coefficient * ∂x^outer(Π factors)` or
/// `coefficient * sin(u)` / `cos(u)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: Coefficient,
    pub factors: Vec<Atom>,
    pub outer_x_order: u32,
    pub transcendental: Option<Transcendental>,
}

impl Term {
    /// Total power of `u` in the product.
    pub fn total_power(&self) -> u32 {
        self.factors.iter().map(|a| a.power).sum()
    }

    /// Derivatives counted with multiplicity (each atom's order times its
    /// power) plus the outer derivatives.
    pub fn derivative_count(&self) -> u32 {
        self.factors.iter().map(|a| a.derivative_order() * a.power).sum::<u32>() + self.outer_x_order
    }

    /// Time derivatives counted with multiplicity.
    pub fn time_count(&self) -> u32 {
        self.factors.iter().map(|a| a.t_order * a.power).sum()
    }

    pub fn is_time_term(&self) -> bool {
        self.factors.iter().any(|a| a.t_order > 0)
    }

    /// Highest derivative order applied along any path through the term.
    pub fn max_order(&self) -> u32 {
        self.factors.iter().map(Atom::derivative_order).max().unwrap_or(0) + self.outer_x_order
    }

    fn body(&self) -> String {
        if let Some(tr) = self.transcendental {
            return format!("{}(u)", tr.name());
        }
        let product = self.factors.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("*");
        if self.outer_x_order > 0 {
            format!("({product})_{}", "x".repeat(self.outer_x_order as usize))
        } else {
            product
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("u")?;
        if self.derivative_order() > 0 {
            write!(f, "_{}{}", "x".repeat(self.x_order as usize), "t".repeat(self.t_order as usize))?;
        }
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

/// A parsed evolution equation `Σ terms = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquationAst {
    pub terms: Vec<Term>,
    /// Parameter names appearing in coefficients.
    pub parameters: BTreeSet<String>,
    pub source_text: String,
}

impl EquationAst {
    /// Equality of terms and parameters, ignoring the source text.
    pub fn same_structure(&self, other: &EquationAst) -> bool {
        self.terms == other.terms && self.parameters == other.parameters
    }

    /// Index of the single time-derivative term.
    pub fn time_term_index(&self) -> usize {
        self.terms.iter().position(Term::is_time_term).expect("parser guarantees a time term")
    }
}

impl fmt::Display for EquationAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            let neg = term.coefficient.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{}{}", term.coefficient.magnitude_prefix(), term.body())?;
        }
        f.write_str(" = 0")
    }
}
