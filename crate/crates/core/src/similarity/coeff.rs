use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Bindings, SimilarityError};
use crate::dsl::Coefficient;

/// Rational number times a product of symbol powers, e.g. `-8*eps`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coeff {
    pub ratio: Ratio<i64>,
    pub symbols: BTreeMap<String, i32>,
}

impl Coeff {
    pub fn int(n: i64) -> Coeff {
        Coeff { ratio: Ratio::from_integer(n), symbols: BTreeMap::new() }
    }

    pub fn from_coefficient(c: &Coefficient) -> Coeff {
        let mut symbols = BTreeMap::new();
        if let Some(s) = &c.symbol {
            symbols.insert(s.clone(), 1);
        }
        Coeff { ratio: c.value, symbols }
    }

    pub fn is_zero(&self) -> bool {
        self.ratio.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.ratio.is_negative()
    }

    pub fn abs(&self) -> Coeff {
        Coeff { ratio: self.ratio.abs(), symbols: self.symbols.clone() }
    }

    pub fn scale(&self, k: Ratio<i64>) -> Coeff {
        Coeff { ratio: self.ratio * k, symbols: self.symbols.clone() }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        let mut symbols = self.symbols.clone();
        for (s, p) in &other.symbols {
            *symbols.entry(s.clone()).or_insert(0) += p;
        }
        symbols.retain(|_, p| *p != 0);
        Coeff { ratio: self.ratio * other.ratio, symbols }
    }

    pub fn div(&self, other: &Coeff) -> Coeff {
        let inv = Coeff {
            ratio: other.ratio.recip(),
            symbols: other.symbols.iter().map(|(s, p)| (s.clone(), -p)).collect(),
        };
        self.mul(&inv)
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<f64, SimilarityError> {
        let mut v = *self.ratio.numer() as f64 / *self.ratio.denom() as f64;
        for (s, p) in &self.symbols {
            let x = bindings.get(s).ok_or_else(|| SimilarityError::UnboundParameter(s.clone()))?;
            v *= x.powi(*p);
        }
        Ok(v)
    }

    /// Factors of `|self|` as text, without the unit factor.
    pub(crate) fn magnitude_factors(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m = self.ratio.abs();
        if !m.is_one() {
            out.push(crate::dsl::format_ratio(&m));
        }
        for (s, p) in &self.symbols {
            out.push(power_text(s, *p));
        }
        out
    }
}

pub(crate) fn power_text(base: &str, p: i32) -> String {
    match p {
        1 => base.to_string(),
        p if p < 0 => format!("{base}^({p})"),
        p => format!("{base}^{p}"),
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negative() {
            f.write_str("-")?;
        }
        let parts = self.magnitude_factors();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}
