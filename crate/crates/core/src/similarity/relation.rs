use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::coeff::{power_text, Coeff};
use super::{Bindings, SimilarityError};
use crate::dsl::{EquationAst, Term, Transcendental};
use crate::numerics::poly::Poly;

/// Image of one equation term under the substitution
/// `u → A`, `∂x → 1/L`, `∂t → V/L`:
/// `coefficient · A^a_power · V^v_power / L^inv_l_power`, or
/// `coefficient · sin(A)` for a transcendental term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingMonomial {
    pub coefficient: Coeff,
    pub a_power: i32,
    pub v_power: u32,
    pub inv_l_power: u32,
    pub trans: Option<Transcendental>,
    pub sign_slot: usize,
}

/// A monomial after clearing denominators: `coefficient · A^a · V^v · L^l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalMonomial {
    pub coefficient: Coeff,
    pub a_power: i32,
    pub v_power: u32,
    pub l_power: u32,
    pub trans: Option<Transcendental>,
    pub sign_slot: usize,
}

/// Map one term to its scaling monomial.
///
/// An outer derivative acting on a product of total power `m` contributes
/// a factor `m` per derivative, the coefficient sum of the full Leibniz
/// expansion of `∂x^q (u^m)` for `u = A e^{x/L}`.
pub fn scale_term(term: &Term) -> Result<ScalingMonomial, SimilarityError> {
    let coefficient = Coeff::from_coefficient(&term.coefficient);
    if coefficient.is_zero() {
        return Err(SimilarityError::UnsupportedTerm("zero coefficient".into()));
    }
    if let Some(trans) = term.transcendental {
        if term.factors.len() != 1 || term.factors[0].derivative_order() != 0 || term.outer_x_order != 0 {
            return Err(SimilarityError::UnsupportedTerm(format!("{} of a non-bare argument", trans.name())));
        }
        return Ok(ScalingMonomial { coefficient, a_power: 0, v_power: 0, inv_l_power: 0, trans: Some(trans), sign_slot: 0 });
    }
    let m = term.total_power();
    let leibniz = Ratio::from_integer((m as i64).pow(term.outer_x_order));
    Ok(ScalingMonomial {
        coefficient: coefficient.scale(leibniz),
        a_power: m as i32,
        v_power: term.time_count(),
        inv_l_power: term.derivative_count(),
        trans: None,
        sign_slot: 0,
    })
}

/// Algebraic relation `Σ ± monomial = 0` among amplitude, width and speed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityRelation {
    /// One monomial per equation term, in term order.
    pub monomials: Vec<ScalingMonomial>,
    /// Denominator-free form ordered by descending power of L. Sign slot
    /// `i` belongs to `normalized[i]`.
    pub normalized: Vec<NormalMonomial>,
    pub parameters: BTreeSet<String>,
    pub source: EquationAst,
}

/// Multiply through by the highest power of L, divide by the lowest power
/// of A, and order by descending power of L.
pub fn build_relation(ast: &EquationAst) -> Result<SimilarityRelation, SimilarityError> {
    let mut monomials = ast.terms.iter().map(scale_term).collect::<Result<Vec<_>, _>>()?;
    let max_inv_l = monomials.iter().map(|m| m.inv_l_power).max().unwrap_or(0);
    let min_a = monomials.iter().map(|m| m.a_power).min().unwrap_or(0);
    let mut order: Vec<usize> = (0..monomials.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(max_inv_l - monomials[i].inv_l_power));
    let mut normalized = Vec::with_capacity(monomials.len());
    for (slot, &i) in order.iter().enumerate() {
        monomials[i].sign_slot = slot;
        let m = &monomials[i];
        normalized.push(NormalMonomial {
            coefficient: m.coefficient.clone(),
            a_power: m.a_power - min_a,
            v_power: m.v_power,
            l_power: max_inv_l - m.inv_l_power,
            trans: m.trans,
            sign_slot: slot,
        });
    }
    Ok(SimilarityRelation { monomials, normalized, parameters: ast.parameters.clone(), source: ast.clone() })
}

/// Independent sign per monomial. The natural branch (all `+`) is the
/// equation's own signed relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch(pub Vec<i8>);

impl Branch {
    pub fn natural(n: usize) -> Branch {
        Branch(vec![1; n])
    }

    /// All `2^n` sign assignments, `+` before `-` lexicographically.
    pub fn all(n: usize) -> Vec<Branch> {
        (0..1usize << n)
            .map(|bits| Branch((0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { -1 } else { 1 }).collect()))
            .collect()
    }

    /// One representative of each `{b, -b}` pair: the first sign is `+`.
    pub fn canonical(n: usize) -> Vec<Branch> {
        Branch::all(n).into_iter().filter(|b| b.0.first().is_none_or(|&s| s > 0)).collect()
    }

    pub fn flipped(&self) -> Branch {
        Branch(self.0.iter().map(|s| -s).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sign(&self, slot: usize) -> f64 {
        self.0[slot] as f64
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for Branch {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Branch, SimilarityError> {
        s.chars()
            .filter(|c| *c != ',' && !c.is_whitespace())
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(SimilarityError::BadBranch(s.to_string())),
            })
            .collect::<Result<Vec<i8>, _>>()
            .map(Branch)
    }
}

impl Serialize for Branch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Branch {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Branch, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Text of `|coefficient| · V^v · A^a · trans(A) · L^l`, where a negative
/// `l` is written as a division.
pub(crate) fn monomial_text(c: &Coeff, v: u32, a: i32, trans: Option<Transcendental>, l: i32) -> String {
    let mut parts = c.magnitude_factors();
    if v > 0 {
        parts.push(power_text("V", v as i32));
    }
    if a != 0 {
        parts.push(power_text("A", a));
    }
    if let Some(t) = trans {
        parts.push(format!("{}(A)", t.name()));
    }
    if l > 0 {
        parts.push(power_text("L", l));
    }
    let mut out = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
    if l < 0 {
        out.push('/');
        out.push_str(&power_text("L", -l));
    }
    out
}

impl NormalMonomial {
    fn text_without_l(&self) -> String {
        monomial_text(&self.coefficient, self.v_power, self.a_power, self.trans, 0)
    }

    fn text(&self) -> String {
        monomial_text(&self.coefficient, self.v_power, self.a_power, self.trans, self.l_power as i32)
    }
}

/// `±a ± b ± c`, or the bare magnitude for a single term.
fn pm_join(parts: &[String]) -> String {
    if parts.len() == 1 {
        return parts[0].clone();
    }
    parts.iter().map(|p| format!("±{p}")).collect::<Vec<_>>().join(" ").replace(" ±", " ± ")
}

fn wrap(s: &str) -> String {
    if s.contains(' ') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

fn root_text(e: u32, body: &str) -> String {
    match e {
        1 => body.to_string(),
        2 => format!("sqrt({body})"),
        3 => format!("cbrt({body})"),
        e => format!("({body})^(1/{e})"),
    }
}

impl SimilarityRelation {
    pub fn slots(&self) -> usize {
        self.normalized.len()
    }

    /// Slot of the time-derivative monomial.
    pub fn time_slot(&self) -> usize {
        self.normalized.iter().position(|m| m.v_power > 0).expect("relation has a time monomial")
    }

    pub fn check_branch(&self, branch: &Branch) -> Result<(), SimilarityError> {
        if branch.len() != self.slots() {
            return Err(SimilarityError::BranchLength { expected: self.slots(), got: branch.len() });
        }
        Ok(())
    }

    /// Signed numeric coefficients `branch_i · c_i` in slot order.
    pub fn numeric_coefficients(&self, bindings: &Bindings, branch: &Branch) -> Result<Vec<f64>, SimilarityError> {
        self.check_branch(branch)?;
        self.normalized.iter().map(|m| Ok(branch.sign(m.sign_slot) * m.coefficient.eval(bindings)?)).collect()
    }

    /// Value of every signed monomial at `(A, V, L)`.
    pub fn monomial_values(
        &self,
        bindings: &Bindings,
        branch: &Branch,
        a: f64,
        v: f64,
        l: f64,
    ) -> Result<Vec<f64>, SimilarityError> {
        let c = self.numeric_coefficients(bindings, branch)?;
        Ok(self
            .normalized
            .iter()
            .zip(c)
            .map(|(m, c)| {
                let t = m.trans.map_or(1.0, |t| t.apply(a));
                c * a.powi(m.a_power) * v.powi(m.v_power as i32) * t * l.powi(m.l_power as i32)
            })
            .collect())
    }

    /// Relation value and the largest monomial magnitude at `(A, V, L)`.
    pub fn residual(&self, bindings: &Bindings, branch: &Branch, a: f64, v: f64, l: f64) -> Result<(f64, f64), SimilarityError> {
        let vals = self.monomial_values(bindings, branch, a, v, l)?;
        Ok((vals.iter().sum(), vals.iter().fold(0.0, |m, x| m.max(x.abs()))))
    }

    /// The relation as a polynomial in L at fixed `(A, V)`.
    pub fn width_poly(&self, bindings: &Bindings, branch: &Branch, a: f64, v: f64) -> Result<Poly, SimilarityError> {
        let vals = self.monomial_values(bindings, branch, a, v, 1.0)?;
        let deg = self.normalized.iter().map(|m| m.l_power).max().unwrap_or(0) as usize;
        let mut coeffs = vec![0.0; deg + 1];
        for (m, x) in self.normalized.iter().zip(vals) {
            coeffs[m.l_power as usize] += x;
        }
        Ok(Poly::new(coeffs))
    }

    /// Normalized relation with independent signs: `±V*L^2 ± 6*A*L^2 ± 1 = 0`.
    pub fn text(&self) -> String {
        let parts: Vec<String> = self.normalized.iter().map(NormalMonomial::text).collect();
        let body = parts.iter().map(|p| format!("±{p}")).collect::<Vec<_>>().join(" ").replace(" ±", " ± ");
        format!("{body} = 0")
    }

    /// Denominator form straight from the substitution.
    pub fn raw_text(&self) -> String {
        let mut ordered: Vec<&ScalingMonomial> = self.monomials.iter().collect();
        ordered.sort_by_key(|m| m.sign_slot);
        let body = ordered
            .iter()
            .map(|m| format!("±{}", monomial_text(&m.coefficient, m.v_power, m.a_power, m.trans, -(m.inv_l_power as i32))))
            .collect::<Vec<_>>()
            .join(" ")
            .replace(" ±", " ± ");
        format!("{body} = 0")
    }

    /// The relation on one branch, with the equation's own coefficient signs
    /// folded in (parameters are taken as positive).
    pub fn signed_text(&self, branch: &Branch) -> Result<String, SimilarityError> {
        self.check_branch(branch)?;
        let mut out = String::new();
        for (i, m) in self.normalized.iter().enumerate() {
            let negative = (branch.sign(m.sign_slot) < 0.0) != m.coefficient.is_negative();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&m.text());
        }
        out.push_str(" = 0");
        Ok(out)
    }

    /// Monomials grouped by power of L, descending.
    fn l_groups(&self) -> Vec<(u32, Vec<&NormalMonomial>)> {
        let mut groups: Vec<(u32, Vec<&NormalMonomial>)> = Vec::new();
        for m in &self.normalized {
            match groups.iter_mut().find(|(l, _)| *l == m.l_power) {
                Some((_, g)) => g.push(m),
                None => groups.push((m.l_power, vec![m])),
            }
        }
        groups.sort_by_key(|(l, _)| std::cmp::Reverse(*l));
        groups
    }

    /// Closed-form width in the absolute-value presentation, when the
    /// relation is linear or quadratic in a power of L.
    pub fn width_formula(&self) -> Option<String> {
        let groups = self.l_groups();
        let text = |g: &[&NormalMonomial]| pm_join(&g.iter().map(|m| m.text_without_l()).collect::<Vec<_>>());
        let has_trans = |g: &[&NormalMonomial]| g.iter().any(|m| m.trans.is_some());
        match groups.as_slice() {
            [(_, g)] => Some(format!("L arbitrary ({} = 0)", text(g))),
            [(e, hi), (0, lo)] if has_trans(hi) || has_trans(lo) => {
                let (plain, trans, l_on_plain) = if has_trans(hi) { (lo, hi, false) } else { (hi, lo, true) };
                if has_trans(plain) || trans.len() != 1 {
                    return None;
                }
                let lhs = format!("±{}", wrap(&text(plain)));
                Some(if l_on_plain {
                    format!("{lhs}*{} = {}", power_text("L", *e as i32), text(trans))
                } else {
                    format!("{lhs}/{} = {}", power_text("L", *e as i32), text(trans))
                })
            }
            [(e, hi), (0, lo)] => {
                let num = text(lo);
                let den = text(hi);
                Some(if num == "1" {
                    format!("L = 1/{}", root_text(*e, &format!("|{den}|")))
                } else {
                    format!("L = {}", root_text(*e, &format!("{}/|{den}|", wrap(&num))))
                })
            }
            [(e2, a), (e, b), (0, c)] if *e2 == 2 * e && !has_trans(a) && !has_trans(b) && !has_trans(c) => {
                let (ta, tb, tc) = (text(a), text(b), text(c));
                let b_sq = match b.as_slice() {
                    [m] => monomial_text(&m.coefficient.mul(&m.coefficient), 2 * m.v_power, 2 * m.a_power, None, 0),
                    _ => format!("{}^2", wrap(&tb)),
                };
                let four_ac = match (a.as_slice(), c.as_slice()) {
                    ([x], [y]) => monomial_text(
                        &x.coefficient.mul(&y.coefficient).scale(Ratio::from_integer(4)),
                        x.v_power + y.v_power,
                        x.a_power + y.a_power,
                        None,
                        0,
                    ),
                    _ => format!("4*{}*{}", wrap(&ta), wrap(&tc)),
                };
                let two_a = match a.as_slice() {
                    [x] => monomial_text(&x.coefficient.scale(Ratio::from_integer(2)), x.v_power, x.a_power, None, 0),
                    _ => format!("2*{}", wrap(&ta)),
                };
                let y = format!("(±{} ± sqrt(|{b_sq} - {four_ac}|))/({two_a})", wrap(&tb));
                Some(if *e == 1 { format!("L = {y}") } else { format!("L = {}", root_text(*e, &y)) })
            }
            _ => None,
        }
    }
}

impl fmt::Display for SimilarityRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}
