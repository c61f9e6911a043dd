use serde::{Deserialize, Serialize};

use super::relation::{Branch, SimilarityRelation};
use super::{Bindings, SimilarityError};
use crate::numerics::poly::{bisect, quadratic_roots, Poly, Root};

/// How the roots of a width solution were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Bisection,
    /// Every L satisfies the relation.
    Unconstrained,
    /// No L can satisfy the relation.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthSolution {
    pub branch: Branch,
    /// Absolute-value presentation of the width law, when one exists.
    pub closed_form: Option<String>,
    /// Positive roots in ascending order.
    pub roots: Vec<Root>,
    pub method: SolveMethod,
}

/// Positive widths solving the relation on `branch` at amplitude `a > 0`
/// and velocity `v`. An empty root list is a valid answer.
pub fn solve_width(
    rel: &SimilarityRelation,
    bindings: &Bindings,
    a: f64,
    v: f64,
    branch: &Branch,
) -> Result<WidthSolution, SimilarityError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(SimilarityError::NonPositiveAmplitude(a));
    }
    if !v.is_finite() {
        return Err(SimilarityError::NonFinite("V"));
    }
    let poly = rel.width_poly(bindings, branch, a, v)?;
    let powers: Vec<usize> = (0..poly.coeffs.len()).filter(|&k| poly.coeffs[k] != 0.0).collect();
    let c = &poly.coeffs;
    let (roots, method) = match powers.as_slice() {
        [] => (Vec::new(), SolveMethod::Unconstrained),
        [_] => (Vec::new(), SolveMethod::Inconsistent),
        [0, e] => {
            let y = -c[0] / c[*e];
            let roots = if y > 0.0 { vec![Root { value: y.powf(1.0 / *e as f64), multiplicity: 1 }] } else { Vec::new() };
            (roots, SolveMethod::ClosedForm)
        }
        [0, e, e2] if *e2 == 2 * e => {
            let inv = 1.0 / *e as f64;
            let roots = quadratic_roots(c[*e2], c[*e], c[0])
                .into_iter()
                .filter(|r| r.value > 0.0)
                .map(|r| Root { value: r.value.powf(inv), multiplicity: r.multiplicity })
                .collect();
            (roots, SolveMethod::ClosedForm)
        }
        _ => (poly.positive_roots(), SolveMethod::Bisection),
    };
    let roots = roots.into_iter().map(|r| polish(&poly, r)).collect();
    Ok(WidthSolution { branch: branch.clone(), closed_form: rel.width_formula(), roots, method })
}

/// Tighten a simple root with a sign-change bracket when round-off left the
/// residual above tolerance.
fn polish(p: &Poly, r: Root) -> Root {
    let tol = |x: f64| 1e-10 * p.magnitude(x).max(f64::MIN_POSITIVE);
    if r.multiplicity > 1 || p.eval(r.value).abs() <= tol(r.value) {
        return r;
    }
    let (mut lo, mut hi) = (r.value * (1.0 - 1e-9), r.value * (1.0 + 1e-9));
    for _ in 0..40 {
        let (flo, fhi) = (p.eval(lo), p.eval(hi));
        if flo.signum() != fhi.signum() {
            return Root { value: bisect(|x| p.eval(x), lo, hi, flo), multiplicity: 1 };
        }
        lo *= 1.0 - 1e-6;
        hi *= 1.0 + 1e-6;
    }
    r
}

/// Positive roots by a dense logarithmic scan plus bisection, independent
/// of the polynomial machinery. Used as a cross-check.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    let xs: Vec<f64> = (0..=samples).map(|i| lo * (ratio * i as f64 / samples as f64).exp()).collect();
    let mut out = Vec::new();
    for w in xs.windows(2) {
        let (fa, fb) = (f(w[0]), f(w[1]));
        if fa == 0.0 {
            out.push(w[0]);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            out.push(bisect(&f, w[0], w[1], fa));
        }
    }
    out
}
