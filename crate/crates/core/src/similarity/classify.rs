use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::relation::{monomial_text, Branch, SimilarityRelation};
use super::solve::solve_width;
use super::{Bindings, SimilarityError};
use crate::numerics::poly::Root;

/// `V = α(L)·A^p + β(L)` keeps the width at L fixed for every amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantWidthLaw {
    pub p: i32,
    pub alpha: String,
    pub beta: String,
    /// Width at which the numeric values below were taken.
    pub width: f64,
    pub alpha_value: f64,
    pub beta_value: f64,
}

/// `V = α·A^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub alpha: f64,
    pub p: i32,
}

/// Two width roots merging along `V = velocity_factor·A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub velocity_factor: f64,
    pub critical_amplitude: f64,
    pub multiplicity: u32,
    /// Width where the roots merge.
    pub width: f64,
    pub roots_below: usize,
    pub roots_above: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualitativeReport {
    pub branch: Branch,
    pub constant_width_law: Option<ConstantWidthLaw>,
    /// Amplitude at rest (V = 0) with the width held at the reference.
    pub rest_amplitude: Option<f64>,
    pub bifurcation: Option<Bifurcation>,
    pub velocity_law: Option<PowerLaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub relation: String,
    pub reference_width: f64,
    pub branches: Vec<QualitativeReport>,
}

/// Amplitude grid for the root-count scan.
const SCAN_LO: f64 = 1e-4;
const SCAN_HI: f64 = 1e4;
const SCAN_SAMPLES: usize = 480;

/// Qualitative structure of every canonical branch, with widths evaluated
/// at `reference_width`.
pub fn classify(
    rel: &SimilarityRelation,
    bindings: &Bindings,
    reference_width: f64,
) -> Result<Classification, SimilarityError> {
    let mut branches = Vec::new();
    for branch in Branch::canonical(rel.slots()) {
        let law = constant_width_law(rel, bindings, &branch, reference_width)?;
        let rest_amplitude = law.as_ref().and_then(|l| {
            let r = -l.beta_value / l.alpha_value;
            (l.p != 0 && l.alpha_value != 0.0 && r > 0.0 && r.is_finite()).then(|| r.powf(1.0 / l.p as f64))
        });
        let velocity_law = law
            .as_ref()
            .filter(|l| l.beta_value == 0.0 && l.p != 0)
            .map(|l| PowerLaw { alpha: l.alpha_value, p: l.p });
        let mut bifurcation = None;
        for sigma in [1.0, -1.0] {
            if let Some(b) = first_fold(rel, bindings, &branch, sigma)? {
                if bifurcation.as_ref().is_none_or(|x: &Bifurcation| b.critical_amplitude < x.critical_amplitude) {
                    bifurcation = Some(b);
                }
            }
        }
        branches.push(QualitativeReport { branch, constant_width_law: law, rest_amplitude, bifurcation, velocity_law });
    }
    Ok(Classification { relation: rel.text(), reference_width, branches })
}

/// Solve the relation for V: `V = Σ K_i A^{e_i} L^{d_i}`, then split the
/// sum by amplitude exponent.
pub fn constant_width_law(
    rel: &SimilarityRelation,
    bindings: &Bindings,
    branch: &Branch,
    width: f64,
) -> Result<Option<ConstantWidthLaw>, SimilarityError> {
    rel.check_branch(branch)?;
    let t = rel.time_slot();
    let tm = &rel.normalized[t];
    if tm.v_power != 1 || rel.normalized.iter().any(|m| m.trans.is_some()) {
        return Ok(None);
    }
    let denom = tm.coefficient.scale(Ratio::from_integer(branch.0[t] as i64));
    let mut terms: Vec<(i32, Coeff, i32)> = Vec::new();
    for (i, m) in rel.normalized.iter().enumerate() {
        if i == t {
            continue;
        }
        let k = m.coefficient.scale(Ratio::from_integer(-branch.0[i] as i64)).div(&denom);
        terms.push((m.a_power - tm.a_power, k, m.l_power as i32 - tm.l_power as i32));
    }
    let mut exps: Vec<i32> = terms.iter().map(|(e, _, _)| *e).collect();
    exps.sort_unstable();
    exps.dedup();
    let p = match exps.as_slice() {
        [0] => 0,
        [p] | [0, p] | [p, 0] if (-3..=3).contains(p) => *p,
        _ => return Ok(None),
    };
    let part = |e: i32| -> Result<(String, f64), SimilarityError> {
        let chosen: Vec<&(i32, Coeff, i32)> = terms.iter().filter(|(x, _, _)| *x == e).collect();
        let mut text = String::new();
        let mut value = 0.0;
        for (i, (_, k, d)) in chosen.iter().enumerate() {
            let body = monomial_text(k, 0, 0, None, *d);
            match (i, k.is_negative()) {
                (0, true) => text.push('-'),
                (0, false) => {}
                (_, true) => text.push_str(" - "),
                (_, false) => text.push_str(" + "),
            }
            text.push_str(&body);
            value += k.eval(bindings)? * width.powi(*d);
        }
        if text.is_empty() {
            text.push('0');
        }
        Ok((text, value))
    };
    let (alpha, alpha_value) = if p == 0 { ("0".to_string(), 0.0) } else { part(p)? };
    let (beta, beta_value) = part(0)?;
    Ok(Some(ConstantWidthLaw { p, alpha, beta, width, alpha_value, beta_value }))
}

fn root_count(
    rel: &SimilarityRelation,
    bindings: &Bindings,
    branch: &Branch,
    sigma: f64,
    a: f64,
) -> Result<Vec<Root>, SimilarityError> {
    Ok(solve_width(rel, bindings, a, sigma * a, branch)?.roots)
}

/// Smallest amplitude along `V = sigma·A` where the number of positive
/// widths changes by two (a fold of the width curve).
pub fn first_fold(
    rel: &SimilarityRelation,
    bindings: &Bindings,
    branch: &Branch,
    sigma: f64,
) -> Result<Option<Bifurcation>, SimilarityError> {
    let grid: Vec<f64> = (0..=SCAN_SAMPLES)
        .map(|i| SCAN_LO * (SCAN_HI / SCAN_LO).powf(i as f64 / SCAN_SAMPLES as f64))
        .collect();
    let mut prev = root_count(rel, bindings, branch, sigma, grid[0])?.len();
    for w in grid.windows(2) {
        let next = root_count(rel, bindings, branch, sigma, w[1])?.len();
        if prev.abs_diff(next) == 2 {
            let (mut lo, mut hi) = (w[0], w[1]);
            while (hi - lo) > 1e-12 * hi {
                let mid = (lo * hi).sqrt();
                if mid <= lo || mid >= hi {
                    break;
                }
                if root_count(rel, bindings, branch, sigma, mid)?.len() == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let many = if prev > next { lo } else { hi };
            let roots = root_count(rel, bindings, branch, sigma, many)?;
            let width = closest_pair(&roots);
            return Ok(Some(Bifurcation {
                velocity_factor: sigma,
                critical_amplitude: 0.5 * (lo + hi),
                multiplicity: 2,
                width,
                roots_below: prev,
                roots_above: next,
            }));
        }
        prev = next;
    }
    Ok(None)
}

/// Geometric mean of the two adjacent roots closest in ratio.
fn closest_pair(roots: &[Root]) -> f64 {
    if let [r] = roots {
        return r.value;
    }
    roots
        .windows(2)
        .min_by(|x, y| (x[1].value / x[0].value).total_cmp(&(y[1].value / y[0].value)))
        .map(|w| (w[0].value * w[1].value).sqrt())
        .unwrap_or(f64::NAN)
}
