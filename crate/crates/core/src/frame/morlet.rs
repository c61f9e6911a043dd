//! Discrete Morlet expansion `u(x) = Σ C_{j,k} Ψ_α(2^j x − k)` and the
//! asymptotic multi-scale derivative estimate around a point.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FrameError;

/// Smallest α for which the asymptotic derivative formula is used.
pub const MIN_ALPHA: f64 = 5.0;

/// `Ψ_α(x) = π^{-1/4} e^{-iαx − x²/2}`.
pub fn morlet_eval(alpha: f64, x: f64) -> Complex64 {
    let m = PI.powf(-0.25) * (-0.5 * x * x).exp();
    Complex64::from_polar(m, -alpha * x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorletTerm {
    pub j: i32,
    pub k: i64,
    pub c: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MorletRecord", from = "MorletRecord")]
pub struct MorletParams {
    pub alpha: f64,
    coefficients: BTreeMap<(i32, i64), Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MorletRecord {
    alpha: f64,
    coefficients: Vec<MorletTerm>,
}

impl From<MorletParams> for MorletRecord {
    fn from(p: MorletParams) -> MorletRecord {
        MorletRecord { alpha: p.alpha, coefficients: p.terms().collect() }
    }
}

impl From<MorletRecord> for MorletParams {
    fn from(r: MorletRecord) -> MorletParams {
        let mut p = MorletParams::new(r.alpha);
        for t in r.coefficients {
            p.set(t.j, t.k, t.c);
        }
        p
    }
}

impl MorletParams {
    pub fn new(alpha: f64) -> MorletParams {
        MorletParams { alpha, coefficients: BTreeMap::new() }
    }

    pub fn set(&mut self, j: i32, k: i64, c: Complex64) {
        self.coefficients.insert((j, k), c);
    }

    pub fn with(mut self, j: i32, k: i64, c: Complex64) -> MorletParams {
        self.set(j, k, c);
        self
    }

    pub fn get(&self, j: i32, k: i64) -> Option<Complex64> {
        self.coefficients.get(&(j, k)).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = MorletTerm> + '_ {
        self.coefficients.iter().map(|(&(j, k), &c)| MorletTerm { j, k, c })
    }

    /// Scales that carry at least one coefficient, ascending.
    pub fn scales(&self) -> Vec<i32> {
        let mut js: Vec<i32> = self.coefficients.keys().map(|&(j, _)| j).collect();
        js.dedup();
        js
    }

    /// Characteristic half-width `L_j = 1/(α 2^j)`.
    pub fn half_width(&self, j: i32) -> f64 {
        1.0 / (self.alpha * (j as f64).exp2())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .map(|(&(j, k), &c)| c * morlet_eval(self.alpha, (j as f64).exp2() * x - k as f64))
            .sum()
    }
}

/// Contribution `u_j(x₀) = Ψ_α(−ε) C_{j,k}` of one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleContribution {
    pub j: i32,
    pub k: i64,
    pub epsilon: f64,
    pub half_width: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub order: u32,
    /// `Σ_j (−i)^n u_j(x₀) / L_jⁿ`.
    pub value: Complex64,
    /// The same with only the scale of largest `|u_j|`.
    pub dominant: Complex64,
    pub dominant_scale: i32,
    pub contributions: Vec<ScaleContribution>,
}

/// Estimate `dⁿu/dxⁿ(x₀)` from the single atom per scale whose centre lies
/// nearest `x₀` (`k = round(2^j x₀)`, `ε = k − 2^j x₀`). Each scale then acts
/// like a pure oscillation of wavenumber `1/L_j`, so differentiation
/// multiplies its contribution by `−i/L_j`; the modulus is `|u_j|/L_jⁿ`.
pub fn derivative_estimate(p: &MorletParams, x0: f64, n: u32) -> Result<DerivativeEstimate, FrameError> {
    if !(p.alpha >= MIN_ALPHA) {
        return Err(FrameError::AlphaTooSmall { alpha: p.alpha });
    }
    let mut contributions = Vec::new();
    for j in p.scales() {
        let y = (j as f64).exp2() * x0;
        let k = y.round() as i64;
        if let Some(c) = p.get(j, k) {
            let epsilon = k as f64 - y;
            contributions.push(ScaleContribution {
                j,
                k,
                epsilon,
                half_width: p.half_width(j),
                value: morlet_eval(p.alpha, -epsilon) * c,
            });
        }
    }
    if contributions.is_empty() {
        return Err(FrameError::NotCovered { x0 });
    }
    let phase = Complex64::new(0.0, -1.0).powu(n);
    let term = |c: &ScaleContribution| phase * c.value / c.half_width.powi(n as i32);
    let value = contributions.iter().map(term).sum();
    let top = contributions
        .iter()
        .max_by(|a, b| a.value.norm().total_cmp(&b.value.norm()))
        .expect("non-empty");
    Ok(DerivativeEstimate { order: n, value, dominant: term(top), dominant_scale: top.j, contributions })
}
