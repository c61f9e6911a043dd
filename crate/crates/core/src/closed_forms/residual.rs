//! Pointwise PDE residual of a closed form, by finite differences.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat as DD;

use super::{TravelingWave, WaveError};
use crate::dsl::{EquationAst, Term};
use crate::numerics::dd::Real;
use crate::numerics::fd::{fornberg_weights, Stencil};
use crate::similarity::{Bindings, Coeff};

/// Formal accuracy of every stencil used here.
const ORDER: usize = 4;

/// Uniform sample grid `x0, x0 + dx, ... ≤ x1` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub dx: f64,
    pub t: f64,
}

impl Grid {
    pub fn len(&self) -> usize {
        ((self.x1 - self.x0) / self.dx + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.x1 < self.x0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub dx: f64,
    pub max_abs: f64,
    /// Maximum over points at least two stencil spans from every breakpoint.
    pub interior_max_abs: f64,
    pub points: usize,
    pub interior_points: usize,
}

/// One-sided derivative jumps of `u^power` at a breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionJump {
    pub x: f64,
    /// Right minus left limit of derivatives 0 through 3.
    pub jumps: [f64; 4],
}

/// Central stencil as integer numerators over a common denominator, so
/// that weights are exact in any precision.
fn integer_stencil(deriv: usize) -> (Vec<i64>, i64, usize) {
    let s = Stencil::central(deriv, ORDER);
    let q = (1..=100_000i64)
        .find(|&q| s.weights.iter().all(|w| (w * q as f64 - (w * q as f64).round()).abs() < 1e-9))
        .expect("central stencil weights are rational");
    let nums = s.weights.iter().map(|w| (w * q as f64).round() as i64).collect();
    (nums, q, s.half_width)
}

fn derivative(values: &[DD], deriv: usize, dx: f64) -> Vec<DD> {
    if deriv == 0 {
        return values.to_vec();
    }
    let (nums, q, hw) = integer_stencil(deriv);
    let scale = DD::from(q as f64) * DD::from(dx).powi(deriv as i32);
    let mut out = vec![DD::NAN; values.len()];
    for i in hw..values.len().saturating_sub(hw) {
        let mut acc = DD::from(0.0);
        for (k, v) in nums.iter().zip(&values[i - hw..=i + hw]) {
            if *k != 0 {
                acc += *v * (*k as f64);
            }
        }
        out[i] = acc.div_acc(scale);
    }
    out
}

fn half_width(deriv: u32) -> usize {
    Stencil::central(deriv as usize, ORDER).half_width
}

/// Grid points the evaluation of `term` reaches on either side.
fn term_span(term: &Term) -> usize {
    let inner = term.factors.iter().map(|a| half_width(a.x_order)).max().unwrap_or(0);
    inner + half_width(term.outer_x_order)
}

/// Residual of `ast` on `grid` for `wave`. Time derivatives use a central
/// stencil in t with step `dx`. Samples and differences are carried in
/// double-double so that round-off stays below the truncation error down
/// to `dx ≈ 1e-3` for third derivatives.
pub fn residual(
    wave: &TravelingWave,
    ast: &EquationAst,
    bindings: &Bindings,
    grid: &Grid,
) -> Result<ResidualReport, WaveError> {
    if !(grid.dx > 0.0 && grid.dx.is_finite()) || grid.is_empty() {
        return Err(WaveError::InvalidParameters("grid needs dx > 0 and x1 ≥ x0".into()));
    }
    let span = ast.terms.iter().map(term_span).max().unwrap_or(0);
    if let Some((lo, hi)) = wave.support(grid.t) {
        let stencil = (2 * span + 1) as f64 * grid.dx;
        if stencil > hi - lo {
            return Err(WaveError::GridTooCoarse { span: stencil, support: hi - lo });
        }
    }
    let n = grid.len();
    let total = n + 2 * span;
    let dx = grid.dx;
    let xs: Vec<DD> = (0..total).map(|i| DD::from(grid.x0) + DD::from(dx) * (i as f64 - span as f64)).collect();
    let sample = |t: DD| -> Vec<DD> { xs.iter().map(|&x| wave.eval_in(x, t)).collect() };
    let t0 = DD::from(grid.t);
    let u = sample(t0);

    let dt = dx;
    let needs_time = ast.terms.iter().any(|t| t.time_count() > 0);
    let ut = if needs_time {
        let (nums, q, hw) = integer_stencil(1);
        let mut acc = vec![DD::from(0.0); total];
        for (m, k) in (-(hw as i64)..=hw as i64).zip(&nums) {
            if *k == 0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(sample(t0 + DD::from(dt) * m as f64)) {
                *a += v * (*k as f64);
            }
        }
        let scale = DD::from(q as f64) * DD::from(dt);
        acc.into_iter().map(|a| a.div_acc(scale)).collect()
    } else {
        Vec::new()
    };

    let mut res = vec![DD::from(0.0); total];
    for term in &ast.terms {
        let c = Coeff::from_coefficient(&term.coefficient).eval(bindings)?;
        let mut product = vec![DD::from(1.0); total];
        for atom in &term.factors {
            let base = if atom.t_order > 0 { &ut } else { &u };
            let d = derivative(base, atom.x_order as usize, dx);
            for (p, v) in product.iter_mut().zip(d) {
                *p *= v.powi(atom.power as i32);
            }
        }
        if let Some(f) = term.transcendental {
            for p in &mut product {
                *p = f.apply(*p);
            }
        }
        let d = derivative(&product, term.outer_x_order as usize, dx);
        for (r, v) in res.iter_mut().zip(d) {
            *r += v * c;
        }
    }

    let speed = wave.velocity.abs().max(wave.secondary_velocity.abs());
    let exclusion = 2.0 * (2 * span + 1) as f64 * dx + half_width(1) as f64 * dt * speed;
    let breaks = wave.breakpoints(grid.t);
    let mut report = ResidualReport { dx, max_abs: 0.0, interior_max_abs: 0.0, points: n, interior_points: 0 };
    for i in span..span + n {
        let r = res[i].hi().abs();
        let x = xs[i].hi();
        report.max_abs = report.max_abs.max(r);
        if breaks.iter().all(|b| (x - b).abs() > exclusion) {
            report.interior_points += 1;
            report.interior_max_abs = report.interior_max_abs.max(r);
        }
    }
    if report.max_abs.is_nan() || report.interior_max_abs.is_nan() {
        return Err(WaveError::InvalidParameters("residual is not finite on this grid".into()));
    }
    Ok(report)
}

/// Derivative jumps of `u^power` at every breakpoint, from one-sided
/// stencils of spacing `h`.
pub fn junction_jumps(wave: &TravelingWave, t: f64, power: i32, h: f64) -> Vec<JunctionJump> {
    const NODES: usize = 8;
    let f = |x: f64| wave.eval(x, t).powi(power);
    wave.breakpoints(t)
        .into_iter()
        .map(|xb| {
            let left: Vec<f64> = (0..NODES).map(|k| xb - k as f64 * h).collect();
            let right: Vec<f64> = (0..NODES).map(|k| xb + k as f64 * h).collect();
            let fl: Vec<f64> = left.iter().map(|&x| f(x)).collect();
            let fr: Vec<f64> = right.iter().map(|&x| f(x)).collect();
            let mut jumps = [0.0; 4];
            for (d, j) in jumps.iter_mut().enumerate() {
                let wl = fornberg_weights(xb, &left, d);
                let wr = fornberg_weights(xb, &right, d);
                let dl: f64 = wl.iter().zip(&fl).map(|(a, b)| a * b).sum();
                let dr: f64 = wr.iter().zip(&fr).map(|(a, b)| a * b).sum();
                *j = dr - dl;
            }
            JunctionJump { x: xb, jumps }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{expand_alias, parse_equation};
    use std::f64::consts::PI;

    fn eq(alias: &str) -> EquationAst {
        parse_equation(&expand_alias(alias).unwrap()).unwrap()
    }

    #[test]
    fn derivative_of_quartic_is_exact() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let f: Vec<DD> = xs.iter().map(|x| DD::from(x.powi(4))).collect();
        let d3 = derivative(&f, 3, 0.1);
        assert!(d3[0].hi().is_nan() && d3[19].hi().is_nan());
        for i in 3..17 {
            assert!((d3[i].hi() - 24.0 * xs[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn compacton_edges_are_c3_for_the_square_and_kak_junctions_are_not() {
        let w = TravelingWave::k22_compacton(0.75).unwrap();
        for j in junction_jumps(&w, 0.0, 2, 1e-3) {
            assert!(j.jumps.iter().all(|x| x.abs() < 1e-5), "{j:?}");
        }
        let k = TravelingWave::k22_kak(0.75, 5.0).unwrap();
        let inner = junction_jumps(&k, 0.0, 2, 1e-3).into_iter().find(|j| j.x == 0.0).unwrap();
        assert!(inner.jumps[0].abs() < 1e-9 && inner.jumps[1].abs() < 1e-6);
        assert!(inner.jumps[2].abs() > 1e-2);
    }

    #[test]
    fn compacton_residual_is_small_and_wrong_speed_is_not() {
        let grid = Grid { x0: -10.0, x1: 10.0, dx: 0.05, t: 0.0 };
        let good = TravelingWave::k22_compacton(0.75).unwrap();
        let r = residual(&good, &eq("K22"), &Bindings::new(), &grid).unwrap();
        assert!(r.interior_max_abs < 1e-6, "{r:?}");
        let mut bad = good.clone();
        bad.velocity = 0.9;
        let r = residual(&bad, &eq("K22"), &Bindings::new(), &grid).unwrap();
        assert!(r.interior_max_abs > 1e-2, "{r:?}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let w = TravelingWave::k22_compacton(0.75).unwrap();
        let grid = Grid { x0: -10.0, x1: 10.0, dx: 2.0 * PI, t: 0.0 };
        assert!(matches!(residual(&w, &eq("K22"), &Bindings::new(), &grid), Err(WaveError::GridTooCoarse { .. })));
    }
}
