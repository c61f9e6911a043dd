//! Multiresolution frame built from compactons and KAK plateaus.
//!
//! Element `η_{k,j}` sits on the cell `[k·s, (k+1)·s]`, `s = 2^{-j}`. Its
//! two `cos²` ramps have width `ρ = min(1, s)` and straddle the cell edges,
//! so the support is `[k·s − ρ/2, (k+1)·s + ρ/2]` and the plateau has length
//! `s − ρ`. For `j ≤ 0` this is a KAK with unit ramps and flat length `s − 1`
//! (`j = 0` is the unit compacton); for `j > 0` the plateau vanishes and the
//! element is a compacton compressed onto width `2s`.
//!
//! Writing `P_ρ` for the ramp step, `η = P_ρ(x − a) − P_ρ(x − b)`, which makes
//! the two-scale relation a telescoping sum whenever parent and children
//! share the same ramp width.

pub mod morlet;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{map_indexed, Execution};
use crate::numerics::fmt17;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("finer scale j' = {fine} must not be coarser than j = {coarse}")]
    ScaleOrder { coarse: i32, fine: i32 },
    #[error("data does not vanish at the window edge x = {x} (value {value})")]
    SupportExceedsWindow { x: f64, value: f64 },
    #[error("grid spacing {h} cannot resolve scale {scale}")]
    GridTooCoarse { h: f64, scale: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("scale range [{j_min}, {j_max}] is empty or too large")]
    ScaleRange { j_min: i32, j_max: i32 },
    #[error("least-squares system at scale {j} is singular")]
    Singular { j: i32 },
    #[error("alpha = {alpha} is below 5; the asymptotic derivative formula does not apply")]
    AlphaTooSmall { alpha: f64 },
    #[error("no retained scale covers x0 = {x0}")]
    NotCovered { x0: f64 },
}

/// Dyadic scale `2^{-j}`.
pub fn scale(j: i32) -> f64 {
    (-(j as f64)).exp2()
}

/// Ramp width at scale `j`.
pub fn ramp_width(j: i32) -> f64 {
    scale(j).min(1.0)
}

/// Smooth step rising from 0 at `y = -ρ/2` to 1 at `y = ρ/2`.
fn ramp_step(y: f64, rho: f64) -> f64 {
    if y <= -0.5 * rho {
        0.0
    } else if y >= 0.5 * rho {
        1.0
    } else {
        let s = (PI * (y + 0.5 * rho) / (2.0 * rho)).sin();
        s * s
    }
}

/// `P_ρ(x − a) − P_ρ(x − b)`: ramp up at `a`, plateau, ramp down at `b`.
fn plateau(x: f64, a: f64, b: f64, rho: f64) -> f64 {
    ramp_step(x - a, rho) - ramp_step(x - b, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrameElement {
    pub k: i64,
    pub j: i32,
}

impl FrameElement {
    pub fn new(k: i64, j: i32) -> FrameElement {
        FrameElement { k, j }
    }

    pub fn scale(self) -> f64 {
        scale(self.j)
    }

    pub fn ramp(self) -> f64 {
        ramp_width(self.j)
    }

    /// The dyadic cell `[k·s, (k+1)·s]`.
    pub fn cell(self) -> (f64, f64) {
        let s = self.scale();
        (self.k as f64 * s, (self.k + 1) as f64 * s)
    }

    /// Closed support; the element is exactly zero outside it.
    pub fn support(self) -> (f64, f64) {
        let (a, b) = self.cell();
        let h = 0.5 * self.ramp();
        (a - h, b + h)
    }

    pub fn flat_length(self) -> f64 {
        self.scale() - self.ramp()
    }

    pub fn is_kak(self) -> bool {
        self.j <= 0
    }

    pub fn eval(self, x: f64) -> f64 {
        let (a, b) = self.cell();
        plateau(x, a, b, self.ramp())
    }

    /// Whether the open supports of `self` and `other` intersect.
    pub fn overlaps(self, other: FrameElement) -> bool {
        let (a0, a1) = self.support();
        let (b0, b1) = other.support();
        a0 < b1 && b0 < a1
    }
}

pub fn eta_eval(elem: FrameElement, x: f64) -> f64 {
    elem.eval(x)
}

/// Indices at scale `fine` whose cells meet the interior of cell `(k, coarse)`.
pub fn children(k: i64, coarse: i32, fine: i32) -> Result<RangeInclusive<i64>, FrameError> {
    if fine < coarse {
        return Err(FrameError::ScaleOrder { coarse, fine });
    }
    let m = 1i64 << (fine - coarse);
    Ok(k * m..=(k + 1) * m - 1)
}

/// Max of `|parent − Σ children|` on `points` samples of the parent support,
/// where the parent is the cell `(k, j)` carrying the ramp of scale `j + 1`
/// and `child_ks` are scale-`j + 1` indices. For `j < 0` the parent is
/// `η_{k,j}` itself; for `j ≥ 0` it is the dilated unit identity.
pub fn two_scale_defect(k: i64, j: i32, child_ks: &[i64], points: usize) -> f64 {
    let s = scale(j);
    let rho = ramp_width(j + 1);
    let (a, b) = (k as f64 * s, (k + 1) as f64 * s);
    let (lo, hi) = (a - rho, b + rho);
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let parent = plateau(x, a, b, rho);
            let sum: f64 = child_ks.iter().map(|&c| FrameElement::new(c, j + 1).eval(x)).sum();
            (parent - sum).abs()
        })
        .fold(0.0, f64::max)
}

/// Two-scale defect with the true children `2k, 2k + 1`.
pub fn two_scale_check(j: i32, k: i64, points: usize) -> f64 {
    two_scale_defect(k, j, &[2 * k, 2 * k + 1], points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub k: i64,
    pub j: i32,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ExpansionRecord {
    j_min: i32,
    j_max: i32,
    coefficients: Vec<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reconstruction_error: Option<f64>,
}

/// Finite expansion `Σ C_{k,j} η_{k,j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExpansionRecord", from = "ExpansionRecord")]
pub struct FrameExpansion {
    pub j_min: i32,
    pub j_max: i32,
    coefficients: BTreeMap<(i32, i64), f64>,
    /// Discrete L² error of the fit that produced this expansion.
    pub reconstruction_error: Option<f64>,
}

impl From<FrameExpansion> for ExpansionRecord {
    fn from(e: FrameExpansion) -> ExpansionRecord {
        ExpansionRecord {
            j_min: e.j_min,
            j_max: e.j_max,
            coefficients: e.coefficients().collect(),
            reconstruction_error: e.reconstruction_error,
        }
    }
}

impl From<ExpansionRecord> for FrameExpansion {
    fn from(r: ExpansionRecord) -> FrameExpansion {
        let mut e = FrameExpansion::new(r.j_min, r.j_max);
        for c in r.coefficients {
            e.add(FrameElement::new(c.k, c.j), c.c);
        }
        e.reconstruction_error = r.reconstruction_error;
        e
    }
}

impl FrameExpansion {
    pub fn new(j_min: i32, j_max: i32) -> FrameExpansion {
        FrameExpansion { j_min, j_max, coefficients: BTreeMap::new(), reconstruction_error: None }
    }

    pub fn from_coefficients(items: impl IntoIterator<Item = (FrameElement, f64)>) -> FrameExpansion {
        let mut e = FrameExpansion::new(0, 0);
        let mut first = true;
        for (el, c) in items {
            if first {
                e.j_min = el.j;
                e.j_max = el.j;
                first = false;
            }
            e.add(el, c);
        }
        e
    }

    /// Add `c` to the coefficient of `el`, widening the scale range if needed.
    pub fn add(&mut self, el: FrameElement, c: f64) {
        self.j_min = self.j_min.min(el.j);
        self.j_max = self.j_max.max(el.j);
        *self.coefficients.entry((el.j, el.k)).or_insert(0.0) += c;
    }

    pub fn get(&self, el: FrameElement) -> f64 {
        self.coefficients.get(&(el.j, el.k)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Coefficients ordered by scale, then translation.
    pub fn coefficients(&self) -> impl Iterator<Item = Coefficient> + '_ {
        self.coefficients.iter().map(|(&(j, k), &c)| Coefficient { k, j, c })
    }

    pub fn elements(&self) -> impl Iterator<Item = (FrameElement, f64)> + '_ {
        self.coefficients.iter().map(|(&(j, k), &c)| (FrameElement::new(k, j), c))
    }

    /// Drop coefficients with `|c| ≤ tol`.
    pub fn pruned(&self, tol: f64) -> FrameExpansion {
        let mut e = self.clone();
        e.coefficients.retain(|_, c| c.abs() > tol);
        e
    }

    /// Pointwise value of `Σ C_{k,j} η_{k,j}(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        for j in self.j_min..=self.j_max {
            let s = scale(j);
            let h = 0.5 * ramp_width(j);
            let k0 = ((x - h) / s).floor() as i64 - 1;
            let k1 = ((x + h) / s).ceil() as i64;
            for (&(_, k), &c) in self.coefficients.range((j, k0)..=(j, k1)) {
                sum += c * FrameElement::new(k, j).eval(x);
            }
        }
        sum
    }

    pub fn reconstruct(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Re-express every KAK coefficient (`j < 0`) on the unit scale through
    /// the exact two-scale relation. The represented function is unchanged.
    pub fn refine_kak_levels(&self) -> FrameExpansion {
        let mut out = FrameExpansion::new(self.j_min.max(0), self.j_max.max(0));
        out.reconstruction_error = self.reconstruction_error;
        for (el, c) in self.elements() {
            if el.j < 0 {
                for k in children(el.k, el.j, 0).expect("finer scale") {
                    out.add(FrameElement::new(k, 0), c);
                }
            } else {
                out.add(el, c);
            }
        }
        out
    }
}

/// CSV of `x,u` for the reconstruction sampled at `xs`.
pub fn reconstruction_csv(e: &FrameExpansion, xs: &[f64]) -> String {
    let mut out = String::from("x,u\n");
    for &x in xs {
        out.push_str(&format!("{},{}\n", fmt17(x), fmt17(e.eval(x))));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpandMethod {
    /// Coarse to fine, each scale fitted to what the coarser ones left.
    #[default]
    Greedy,
    /// Minimum-norm least squares over all scales at once (dense SVD of the
    /// sample matrix, so meant for moderate grids). Re-expanding the
    /// reconstruction returns the same coefficients.
    LeastSquares,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandOptions {
    pub j_min: i32,
    pub j_max: i32,
    pub method: ExpandMethod,
    /// Relative size below which the data counts as zero at the window edges.
    pub edge_tolerance: f64,
    pub exec: Execution,
}

impl Default for ExpandOptions {
    fn default() -> ExpandOptions {
        ExpandOptions { j_min: 0, j_max: 3, method: ExpandMethod::Greedy, edge_tolerance: 1e-12, exec: Execution::Sequential }
    }
}

/// Samples of one element on the grid, starting at index `start`.
struct Footprint {
    k: i64,
    start: usize,
    values: Vec<f64>,
}

fn footprints(j: i32, xs: &[f64], exec: Execution) -> Vec<Footprint> {
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let h = xs[1] - xs[0];
    let s = scale(j);
    let half = 0.5 * ramp_width(j);
    // Elements whose support lies inside the window.
    let k0 = ((x0 + half) / s).ceil() as i64;
    let k1 = ((x1 - half) / s).floor() as i64 - 1;
    if k1 < k0 {
        return Vec::new();
    }
    map_indexed(exec, (k1 - k0 + 1) as usize, |i| {
        let el = FrameElement::new(k0 + i as i64, j);
        let (lo, hi) = el.support();
        let start = (((lo - x0) / h).floor().max(0.0)) as usize;
        let end = ((((hi - x0) / h).ceil()) as usize).min(xs.len() - 1);
        let values = (start..=end).map(|n| el.eval(xs[n])).collect();
        Footprint { k: el.k, start, values }
    })
}

fn dot(f: &Footprint, g: &Footprint) -> f64 {
    let lo = f.start.max(g.start);
    let hi = (f.start + f.values.len()).min(g.start + g.values.len());
    (lo..hi).map(|n| f.values[n - f.start] * g.values[n - g.start]).sum()
}

/// Solve a symmetric tridiagonal system (diagonal `d`, off-diagonal `e`).
fn solve_tridiagonal(d: &[f64], e: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut pivot = d[0];
    if pivot.abs() < 1e-300 {
        return None;
    }
    y[0] = rhs[0] / pivot;
    for i in 1..n {
        c[i - 1] = e[i - 1] / pivot;
        pivot = d[i] - e[i - 1] * c[i - 1];
        if pivot.abs() <= 1e-14 * d[i].abs() {
            return None;
        }
        y[i] = (rhs[i] - e[i - 1] * y[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        y[i] -= c[i] * y[i + 1];
    }
    Some(y)
}

fn uniform_step(xs: &[f64]) -> Result<f64, FrameError> {
    if xs.len() < 3 {
        return Err(FrameError::Grid("need at least 3 samples".into()));
    }
    let h = xs[1] - xs[0];
    if !(h > 0.0) {
        return Err(FrameError::Grid("samples must increase".into()));
    }
    let span = xs[xs.len() - 1] - xs[0];
    for (i, &x) in xs.iter().enumerate() {
        if (x - (xs[0] + i as f64 * h)).abs() > 1e-9 * span.max(1.0) {
            return Err(FrameError::Grid("samples must be uniformly spaced".into()));
        }
    }
    Ok(h)
}

fn project(f: &Footprint, target: &[f64]) -> f64 {
    f.values.iter().enumerate().map(|(i, v)| v * target[f.start + i]).sum()
}

fn greedy(levels: &[(i32, Vec<Footprint>)], u: &[f64]) -> Result<Vec<Vec<f64>>, FrameError> {
    let mut residual = u.to_vec();
    let mut out = Vec::with_capacity(levels.len());
    for (j, fps) in levels {
        if fps.is_empty() {
            out.push(Vec::new());
            continue;
        }
        let d: Vec<f64> = fps.iter().map(|f| dot(f, f)).collect();
        let e: Vec<f64> = fps.windows(2).map(|w| dot(&w[0], &w[1])).collect();
        let rhs: Vec<f64> = fps.iter().map(|f| project(f, &residual)).collect();
        let c = solve_tridiagonal(&d, &e, &rhs).ok_or(FrameError::Singular { j: *j })?;
        for (f, &ci) in fps.iter().zip(&c) {
            for (i, v) in f.values.iter().enumerate() {
                residual[f.start + i] -= ci * v;
            }
        }
        out.push(c);
    }
    Ok(out)
}

fn joint(levels: &[(i32, Vec<Footprint>)], u: &[f64]) -> Result<Vec<Vec<f64>>, FrameError> {
    let all: Vec<&Footprint> = levels.iter().flat_map(|(_, f)| f.iter()).collect();
    let n = all.len();
    if n == 0 {
        return Ok(levels.iter().map(|_| Vec::new()).collect());
    }
    // Factor the sample matrix itself; the Gram matrix would square its
    // condition number.
    let mut phi = nalgebra::DMatrix::zeros(u.len(), n);
    for (col, f) in all.iter().enumerate() {
        for (i, v) in f.values.iter().enumerate() {
            phi[(f.start + i, col)] = *v;
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(u);
    let svd = phi.svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    let c = svd.solve(&rhs, tol).map_err(|_| FrameError::Singular { j: levels[0].0 })?;
    let mut out = Vec::with_capacity(levels.len());
    let mut at = 0;
    for (_, fps) in levels {
        out.push(c.as_slice()[at..at + fps.len()].to_vec());
        at += fps.len();
    }
    Ok(out)
}

/// Fit gridded data by the frame on scales `j_min..=j_max`.
/// Greedily, each scale solves the least-squares problem against the current
/// residual; neighbouring elements at one scale overlap only in their ramps,
/// so the normal equations are tridiagonal.
pub fn expand(xs: &[f64], u: &[f64], opts: &ExpandOptions) -> Result<FrameExpansion, FrameError> {
    if xs.len() != u.len() {
        return Err(FrameError::Grid(format!("{} abscissae but {} values", xs.len(), u.len())));
    }
    let h = uniform_step(xs)?;
    if opts.j_max < opts.j_min || opts.j_max - opts.j_min > 30 || opts.j_max > 30 || opts.j_min < -30 {
        return Err(FrameError::ScaleRange { j_min: opts.j_min, j_max: opts.j_max });
    }
    if h > scale(opts.j_max) / 8.0 {
        return Err(FrameError::GridTooCoarse { h, scale: scale(opts.j_max) });
    }
    let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for &i in &[0, u.len() - 1] {
        if u[i].abs() > opts.edge_tolerance * peak.max(f64::MIN_POSITIVE) {
            return Err(FrameError::SupportExceedsWindow { x: xs[i], value: u[i] });
        }
    }

    let levels: Vec<(i32, Vec<Footprint>)> =
        (opts.j_min..=opts.j_max).map(|j| (j, footprints(j, xs, opts.exec))).collect();
    let coeffs = match opts.method {
        ExpandMethod::Greedy => greedy(&levels, u)?,
        ExpandMethod::LeastSquares => joint(&levels, u)?,
    };

    let mut total = vec![0.0; u.len()];
    for ((_, fps), c) in levels.iter().zip(&coeffs) {
        for (f, &ci) in fps.iter().zip(c) {
            for (i, v) in f.values.iter().enumerate() {
                total[f.start + i] += ci * v;
            }
        }
    }
    let mut out = FrameExpansion::new(opts.j_min, opts.j_max);
    for ((j, fps), c) in levels.iter().zip(&coeffs) {
        for (f, &ci) in fps.iter().zip(c) {
            out.add(FrameElement::new(f.k, *j), ci);
        }
    }
    let err2: f64 = u.iter().zip(&total).map(|(a, b)| (a - b) * (a - b)).sum();
    out.reconstruction_error = Some((h * err2).sqrt());
    Ok(out)
}

/// Sample `f` on `[x0, x1]` with spacing close to `h` and expand it.
pub fn expand_fn<F: Fn(f64) -> f64>(
    f: F,
    window: (f64, f64),
    h: f64,
    opts: &ExpandOptions,
) -> Result<FrameExpansion, FrameError> {
    let (x0, x1) = window;
    if !(x1 > x0) || !(h > 0.0) {
        return Err(FrameError::Grid(format!("bad window [{x0}, {x1}] or spacing {h}")));
    }
    let n = ((x1 - x0) / h).ceil() as usize;
    let dx = (x1 - x0) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| x0 + i as f64 * dx).collect();
    let u: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    expand(&xs, &u, opts)
}

/// One product `weight · η_a · η_b` of the squared expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareTerm {
    pub a: FrameElement,
    pub b: FrameElement,
    pub weight: f64,
}

/// Bookkeeping of the cross terms between one coarse element and one finer
/// scale: how many partners sit in its children cells, and how many more
/// touch it only through the straddling ramps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCount {
    pub k: i64,
    pub j: i32,
    pub j_fine: i32,
    pub in_children: usize,
    pub ramp_neighbours: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareExpansion {
    pub terms: Vec<SquareTerm>,
    pub cross_counts: Vec<CrossCount>,
}

impl SquareExpansion {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.weight * t.a.eval(x) * t.b.eval(x)).sum()
    }

    pub fn self_terms(&self) -> usize {
        self.terms.iter().filter(|t| t.a == t.b).count()
    }

    pub fn cross_terms(&self) -> usize {
        self.terms.len() - self.self_terms()
    }
}

/// Expansion of `u²` for `u = Σ C η`. KAK coefficients are first moved to
/// the unit scale by the two-scale relation, then only products of
/// overlapping elements are kept.
pub fn square_expand(e: &FrameExpansion) -> SquareExpansion {
    let fine = e.refine_kak_levels().pruned(0.0);
    let items: Vec<(FrameElement, f64)> = fine.elements().collect();
    let mut terms = Vec::new();
    for (i, &(a, ca)) in items.iter().enumerate() {
        terms.push(SquareTerm { a, b: a, weight: ca * ca });
        for &(b, cb) in &items[i + 1..] {
            if a.overlaps(b) {
                terms.push(SquareTerm { a, b, weight: 2.0 * ca * cb });
            }
        }
    }

    let mut cross_counts = Vec::new();
    for &(a, _) in &items {
        for jf in a.j + 1..=fine.j_max {
            let kids = children(a.k, a.j, jf).expect("finer scale");
            let mut in_children = 0;
            let mut ramp_neighbours = 0;
            for &(b, _) in items.iter().filter(|(b, _)| b.j == jf) {
                if kids.contains(&b.k) {
                    in_children += 1;
                } else if a.overlaps(b) {
                    ramp_neighbours += 1;
                }
            }
            if in_children + ramp_neighbours > 0 {
                cross_counts.push(CrossCount { k: a.k, j: a.j, j_fine: jf, in_children, ramp_neighbours });
            }
        }
    }
    SquareExpansion { terms, cross_counts }
}

/// Empirical Riesz bounds of a finite set of elements: extreme eigenvalues
/// of the Gram matrix of the L²-normalized elements, with inner products
/// from the trapezoid rule at spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn riesz_bounds(elements: &[FrameElement], h: f64) -> RieszBounds {
    let n = elements.len();
    if n == 0 {
        return RieszBounds { lower: 0.0, upper: 0.0 };
    }
    let lo = elements.iter().map(|e| e.support().0).fold(f64::INFINITY, f64::min);
    let hi = elements.iter().map(|e| e.support().1).fold(f64::NEG_INFINITY, f64::max);
    let m = ((hi - lo) / h).ceil() as usize;
    let xs: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
    let samples: Vec<Vec<f64>> = elements
        .iter()
        .map(|e| {
            let v: Vec<f64> = xs.iter().map(|&x| e.eval(x)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.into_iter().map(|a| a / norm).collect()
        })
        .collect();
    let gram = nalgebra::DMatrix::from_fn(n, n, |r, c| {
        samples[r].iter().zip(&samples[c]).map(|(a, b)| a * b).sum::<f64>()
    });
    let eig = nalgebra::SymmetricEigen::new(gram).eigenvalues;
    RieszBounds { lower: eig.min(), upper: eig.max() }
}
