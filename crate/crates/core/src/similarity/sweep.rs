use serde::{Deserialize, Serialize};

use super::relation::{Branch, SimilarityRelation};
use super::solve::solve_width;
use super::{Bindings, SimilarityError};
use crate::exec::{map_indexed, Execution};
use crate::numerics::fmt17;
use crate::numerics::poly::Root;

/// Velocities to pair with each amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VelocitySpec {
    /// `samples` evenly spaced values from `min` to `max` inclusive.
    Range { min: f64, max: f64, samples: usize },
    /// The single velocity `V = factor·A`.
    Proportional { factor: f64 },
}

impl VelocitySpec {
    pub fn values(&self, a: f64) -> Vec<f64> {
        match *self {
            VelocitySpec::Range { min, max, samples } => match samples {
                0 => Vec::new(),
                1 => vec![min],
                n => (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect(),
            },
            VelocitySpec::Proportional { factor } => vec![factor * a],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub a: f64,
    pub v: f64,
    pub branch: Branch,
    pub roots: Vec<Root>,
}

/// Width roots over an `(A, V, branch)` grid, amplitude-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

/// An `L = level` crossing located by linear interpolation in V.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub a: f64,
    pub branch: Branch,
    pub v: f64,
}

/// A velocity where a root runs off to infinity, bracketed between the
/// last sample without a root and the first with one (or vice versa).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub a: f64,
    pub branch: Branch,
    pub v_lo: f64,
    pub v_hi: f64,
    /// Root nearest the divergence.
    pub l_edge: f64,
}

pub fn sweep(
    rel: &SimilarityRelation,
    bindings: &Bindings,
    amplitudes: &[f64],
    velocities: &VelocitySpec,
    branches: &[Branch],
    exec: Execution,
) -> Result<CurveTable, SimilarityError> {
    for b in branches {
        rel.check_branch(b)?;
    }
    let mut points = Vec::new();
    for &a in amplitudes {
        for v in velocities.values(a) {
            for b in branches {
                points.push((a, v, b));
            }
        }
    }
    let rows = map_indexed(exec, points.len(), |i| {
        let (a, v, b) = points[i];
        solve_width(rel, bindings, a, v, b).map(|s| CurveRow { a, v, branch: b.clone(), roots: s.roots })
    });
    Ok(CurveTable { rows: rows.into_iter().collect::<Result<_, _>>()? })
}

impl CurveTable {
    /// CSV with header `A,V,branch,L1,...`; rows without a root carry the
    /// marker `none` in `L1`.
    pub fn to_csv(&self) -> String {
        let width = self.rows.iter().map(|r| r.roots.len()).max().unwrap_or(0).max(1);
        let mut out = String::from("A,V,branch");
        for k in 1..=width {
            out.push_str(&format!(",L{k}"));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{}", fmt17(r.a), fmt17(r.v), r.branch));
            if r.roots.is_empty() {
                out.push_str(",none");
                out.push_str(&",".repeat(width - 1));
            } else {
                for root in &r.roots {
                    out.push(',');
                    out.push_str(&fmt17(root.value));
                }
                out.push_str(&",".repeat(width - r.roots.len()));
            }
            out.push('\n');
        }
        out
    }

    /// Rows of one `(A, branch)` curve in V order.
    pub fn curve(&self, a: f64, branch: &Branch) -> Vec<&CurveRow> {
        let mut rows: Vec<&CurveRow> = self.rows.iter().filter(|r| r.a == a && &r.branch == branch).collect();
        rows.sort_by(|x, y| x.v.total_cmp(&y.v));
        rows
    }

    /// Distinct `(A, branch)` keys in table order.
    pub fn keys(&self) -> Vec<(f64, Branch)> {
        let mut keys: Vec<(f64, Branch)> = Vec::new();
        for r in &self.rows {
            if !keys.iter().any(|(a, b)| *a == r.a && *b == r.branch) {
                keys.push((r.a, r.branch.clone()));
            }
        }
        keys
    }

    /// Crossings of the horizontal line `L = level` along each curve.
    pub fn crossings(&self, level: f64) -> Vec<Crossing> {
        let mut out = Vec::new();
        for (a, branch) in self.keys() {
            let curve = self.curve(a, &branch);
            for w in curve.windows(2) {
                let (p, q) = (w[0], w[1]);
                if p.roots.len() != q.roots.len() {
                    continue;
                }
                for (rp, rq) in p.roots.iter().zip(&q.roots) {
                    let (dp, dq) = (rp.value - level, rq.value - level);
                    if dp == 0.0 || dp.signum() != dq.signum() {
                        let v = p.v + (q.v - p.v) * dp / (dp - dq);
                        out.push(Crossing { a, branch: branch.clone(), v });
                    }
                }
            }
        }
        out
    }

    /// Places where a curve's root count changes and the root at the edge
    /// is larger than its neighbor further from the edge (L → ∞ there).
    pub fn divergences(&self) -> Vec<Divergence> {
        let mut out = Vec::new();
        for (a, branch) in self.keys() {
            let curve = self.curve(a, &branch);
            for i in 0..curve.len().saturating_sub(1) {
                let (p, q) = (curve[i], curve[i + 1]);
                let (edge, inner) = match (p.roots.is_empty(), q.roots.is_empty()) {
                    (true, false) => (q, curve.get(i + 2).copied()),
                    (false, true) => (p, i.checked_sub(1).map(|j| curve[j])),
                    _ => continue,
                };
                let l_edge = edge.roots.iter().map(|r| r.value).fold(0.0, f64::max);
                let growing = inner
                    .filter(|r| !r.roots.is_empty())
                    .is_some_and(|r| l_edge > r.roots.iter().map(|x| x.value).fold(0.0, f64::max));
                if growing {
                    out.push(Divergence { a, branch: branch.clone(), v_lo: p.v, v_hi: q.v, l_edge });
                }
            }
        }
        out
    }
}
