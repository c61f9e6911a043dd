use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::periodic_offset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compacton {
    pub amplitude: f64,
    pub center: f64,
    /// `L` of the fitted `A cos²((x - center)/L)`; 4 for a K(2,2) compacton.
    pub half_width: f64,
    /// From center displacement since the previous inventory.
    pub speed: Option<f64>,
    /// False when the lobe overlaps a neighbor and was not split.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactonInventory {
    pub t: f64,
    /// Sorted by center.
    pub compactons: Vec<Compacton>,
}

/// A valley above this fraction of the lower neighboring peak marks a
/// ripple on one lobe, not two lobes.
const RIPPLE: f64 = 0.9;
/// A valley above this fraction marks overlapping lobes.
const OVERLAP: f64 = 0.5;
/// Only samples above this fraction of the peak enter the fit.
const FIT_LEVEL: f64 = 0.1;

/// Peaks above `threshold` on the periodic grid `xs`, each fitted with
/// `A cos²((x - c)/L)`.
pub fn detect_compactons(xs: &[f64], u: &[f64], threshold: f64, t: f64) -> CompactonInventory {
    let n = u.len();
    let empty = CompactonInventory { t, compactons: Vec::new() };
    if n < 3 || !(threshold > 0.0) {
        return empty;
    }
    let dx = xs[1] - xs[0];
    let domain = dx * n as f64;
    let at = |i: isize| u[i.rem_euclid(n as isize) as usize];
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let i = i as isize;
            at(i) > threshold && at(i) >= at(i - 1) && at(i) > at(i + 1)
        })
        .collect();
    if peaks.is_empty() {
        return empty;
    }
    // Valley between peaks[k] and the next peak (cyclically).
    let valley = |a: usize, b: usize| -> (usize, f64) {
        let len = if b > a { b - a } else { b + n - a };
        (0..=len).map(|s| (a + s) % n).map(|i| (i, u[i])).fold((a, f64::INFINITY), |m, p| if p.1 < m.1 { p } else { m })
    };
    loop {
        let m = peaks.len();
        if m < 2 {
            break;
        }
        let merge = (0..m).find_map(|k| {
            let (a, b) = (peaks[k], peaks[(k + 1) % m]);
            let (_, v) = valley(a, b);
            (v > RIPPLE * u[a].min(u[b])).then_some(if u[a] < u[b] { k } else { (k + 1) % m })
        });
        match merge {
            Some(k) => {
                peaks.remove(k);
            }
            None => break,
        }
    }
    let m = peaks.len();
    let mut compactons = Vec::new();
    for k in 0..m {
        let p = peaks[k];
        let peak = u[p];
        let (left, lv, right, rv) = if m == 1 {
            let (v, val) = valley(p, p);
            (v, val, v, val)
        } else {
            let (l, lv) = valley(peaks[(k + m - 1) % m], p);
            let (r, rv) = valley(p, peaks[(k + 1) % m]);
            (l, lv, r, rv)
        };
        let resolved = lv < OVERLAP * peak && rv < OVERLAP * peak;
        // Samples of this lobe, as offsets from the peak.
        let mut pts = Vec::new();
        let left_len = if p >= left { p - left } else { p + n - left };
        let right_len = if right >= p { right - p } else { right + n - p };
        let (left_len, right_len) = if m == 1 { (n / 2, n / 2) } else { (left_len, right_len) };
        for s in -(left_len as isize)..=(right_len as isize) {
            let v = at(p as isize + s);
            if v > FIT_LEVEL * peak {
                pts.push((s as f64 * dx, v));
            }
        }
        let c0 = refine_peak(at(p as isize - 1), peak, at(p as isize + 1)) * dx;
        if let Some((a, c, l)) = fit_cos2(&pts, peak, c0) {
            if a > threshold {
                let center = wrap_into(xs[p] + c, xs[0], domain);
                compactons.push(Compacton { amplitude: a, center, half_width: l, speed: None, resolved });
            }
        }
    }
    compactons.sort_by(|a, b| a.center.total_cmp(&b.center));
    CompactonInventory { t, compactons }
}

fn wrap_into(x: f64, start: f64, domain: f64) -> f64 {
    start + (x - start).rem_euclid(domain)
}

/// Vertex offset of the parabola through three equally spaced samples.
fn refine_peak(l: f64, c: f64, r: f64) -> f64 {
    let d = l - 2.0 * c + r;
    if d >= 0.0 {
        0.0
    } else {
        (0.5 * (l - r) / d).clamp(-0.5, 0.5)
    }
}

/// Levenberg–Marquardt fit of `A cos²((z - c)/L)` to `(z, u)` samples.
fn fit_cos2(pts: &[(f64, f64)], a0: f64, c0: f64) -> Option<(f64, f64, f64)> {
    if pts.len() < 4 {
        return None;
    }
    // Half width at half maximum of cos² is πL/4.
    let above = pts.iter().filter(|(_, v)| *v >= 0.5 * a0).map(|(z, _)| *z);
    let (lo, hi) = above.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z), hi.max(z)));
    let dz = pts[1].0 - pts[0].0;
    let hwhm = 0.5 * (hi - lo + dz.abs());
    let mut p = Vector3::new(a0, c0, (4.0 * hwhm / std::f64::consts::PI).max(dz.abs()));
    let cost = |p: &Vector3<f64>| -> f64 {
        pts.iter().map(|(z, v)| (p[0] * ((z - p[1]) / p[2]).cos().powi(2) - v).powi(2)).sum()
    };
    let mut lambda = 1e-3;
    let mut current = cost(&p);
    for _ in 0..200 {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (z, v) in pts {
            let th = (z - p[1]) / p[2];
            let c = th.cos();
            let r = p[0] * c * c - v;
            let s2 = (2.0 * th).sin();
            let j = Vector3::new(c * c, p[0] * s2 / p[2], p[0] * s2 * th / p[2]);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut damped = jtj;
        for i in 0..3 {
            damped[(i, i)] *= 1.0 + lambda;
        }
        let delta = damped.lu().solve(&(-jtr))?;
        let trial = p + delta;
        let next = if trial[2] > 0.0 { cost(&trial) } else { f64::INFINITY };
        if next < current {
            let small = delta.norm() < 1e-13 * (1.0 + p.norm());
            p = trial;
            current = next;
            lambda = (lambda * 0.3).max(1e-12);
            if small {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    (p.iter().all(|v| v.is_finite()) && p[2] > 0.0).then_some((p[0], p[1], p[2]))
}

/// Speeds from center displacement between consecutive inventories,
/// matching each compacton to the nearest previous center.
pub fn track_speeds(inventories: &mut [CompactonInventory], domain: f64) {
    for k in 1..inventories.len() {
        let (before, after) = inventories.split_at_mut(k);
        let prev = &before[k - 1];
        let cur = &mut after[0];
        let dt = cur.t - prev.t;
        if dt <= 0.0 {
            continue;
        }
        for c in &mut cur.compactons {
            let nearest = prev
                .compactons
                .iter()
                .map(|q| periodic_offset(c.center - q.center, domain))
                .min_by(|a, b| a.abs().total_cmp(&b.abs()));
            if let Some(d) = nearest {
                if d.abs() < 0.5 * std::f64::consts::PI * c.half_width {
                    c.speed = Some(d / dt);
                }
            }
        }
    }
}

/// Displacement `s` maximizing the periodic cross-correlation
/// `Σ u0(x) u1(x + s)`, refined below the grid spacing.
pub fn correlation_shift(u0: &[f64], u1: &[f64], dx: f64) -> f64 {
    let n = u0.len();
    let corr = |s: usize| -> f64 { (0..n).map(|i| u0[i] * u1[(i + s) % n]).sum() };
    let values: Vec<f64> = (0..n).map(corr).collect();
    let best = (0..n).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let frac = refine_peak(values[(best + n - 1) % n], values[best], values[(best + 1) % n]);
    let mut s = best as f64 + frac;
    if s >= n as f64 / 2.0 {
        s -= n as f64;
    }
    s * dx
}
