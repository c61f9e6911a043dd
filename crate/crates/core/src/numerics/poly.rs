//! Real polynomials in one variable and isolation of their positive roots.
//!
//! Roots are isolated with the derivative-sequence method: between two
//! consecutive critical points a polynomial is monotone, so each such
//! interval holds at most one simple root and plain bisection finds it.
//! Critical points where the polynomial itself vanishes are reported as
//! multiple roots.

use serde::{Deserialize, Serialize};

/// Dense polynomial, `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

/// A located root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u32,
}

const REL_TOL: f64 = 1e-12;

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Poly {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Σ |c_k x^k|, the natural scale for judging `eval(x)` against zero.
    pub fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Upper bound on the modulus of every root (Cauchy).
    pub fn cauchy_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
        1.0 + m
    }

    /// All roots in the open interval `(0, ∞)`, ascending.
    ///
    /// Leading zero coefficients (roots at the origin) are stripped first.
    pub fn positive_roots(&self) -> Vec<Root> {
        if self.is_zero() {
            return Vec::new();
        }
        let shift = self.coeffs.iter().take_while(|c| **c == 0.0).count();
        let reduced = Poly::new(self.coeffs[shift..].to_vec());
        if reduced.degree() == 0 {
            return Vec::new();
        }
        // Lower bound on |root| from the reversed polynomial.
        let reversed = Poly::new(reduced.coeffs.iter().rev().copied().collect());
        let lo = 1.0 / reversed.cauchy_bound();
        let hi = reduced.cauchy_bound();
        let mut roots = roots_in(&reduced, lo * 0.5, hi * 1.5);
        roots.retain(|r| r.value > 0.0);
        roots
    }
}

/// Roots of `p` in `[lo, hi]` by recursive derivative isolation.
fn roots_in(p: &Poly, lo: f64, hi: f64) -> Vec<Root> {
    if p.degree() == 0 {
        return Vec::new();
    }
    if p.degree() == 1 {
        let x = -p.coeffs[0] / p.coeffs[1];
        return if x >= lo && x <= hi {
            vec![Root { value: x, multiplicity: 1 }]
        } else {
            Vec::new()
        };
    }
    let dp = p.derivative();
    // Critical points split [lo, hi] into monotone pieces.
    let critical = roots_in(&dp, lo, hi);
    let mut knots = Vec::with_capacity(critical.len() + 2);
    knots.push(lo);
    knots.extend(critical.iter().map(|r| r.value));
    knots.push(hi);

    let mut out: Vec<Root> = Vec::new();
    for c in &critical {
        let scale = p.magnitude(c.value).max(f64::MIN_POSITIVE);
        if p.eval(c.value).abs() <= 1e-10 * scale {
            out.push(Root { value: c.value, multiplicity: c.multiplicity + 1 });
        }
    }
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (fa, fb) = (p.eval(a), p.eval(b));
        if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        let x = bisect(|x| p.eval(x), a, b, fa);
        let near_multiple = out
            .iter()
            .any(|r| r.multiplicity > 1 && (r.value - x).abs() <= 1e-9 * r.value.abs().max(1e-300));
        if !near_multiple {
            out.push(Root { value: x, multiplicity: 1 });
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

/// Bisection on a sign-changing bracket to relative tolerance 1e-12.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || (b - a) <= REL_TOL * m.abs().max(f64::MIN_POSITIVE) {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Real roots of `a x² + b x + c` using the cancellation-free form.
/// A discriminant within round-off of zero yields one double root.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<Root> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![Root { value: -c / b, multiplicity: 1 }];
    }
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs());
    if disc.abs() <= 1e-14 * scale {
        return vec![Root { value: -b / (2.0 * a), multiplicity: 2 }];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let sign = if b < 0.0 { -1.0 } else { 1.0 };
    let q = -0.5 * (b + sign * sq);
    let mut r = vec![q / a, c / q];
    r.sort_by(f64::total_cmp);
    r.into_iter().map(|value| Root { value, multiplicity: 1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn finds_simple_positive_roots() {
        // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
        let p = Poly::new(vec![6.0, -7.0, 0.0, 1.0]);
        let r = p.positive_roots();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - 1.0).abs() < 1e-12);
        assert!((r[1].value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_double_root() {
        // (x - 1)^2 = x^2 - 2x + 1
        let p = Poly::new(vec![1.0, -2.0, 1.0]);
        let r = p.positive_roots();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value - 1.0).abs() < 1e-9);
        let q = quadratic_roots(1.0, -2.0, 1.0);
        assert_eq!(q, vec![Root { value: 1.0, multiplicity: 2 }]);
    }

    #[test]
    fn no_roots_for_positive_definite() {
        assert!(Poly::new(vec![1.0, 0.0, 1.0]).positive_roots().is_empty());
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
    }

    #[test]
    fn quadratic_handles_cancellation() {
        let r = quadratic_roots(1.0, -1e8, 1.0);
        assert!((r[0].value - 1e-8).abs() < 1e-20);
        assert!((r[1].value - 1e8).abs() < 1e-4);
        let r = quadratic_roots(1.0, 0.0, -4.0);
        assert!((r[0].value + 2.0).abs() < 1e-15 && (r[1].value - 2.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn recovers_planted_roots(r1 in 0.01f64..50.0, r2 in 0.01f64..50.0, r3 in -50.0f64..-0.01) {
            prop_assume!((r1 - r2).abs() > 1e-3 * r1.max(r2));
            // (x - r1)(x - r2)(x - r3)
            let c0 = -r1 * r2 * r3;
            let c1 = r1 * r2 + r1 * r3 + r2 * r3;
            let c2 = -(r1 + r2 + r3);
            let roots = Poly::new(vec![c0, c1, c2, 1.0]).positive_roots();
            prop_assert_eq!(roots.len(), 2);
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!((roots[0].value - lo).abs() <= 1e-9 * lo.max(1.0));
            prop_assert!((roots[1].value - hi).abs() <= 1e-9 * hi.max(1.0));
        }
    }
}
