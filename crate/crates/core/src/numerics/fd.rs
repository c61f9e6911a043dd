//! Finite-difference weights.
//!
//! Weights come from Fornberg's recursion, so any derivative order and any
//! node set (central or one-sided) is available from one routine.

/// Weights `w[m]` such that `f^(deriv)(x0) ≈ Σ w[m] f(nodes[m])`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], deriv: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > deriv, "need more nodes than the derivative order");
    // c[i][k]: weight of node i for derivative k
    let mut c = vec![vec![0.0; deriv + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[deriv]).collect()
}

/// A centered stencil on a uniform grid with unit spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    /// Offsets run from `-half_width` to `half_width`.
    pub half_width: usize,
    pub weights: Vec<f64>,
}

impl Stencil {
    /// Central stencil for `deriv` with formal accuracy `order` (even).
    pub fn central(deriv: usize, order: usize) -> Stencil {
        if deriv == 0 {
            return Stencil { half_width: 0, weights: vec![1.0] };
        }
        let half_width = (deriv + order - 1) / 2;
        let nodes: Vec<f64> = (-(half_width as i64)..=half_width as i64).map(|m| m as f64).collect();
        let mut weights = fornberg_weights(0.0, &nodes, deriv);
        // Exact symmetry keeps the discrete operator conservative to round-off.
        let parity = if deriv % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..half_width {
            let avg = 0.5 * (weights[m] * parity + weights[2 * half_width - m]);
            weights[m] = avg * parity;
            weights[2 * half_width - m] = avg;
        }
        if deriv % 2 == 1 {
            weights[half_width] = 0.0;
        }
        Stencil { half_width, weights }
    }

    /// Weights divided by `h^deriv`.
    pub fn scaled(&self, deriv: usize, h: f64) -> Vec<f64> {
        let s = h.powi(deriv as i32);
        self.weights.iter().map(|w| w / s).collect()
    }

    pub fn width(&self) -> usize {
        2 * self.half_width + 1
    }
}

/// Apply a centered stencil to `values`, returning the interior that the
/// stencil fully covers (length `values.len() - 2 * half_width`).
pub fn apply_interior(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let width = weights.len();
    if values.len() < width {
        return Vec::new();
    }
    values
        .windows(width)
        .map(|w| w.iter().zip(weights).map(|(a, b)| a * b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn matches_tabulated_fourth_order_stencils() {
        let d1 = Stencil::central(1, 4);
        assert!(close(&d1.weights, &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0]));
        let d2 = Stencil::central(2, 4);
        assert!(close(&d2.weights, &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0]));
        let d3 = Stencil::central(3, 4);
        let t3: Vec<f64> = [1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0].iter().map(|w| w / 8.0).collect();
        assert!(close(&d3.weights, &t3));
        let d4 = Stencil::central(4, 4);
        let t4: Vec<f64> = [-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0].iter().map(|w| w / 6.0).collect();
        assert!(close(&d4.weights, &t4));
    }

    #[test]
    fn derivative_weights_sum_to_zero() {
        for d in 1..=4 {
            for order in [2, 4, 6] {
                let s: f64 = Stencil::central(d, order).weights.iter().sum();
                assert!(s.abs() < 1e-12, "d={d} order={order} sum={s}");
            }
        }
    }

    #[test]
    fn one_sided_weights_differentiate_polynomials_exactly() {
        let nodes: Vec<f64> = (0..6).map(|i| i as f64 * 0.1).collect();
        let w = fornberg_weights(0.0, &nodes, 3);
        // f = x^4 + x^3, f'''(0) = 6
        let est: f64 = nodes.iter().zip(&w).map(|(x, w)| w * (x.powi(4) + x.powi(3))).sum();
        assert!((est - 6.0).abs() < 1e-8, "{est}");
    }

    #[test]
    fn fourth_order_convergence_on_sine() {
        let s = Stencil::central(3, 4);
        let err = |h: f64| {
            let vals: Vec<f64> = (-3..=3).map(|m| (0.3 + m as f64 * h).sin()).collect();
            let est = apply_interior(&vals, &s.scaled(3, h))[0];
            (est + 0.3f64.cos()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
