use compacton::frame::{
    children, eta_eval, expand, expand_fn, reconstruction_csv, riesz_bounds, square_expand, two_scale_check,
    two_scale_defect, ExpandMethod, ExpandOptions, FrameElement, FrameError, FrameExpansion,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn el(k: i64, j: i32) -> FrameElement {
    FrameElement::new(k, j)
}

fn grid(x0: f64, x1: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect()
}

#[test]
fn element_values_at_reference_points() {
    assert_eq!(eta_eval(el(0, 0), 0.5), 1.0);
    for x in grid(0.5, 1.5, 100) {
        assert_eq!(eta_eval(el(0, -1), x), 1.0, "x={x}");
    }
    assert_eq!(eta_eval(el(3, 2), 0.2), 0.0);
    let (lo, hi) = el(3, 2).support();
    assert_eq!(eta_eval(el(3, 2), lo), 0.0);
    assert_eq!(eta_eval(el(3, 2), hi), 0.0);
    assert_eq!(eta_eval(el(3, 2), 0.875), 1.0);
}

#[test]
fn kak_levels_have_unit_ramps_and_flat_length_s_minus_one() {
    for j in -4..=0 {
        let e = el(1, j);
        assert_eq!(e.ramp(), 1.0);
        assert_eq!(e.flat_length(), e.scale() - 1.0);
        let (a, b) = e.cell();
        assert_eq!(e.eval(a + 0.5), 1.0);
        assert_eq!(e.eval(b - 0.5), 1.0);
        assert!((e.eval(a) - 0.5).abs() < 1e-15);
    }
}

#[test]
fn two_scale_relation_holds_on_the_lattice() {
    assert!(two_scale_check(-1, 0, 10_000) < 1e-12);
    for j in -5..=5 {
        for k in -6..=6 {
            let d = two_scale_check(j, k, 10_000);
            assert!(d < 1e-12, "j={j} k={k} defect={d}");
        }
    }
}

#[test]
fn shifted_child_is_detected() {
    for j in [-2, 0, 3] {
        let d = two_scale_defect(1, j, &[2, 4], 10_000);
        assert!(d > 0.5, "j={j} defect={d}");
    }
}

#[test]
fn same_scale_elements_partition_unity() {
    for j in -2..=4 {
        let n = 4 * (1i64 << j.max(0)) + 2;
        let sum = |x: f64| (-n..n).map(|k| el(k, j).eval(x)).sum::<f64>();
        for x in grid(-3.0, 3.0, 5000) {
            assert!((sum(x) - 1.0).abs() < 1e-14, "j={j} x={x}");
        }
    }
}

#[test]
fn children_match_brute_force_cell_overlap() {
    for j in 0..=5 {
        for jf in j..=5 {
            for k in -16..=16 {
                let s = (-(j as f64)).exp2();
                let sf = (-(jf as f64)).exp2();
                let (a, b) = (k as f64 * s, (k + 1) as f64 * s);
                let brute: Vec<i64> = (-2000..2000)
                    .filter(|&kf| {
                        let (c, d) = (kf as f64 * sf, (kf + 1) as f64 * sf);
                        c < b && a < d
                    })
                    .collect();
                let got: Vec<i64> = children(k, j, jf).unwrap().collect();
                assert_eq!(got, brute, "k={k} j={j} j'={jf}");
                assert_eq!(got.len(), 1 << (jf - j));
            }
        }
    }
    assert_eq!(children(0, 0, 2).unwrap().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    assert_eq!(children(5, 3, 3).unwrap().collect::<Vec<_>>(), vec![5]);
    assert_eq!(children(1, 0, 3).unwrap().collect::<Vec<_>>(), (8..=15).collect::<Vec<_>>());
    assert!(matches!(children(0, 2, 1), Err(FrameError::ScaleOrder { .. })));
}

#[test]
fn expanding_a_basis_element_recovers_it() {
    let opts = ExpandOptions { j_min: 0, j_max: 3, ..Default::default() };
    let e = expand_fn(|x| el(0, 0).eval(x), (-2.0, 3.0), 1.0 / 256.0, &opts).unwrap();
    assert!((e.get(el(0, 0)) - 1.0).abs() < 1e-10);
    for c in e.coefficients() {
        if (c.k, c.j) != (0, 0) {
            assert!(c.c.abs() < 1e-10, "{c:?}");
        }
    }
    assert!(e.reconstruction_error.unwrap() < 1e-10);
}

#[test]
fn unit_kak_is_recovered_by_its_two_children() {
    let opts = ExpandOptions { j_min: 0, j_max: 2, ..Default::default() };
    let e = expand_fn(|x| el(0, -1).eval(x), (-2.0, 4.0), 1.0 / 128.0, &opts).unwrap();
    assert!((e.get(el(0, 0)) - 1.0).abs() < 1e-10);
    assert!((e.get(el(1, 0)) - 1.0).abs() < 1e-10);
    assert!(e.pruned(1e-10).len() == 2);
}

#[test]
fn gaussian_error_decreases_with_finer_scales() {
    let f = |x: f64| (-2.0 * (x - 0.3) * (x - 0.3)).exp();
    let errs: Vec<f64> = (1..=4)
        .map(|jmax| {
            let opts = ExpandOptions { j_min: 0, j_max: jmax, ..Default::default() };
            expand_fn(f, (-5.0, 5.0), 1.0 / 512.0, &opts).unwrap().reconstruction_error.unwrap()
        })
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}

#[test]
fn reconstruction_error_matches_direct_evaluation() {
    let f = |x: f64| (-(x * x)).exp() * (1.0 + 0.3 * x);
    let xs = grid(-6.0, 6.0, 3072);
    let u: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let opts = ExpandOptions { j_min: -1, j_max: 2, edge_tolerance: 1e-10, ..Default::default() };
    let e = expand(&xs, &u, &opts).unwrap();
    let h = xs[1] - xs[0];
    let direct = (h * xs.iter().zip(&u).map(|(&x, v)| (v - e.eval(x)).powi(2)).sum::<f64>()).sqrt();
    assert!((direct - e.reconstruction_error.unwrap()).abs() < 1e-12);
}

#[test]
fn converged_expansion_is_a_projection() {
    let f = |x: f64| (-(x * x)).exp() * (1.0 + 0.3 * x);
    let xs = grid(-6.0, 6.0, 3072);
    let u: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let opts = ExpandOptions { j_min: 0, j_max: 2, method: ExpandMethod::LeastSquares, edge_tolerance: 1e-10, ..Default::default() };
    let first = expand(&xs, &u, &opts).unwrap();
    let again = expand(&xs, &first.reconstruct(&xs), &opts).unwrap();
    for (a, b) in first.coefficients().zip(again.coefficients()) {
        assert_eq!((a.k, a.j), (b.k, b.j));
        assert!((a.c - b.c).abs() < 1e-10, "{a:?} {b:?}");
    }
}

#[test]
fn expand_rejects_bad_input() {
    let xs = grid(-1.0, 1.0, 400);
    let u: Vec<f64> = xs.iter().map(|&x| 1.0 + x * 0.0).collect();
    assert!(matches!(
        expand(&xs, &u, &ExpandOptions::default()),
        Err(FrameError::SupportExceedsWindow { .. })
    ));
    let coarse = grid(-4.0, 4.0, 40);
    let v = vec![0.0; coarse.len()];
    assert!(matches!(expand(&coarse, &v, &ExpandOptions::default()), Err(FrameError::GridTooCoarse { .. })));
}

#[test]
fn square_of_single_and_disjoint_elements() {
    let one = FrameExpansion::from_coefficients([(el(0, 0), 1.0)]);
    let sq = square_expand(&one);
    assert_eq!(sq.terms.len(), 1);
    assert_eq!(sq.self_terms(), 1);
    assert!((sq.eval(0.3) - el(0, 0).eval(0.3).powi(2)).abs() < 1e-15);

    let two = FrameExpansion::from_coefficients([(el(0, 0), 1.0), (el(2, 0), -0.5)]);
    assert_eq!(square_expand(&two).cross_terms(), 0);
}

#[test]
fn dense_cross_terms_count_children() {
    let mut e = FrameExpansion::new(0, 3);
    e.add(el(0, 0), 1.0);
    for j in 1..=3 {
        for k in -2..(1 << j) + 2 {
            e.add(el(k, j), 0.1);
        }
    }
    let sq = square_expand(&e);
    for jf in 1..=3 {
        let c = sq.cross_counts.iter().find(|c| c.k == 0 && c.j == 0 && c.j_fine == jf).unwrap();
        assert_eq!(c.in_children, 1 << jf);
    }
}

fn random_expansion(rng: &mut ChaCha8Rng) -> FrameExpansion {
    let mut e = FrameExpansion::new(-1, 3);
    let n = rng.gen_range(5..=12);
    for _ in 0..n {
        let j = rng.gen_range(-1..=3);
        let span = 1i64 << (j + 1).max(0);
        let k = rng.gen_range(-span..=span);
        e.add(el(k, j), rng.gen_range(-2.0..2.0));
    }
    e
}

#[test]
fn square_expansion_equals_direct_squaring() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let xs = grid(-5.0, 5.0, 10_000);
    for _ in 0..50 {
        let e = random_expansion(&mut rng);
        let sq = square_expand(&e);
        for &x in &xs {
            let direct = e.eval(x).powi(2);
            assert!((sq.eval(x) - direct).abs() < 1e-10, "x={x} {} vs {direct}", sq.eval(x));
        }
    }
}

#[test]
fn kak_refinement_preserves_the_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let e = random_expansion(&mut rng);
        let r = e.refine_kak_levels();
        assert!(r.j_min >= 0);
        for x in grid(-5.0, 5.0, 2000) {
            assert!((e.eval(x) - r.eval(x)).abs() < 1e-13);
        }
    }
}

#[test]
fn riesz_bounds_detect_redundancy() {
    let level: Vec<FrameElement> = (-3..=3).map(|k| el(k, 1)).collect();
    let b = riesz_bounds(&level, 1e-3);
    assert!(b.lower > 0.1 && b.upper < 2.0, "{b:?}");
    let redundant = [el(0, -1), el(0, 0), el(1, 0)];
    assert!(riesz_bounds(&redundant, 1e-3).lower < 1e-10);
}

#[test]
fn csv_has_header_and_values() {
    let e = FrameExpansion::from_coefficients([(el(0, 0), 2.0)]);
    let csv = reconstruction_csv(&e, &[0.5, 2.0]);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "x,u");
    let v: Vec<f64> = rows[1].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(v, vec![0.5, 2.0]);
}

proptest! {
    #[test]
    fn elements_are_bounded_and_vanish_off_support(k in -20i64..20, j in -4i32..6, t in -0.5f64..1.5) {
        let e = el(k, j);
        let (lo, hi) = e.support();
        let x = lo + t * (hi - lo);
        let v = e.eval(x);
        prop_assert!((0.0..=1.0).contains(&v));
        if x <= lo || x >= hi {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn dilation_covariance(k in -8i64..8, j in 1i32..5, t in 0.0f64..1.0) {
        // Compressed compactons are dilates of the scale-1 element.
        let e = el(k, j);
        let (lo, hi) = e.support();
        let x = lo + t * (hi - lo);
        let base = el(k, 1);
        let factor = (-(j - 1) as f64).exp2();
        prop_assert!((e.eval(x) - base.eval(x / factor)).abs() < 1e-12);
    }
}
