use std::f64::consts::PI;

use compacton::closed_forms::{compose_compound, junction_jumps, residual, Grid, TravelingWave, WaveError, WaveFamily};
use compacton::dsl::{expand_alias, parse_equation, EquationAst};
use compacton::similarity::Bindings;
use proptest::prelude::*;

fn equation(w: &TravelingWave) -> EquationAst {
    parse_equation(&expand_alias(&w.equation_alias()).unwrap()).unwrap()
}

fn interior(w: &TravelingWave, x0: f64, x1: f64, dx: f64, t: f64) -> f64 {
    residual(w, &equation(w), &Bindings::new(), &Grid { x0, x1, dx, t }).unwrap().interior_max_abs
}

fn k22_trio() -> Vec<TravelingWave> {
    vec![
        TravelingWave::k22_compacton(0.75).unwrap(),
        TravelingWave::k22_kak(0.75, 6.0).unwrap(),
        TravelingWave::k22_offset(1.0, 0.4).unwrap(),
    ]
}

#[test]
fn wrong_speed_residual_matches_hand_derivation() {
    // u = A cos²(ξ/4) in u_t + (u²)_x + (u²)_xxx gives sin(ξ/2)(VA/4 - 3A²/16).
    let a = 1.2;
    for v in [0.5, 1.1, 1.3] {
        let w = TravelingWave { velocity: v, ..TravelingWave::k22_compacton(0.75 * a).unwrap() };
        let exact = (v * a / 4.0 - 3.0 * a * a / 16.0).abs();
        let fd = interior(&w, -7.0, 7.0, 0.01, 0.0);
        assert!((fd - exact).abs() < 1e-3 * exact, "v={v} fd={fd} exact={exact}");
    }
}

#[test]
fn k22_family_residuals_at_fine_grid() {
    for w in k22_trio() {
        let r = interior(&w, -9.0, 15.0, 1e-3, 0.2);
        assert!(r < 1e-6, "{} residual {r}", w.family);
    }
}

#[test]
fn k22_family_converges_at_fourth_order() {
    for w in k22_trio() {
        let rs: Vec<f64> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&dx| interior(&w, -9.0, 15.0, dx, 0.0)).collect();
        for p in rs.windows(2) {
            let ratio = p[0] / p[1];
            assert!((12.0..20.0).contains(&ratio), "{}: {rs:?}", w.family);
        }
    }
}

#[test]
fn wrong_velocity_controls_fail() {
    let mut all = k22_trio();
    all.extend([
        TravelingWave::kdv_sech2(1.0).unwrap(),
        TravelingWave::mkdv_sech(1.0).unwrap(),
        TravelingWave::mkdv_exotic(0.5).unwrap(),
        TravelingWave::knn(3, 1.0).unwrap(),
    ]);
    for w in all {
        let bad = TravelingWave { velocity: w.velocity * 1.2 + 0.1, ..w.clone() };
        let r = interior(&bad, -9.0, 15.0, 0.01, 0.0);
        assert!(r > 1e-2, "{} control residual {r}", w.family);
    }
}

#[test]
fn solitons_and_other_compactons_solve_their_equations() {
    let waves = [
        TravelingWave::kdv_sech2(1.0).unwrap(),
        TravelingWave::kdv_sech2(0.3).unwrap(),
        TravelingWave::mkdv_sech(1.5).unwrap(),
        TravelingWave::mkdv_exotic(0.5).unwrap(),
        TravelingWave::knn(3, 1.0).unwrap(),
    ];
    for w in waves {
        let coarse = interior(&w, -12.0, 12.0, 0.005, 0.5);
        let fine = interior(&w, -12.0, 12.0, 0.0025, 0.5);
        assert!(fine < 1e-6, "{} residual {fine}", w.family);
        assert!(coarse / fine > 12.0, "{} ratio {}", w.family, coarse / fine);
    }
}

#[test]
fn knn_quartic_solves_away_from_its_edges() {
    // For n ≥ 4 derivatives blow up at the support edge; check the core.
    let w = TravelingWave::knn(4, 1.0).unwrap();
    let half = PI / 2.0 * w.width();
    let r = interior(&w, -half / 2.0, half / 2.0, 0.005, 0.0);
    assert!(r < 1e-7, "{r}");
    assert!((w.width() - 8.0 / 3.0).abs() < 1e-15);
}

#[test]
fn compound_solves_inside_its_window_only() {
    let w = TravelingWave::k22_compound(0.75, 30.0, 0.8, 1.0).unwrap();
    let end = w.validity_window().unwrap();
    let r = interior(&w, -9.0, 40.0, 0.005, 0.5 * end);
    assert!(r < 1e-7, "{r}");
    assert!(w.eval_checked(10.0, 0.5 * end).is_ok());
    assert!(matches!(w.eval_checked(10.0, 1.01 * end), Err(WaveError::OutsideWindow { .. })));
    assert!(matches!(w.eval_checked(10.0, 0.0), Err(WaveError::OutsideWindow { .. })));
}

#[test]
fn compose_compound_checks_smoothness_of_the_square() {
    let kak = TravelingWave::k22_kak(0.6, 25.0).unwrap();
    let top = TravelingWave::k22_offset(0.5, kak.amplitude).unwrap();
    let w = compose_compound(&kak, &top, 3.0).unwrap();
    for j in junction_jumps(&w, 0.0, 2, 1e-3) {
        assert!(j.jumps[0].abs() < 1e-9 && j.jumps[1].abs() < 1e-6, "{j:?}");
    }
    assert_eq!(w.family, WaveFamily::K22CompOnKak);
    assert!((w.secondary_velocity - (0.375 + 1.2)).abs() < 1e-15);
}

#[test]
fn bare_compacton_square_is_c3_at_the_edges() {
    let w = TravelingWave::k22_compacton(2.0).unwrap();
    let jumps = junction_jumps(&w, 0.0, 2, 1e-3);
    assert_eq!(jumps.len(), 2);
    for j in jumps {
        assert!(j.jumps.iter().all(|d| d.abs() < 1e-4), "{j:?}");
    }
}

proptest! {
    #[test]
    fn translation_covariance(v in 0.1f64..3.0, x in -20.0f64..20.0, s in -5.0f64..5.0) {
        for w in [TravelingWave::k22_compacton(v).unwrap(), TravelingWave::knn(3, v).unwrap(), TravelingWave::kdv_sech2(v).unwrap()] {
            let a = w.eval(x + w.velocity * s, s);
            let b = w.eval(x, 0.0);
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn compacton_support_does_not_depend_on_amplitude(v in 0.01f64..10.0, x in -20.0f64..20.0) {
        let w = TravelingWave::k22_compacton(v).unwrap();
        let (lo, hi) = w.support(0.0).unwrap();
        prop_assert!((hi - lo - 4.0 * PI).abs() < 1e-12);
        if x < lo || x > hi {
            prop_assert_eq!(w.eval(x, 0.0), 0.0);
        } else {
            prop_assert!(w.eval(x, 0.0) >= 0.0 && w.eval(x, 0.0) <= w.amplitude * (1.0 + 1e-15));
        }
    }

    #[test]
    fn exotic_lobe_has_fixed_width_amplitude_product(k in 0.05f64..5.0) {
        let w = TravelingWave::mkdv_exotic(k).unwrap();
        let (wide, narrow) = w.exotic_half_widths();
        prop_assert!((wide * w.amplitude - 5.0 * PI * 32f64.sqrt() / 6.0).abs() < 1e-9);
        prop_assert!((wide / narrow - 5.0).abs() < 1e-12);
        prop_assert!((w.velocity - 4.0 * k * k).abs() < 1e-12 * (1.0 + w.velocity));
    }

    #[test]
    fn offset_law_and_json_round_trip(a in -2.0f64..2.0, d in -2.0f64..2.0) {
        let w = TravelingWave::k22_offset(a, d).unwrap();
        prop_assert!((w.velocity - 0.75 * (2.0 * d + a)).abs() < 1e-14);
        let back: TravelingWave = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        prop_assert_eq!(back, w);
    }
}
