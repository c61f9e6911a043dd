//! Amplitude–width–velocity relations from the scaling substitution
//! `u → A`, `∂x → 1/L`, `∂t → V/L`.

mod classify;
mod coeff;
mod compat;
mod relation;
mod solve;
mod sweep;

use std::collections::BTreeMap;

use thiserror::Error;

pub use classify::{
    classify, constant_width_law, first_fold, Bifurcation, Classification, ConstantWidthLaw, PowerLaw,
    QualitativeReport,
};
pub use coeff::Coeff;
pub use compat::{compat_text, paper_compat, CompatRow, Verdict};
pub use relation::{build_relation, scale_term, Branch, NormalMonomial, ScalingMonomial, SimilarityRelation};
pub use solve::{scan_roots, solve_width, SolveMethod, WidthSolution};
pub use sweep::{sweep, Crossing, CurveRow, CurveTable, Divergence, VelocitySpec};

/// Numeric values for named parameters.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimilarityError {
    #[error("parameter '{0}' has no numeric value")]
    UnboundParameter(String),
    #[error("amplitude must be positive and finite, got {0}")]
    NonPositiveAmplitude(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("branch has {got} signs, relation has {expected} monomials")]
    BranchLength { expected: usize, got: usize },
    #[error("branch '{0}' must consist of '+' and '-'")]
    BadBranch(String),
    #[error("unsupported term: {0}")]
    UnsupportedTerm(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{expand_alias, parse_equation};

    fn rel(alias: &str) -> SimilarityRelation {
        build_relation(&parse_equation(&expand_alias(alias).unwrap()).unwrap()).unwrap()
    }

    fn term_monomial(src: &str, index: usize) -> ScalingMonomial {
        let ast = parse_equation(src).unwrap();
        scale_term(&ast.terms[index]).unwrap()
    }

    #[test]
    fn outer_derivatives_of_a_square_carry_a_power_of_two() {
        let m = term_monomial("u_t + (u^2)_xxx = 0", 1);
        assert_eq!(m.coefficient, Coeff::int(8));
        assert_eq!((m.a_power, m.v_power, m.inv_l_power), (2, 0, 3));
    }

    #[test]
    fn time_derivative_maps_to_velocity() {
        let m = term_monomial("u_t = 0", 0);
        assert_eq!((m.a_power, m.v_power, m.inv_l_power), (1, 1, 1));
        let m = term_monomial("u_t + 6*u*u_x = 0", 1);
        assert_eq!(m.coefficient, Coeff::int(6));
        assert_eq!((m.a_power, m.inv_l_power), (2, 1));
    }

    #[test]
    fn sine_maps_without_width() {
        let m = term_monomial("u_xt - sin(u) = 0", 1);
        assert_eq!(m.trans, Some(crate::dsl::Transcendental::Sin));
        assert_eq!((m.a_power, m.inv_l_power), (0, 0));
    }

    #[test]
    fn normalized_relations() {
        assert_eq!(rel("KdV").text(), "±V*L^2 ± 6*A*L^2 ± 1 = 0");
        assert_eq!(rel("K22").text(), "±V*L^2 ± 2*A*L^2 ± 8*A = 0");
        assert_eq!(rel("NLS:3").text(), "±A^2*L^2 ± V*L ± 1 = 0");
        assert_eq!(rel("SG").text(), "±sin(A)*L^2 ± V*A = 0");
        assert_eq!(rel("K212").text(), "±V*L^2 ± 2*A*L^2 ± 1 ± 8*eps*A = 0");
        assert_eq!(rel("CurvKdV").text(), "±V*L^4 ± A*L^4 ± L^2 ± 2*eps*A = 0");
    }

    #[test]
    fn width_formulas() {
        assert_eq!(rel("KdV").width_formula().unwrap(), "L = 1/sqrt(|±V ± 6*A|)");
        assert_eq!(rel("K22").width_formula().unwrap(), "L = sqrt(8*A/|±V ± 2*A|)");
        assert_eq!(rel("NLS:3").width_formula().unwrap(), "L = (±V ± sqrt(|V^2 - 4*A^2|))/(2*A^2)");
        assert_eq!(rel("SG").width_formula().unwrap(), "±V*A/L^2 = sin(A)");
        assert_eq!(rel("NLS:4").width_formula().unwrap(), "L = (±V ± sqrt(|V^2 - 4*A^3|))/(2*A^3)");
    }

    #[test]
    fn degenerate_equation() {
        let r = rel("u_t = 0");
        assert_eq!(r.raw_text(), "±V*A/L = 0");
        assert_eq!(r.text(), "±V = 0");
        let s = solve_width(&r, &Bindings::new(), 1.0, 0.0, &Branch::natural(1)).unwrap();
        assert_eq!(s.method, SolveMethod::Unconstrained);
        let s = solve_width(&r, &Bindings::new(), 1.0, 2.0, &Branch::natural(1)).unwrap();
        assert_eq!(s.method, SolveMethod::Inconsistent);
        assert!(s.roots.is_empty());
    }

    #[test]
    fn kdv_width_at_unit_amplitude() {
        let r = rel("KdV");
        let s = solve_width(&r, &Bindings::new(), 1.0, 2.0, &"++-".parse().unwrap()).unwrap();
        assert_eq!(s.roots.len(), 1);
        assert!((s.roots[0].value - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        let scan = scan_roots(|l| 2.0 * l * l + 6.0 * l * l - 1.0, 1e-3, 1e3, 20_000);
        assert!((scan[0] - s.roots[0].value).abs() < 1e-12);
    }

    #[test]
    fn k22_compacton_width_four() {
        let r = rel("K22");
        let s = solve_width(&r, &Bindings::new(), 1.0, -1.5, &"++-".parse().unwrap()).unwrap();
        assert!((s.roots[0].value - 4.0).abs() < 1e-14);
    }

    #[test]
    fn nls_double_root() {
        let r = rel("NLS:3");
        let s = solve_width(&r, &Bindings::new(), 1.0, 2.0, &"+-+".parse().unwrap()).unwrap();
        assert_eq!(s.roots.len(), 1);
        assert_eq!(s.roots[0].multiplicity, 2);
        assert!((s.roots[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbound_parameter_is_an_error() {
        let r = rel("K212");
        let err = solve_width(&r, &Bindings::new(), 1.0, 1.0, &Branch::natural(4)).unwrap_err();
        assert_eq!(err, SimilarityError::UnboundParameter("eps".into()));
    }

    #[test]
    fn bad_branches_are_rejected() {
        let r = rel("KdV");
        assert!(matches!(
            solve_width(&r, &Bindings::new(), 1.0, 1.0, &Branch::natural(2)),
            Err(SimilarityError::BranchLength { expected: 3, got: 2 })
        ));
        assert!("+x-".parse::<Branch>().is_err());
        assert!(solve_width(&r, &Bindings::new(), -1.0, 1.0, &Branch::natural(3)).is_err());
    }

    #[test]
    fn k22_has_linear_velocity_law() {
        let c = classify(&rel("K22"), &Bindings::new(), 4.0).unwrap();
        let b = c.branches.iter().find(|b| b.branch.to_string() == "++-").unwrap();
        let law = b.constant_width_law.as_ref().unwrap();
        assert_eq!(law.p, 1);
        assert_eq!(law.alpha, "-2 + 8/L^2");
        assert_eq!(law.beta, "0");
        let v = b.velocity_law.unwrap();
        assert_eq!(v.p, 1);
        assert!((v.alpha + 1.5).abs() < 1e-15);
    }

    #[test]
    fn k212_rest_amplitude_satisfies_relation() {
        let r = rel("K212");
        let bindings = Bindings::from([("eps".to_string(), 0.1)]);
        let c = classify(&r, &bindings, 0.707).unwrap();
        let mut found = 0;
        for b in &c.branches {
            if let Some(a) = b.rest_amplitude {
                let (res, mag) = r.residual(&bindings, &b.branch, a, 0.0, 0.707).unwrap();
                assert!(res.abs() < 1e-12 * mag, "{} {a}", b.branch);
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn nls4_fold_at_quarter_amplitude() {
        let r = rel("NLS:4");
        let f = first_fold(&r, &Bindings::new(), &"+-+".parse().unwrap(), 1.0).unwrap().unwrap();
        assert!((f.critical_amplitude - 0.25).abs() < 1e-9, "{f:?}");
        assert_eq!((f.roots_below, f.roots_above), (2, 0));
        // The merged width is a double root: value and slope vanish.
        let a = f.critical_amplitude;
        let p = r.width_poly(&Bindings::new(), &"+-+".parse().unwrap(), a, a).unwrap();
        assert!(p.eval(f.width).abs() < 1e-5 * p.magnitude(f.width));
        assert!(p.derivative().eval(f.width).abs() < 1e-4 * p.derivative().magnitude(f.width));
    }

    #[test]
    fn nls3_has_no_fold() {
        let c = classify(&rel("NLS:3"), &Bindings::new(), 0.707).unwrap();
        assert!(c.branches.iter().all(|b| b.bifurcation.is_none()));
    }

    #[test]
    fn curvature_kdv_fold() {
        let eps = 0.04;
        let bindings = Bindings::from([("eps".to_string(), eps)]);
        let c = classify(&rel("CurvKdV"), &bindings, 0.707).unwrap();
        let expected = 1.0 / (4.0 * eps.sqrt());
        assert!(c
            .branches
            .iter()
            .filter_map(|b| b.bifurcation.as_ref())
            .any(|f| (f.critical_amplitude - expected).abs() < 1e-9 * expected));
    }

    #[test]
    fn sweep_csv_layout() {
        let r = rel("K22");
        let t = sweep(
            &r,
            &Bindings::new(),
            &[0.5],
            &VelocitySpec::Range { min: 0.0, max: 2.0, samples: 3 },
            &["+--".parse().unwrap()],
            crate::exec::Execution::Sequential,
        )
        .unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "A,V,branch,L1");
        assert!(lines[1].ends_with(",+--,none"), "{}", lines[1]);
        // V = 2, A = 1/2: L^2 = 8A/(V - 2A) = 4.
        assert!(lines[3].ends_with(",+--,2.0000000000000000e0"), "{}", lines[3]);
    }

    #[test]
    fn k22_wide_and_narrow_branch_structure() {
        let r = rel("K22");
        let wide: Branch = "++-".parse().unwrap();
        let narrow: Branch = "+--".parse().unwrap();
        let t = sweep(
            &r,
            &Bindings::new(),
            &[0.1, 0.4],
            &VelocitySpec::Range { min: 0.0, max: 10.0, samples: 1001 },
            &[wide.clone(), narrow.clone()],
            crate::exec::Execution::Parallel,
        )
        .unwrap();
        let crossings = t.crossings(0.707);
        for a in [0.1, 0.4] {
            // 8A/(V + 2A) = L0^2
            let v = 8.0 * a / (0.707f64 * 0.707) - 2.0 * a;
            let c = crossings.iter().find(|c| c.a == a && c.branch == wide).unwrap();
            assert!((c.v - v).abs() < 0.01, "{} vs {v}", c.v);
        }
        let d = t.divergences();
        for a in [0.1, 0.4] {
            let div = d.iter().find(|x| x.a == a && x.branch == narrow).unwrap();
            assert!(div.v_lo <= 2.0 * a && 2.0 * a <= div.v_hi + 1e-12);
        }
    }

    #[test]
    fn paper_rows() {
        let rows = paper_compat().unwrap();
        let verdict = |f: &str| rows.iter().find(|r| r.family == f).unwrap().verdict;
        for f in ["KdV", "K(2,2)", "NLS(n=3)", "MKdV (6u^2 u_x form)", "curvature KdV"] {
            assert_eq!(verdict(f), Verdict::Consistent, "{f}");
        }
        for f in ["K(n,n), n=2", "K(n,n), n=3", "K(2,3)", "K(3,2)", "NLS(n=4)", "MKdV", "K(2,1,2)"] {
            assert_eq!(verdict(f), Verdict::Discrepant, "{f}");
        }
        let knn2 = rows.iter().find(|r| r.family == "K(n,n), n=2").unwrap();
        let k22 = rows.iter().find(|r| r.family == "K(2,2)").unwrap();
        assert_eq!(knn2.engine_relation, k22.engine_relation);
        assert_eq!(knn2.engine_width, k22.engine_width);
    }
}
