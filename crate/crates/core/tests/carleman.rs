use kdvb_core::carleman::*;
use kdvb_core::numerics::Grid1D;
use kdvb_core::Error;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn weight_partials_at_the_centre() {
    let w = CarlemanWeight::new(1.0f64, 2.0, 1.0).unwrap();
    let p = weight_eval(&w, 0.0, 1.0).unwrap();
    assert_eq!((p.psi, p.psi_x, p.psi_xx, p.psi_xxx, p.psi_t), (0.0, -5.0, -2.0, 0.0, 0.0));
    assert!(matches!(weight_eval(&w, 0.3, 0.0), Err(Error::Precondition(_))));
    assert!(weight_eval(&w, 0.3, 2.0).is_err());
    assert!(CarlemanWeight::new(1.0f64, 0.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn weight_time_symmetry(x in -1.0f64..1.0, t in 0.01f64..0.99) {
        let w = CarlemanWeight::new(1.0f64, 2.0, 1.0).unwrap();
        let (a, b) = (weight_eval(&w, x, t).unwrap(), weight_eval(&w, x, 2.0 - t).unwrap());
        prop_assert!(close(a.psi, b.psi, 1e-12));
        prop_assert!(close(a.psi_t, -b.psi_t, 1e-12));
        prop_assert_eq!(a.psi_xxx, 0.0);
        prop_assert!(a.psi_xx < 0.0);
    }

    #[test]
    fn f_is_three_c_x(s in 0.1f64..100.0, x in -1.0f64..1.0, t in 0.05f64..1.95) {
        let ex = Expansion::new(1.0, 2.0, ExpansionVariant::Derived, 0.1);
        let f = ex.eval(&ex.f, s, x, t);
        let cx = ex.eval(&ex.c.dx(), s, x, t);
        prop_assert!(close(f, 3.0 * cx, 1e-13));
        prop_assert!(f > 0.0);
    }
}

#[test]
fn a_b_c_at_the_centre() {
    let w = CarlemanWeight::new(1.0f64, 2.0, 1.0).unwrap();
    let (a, b, c) = coefficients_abc(&w, 0.0, 1.0).unwrap();
    assert!(close(a, 72.0, 1e-13), "{a}");
    assert!(close(b, -59.0, 1e-13));
    assert!(close(c, 14.0, 1e-13));
    let printed = w.with_variant(ExpansionVariant::Printed);
    let (a, b, c) = coefficients_abc(&printed, 0.0, 1.0).unwrap();
    assert!(close(a, 42.0, 1e-13), "{a}");
    assert!(close(b, -59.0, 1e-13) && close(c, 14.0, 1e-13));
    assert!(coefficients_abc(&w, 0.0, 0.0).is_err());
}

#[test]
fn f_at_the_centre() {
    let ex = Expansion::new(1.0, 2.0, ExpansionVariant::Derived, 0.1);
    for x in [-1.0, 0.0, 0.5] {
        assert!(close(ex.eval(&ex.f, 1.0, x, 1.0), 18.0, 1e-13));
    }
}

#[test]
fn leading_coefficients_have_the_right_sign() {
    for (l, horizon) in [(1.0, 2.0), (2.0, 1.0)] {
        let ex = Expansion::new(l, horizon, ExpansionVariant::Derived, 0.1);
        let w = CarlemanWeight::new(l, horizon, 1.0).unwrap();
        let (d5, e3) = (ex.d.s_part(5), ex.e.s_part(3));
        assert_eq!(ex.d.s_degree(), Some(5));
        for i in 0..=20 {
            let x = -l + 2.0 * l * i as f64 / 20.0;
            for t in [0.1 * horizon, 0.5 * horizon, 0.9 * horizon] {
                let theta = t * (horizon - t);
                let phi_x = w.phi_x(x);
                let d_lead = -15.0 * phi_x.powi(4) * -2.0 / theta.powi(5);
                let e_lead = -9.0 * phi_x.powi(2) * -2.0 / theta.powi(3);
                assert!(close(d5.eval(1.0, x, t, horizon), d_lead, 1e-12));
                assert!(close(e3.eval(1.0, x, t, horizon), e_lead, 1e-12));
                assert!(d_lead > 0.0 && e_lead > 0.0);
            }
        }
        // φ' vanishes left of the domain
        assert!(-w.beta() / 2.0 < -l);
    }
}

#[test]
fn closed_forms_match_finite_differences() {
    for (l, horizon) in [(1.0, 2.0), (2.0, 1.0)] {
        for variant in [ExpansionVariant::Derived, ExpansionVariant::Printed] {
            let ex = Expansion::new(l, horizon, variant, 0.1);
            let chk = fd_cross_check(&ex, 1.0, l);
            assert!(chk.max_rel_err <= 1e-6, "{chk:?}");
            assert!(!chk.per_term.is_empty());
        }
    }
}

#[test]
fn def_positive_for_large_s() {
    let w = CarlemanWeight::new(1.0f64, 2.0, 50.0).unwrap();
    let (xs, ts) = MarginGrid::default().grids(1.0, 2.0).unwrap();
    let field = coefficients_def(&w, &xs, &ts, 0.1).unwrap();
    let (d, e, f) = field.min_def();
    assert!(d > 0.0 && e > 0.0 && f > 0.0, "{d} {e} {f}");
    assert!(field.fd_check.max_rel_err <= 1e-6);
    assert!(coefficients_def(&w, &xs, &ts, 0.0).is_err());
    let bad_t = Grid1D::new(0.0, 2.0, 11).unwrap();
    assert!(coefficients_def(&w, &xs, &bad_t, 0.1).is_err());
}

#[test]
fn threshold_exists_and_shrinks_with_the_margin() {
    for (l, horizon) in [(1.0, 2.0), (2.0, 1.0)] {
        let mut last = f64::INFINITY;
        for margin in [0.025, 0.05, 0.1] {
            let grid = MarginGrid { margin, ..MarginGrid::default() };
            let scan = positivity_scan(l, horizon, ExpansionVariant::Derived, 0.1, &default_ladder(), grid).unwrap();
            assert!(scan.s0.is_finite());
            assert!(scan.s0 <= last, "margin {margin}: {} after {last}", scan.s0);
            assert!(scan.rungs.iter().all(|r| r.min_f > 0.0));
            let top = scan.rungs.last().unwrap();
            assert!(top.min_d > 0.0 && top.min_e > 0.0);
            last = scan.s0;
        }
    }
}

#[test]
fn exhausted_ladder_reports_margins() {
    let err = positivity_scan(1.0, 2.0, ExpansionVariant::Derived, 0.1, &[1e-6], MarginGrid::default()).unwrap_err();
    assert!(matches!(&err, Error::Numerical(m) if m.contains("min D")));
    assert!(positivity_scan(1.0, 2.0, ExpansionVariant::Derived, 0.1, &[2.0, 1.0], MarginGrid::default()).is_err());
}

#[test]
fn admissible_tests_vanish_at_the_ends() {
    let q = AdmissibleTest::<f64>::random(1.0, 2.0, 4, 3).unwrap();
    assert!(q.boundary_defect(2.0, 65) <= 1e-12);
    assert!(AdmissibleTest::<f64>::new(1.0, 2, Vec::new()).is_err());
    let s = AdmissibleTest::<f64>::sin_cubed(1.0, 2.0).unwrap();
    let v = s.eval(0.0, 1.0);
    assert!(close(v.q, 1.0, 1e-14));
}

#[test]
fn zero_test_function_gives_the_sentinel() {
    let w = CarlemanWeight::new(1.0f64, 2.0, 1.0).unwrap();
    let rep = verify_inequality(&w, &AdmissibleTest::zero(1.0).unwrap(), &CarlemanQuadrature::default()).unwrap();
    assert_eq!((rep.lhs, rep.rhs_raw), (0.0, 0.0));
    assert!(rep.ratio.is_nan());
}

#[test]
fn mismatched_interval_is_rejected() {
    let w = CarlemanWeight::new(1.0f64, 2.0, 1.0).unwrap();
    let q = AdmissibleTest::<f64>::sin_cubed(2.0, 2.0).unwrap();
    assert!(verify_inequality(&w, &q, &CarlemanQuadrature::default()).is_err());
}

#[test]
fn sin_cubed_ratio_is_finite() {
    let s0 = positivity_scan(1.0, 2.0, ExpansionVariant::Derived, 0.1, &default_ladder(), MarginGrid::default())
        .unwrap()
        .s0;
    let w = CarlemanWeight::new(1.0f64, 2.0, 2.0 * s0).unwrap();
    let q = AdmissibleTest::sin_cubed(1.0, 2.0).unwrap();
    let rep = verify_inequality(&w, &q, &CarlemanQuadrature::default()).unwrap();
    assert!(rep.ratio.is_finite() && rep.ratio > 0.0, "{rep:?}");
    let fine = verify_inequality(&w, &q, &CarlemanQuadrature::default().refined()).unwrap();
    assert!(close(rep.ratio, fine.ratio, 1e-8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ratio_is_scale_invariant(seed in 0u64..1000, a in 0.01f64..100.0) {
        let w = CarlemanWeight::new(1.0f64, 2.0, 1.7).unwrap();
        let q = AdmissibleTest::<f64>::random(1.0, 2.0, 3, seed).unwrap();
        let quad = CarlemanQuadrature { grading_levels: 20, ..CarlemanQuadrature::default() };
        let r0 = verify_inequality(&w, &q, &quad).unwrap().ratio;
        let r1 = verify_inequality(&w, &q.scaled(a), &quad).unwrap().ratio;
        prop_assert!(close(r0, r1, 1e-10));
    }
}

#[test]
fn sampled_ratios_are_stable_under_refinement() {
    let s0 = positivity_scan(2.0, 1.0, ExpansionVariant::Derived, 0.1, &default_ladder(), MarginGrid::default())
        .unwrap()
        .s0;
    let w = CarlemanWeight::new(2.0f64, 1.0, 2.0 * s0).unwrap();
    let quad = CarlemanQuadrature::default();
    let (mut coarse, mut fine) = (0.0f64, 0.0f64);
    for seed in 0..10 {
        let q = AdmissibleTest::random(2.0, 1.0, 4, seed).unwrap();
        coarse = coarse.max(verify_inequality(&w, &q, &quad).unwrap().ratio);
        fine = fine.max(verify_inequality(&w, &q, &quad.refined()).unwrap().ratio);
    }
    assert!((coarse - fine).abs() <= 0.1 * fine, "{coarse} vs {fine}");
}
