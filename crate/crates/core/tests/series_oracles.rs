mod common;

use common::*;
use num_complex::Complex64 as C;
use qhorn::series::*;
use qhorn::QContext;

fn c(v: f64) -> C {
    C::new(v, 0.0)
}

#[test]
fn h6_matches_brute_force_example() {
    let ctx = QContext::real(0.5).unwrap();
    let p = HornPoint::real(0.5, 0.25, 0.0, 0.1, 0.1).unwrap();
    let got = eval_h6(&p, &ctx, &EvalPolicy::default()).unwrap().value;
    let want = naive_sum(false, c(0.5), c(0.25), c(0.0), c(0.5), c(0.1), c(0.1), 60);
    assert!(rel(got, want) < 1e-12, "{got} vs {want}");
}

#[test]
fn h7_matches_brute_force_example() {
    let ctx = QContext::real(0.5).unwrap();
    let p = HornPoint::real(0.3, 0.2, 0.4, 0.1, 0.1).unwrap();
    let got = eval_h7(&p, &ctx, &EvalPolicy::default()).unwrap().value;
    let want = naive_sum(true, c(0.3), c(0.2), c(0.4), c(0.5), c(0.1), c(0.1), 60);
    assert!(rel(got, want) < 1e-12, "{got} vs {want}");
}

#[test]
fn single_terms_match_naive_products() {
    let mut g = rng(3);
    for _ in 0..50 {
        let q = polar(&mut g, 0.2, 0.8);
        let ctx = QContext::with_q(q).unwrap();
        let (a, b, gm) = (polar(&mut g, 0.1, 0.9), polar(&mut g, 0.1, 0.9), polar(&mut g, 0.1, 0.9));
        let (x, y) = (disk(&mut g, 0.3), disk(&mut g, 0.3));
        let p = HornPoint::new(a, b, gm, x, y).unwrap();
        for (r, s) in [(0, 0), (1, 0), (0, 1), (3, 2), (5, 7)] {
            assert!(rel(term_h6(&p, &ctx, r, s).unwrap(), naive_term(false, a, b, gm, q, x, y, r, s)) < 1e-12);
            assert!(rel(term_h7(&p, &ctx, r, s).unwrap(), naive_term(true, a, b, gm, q, x, y, r, s)) < 1e-12);
        }
    }
}

#[test]
fn exp_form_delegation_example() {
    let ctx = QContext::real(0.5).unwrap();
    let e = ExpHornPoint::new(c(1.0), c(2.0), c(0.0), c(0.1), c(0.1));
    let a = eval_h6_exp(&e, &ctx, &EvalPolicy::default()).unwrap();
    let b = eval_h6(&HornPoint::real(0.5, 0.25, 1.0, 0.1, 0.1).unwrap(), &ctx, &EvalPolicy::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn alpha_bracket_at_terminating_point() {
    // [2r+s+a] HH6(q^a) = [a] HH6(q^(a+1)); at q^a = q^-3 both sides are finite sums.
    let q = 0.5;
    let ctx = QContext::real(q).unwrap();
    let (a, b) = (c(8.0), c(0.3));
    let (x, y) = (c(0.2), c(-0.15));
    let p = HornPoint::new(a, b, c(0.0), x, y).unwrap();
    let sc = Scalars::new(&p, ctx.q(), c(0.0));
    let ts = TransformedSeries::h6().times(&[BracketArg::linear(2, 1, 0, ParamPower::Alpha)]);
    let got = eval_transformed(&ts, &sc, &ctx, &EvalPolicy::default()).unwrap().value;
    let qa = a;
    let want = (c(1.0) - qa) / (1.0 - q) * naive_finite_sum(false, qa * q, b, c(0.0), c(q), x, y, 2);
    assert!(rel(got, want) < 1e-13, "{got} vs {want}");
}

#[test]
fn classical_limit_sequences() {
    let pol = EvalPolicy::default();
    let qs = [0.9, 0.99, 0.999, 0.9999];
    let h6 = ExpHornPoint::new(c(1.0), c(2.0), c(0.0), c(0.1), c(0.2));
    let h7 = ExpHornPoint::new(c(1.0), c(2.0), c(1.5), c(0.1), c(0.2));
    for (kind, pt) in [(SeriesKind::H6, h6), (SeriesKind::H7, h7)] {
        let errs = classical_limit_check(kind, &pt, &qs, &pol).unwrap();
        println!("{kind}: {errs:?}");
        for w in errs.windows(2) {
            assert!(w[1].error < w[0].error);
        }
        assert!(errs.last().unwrap().error < 1e-3);
    }
}
