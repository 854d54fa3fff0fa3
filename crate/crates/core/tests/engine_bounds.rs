//! Measured errors against the first-order, derivative and second-order bounds.

use baskakov_core::analytic::{make_exponential, make_polynomial, parse_function};
use baskakov_core::engine::{theoretical_c1, BoundConstants};
use baskakov_core::ratpoly::ratio;
use baskakov_core::{AnalyticFunction, ApproxEngine, Error};
use num_complex::Complex64;

const SLACK: f64 = 1e-6;

fn n_grid(r: f64) -> Vec<u64> {
    let start = (r + 3.0).ceil() as u64;
    let mut out: Vec<u64> = (start..=24).collect();
    out.extend([32, 48, 64, 96, 128, 192, 256]);
    out
}

fn functions() -> Vec<AnalyticFunction> {
    let quarter = ratio(1, 4);
    vec![
        make_exponential(ratio(1, 4)).unwrap(),
        make_exponential(ratio(1, 2)).unwrap(),
        parse_function("poly:0,0,1", &quarter).unwrap(),
        parse_function("poly:0,0,0,1", &quarter).unwrap(),
    ]
}

#[test]
fn first_order_bound_holds() {
    let engine = ApproxEngine::default();
    for f in functions() {
        for r in [1.0, 1.5] {
            if f.envelope().a() * r >= 1.0 {
                continue;
            }
            let c1 = BoundConstants::new(f.envelope(), r).unwrap().c1;
            for n in n_grid(r) {
                let err = engine.approx_error(&f, n, r).unwrap().value();
                assert!(
                    n as f64 * err <= c1 * (1.0 + SLACK),
                    "{} r = {r} n = {n}: n·err = {} > C1 = {c1}",
                    f.label(),
                    n as f64 * err
                );
            }
        }
    }
}

#[test]
fn derivative_bound_holds() {
    let engine = ApproxEngine::default();
    let (r, r1) = (1.0, 1.5);
    for f in functions() {
        let consts = BoundConstants::new(f.envelope(), r).unwrap();
        for p in [1usize, 2] {
            let cderiv = consts.cderiv(p, r1).unwrap();
            for n in [5u64, 8, 16, 32, 64, 128] {
                let err = engine.derivative_error(&f, n, p, r, r1).unwrap().value();
                assert!(
                    n as f64 * err <= cderiv * (1.0 + SLACK),
                    "{} p = {p} n = {n}: n·err = {} > {cderiv}",
                    f.label(),
                    n as f64 * err
                );
            }
        }
    }
}

#[test]
fn second_order_bound_holds() {
    let engine = ApproxEngine::default();
    let f = make_exponential(ratio(1, 4)).unwrap();
    let c2 = BoundConstants::new(f.envelope(), 1.0).unwrap().c2.unwrap();
    for n in (4u64..=24).chain([32, 64, 128, 256]) {
        let resid = engine.voronovskaja_residual(&f, n, 1.0).unwrap().value();
        let scaled = (n * n) as f64 * resid;
        assert!(scaled <= c2 * (1.0 + SLACK), "n = {n}: {scaled} > {c2}");
    }
}

#[test]
fn second_order_needs_the_stronger_hypothesis() {
    let engine = ApproxEngine::default();
    let f = make_exponential(ratio(1, 2)).unwrap();
    assert!(matches!(
        engine.voronovskaja_residual(&f, 16, 1.0),
        Err(Error::Divergence { .. } | Error::Hypothesis { .. })
    ));
    assert!(BoundConstants::new(f.envelope(), 1.0).unwrap().c2.is_none());
}

/// `max_{|z|=1} |z(z+2)e^{z/2}/8|` by dense sampling.
fn exp_half_limit_norm() -> f64 {
    (0..200_000)
        .map(|j| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 200_000.0);
            (z * (z + 2.0) * (z / 2.0).exp() / 8.0).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn error_is_not_faster_than_first_order() {
    let engine = ApproxEngine::default();
    let f = make_exponential(ratio(1, 2)).unwrap();
    let limit = exp_half_limit_norm();
    assert!((engine.limit_norm(&f, 1.0).unwrap() - limit).abs() < 1e-8 * limit);
    for n in [64u64, 128, 256] {
        let scaled = n as f64 * engine.approx_error(&f, n, 1.0).unwrap().value();
        assert!(scaled >= 0.9 * limit, "n = {n}: {scaled}");
    }
}

#[test]
fn low_degree_polynomials_are_exact() {
    let engine = ApproxEngine::default();
    let quarter = ratio(1, 4);
    for spec in ["poly:0", "poly:1", "poly:3/2,-7"] {
        let f = parse_function(spec, &quarter).unwrap();
        for n in [4u64, 9, 100] {
            let m = engine.approx_error(&f, n, 1.0).unwrap();
            assert!(m.exact_zero && m.value() == 0.0, "{spec} n = {n}");
        }
    }
    // The quadratic has no second-order remainder.
    let f = parse_function("poly:2,-1,5", &quarter).unwrap();
    assert!(engine.voronovskaja_residual(&f, 7, 1.0).unwrap().exact_zero);
}

#[test]
fn monomial_errors_match_closed_forms() {
    let engine = ApproxEngine::default();
    let quarter = ratio(1, 4);
    let e2 = make_polynomial(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)], quarter.clone()).unwrap();
    let e3 = parse_function("poly:0,0,0,1", &quarter).unwrap();
    for n in [5u64, 8, 64, 1000] {
        let nf = n as f64;
        for r in [1.0, 2.0] {
            // T_2 - e_2 = z(z+2)/n has nonnegative coefficients, so its sup sits at z = r.
            let err = engine.approx_error(&e2, n, r).unwrap().value();
            let want = r * (r + 2.0) / nf;
            assert!((err - want).abs() <= 1e-12 * want, "n = {n} r = {r}");
        }
        // E_{3,n} = 2z(z²+3z+3)/n²
        let resid = engine.voronovskaja_residual(&e3, n, 1.0).unwrap().value();
        assert!((resid - 14.0 / (nf * nf)).abs() <= 1e-12 * resid, "n = {n}");
    }
}

#[test]
fn c1_is_linear_in_m() {
    let base = theoretical_c1(1.0, 0.5, 1.0).unwrap();
    assert!((theoretical_c1(3.0, 0.5, 1.0).unwrap() - 3.0 * base).abs() < 1e-12 * base);
    assert!(theoretical_c1(1.0, 0.5, 2.0).is_err());
}
