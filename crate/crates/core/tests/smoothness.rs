use buhmann::kernels::h_eval;
use buhmann::smoothness::*;
use buhmann::{DiffParams, Exec, RadialKernel};

fn grid36() -> Vec<DiffParams> {
    let mut out = Vec::new();
    for mu in [1.5, 2.0, 3.0] {
        for nu in [1.0, 2.0] {
            let base = 2.0 * nu - 1.0;
            for eps in [base, base - 0.5, base + 0.5] {
                for (b1, b2) in [(0.75, 1.0), (1.0, 0.75)] {
                    out.push(DiffParams::new(mu, nu, eps, b1, b2).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn estimates_match_predictions_on_the_grid() {
    let ds = grid36();
    assert_eq!(ds.len(), 36);
    let reports = smoothness_grid(&ds, DEFAULT_MAX_ORDER, Exec::default()).unwrap();
    for (d, r) in ds.iter().zip(&reports) {
        let p = r.predicted.unwrap();
        assert_eq!(r.q, 0.75);
        assert!(
            p.agrees_with_estimate(r.estimated, r.max_order),
            "{d:?}: predicted {p}, estimated {}",
            r.estimated
        );
    }
}

#[test]
fn spec_examples() {
    let r = smoothness_report(&DiffParams::new(3.0, 1.0, 0.5, 0.75, 1.0).unwrap(), 8).unwrap();
    assert_eq!(r.estimated, Order::Finite(0));
    let r = smoothness_report(&DiffParams::new(2.0, 2.0, 3.0, 0.75, 1.0).unwrap(), 8).unwrap();
    assert_eq!((r.predicted, r.estimated), (Some(Order::Infinite), Order::Infinite));
    assert!(smoothness_report(&DiffParams::new(2.0, 2.0, 3.0, 1.0, 1.0).unwrap(), 8).is_err());
    let r = smoothness_report(&DiffParams::new(3.0, 1.5, 2.0, 0.75, 1.0).unwrap(), 8).unwrap();
    assert_eq!(r.predicted, None);
}

#[test]
fn polynomial_cases_are_even_polynomials() {
    for mu in [1.0, 2.0] {
        for nu in [1u32, 2, 3] {
            let nf = nu as f64;
            let d = DiffParams::new(mu, nf, 2.0 * nf - 1.0, 0.75, 1.0).unwrap();
            let degree = (mu as u32) + 2 * nu - 2;
            let (_, resid) = fit_even_polynomial(&RadialKernel::difference(d), 0.75, degree, 200).unwrap();
            assert!(resid < 1e-10, "mu={mu} nu={nu}: residual {resid}");
        }
    }
    let d = DiffParams::new(3.0, 1.0, 1.0, 0.75, 1.0).unwrap();
    let (_, resid) = fit_even_polynomial(&RadialKernel::difference(d), 0.75, 3, 200).unwrap();
    assert!(resid > 1e-6);
}

#[test]
fn h_derivative_lowers_nu() {
    let step = 1e-5;
    for mu in [1.5, 3.0, 4.5] {
        for nu in [2.0, 3.0, 2.5] {
            for x in [0.1, 0.4, 0.8] {
                let d = (h_eval(mu, nu, x + step).unwrap() - h_eval(mu, nu, x - step).unwrap()) / (2.0 * step);
                let want = -2.0 * (nu - 1.0) * x * h_eval(mu, nu - 1.0, x).unwrap();
                assert!((d - want).abs() < 1e-6 * want.abs(), "({mu},{nu}) x={x}: {d} vs {want}");
            }
        }
    }
}

#[test]
fn odd_coefficient_of_first_order_kernels() {
    for mu in [1.5, 3.0, 4.0] {
        for eps in [0.5, 1.0, 1.5, 2.5] {
            let (b1, b2) = (0.75f64, 1.0f64);
            let d = DiffParams::new(mu, 1.0, eps, b1, b2).unwrap();
            let c = odd_coefficient(&RadialKernel::difference(d), 1, 0.75).unwrap();
            let want = b1.powf(eps - 1.0) - b2.powf(eps - 1.0);
            assert!((c - want).abs() < 1e-4, "mu={mu} eps={eps}: {c} vs {want}");
        }
    }
}

#[test]
fn odd_coefficient_vanishes_only_at_the_critical_exponent() {
    for mu in [3.0, 4.5] {
        let at = |eps: f64| {
            let d = DiffParams::new(mu, 2.0, eps, 0.75, 1.0).unwrap();
            odd_coefficient(&RadialKernel::difference(d), 3, 0.75).unwrap()
        };
        assert!(at(3.0).abs() < 1e-5, "{}", at(3.0));
        assert!(at(2.5).abs() > 1e-2, "{}", at(2.5));
        assert!(at(3.5).abs() > 1e-2, "{}", at(3.5));
    }
}

#[test]
fn wendland_functions_have_even_orders() {
    for k in 0..=2u32 {
        let w = RadialKernel::wendland(3.5 + k as f64, k).unwrap();
        assert_eq!(estimate_order(&w, 1.0, 8).unwrap(), Order::Finite(2 * k));
    }
}

#[test]
fn table_after_column() {
    for k in 0..=2u32 {
        let kf = k as f64;
        for mu in [3.5, 5.0, 0.5] {
            assert_eq!(
                predict_order(mu, kf + 1.0, 2.0 * kf + 1.0).unwrap(),
                Order::Finite(2 * k + 2)
            );
        }
    }
}

#[test]
fn parallel_grid_matches_sequential() {
    let ds = &grid36()[..8];
    let a = smoothness_grid(ds, 6, Exec::Parallel).unwrap();
    let b = smoothness_grid(ds, 6, Exec::Sequential).unwrap();
    assert_eq!(a, b);
}
