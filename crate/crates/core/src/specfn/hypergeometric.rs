use super::dd::Dd;

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Smallest |result| / max |partial sum| accepted from the double-precision
/// sum; below it the series is resummed in double-double.
pub const DOUBLE_LOSS_THRESHOLD: f64 = 1e-4;
/// Same ratio for the double-double retry.
pub const EXTENDED_LOSS_THRESHOLD: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    DoubleDouble,
}

/// A summed ₁F₂ series with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp1F2 {
    pub value: f64,
    /// Rounding-error bound of the summation.
    pub error: f64,
    pub precision: Precision,
    /// |value| divided by the largest partial sum seen.
    pub ratio: f64,
    pub terms: usize,
}

fn non_positive_integer(b: f64) -> bool {
    b <= 0.0 && b.fract() == 0.0
}

struct Sum<T> {
    value: T,
    abs_sum: f64,
    max_partial: f64,
    terms: usize,
}

fn overflow() -> Error {
    Error::PrecisionLoss {
        what: "1F2 series (partial sums overflow)",
        value: f64::NAN,
        error: f64::INFINITY,
    }
}

fn sum_f64(a: f64, b1: f64, b2: f64, z: f64, tol: &Tolerance) -> Result<Sum<f64>> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut abs_sum = 1.0;
    let mut max_partial = 1.0f64;
    for k in 0..tol.max_terms {
        let kf = k as f64;
        term *= (a + kf) * z / ((b1 + kf) * (b2 + kf) * (kf + 1.0));
        sum += term;
        abs_sum += term.abs();
        max_partial = max_partial.max(sum.abs());
        if !sum.is_finite() {
            return Err(overflow());
        }
        let past_peak = (kf + 1.0) * (kf + 1.0) > z.abs();
        if term == 0.0 || (past_peak && term.abs() <= 0.25 * f64::EPSILON * sum.abs()) {
            return Ok(Sum {
                value: sum,
                abs_sum,
                max_partial,
                terms: k + 2,
            });
        }
    }
    Err(Error::Convergence {
        what: "1F2 series",
        terms: tol.max_terms,
        estimate: sum,
    })
}

fn sum_dd(a: Dd, b1: Dd, b2: Dd, z: Dd, tol: &Tolerance) -> Result<Sum<Dd>> {
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut abs_sum = 1.0;
    let mut max_partial = 1.0f64;
    let zf = z.hi.abs();
    for k in 0..tol.max_terms {
        let kf = k as f64;
        term = term * (a + kf) * z / ((b1 + kf) * (b2 + kf) * Dd::from(kf + 1.0));
        sum = sum + term;
        let t = term.hi.abs();
        abs_sum += t;
        max_partial = max_partial.max(sum.hi.abs());
        if !sum.hi.is_finite() {
            return Err(overflow());
        }
        let past_peak = (kf + 1.0) * (kf + 1.0) > zf;
        if t == 0.0 || (past_peak && t <= 1e-33 * sum.hi.abs()) {
            return Ok(Sum {
                value: sum,
                abs_sum,
                max_partial,
                terms: k + 2,
            });
        }
    }
    Err(Error::Convergence {
        what: "1F2 series (double-double)",
        terms: tol.max_terms,
        estimate: sum.hi,
    })
}

/// ₁F₂ with parameters given in double-double, so that callers can pass
/// sums like `(m−1)/2 + ν + μ/2` and `−t²/4` without rounding them first.
/// Sums in double precision and retries in double-double when cancellation
/// costs more than four digits.
pub(crate) fn hyp1f2_extended(a: Dd, b1: Dd, b2: Dd, z: Dd) -> Result<Hyp1F2> {
    let (b1f, b2f) = (b1.to_f64(), b2.to_f64());
    if non_positive_integer(b1f) || non_positive_integer(b2f) {
        return Err(Error::domain(format!(
            "1F2 lower parameters must not be non-positive integers, got ({b1f}, {b2f})"
        )));
    }
    let zf = z.to_f64();
    if zf == 0.0 {
        return Ok(Hyp1F2 {
            value: 1.0,
            error: 0.0,
            precision: Precision::Double,
            ratio: 1.0,
            terms: 1,
        });
    }
    let tol = Tolerance::global();
    let s = sum_f64(a.to_f64(), b1f, b2f, zf, &tol)?;
    let ratio = s.value.abs() / s.max_partial;
    if ratio >= DOUBLE_LOSS_THRESHOLD {
        return Ok(Hyp1F2 {
            value: s.value,
            error: 2.0 * f64::EPSILON * s.abs_sum,
            precision: Precision::Double,
            ratio,
            terms: s.terms,
        });
    }
    let s = sum_dd(a, b1, b2, z, &tol)?;
    let value = s.value.to_f64();
    let ratio = value.abs() / s.max_partial;
    let error = f64::EPSILON * value.abs() + 1e-31 * s.abs_sum;
    if ratio < EXTENDED_LOSS_THRESHOLD {
        return Err(Error::PrecisionLoss {
            what: "1F2 series",
            value,
            error,
        });
    }
    Ok(Hyp1F2 {
        value,
        error,
        precision: Precision::DoubleDouble,
        ratio,
        terms: s.terms,
    })
}

/// ₁F₂(a; b1, b2; z) with summation diagnostics.
pub fn hyp1f2_detail(a: f64, b1: f64, b2: f64, z: f64) -> Result<Hyp1F2> {
    hyp1f2_extended(a.into(), b1.into(), b2.into(), z.into())
}

/// ₁F₂(a; b1, b2; z). Fails with [`Error::PrecisionLoss`] when even the
/// extended-precision sum cancels below the reporting threshold.
pub fn hyp1f2(a: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    hyp1f2_detail(a, b1, b2, z).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_argument_is_one() {
        for (a, b1, b2) in [(1.0, 1.0, 1.0), (2.5, 0.5, 7.0), (-3.0, 1.5, 2.0)] {
            assert_eq!(hyp1f2(a, b1, b2, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn unit_parameters_give_modified_bessel() {
        // 1F2(1; 1, 1; x) = Σ x^k / k!² = I₀(2√x)
        let r = hyp1f2_detail(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(r.value, 2.279_585_302_336_067_3, max_relative = 1e-14);
        let brute: f64 = (0..40)
            .map(|k| 9f64.powi(k) / statrs::function::factorial::factorial(k as u64).powi(2))
            .sum();
        assert_relative_eq!(hyp1f2(1.0, 1.0, 1.0, 9.0).unwrap(), brute, max_relative = 1e-13);
    }

    #[test]
    fn bessel_special_case() {
        // 0F1(; λ+1; −x²/4) = Γ(λ+1)(2/x)^λ J_λ(x); with a = b2 the 1F2 reduces to it.
        for x in [0.5, 3.0, 20.0, 45.0] {
            let r = hyp1f2_extended(2.0.into(), 1.0.into(), 2.0.into(), Dd::product(x, x) * -0.25).unwrap();
            assert_relative_eq!(
                r.value,
                puruspe::besseljy(0.0, x).0,
                max_relative = 1e-9,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn extended_precision_kicks_in_for_large_negative_argument() {
        let r = hyp1f2_detail(1.0, 2.0, 2.5, -400.0).unwrap();
        assert_eq!(r.precision, Precision::DoubleDouble);
        let r = hyp1f2_detail(1.0, 2.0, 2.5, -1.0).unwrap();
        assert_eq!(r.precision, Precision::Double);
    }

    #[test]
    fn pole_parameters_rejected() {
        assert!(hyp1f2(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(hyp1f2(1.0, 1.0, -2.0, 0.5).is_err());
    }

    #[test]
    fn hopeless_cancellation_is_reported() {
        match hyp1f2_detail(1.0, 2.0, 2.5, -1e6) {
            Err(Error::PrecisionLoss { .. }) => {}
            other => panic!("expected precision loss, got {other:?}"),
        }
    }
}
