use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Below this argument the power series is summed directly.
const SERIES_MAX_X: f64 = 8.0;
/// Above this argument the Hankel asymptotic expansion replaces the
/// continued-fraction evaluator, whose iteration count grows with x.
const ASYMPTOTIC_MIN_X: f64 = 5.0e3;

fn check(lambda: f64, x: f64) -> Result<()> {
    if !(lambda > -1.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("Bessel order must exceed -1, got {lambda}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "Bessel argument must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// Sum of Σ_k (−x²/4)^k / (k! Γ(k+λ+1)), without the 2^{−λ} factor.
fn series(lambda: f64, x: f64) -> Result<f64> {
    let tol = Tolerance::global();
    let q = -0.25 * x * x;
    let mut term = 1.0 / puruspe::gamma(lambda + 1.0);
    let mut sum = term;
    for k in 1..tol.max_terms {
        let kf = k as f64;
        term *= q / (kf * (kf + lambda));
        sum += term;
        if term.abs() <= 0.25 * f64::EPSILON * sum.abs() && kf * kf > q.abs() {
            return Ok(sum);
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        what: "Bessel power series",
        terms: tol.max_terms,
        estimate: sum,
    })
}

/// J_ν(x) for large x from the Hankel expansion, any real ν.
fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        if a.abs() >= last {
            break;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let w = x - FRAC_PI_2 * nu - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

/// J_λ(x) for x beyond the series range.
fn j_large(lambda: f64, x: f64) -> f64 {
    if x >= ASYMPTOTIC_MIN_X {
        return hankel_asymptotic(lambda, x);
    }
    if lambda >= 0.0 {
        puruspe::besseljy(lambda, x).0
    } else {
        let nu = -lambda;
        let (j, y, _, _) = puruspe::besseljy(nu, x);
        (nu * PI).cos() * j - (nu * PI).sin() * y
    }
}

/// Normalized Bessel function j_λ(x) = J_λ(x)/x^λ, an entire function of x
/// with j_λ(0) = 1/(2^λ Γ(λ+1)).
pub fn j_norm(lambda: f64, x: f64) -> Result<f64> {
    check(lambda, x)?;
    if x <= SERIES_MAX_X {
        Ok(series(lambda, x)? * 2f64.powf(-lambda))
    } else {
        Ok(j_large(lambda, x) / x.powf(lambda))
    }
}

/// Bessel function of the first kind J_λ(x) for λ > −1, x ≥ 0.
pub fn bessel_j(lambda: f64, x: f64) -> Result<f64> {
    check(lambda, x)?;
    if x == 0.0 {
        return Ok(if lambda == 0.0 {
            1.0
        } else if lambda > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if x <= SERIES_MAX_X {
        Ok(series(lambda, x)? * (0.5 * x).powf(lambda))
    } else {
        Ok(j_large(lambda, x))
    }
}

/// Characteristic function of the uniform distribution on the unit sphere
/// of ℝ^m: Ω_m(t) = 2^{(m−2)/2} Γ(m/2) j_{m/2−1}(t).
pub fn omega_m(m: u32, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let h = 0.5 * m as f64;
    let c = 2f64.powf(h - 1.0) * puruspe::gamma(h);
    Ok(c * j_norm(h - 1.0, t.abs())?)
}
