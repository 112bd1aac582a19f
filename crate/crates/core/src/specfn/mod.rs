//! Special functions: Gamma/Beta, normalized Bessel functions, the sphere
//! characteristic function, ₁F₂ and a numeric Laplace transform.

mod bessel;
pub(crate) mod dd;
mod hypergeometric;

pub use bessel::{bessel_j, j_norm, omega_m};
pub(crate) use hypergeometric::hyp1f2_extended;
pub use hypergeometric::{hyp1f2, hyp1f2_detail, Hyp1F2, Precision};

use crate::error::{Error, Result};
use crate::quad::{self, Estimate};

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Γ(x) for real x away from the poles.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || is_pole(x) {
        return Err(Error::domain(format!("gamma: pole or nonfinite argument {x}")));
    }
    Ok(puruspe::gamma(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma: argument must be positive, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// B(a, b) for a, b > 0.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "beta: arguments must be positive, got ({a}, {b})"
        )));
    }
    if a + b < 150.0 {
        let g = puruspe::gamma;
        Ok(g(a) * g(b) / g(a + b))
    } else {
        Ok(statrs::function::beta::ln_beta(a, b).exp())
    }
}

/// Truncated Laplace transform ∫₀^{tail_cut} e^{−xs} g(s) ds.
pub fn laplace_numeric<G: Fn(f64) -> f64>(g: G, x: f64, tail_cut: f64, rel: f64) -> Result<Estimate> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("laplace: x must be positive, got {x}")));
    }
    if !(tail_cut > 0.0) {
        return Err(Error::domain(format!(
            "laplace: tail_cut must be positive, got {tail_cut}"
        )));
    }
    // Panels of a few decay lengths keep the adaptive rule well seeded.
    let width = (4.0 / x).min(tail_cut);
    let n = ((tail_cut / width).ceil() as usize).clamp(1, 400);
    let pts: Vec<f64> = (0..=n).map(|i| tail_cut * i as f64 / n as f64).collect();
    quad::gauss_kronrod_split(|s| (-x * s).exp() * g(s), &pts, rel, 0.0)
}
