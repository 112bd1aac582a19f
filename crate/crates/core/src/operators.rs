//! The Montée operator I f(x) = ∫_{|x|}^∞ s f(s) ds, its iterates, and the
//! weighted difference of two rescaled h-kernels.

use std::cell::Cell;

use crate::error::Result;
use crate::kernels::{h_eval, DiffParams, RadialKernel};
use crate::quad::{self, Estimate};
use crate::specfn;
use crate::tolerance::Tolerance;

/// ∫_x^R w(s) k(s) ds, split at the kernel's kinks so that each piece is
/// smooth inside and handled by double-exponential quadrature.
fn integrate_from<W: Fn(f64) -> f64>(k: &RadialKernel, x: f64, weight: W) -> Result<Estimate> {
    let r = k.support();
    let x = x.abs();
    if x >= r {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut pts = vec![x];
    pts.extend(k.breakpoints().into_iter().filter(|&b| b > x && b < r));
    pts.push(r);
    let tol = Tolerance::global();
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for w in pts.windows(2) {
        let failure = Cell::new(None);
        let e = quad::tanh_sinh(
            |n| match k.eval(n.x) {
                Ok(v) => weight(n.x) * v,
                Err(err) => {
                    failure.set(Some(err));
                    0.0
                }
            },
            w[0],
            w[1],
            tol.rel,
            tol.abs,
        )?;
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        total = total + e;
    }
    Ok(total)
}

/// I(k)(x) = ∫_x^R s k(s) ds with its error estimate.
pub fn montee_estimate(k: &RadialKernel, x: f64) -> Result<Estimate> {
    integrate_from(k, x, |s| s)
}

/// Montée I(k)(x) = ∫_x^R s k(s) ds.
pub fn montee(k: &RadialKernel, x: f64) -> Result<f64> {
    montee_estimate(k, x).map(|e| e.value)
}

/// n-fold Montée Iⁿ(k) as a kernel with the same support.
///
/// Uses the closed form of the iterated integral,
/// Iⁿ k(x) = ∫_x^R s k(s) (s² − x²)^{n−1} / (2^{n−1} (n−1)!) ds,
/// so each evaluation is a single quadrature regardless of n.
pub fn montee_k(k: &RadialKernel, n: u32) -> Result<RadialKernel> {
    if n == 0 {
        return Ok(k.clone());
    }
    let inner = k.clone();
    let c = 1.0 / (2f64.powi(n as i32 - 1) * specfn::gamma_fn(n as f64)?);
    let p = n as i32 - 1;
    let name = format!("montee^{n}");
    RadialKernel::custom(name, k.support(), k.breakpoints(), move |x| {
        let x = x.abs();
        let e = integrate_from(&inner, x, |s| c * s * ((s - x) * (s + x)).powi(p))?;
        Ok(e.value)
    })
}

/// f(x) = β₂^ε h_{μ,ν}(x/β₂) − β₁^ε h_{μ,ν}(x/β₁); zero for x ≥ max(β₁, β₂).
pub fn difference_eval(d: &DiffParams, x: f64) -> Result<f64> {
    let x = x.abs();
    if x >= d.support() || d.is_degenerate() {
        return Ok(0.0);
    }
    let t2 = d.beta2.powf(d.eps) * h_eval(d.mu, d.nu, x / d.beta2)?;
    let t1 = d.beta1.powf(d.eps) * h_eval(d.mu, d.nu, x / d.beta1)?;
    Ok(t2 - t1)
}
