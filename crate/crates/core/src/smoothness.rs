//! Differentiability order at the origin of difference kernels: the
//! predicted order for integer ν and a finite-difference estimate for any
//! even kernel.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{DiffParams, RadialKernel};
use crate::par::{self, Exec};
use crate::specfn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

impl Order {
    /// Equality where an estimated `Infinite` stands for "at least `max_order`".
    pub fn agrees_with_estimate(self, estimated: Order, max_order: u32) -> bool {
        match (self, estimated) {
            (a, b) if a == b => true,
            (Order::Finite(p), Order::Infinite) => p >= max_order,
            _ => false,
        }
    }
}

pub const DEFAULT_MAX_ORDER: u32 = 8;

fn integer_nu(nu: f64) -> Result<u32> {
    if nu >= 1.0 && nu.fract() == 0.0 && nu < 1e6 {
        Ok(nu as u32)
    } else {
        Err(Error::domain(format!(
            "smoothness prediction needs a positive integer nu, got {nu}"
        )))
    }
}

fn is_odd_exponent(eps: f64, nu: f64) -> bool {
    let th = 2.0 * nu - 1.0;
    (eps - th).abs() <= 1e-12 * th.abs().max(1.0)
}

/// Order k such that the difference kernel is C^k but not C^{k+1} near 0.
pub fn predict_order(mu: f64, nu: f64, eps: f64) -> Result<Order> {
    if !(mu > 0.0) {
        return Err(Error::domain(format!("mu must be positive, got {mu}")));
    }
    let n = integer_nu(nu)?;
    if !is_odd_exponent(eps, nu) {
        Ok(Order::Finite(2 * n - 2))
    } else if mu == 1.0 || mu == 2.0 {
        Ok(Order::Infinite)
    } else {
        Ok(Order::Finite(2 * n))
    }
}

/// One-sided derivative h_{μ,ν}^{(2ν+1)}(0⁺) = −(−4)^{ν−1}(ν−1)! ν! (μ−1)(μ−2).
pub fn h_deriv_at_zero(mu: f64, nu: u32) -> Result<f64> {
    if nu == 0 || !(mu > 0.0) {
        return Err(Error::domain(format!(
            "need mu > 0 and integer nu >= 1, got ({mu}, {nu})"
        )));
    }
    let f = |k: u32| specfn::gamma_fn(k as f64 + 1.0);
    Ok(-(-4f64).powi(nu as i32 - 1) * f(nu - 1)? * f(nu)? * (mu - 1.0) * (mu - 2.0))
}

/// Central-difference estimates of one even derivative order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderDiagnostic {
    pub order: u32,
    pub steps: Vec<f64>,
    pub estimates: Vec<f64>,
    /// Rounding-noise bound of each estimate.
    pub noise: Vec<f64>,
    /// Ratio of successive estimate changes; below 1 for convergence.
    pub ratios: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    /// `None` outside the integer-ν scope of the prediction.
    pub predicted: Option<Order>,
    pub estimated: Order,
    pub q: f64,
    pub max_order: u32,
    pub details: Vec<OrderDiagnostic>,
}

fn binomials(n: u32) -> Vec<f64> {
    let mut c = vec![1.0f64; n as usize + 1];
    for k in 1..=n as usize {
        c[k] = c[k - 1] * (n as usize + 1 - k) as f64 / k as f64;
    }
    c
}

/// n-th central difference quotient of the even extension at 0 with step h,
/// and a bound on its rounding noise.
fn central_difference(k: &RadialKernel, n: u32, h: f64) -> Result<(f64, f64)> {
    let c = binomials(n);
    let half = n as f64 / 2.0;
    let mut s = 0.0;
    let mut mag = 0.0;
    for (j, cj) in c.iter().enumerate() {
        let v = cj * k.eval((half - j as f64) * h)?;
        if j % 2 == 0 {
            s += v;
        } else {
            s -= v;
        }
        mag += v.abs();
    }
    let hn = h.powi(n as i32);
    Ok((s / hn, 16.0 * f64::EPSILON * mag / hn))
}

const STEPS_PER_ORDER: usize = 5;

fn diagnose(k: &RadialKernel, q: f64, n: u32) -> Result<OrderDiagnostic> {
    // The stencil spans ±(n/2)h; the widest one reaches q/2.
    let h0 = q / n as f64;
    let steps: Vec<f64> = (0..STEPS_PER_ORDER).map(|j| h0 / 2f64.powi(j as i32)).collect();
    let mut estimates = Vec::with_capacity(steps.len());
    let mut noise = Vec::with_capacity(steps.len());
    for &h in &steps {
        let (d, e) = central_difference(k, n, h)?;
        estimates.push(d);
        noise.push(e);
    }
    let ratios: Vec<f64> = (2..steps.len())
        .map(|j| {
            let a = estimates[j - 1] - estimates[j - 2];
            let b = estimates[j] - estimates[j - 1];
            (b / a).abs()
        })
        .collect();
    // A change is resolved when it exceeds the noise of both estimates.
    let resolved = |j: usize| (estimates[j] - estimates[j - 1]).abs() > 4.0 * (noise[j] + noise[j - 1]);
    let mut votes_div = 0;
    let mut votes_conv = 0;
    for j in 2..steps.len() {
        if !resolved(j) {
            votes_conv += 1;
        } else if ratios[j - 2] > 1.0 {
            votes_div += 1;
        } else {
            votes_conv += 1;
        }
    }
    Ok(OrderDiagnostic {
        order: n,
        steps,
        estimates,
        noise,
        ratios,
        converged: votes_conv > votes_div,
    })
}

/// Differentiability order at 0 of the even extension of `k` on (−q, q).
///
/// Only even orders carry information for an even function. For each even
/// n ≤ `max_order` the n-th derivative at 0 is estimated by central
/// differences at halving steps; successive changes that shrink mean
/// convergence, changes that grow mean divergence. The order is two less than
/// the first diverging n, and `Infinite` when none diverges.
pub fn estimate_order(k: &RadialKernel, q: f64, max_order: u32) -> Result<Order> {
    estimate_order_detail(k, q, max_order).map(|(o, _)| o)
}

pub fn estimate_order_detail(k: &RadialKernel, q: f64, max_order: u32) -> Result<(Order, Vec<OrderDiagnostic>)> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Input(format!("q must be positive and finite, got {q}")));
    }
    if max_order == 0 || max_order > DEFAULT_MAX_ORDER {
        return Err(Error::Input(format!(
            "max_order must be in 1..={DEFAULT_MAX_ORDER}, got {max_order}"
        )));
    }
    let mut details = Vec::new();
    for n in (2..=max_order).step_by(2) {
        let d = diagnose(k, q, n)?;
        let converged = d.converged;
        details.push(d);
        if !converged {
            return Ok((Order::Finite(n - 2), details));
        }
    }
    Ok((Order::Infinite, details))
}

/// Predicted and estimated order of the difference kernel with
/// q = min(β₁, β₂).
pub fn smoothness_report(d: &DiffParams, max_order: u32) -> Result<SmoothnessReport> {
    if d.is_degenerate() {
        return Err(Error::DegenerateKernel("beta1 = beta2 gives the zero kernel".into()));
    }
    let q = d.beta1.min(d.beta2);
    let predicted = predict_order(d.mu, d.nu, d.eps).ok();
    let (estimated, details) = estimate_order_detail(&RadialKernel::difference(*d), q, max_order)?;
    Ok(SmoothnessReport {
        predicted,
        estimated,
        q,
        max_order,
        details,
    })
}

/// Reports for a batch of parameter sets.
pub fn smoothness_grid(ds: &[DiffParams], max_order: u32, exec: Exec) -> Result<Vec<SmoothnessReport>> {
    par::try_map(exec, ds, |d| smoothness_report(d, max_order))
}

/// Coefficient c of c|x|^p in the expansion of k at 0, for odd p, from the
/// (p+1)-th central difference: h·Δ^{p+1}/h^{p+1} → c·Σ_j (−1)^j C(p+1,j)|(p+1)/2−j|^p.
pub fn odd_coefficient(k: &RadialKernel, p: u32, q: f64) -> Result<f64> {
    if p.is_multiple_of(2) {
        return Err(Error::Input(format!("odd exponent expected, got {p}")));
    }
    let n = p + 1;
    let c = binomials(n);
    let half = n as f64 / 2.0;
    let kappa: f64 = c
        .iter()
        .enumerate()
        .map(|(j, cj)| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * cj * (half - j as f64).abs().powi(p as i32)
        })
        .sum();
    // Two Richardson levels remove the O(h) and O(h²) remainders of h·D_n(h).
    let h = q / (8.0 * n as f64);
    let t = |s: f64| -> Result<f64> { Ok(s * central_difference(k, n, s)?.0) };
    let (t0, t1, t2) = (t(h)?, t(0.5 * h)?, t(0.25 * h)?);
    let (r0, r1) = (2.0 * t1 - t0, 2.0 * t2 - t1);
    Ok((4.0 * r1 - r0) / 3.0 / kappa)
}

/// Least-squares fit of Σ_{j ≤ degree/2} a_j x^{2j} to k on [0, q]; returns
/// the coefficients and the largest absolute residual at the samples.
pub fn fit_even_polynomial(k: &RadialKernel, q: f64, degree: u32, samples: usize) -> Result<(Vec<f64>, f64)> {
    if samples < 2 || !(q > 0.0) {
        return Err(Error::Input("need at least two samples and q > 0".into()));
    }
    let terms = degree as usize / 2 + 1;
    let xs: Vec<f64> = (0..samples).map(|i| q * i as f64 / samples as f64).collect();
    let ys = DVector::from_vec(xs.iter().map(|&x| k.eval(x)).collect::<Result<Vec<_>>>()?);
    let a = DMatrix::from_fn(samples, terms, |i, j| (xs[i] / q).powi(2 * j as i32));
    let svd = a.clone().svd(true, true);
    let c = svd.solve(&ys, 1e-14).map_err(|e| Error::Input(e.to_string()))?;
    let resid = (&a * &c - &ys).amax();
    let coeffs = c.iter().enumerate().map(|(j, v)| v / q.powi(2 * j as i32)).collect();
    Ok((coeffs, resid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn predictions() {
        assert_eq!(predict_order(3.0, 1.0, 0.5).unwrap(), Order::Finite(0));
        assert_eq!(predict_order(3.0, 2.0, 3.0).unwrap(), Order::Finite(4));
        assert_eq!(predict_order(2.0, 2.0, 3.0).unwrap(), Order::Infinite);
        assert!(predict_order(3.0, 1.5, 2.0).is_err());
    }

    #[test]
    fn derivative_formula() {
        assert_eq!(h_deriv_at_zero(4.0, 1).unwrap(), -6.0);
        assert_eq!(h_deriv_at_zero(1.0, 3).unwrap(), 0.0);
        assert_eq!(h_deriv_at_zero(2.0, 2).unwrap(), 0.0);
        // h_{4,2} = (1−x)^5(1+5x)/60 has x^5 coefficient 24/60.
        assert_relative_eq!(
            h_deriv_at_zero(4.0, 2).unwrap(),
            120.0 * 24.0 / 60.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn askey_is_only_continuous() {
        let k = RadialKernel::askey(3.0).unwrap();
        assert_eq!(estimate_order(&k, 1.0, 8).unwrap(), Order::Finite(0));
    }

    #[test]
    fn smooth_even_functions_are_infinite() {
        let k = RadialKernel::custom("gauss", 10.0, vec![], |x| Ok((-x * x).exp())).unwrap();
        assert_eq!(estimate_order(&k, 1.0, 8).unwrap(), Order::Infinite);
        let k = RadialKernel::custom("quartic", 10.0, vec![], |x| Ok(1.0 - 2.0 * x * x + x.powi(4))).unwrap();
        assert_eq!(estimate_order(&k, 1.0, 8).unwrap(), Order::Infinite);
    }

    #[test]
    fn odd_power_sets_order() {
        for p in [1, 3, 5] {
            let k = RadialKernel::custom("odd", 10.0, vec![], move |x: f64| {
                Ok((-x * x).exp() + 0.3 * x.abs().powi(p))
            })
            .unwrap();
            assert_eq!(
                estimate_order(&k, 1.0, 8).unwrap(),
                Order::Finite(p as u32 - 1),
                "p = {p}"
            );
        }
    }

    #[test]
    fn odd_coefficient_of_askey() {
        let k = RadialKernel::askey(3.0).unwrap();
        assert_relative_eq!(odd_coefficient(&k, 1, 1.0).unwrap(), -3.0, max_relative = 1e-6);
    }
}
