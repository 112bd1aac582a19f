//! Hankel transforms 𝔉_m(k)(t) = ∫₀^∞ k(u) u^{m−1} j_{m/2−1}(tu) du of
//! compactly supported kernels, the auxiliary integral
//! I_{δ,μ,ν,α}(t) = ∫₀¹ (1−x^δ)^{μ−1} x^α j_{ν−1/2}(tx) dx, and the ₁F₂
//! closed form for h_{μ,ν}.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{Family, RadialKernel};
use crate::par::{self, Exec};
use crate::quad::{self, Estimate, Node};
use crate::specfn::{self, dd::Dd};
use crate::tolerance::Tolerance;

/// Which evaluator produced (or should produce) a spectral value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Quadrature,
    ClosedForm1F2,
    /// Closed form when the kernel reduces to h-kernels, else quadrature.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralValue {
    pub value: f64,
    pub error: f64,
    /// The evaluator actually used; never `Auto`.
    pub backend: Backend,
    /// True when the closed form lost precision and quadrature took over.
    pub fell_back: bool,
}

/// Breakpoints of [a, b] into panels no longer than `width`, merged with
/// `extra` interior points.
fn panels(a: f64, b: f64, width: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    if width.is_finite() && width > 0.0 && b - a > width {
        let n = ((b - a) / width).ceil() as usize;
        pts.extend((1..n).map(|i| a + (b - a) * i as f64 / n as f64));
    }
    pts.extend(extra.iter().copied().filter(|&p| p > a && p < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * b.abs().max(1.0));
    pts
}

/// Panel width for an oscillating factor of angular frequency t.
fn oscillation_width(t: f64) -> f64 {
    if t > 0.0 {
        PI / t
    } else {
        f64::INFINITY
    }
}

/// Σ over panels of tanh-sinh integrals of `f`, which receives the global
/// abscissa together with accurate distances to the outer endpoints a and b.
fn integrate_panels<F: Fn(f64, f64, f64) -> Result<f64>>(pts: &[f64], abs_floor: f64, f: F) -> Result<Estimate> {
    let tol = Tolerance::global();
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for w in pts.windows(2) {
        let (pa, pb) = (w[0], w[1]);
        let failure = Cell::new(None);
        let e = quad::tanh_sinh(
            |n: Node| {
                let from_a = (pa - a) + n.from_a;
                let from_b = (b - pb) + n.from_b;
                match f(n.x, from_a, from_b) {
                    Ok(v) => v,
                    Err(err) => {
                        failure.set(Some(err));
                        0.0
                    }
                }
            },
            pa,
            pb,
            tol.rel,
            abs_floor.max(tol.abs),
        )?;
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        total = total + e;
    }
    Ok(total)
}

/// I_{δ,μ,ν,α}(t) = ∫₀¹ (1−x^δ)^{μ−1} x^α j_{ν−1/2}(tx) dx.
pub fn i_integral(delta: f64, mu: f64, nu: f64, alpha: f64, t: f64) -> Result<Estimate> {
    if !(delta > 0.0 && mu > 0.0 && alpha > -1.0 && nu > -0.5) {
        return Err(Error::domain(format!(
            "I integral needs delta, mu > 0, alpha > -1, nu > -1/2; got ({delta}, {mu}, {nu}, {alpha})"
        )));
    }
    let t = t.abs();
    let lambda = nu - 0.5;
    let pts = panels(0.0, 1.0, oscillation_width(t), &[]);
    let scale = specfn::beta_fn((alpha + 1.0) / delta, mu)? / delta * specfn::j_norm(lambda, 0.0)?.abs();
    integrate_panels(&pts, 1e-15 * scale, |x, from0, to1| {
        let w = if mu == 1.0 {
            1.0
        } else if to1 < 0.25 {
            (-(delta * (-to1).ln_1p()).exp_m1()).powf(mu - 1.0)
        } else {
            (1.0 - from0.powf(delta)).powf(mu - 1.0)
        };
        Ok(w * from0.powf(alpha) * specfn::j_norm(lambda, t * x)?)
    })
}

/// 𝔉_m(k)(t) by quadrature over [0, support], split at the kernel's kinks and
/// into panels of length π/t.
pub fn hankel_quadrature(k: &RadialKernel, m: u32, t: f64) -> Result<Estimate> {
    if m == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let t = t.abs();
    let r = k.support();
    let lambda = 0.5 * m as f64 - 1.0;
    let pts = panels(0.0, r, oscillation_width(t), &k.breakpoints());
    let k0 = k.eval(0.0)?.abs();
    let scale = k0 * r.powi(m as i32) / m as f64 * specfn::j_norm(lambda, 0.0)?;
    integrate_panels(&pts, 1e-15 * scale, |u, from0, _| {
        Ok(k.eval(u)? * from0.powi(m as i32 - 1) * specfn::j_norm(lambda, t * u)?)
    })
}

/// D(m, μ, ν) = 𝔉_m(h_{μ,ν})(0).
pub fn d_constant(m: u32, mu: f64, nu: f64) -> Result<f64> {
    check_h_params(m, mu, nu)?;
    let mf = m as f64;
    if mu + mf - 1.0 + 2.0 * nu < 150.0 {
        let g = specfn::gamma_fn;
        return Ok(2f64.powf(-0.5 * mf) * g(nu)? * g(mu)? * g(mf - 1.0 + 2.0 * nu)?
            / (g(0.5 * mf + nu)? * g(mu + mf - 1.0 + 2.0 * nu)?));
    }
    let lg = specfn::ln_gamma;
    let ln = -0.5 * mf * 2f64.ln() + lg(nu)? + lg(mu)? + lg(mf - 1.0 + 2.0 * nu)?
        - lg(0.5 * mf + nu)?
        - lg(mu + mf - 1.0 + 2.0 * nu)?;
    Ok(ln.exp())
}

fn check_h_params(m: u32, mu: f64, nu: f64) -> Result<()> {
    if m == 0 || !(mu > 0.0) || !(nu > 0.0) || !(m as f64 - 1.0 + 2.0 * nu > 0.0) {
        return Err(Error::domain(format!(
            "need m >= 1, mu > 0, nu > 0; got ({m}, {mu}, {nu})"
        )));
    }
    Ok(())
}

/// 𝔉_m(h_{μ,ν})(t) = D(m,μ,ν) ₁F₂(n; n+μ/2, n+(μ+1)/2; −t²/4) with
/// n = (m−1)/2 + ν. Falls back to quadrature when the series cancels
/// beyond repair.
pub fn hankel_h_closed(m: u32, mu: f64, nu: f64, t: f64) -> Result<SpectralValue> {
    let d = d_constant(m, mu, nu)?;
    let t = t.abs();
    let n = Dd::product(0.5, m as f64 - 1.0) + nu;
    let b1 = n + Dd::product(0.5, mu);
    let b2 = b1 + 0.5;
    let z = Dd::product(t, t) * -0.25;
    match specfn::hyp1f2_extended(n, b1, b2, z) {
        Ok(r) => Ok(SpectralValue {
            value: d * r.value,
            error: d * r.error + 4.0 * f64::EPSILON * (d * r.value).abs(),
            backend: Backend::ClosedForm1F2,
            fell_back: false,
        }),
        Err(Error::PrecisionLoss { .. }) => {
            let e = hankel_quadrature(&RadialKernel::h(mu, nu)?, m, t)?;
            Ok(SpectralValue {
                value: e.value,
                error: e.error,
                backend: Backend::Quadrature,
                fell_back: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// One term c · h_{μ,ν}(x/β) of a kernel written as a combination of
/// rescaled h-kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTerm {
    pub coef: f64,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Writes `k` as Σ c·h_{μ,ν}(x/β) when its family allows it.
pub fn h_decomposition(k: &RadialKernel) -> Option<Vec<HTerm>> {
    let one = |coef: f64, mu: f64, nu: f64| {
        Some(vec![HTerm {
            coef,
            beta: 1.0,
            mu,
            nu,
        }])
    };
    match k.family() {
        Family::H { mu, nu } => one(1.0, *mu, *nu),
        Family::Askey { mu } => one(*mu, *mu, 1.0),
        Family::Wendland { mu, k } => {
            let kf = *k as f64;
            let norm = 2f64.powi(*k as i32) * specfn::gamma_fn(kf + 1.0).ok()?;
            one(mu / norm, *mu, kf + 1.0)
        }
        Family::Buhmann(p) if p.delta == 1.0 && p.alpha == 2.0 * p.nu - 1.0 => one(1.0, p.mu, p.nu),
        Family::Difference(d) => {
            if d.is_degenerate() {
                return Some(Vec::new());
            }
            Some(vec![
                HTerm {
                    coef: d.beta2.powf(d.eps),
                    beta: d.beta2,
                    mu: d.mu,
                    nu: d.nu,
                },
                HTerm {
                    coef: -d.beta1.powf(d.eps),
                    beta: d.beta1,
                    mu: d.mu,
                    nu: d.nu,
                },
            ])
        }
        Family::Scaled { inner, beta } => Some(
            h_decomposition(inner)?
                .into_iter()
                .map(|h| HTerm {
                    beta: h.beta * beta,
                    ..h
                })
                .collect(),
        ),
        _ => None,
    }
}

/// Hankel-transform evaluator for a kernel in ℝ^m.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub kernel: RadialKernel,
    pub m: u32,
    pub backend: Backend,
    terms: Option<Vec<HTerm>>,
}

impl SpectralDensity {
    pub fn new(kernel: RadialKernel, m: u32, backend: Backend) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let terms = h_decomposition(&kernel);
        if backend == Backend::ClosedForm1F2 && terms.is_none() {
            return Err(Error::Input(format!(
                "closed-form spectrum needs a kernel built from h-kernels, got {:?}",
                kernel.family()
            )));
        }
        if let Some(ts) = &terms {
            for h in ts {
                check_h_params(m, h.mu, h.nu)?;
            }
        }
        Ok(SpectralDensity {
            kernel,
            m,
            backend,
            terms,
        })
    }

    pub fn has_closed_form(&self) -> bool {
        self.terms.is_some()
    }

    pub fn eval(&self, t: f64) -> Result<SpectralValue> {
        let closed = match self.backend {
            Backend::Quadrature => None,
            _ => self.terms.as_ref(),
        };
        match closed {
            Some(terms) => {
                let mut out = SpectralValue {
                    value: 0.0,
                    error: 0.0,
                    backend: Backend::ClosedForm1F2,
                    fell_back: false,
                };
                for h in terms {
                    let s = hankel_h_closed(self.m, h.mu, h.nu, h.beta * t)?;
                    let c = h.coef * h.beta.powi(self.m as i32);
                    out.value += c * s.value;
                    out.error += c.abs() * s.error;
                    if s.fell_back {
                        out.fell_back = true;
                        out.backend = Backend::Quadrature;
                    }
                }
                Ok(out)
            }
            None => {
                let e = hankel_quadrature(&self.kernel, self.m, t)?;
                Ok(SpectralValue {
                    value: e.value,
                    error: e.error,
                    backend: Backend::Quadrature,
                    fell_back: false,
                })
            }
        }
    }

    pub fn eval_grid(&self, ts: &[f64], exec: Exec) -> Result<Vec<SpectralValue>> {
        par::try_map(exec, ts, |&t| self.eval(t))
    }
}

/// Constants of the h-kernel spectrum: D = 𝔉_m(h_{μ,ν})(0) and
/// C = D·Γ(μ+m−1+2ν), the numerator of its Laplace-transform identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstants {
    pub d: f64,
    pub c: f64,
}

impl SpectralConstants {
    pub fn new(m: u32, mu: f64, nu: f64) -> Result<Self> {
        let d = d_constant(m, mu, nu)?;
        let c = d * specfn::gamma_fn(mu + m as f64 - 1.0 + 2.0 * nu)?;
        Ok(SpectralConstants { d, c })
    }
}

/// C(m,μ,ν) / (x^μ (1+x²)^{(m−1)/2+ν}).
pub fn laplace_identity_rhs(m: u32, mu: f64, nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    let c = SpectralConstants::new(m, mu, nu)?.c;
    let n = 0.5 * (m as f64 - 1.0) + nu;
    Ok(c / (x.powf(mu) * (1.0 + x * x).powf(n)))
}

/// Numeric Laplace transform of t^{m−1+2ν+μ−1} 𝔉_m(h_{μ,ν})(t) at x, the
/// left side of the identity evaluated by [`laplace_identity_rhs`].
pub fn laplace_identity_lhs(m: u32, mu: f64, nu: f64, x: f64) -> Result<Estimate> {
    check_h_params(m, mu, nu)?;
    if !(x > 0.0) {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    let p = m as f64 - 2.0 + 2.0 * nu + mu;
    // Cut where e^{−xt} t^p has fallen 40 e-folds below its peak.
    let level = |t: f64| x * t - p.max(0.0) * t.max(1e-300).ln();
    let peak = (p.max(0.0) / x).max(1e-300);
    let mut cut = (peak + 50.0 / x).max(1.0);
    while level(cut) - level(peak) < 40.0 {
        cut *= 1.5;
    }
    let density = SpectralDensity::new(RadialKernel::h(mu, nu)?, m, Backend::Auto)?;
    let failure = Cell::new(None);
    let e = specfn::laplace_numeric(
        |t| match density.eval(t) {
            Ok(s) => t.powf(p) * s.value,
            Err(err) => {
                failure.set(Some(err));
                0.0
            }
        },
        x,
        cut,
        1e-10,
    )?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn i_integral_at_origin_is_beta() {
        for &(d, mu, nu, a) in &[(1.0, 2.0, 1.0, 1.0), (2.0, 0.5, 1.5, 0.3), (1.0, 3.0, 0.7, -0.4)] {
            let e = i_integral(d, mu, nu, a, 0.0).unwrap();
            let want = specfn::beta_fn((a + 1.0) / d, mu).unwrap() / d * specfn::j_norm(nu - 0.5, 0.0).unwrap();
            assert_relative_eq!(e.value, want, max_relative = 1e-11);
        }
    }

    #[test]
    fn i_integral_matches_1f2() {
        // I_{1,μ,ν,2ν−1}(t) = 2^{1/2−ν}Γ(μ)Γ(2ν)/(Γ(ν+1/2)Γ(μ+2ν)) ₁F₂(ν; (μ+2ν)/2, (μ+2ν+1)/2; −t²/4)
        let (mu, nu, t) = (3.0, 1.0, 2.0);
        let g = |x: f64| specfn::gamma_fn(x).unwrap();
        let c = 2f64.powf(0.5 - nu) * g(mu) * g(2.0 * nu) / (g(nu + 0.5) * g(mu + 2.0 * nu));
        let f = specfn::hyp1f2(nu, 0.5 * (mu + 2.0 * nu), 0.5 * (mu + 2.0 * nu + 1.0), -0.25 * t * t).unwrap();
        let e = i_integral(1.0, mu, nu, 2.0 * nu - 1.0, t).unwrap();
        assert_relative_eq!(e.value, c * f, max_relative = 1e-10);
    }

    #[test]
    fn closed_form_at_zero_is_d() {
        for &(m, mu, nu) in &[(1, 2.0, 1.0), (2, 3.0, 1.0), (3, 4.5, 2.0)] {
            let s = hankel_h_closed(m, mu, nu, 0.0).unwrap();
            assert_eq!(s.value, d_constant(m, mu, nu).unwrap());
        }
    }

    #[test]
    fn closed_form_matches_quadrature_small_t() {
        let s = hankel_h_closed(1, 2.0, 1.0, 1.0).unwrap();
        let q = hankel_quadrature(&RadialKernel::h(2.0, 1.0).unwrap(), 1, 1.0).unwrap();
        assert_relative_eq!(s.value, q.value, max_relative = 1e-10);
    }

    #[test]
    fn askey_m1_has_elementary_transform() {
        // ∫₀¹ (1−u)² cos(tu) du √(2/π)·… : compare with the direct cosine integral.
        let k = RadialKernel::askey(2.0).unwrap();
        let t = 3.0;
        let direct = quad::gauss_kronrod(|u| (1.0 - u).powi(2) * (t * u).cos(), 0.0, 1.0, 1e-14, 0.0).unwrap();
        let c = specfn::j_norm(-0.5, 0.0).unwrap();
        let e = hankel_quadrature(&k, 1, t).unwrap();
        assert_relative_eq!(e.value, c * direct.value, max_relative = 1e-11);
        let s = SpectralDensity::new(k, 1, Backend::ClosedForm1F2)
            .unwrap()
            .eval(t)
            .unwrap();
        assert_relative_eq!(s.value, e.value, max_relative = 1e-10);
    }

    #[test]
    fn large_t_falls_back() {
        let s = hankel_h_closed(1, 2.0, 1.0, 200.0).unwrap();
        assert!(s.fell_back);
        assert_eq!(s.backend, Backend::Quadrature);
    }

    #[test]
    fn laplace_rhs_example() {
        let v = laplace_identity_rhs(1, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, (2.0 / PI).sqrt() / 2.0, max_relative = 1e-14);
        assert!(laplace_identity_rhs(1, 2.0, 1.0, 1e8).unwrap() < 1e-30);
    }

    #[test]
    fn constants_relation() {
        let c = SpectralConstants::new(2, 3.0, 1.0).unwrap();
        assert_relative_eq!(c.c, c.d * specfn::gamma_fn(6.0).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn closed_backend_rejected_for_general_buhmann() {
        let p = crate::kernels::BuhmannParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
        assert!(SpectralDensity::new(RadialKernel::buhmann(p), 1, Backend::ClosedForm1F2).is_err());
        assert!(SpectralDensity::new(RadialKernel::buhmann(p), 1, Backend::Auto).is_ok());
    }
}
