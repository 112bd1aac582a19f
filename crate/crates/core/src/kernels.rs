//! The Buhmann family φ_{δ,μ,ν,α} and its named specializations.
//!
//! Every kernel is a radial profile on [0, ∞) with compact support; negative
//! arguments are folded to |x| (even extension).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operators;
use crate::par::{self, Exec};
use crate::quad::{self, Estimate};
use crate::specfn;
use crate::tolerance::Tolerance;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Parameters (δ, μ, ν, α) of
/// φ(x) = ∫_x^1 (s²−x²)^{ν−1} (1−s^δ)^{μ−1} s^{α−2ν+1} ds on [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuhmannParams {
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
}

impl BuhmannParams {
    pub fn new(delta: f64, mu: f64, nu: f64, alpha: f64) -> Result<Self> {
        positive("delta", delta)?;
        positive("mu", mu)?;
        positive("nu", nu)?;
        positive("alpha", alpha)?;
        Ok(BuhmannParams { delta, mu, nu, alpha })
    }

    /// φ is continuous on ℝ iff μ + ν − 1 > 0 (α > 0 is already enforced).
    pub fn is_continuous(&self) -> bool {
        self.mu + self.nu - 1.0 > 0.0
    }

    /// φ(0) = B(α/δ, μ)/δ.
    pub fn value_at_zero(&self) -> Result<f64> {
        Ok(specfn::beta_fn(self.alpha / self.delta, self.mu)? / self.delta)
    }
}

/// Parameters of f(x) = β₂^ε h_{μ,ν}(x/β₂) − β₁^ε h_{μ,ν}(x/β₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffParams {
    pub mu: f64,
    pub nu: f64,
    pub eps: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl DiffParams {
    pub fn new(mu: f64, nu: f64, eps: f64, beta1: f64, beta2: f64) -> Result<Self> {
        positive("mu", mu)?;
        if !(nu > 0.5) || !nu.is_finite() {
            return Err(Error::domain(format!("nu must exceed 1/2, got {nu}")));
        }
        if !(mu + nu > 1.0) {
            return Err(Error::domain(format!("mu + nu must exceed 1, got {}", mu + nu)));
        }
        if !eps.is_finite() {
            return Err(Error::domain(format!("eps must be finite, got {eps}")));
        }
        positive("beta1", beta1)?;
        positive("beta2", beta2)?;
        Ok(DiffParams {
            mu,
            nu,
            eps,
            beta1,
            beta2,
        })
    }

    pub fn support(&self) -> f64 {
        self.beta1.max(self.beta2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.beta1 == self.beta2
    }
}

pub type KernelFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A user-supplied radial profile.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub f: Arc<KernelFn>,
    /// Interior points where the profile is not smooth.
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    Buhmann(BuhmannParams),
    H {
        mu: f64,
        nu: f64,
    },
    /// Unnormalized ψ_{μ,k} = I^k (1−x)^μ_+.
    Wendland {
        mu: f64,
        k: u32,
    },
    Askey {
        mu: f64,
    },
    Difference(DiffParams),
    /// inner(x/β)
    Scaled {
        inner: Box<RadialKernel>,
        beta: f64,
    },
    Custom(CustomKernel),
}

/// A compactly supported radial kernel.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    family: Family,
    support: f64,
}

impl RadialKernel {
    pub fn buhmann(p: BuhmannParams) -> Self {
        RadialKernel {
            family: Family::Buhmann(p),
            support: 1.0,
        }
    }

    pub fn h(mu: f64, nu: f64) -> Result<Self> {
        positive("mu", mu)?;
        positive("nu", nu)?;
        Ok(RadialKernel {
            family: Family::H { mu, nu },
            support: 1.0,
        })
    }

    pub fn wendland(mu: f64, k: u32) -> Result<Self> {
        positive("mu", mu)?;
        Ok(RadialKernel {
            family: Family::Wendland { mu, k },
            support: 1.0,
        })
    }

    pub fn askey(mu: f64) -> Result<Self> {
        positive("mu", mu)?;
        Ok(RadialKernel {
            family: Family::Askey { mu },
            support: 1.0,
        })
    }

    pub fn difference(d: DiffParams) -> Self {
        RadialKernel {
            support: d.support(),
            family: Family::Difference(d),
        }
    }

    pub fn scaled(self, beta: f64) -> Result<Self> {
        positive("beta", beta)?;
        Ok(RadialKernel {
            support: self.support * beta,
            family: Family::Scaled {
                inner: Box::new(self),
                beta,
            },
        })
    }

    pub fn custom<F>(name: impl Into<String>, support: f64, breakpoints: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        positive("support", support)?;
        Ok(RadialKernel {
            family: Family::Custom(CustomKernel {
                name: name.into(),
                f: Arc::new(f),
                breakpoints,
            }),
            support,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    /// Interior radii in (0, support) where the profile has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::Difference(d) if !d.is_degenerate() => vec![d.beta1.min(d.beta2)],
            Family::Scaled { inner, beta } => inner.breakpoints().into_iter().map(|b| b * beta).collect(),
            Family::Custom(c) => c
                .breakpoints
                .iter()
                .copied()
                .filter(|&b| b > 0.0 && b < self.support)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Profile value at radius |x|; exactly 0 at and beyond the support.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = x.abs();
        if x.is_nan() {
            return Err(Error::Input("kernel argument is NaN".into()));
        }
        if x >= self.support {
            return Ok(0.0);
        }
        match &self.family {
            Family::Buhmann(p) => buhmann_eval(p, x),
            Family::H { mu, nu } => h_eval(*mu, *nu, x),
            Family::Wendland { mu, k } => wendland_eval(*mu, *k, x),
            Family::Askey { mu } => Ok(askey_eval(*mu, x)),
            Family::Difference(d) => operators::difference_eval(d, x),
            Family::Scaled { inner, beta } => inner.eval(x / beta),
            Family::Custom(c) => (c.f)(x),
        }
    }

    pub fn value_at_zero(&self) -> Result<f64> {
        self.eval(0.0)
    }

    /// Values on a grid, possibly in parallel; order follows `xs`.
    pub fn eval_grid(&self, xs: &[f64], exec: Exec) -> Result<Vec<f64>> {
        par::try_map(exec, xs, |&x| self.eval(x))
    }
}

/// Free-function form of [`RadialKernel::eval`].
pub fn kernel_eval(k: &RadialKernel, x: f64) -> Result<f64> {
    k.eval(x)
}

/// (1 − s^δ) for s = 1 − w, accurate when w is tiny.
fn one_minus_pow(delta: f64, s: f64, w: f64) -> f64 {
    if w < 0.25 {
        -(delta * (-w).ln_1p()).exp_m1()
    } else {
        1.0 - s.powf(delta)
    }
}

fn integration_tol() -> (f64, f64) {
    let t = Tolerance::global();
    (t.rel, t.abs)
}

/// φ_{δ,μ,ν,α}(x) with its quadrature error estimate.
pub fn buhmann_estimate(p: &BuhmannParams, x: f64) -> Result<Estimate> {
    let x = x.abs();
    if x >= 1.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let BuhmannParams { delta, mu, nu, alpha } = *p;
    let pw = alpha - 2.0 * nu + 1.0;
    let (rel, abs) = integration_tol();
    quad::tanh_sinh(
        |n| {
            let s = n.x;
            let a = if nu == 1.0 {
                1.0
            } else {
                (n.from_a * (s + x)).powf(nu - 1.0)
            };
            let b = if mu == 1.0 {
                1.0
            } else {
                one_minus_pow(delta, s, n.from_b).powf(mu - 1.0)
            };
            a * b * s.powf(pw)
        },
        x,
        1.0,
        rel,
        abs,
    )
}

/// Buhmann function φ_{δ,μ,ν,α}(x).
pub fn buhmann_eval(p: &BuhmannParams, x: f64) -> Result<f64> {
    buhmann_estimate(p, x).map(|e| e.value)
}

/// (1−x)^μ_+
pub fn askey_eval(mu: f64, x: f64) -> f64 {
    let x = x.abs();
    if x >= 1.0 {
        0.0
    } else {
        (1.0 - x).powf(mu)
    }
}

/// h_{μ,ν} from the fixed-endpoint representation
/// (1−x)^{μ+ν−1} ∫₀¹ t^{μ−1}(1−t)^{ν−1}(1−t+(1+t)x)^{ν−1} dt.
pub fn h_quadrature(mu: f64, nu: f64, x: f64) -> Result<Estimate> {
    positive("mu", mu)?;
    positive("nu", nu)?;
    let x = x.abs();
    if x >= 1.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (rel, abs) = integration_tol();
    let inner = quad::tanh_sinh(
        |n| {
            let t = n.x;
            let a = if mu == 1.0 { 1.0 } else { n.from_a.powf(mu - 1.0) };
            let b = if nu == 1.0 {
                1.0
            } else {
                (n.from_b * (n.from_b + (1.0 + t) * x)).powf(nu - 1.0)
            };
            a * b
        },
        0.0,
        1.0,
        rel,
        abs,
    )?;
    Ok(inner.scale((1.0 - x).powf(mu + nu - 1.0)))
}

/// h_{μ,ν} from the self-convolution form ∫_x^1 (2u−x) g(u) g(u−x) du with
/// g(u) = u^{μ−1}(1−u²)^{ν−1}. Slower than [`h_quadrature`]; kept as a
/// cross-check.
pub fn h_convolution(mu: f64, nu: f64, x: f64) -> Result<Estimate> {
    positive("mu", mu)?;
    positive("nu", nu)?;
    let x = x.abs();
    if x >= 1.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (rel, abs) = integration_tol();
    quad::tanh_sinh(
        |n| {
            let u = n.x;
            let w = n.from_a;
            let gu = u.powf(mu - 1.0) * (n.from_b * (1.0 + u)).powf(nu - 1.0);
            let gw = w.powf(mu - 1.0) * ((n.from_b + x) * (1.0 + w)).powf(nu - 1.0);
            (u + w) * gu * gw
        },
        x,
        1.0,
        rel,
        abs,
    )
}

/// h_{μ,ν}(x). Integer ν ≤ 3 uses the exact piecewise polynomial
/// h_{μ,k+1} = 2^k k! ψ_{μ,k}/μ; other ν use [`h_quadrature`].
pub fn h_eval(mu: f64, nu: f64, x: f64) -> Result<f64> {
    positive("mu", mu)?;
    positive("nu", nu)?;
    let x = x.abs();
    if x >= 1.0 {
        return Ok(0.0);
    }
    match nu {
        1.0 => Ok(askey_eval(mu, x) / mu),
        2.0 => Ok(2.0 * wendland_closed(mu, 1, x) / mu),
        3.0 => Ok(8.0 * wendland_closed(mu, 2, x) / mu),
        _ => h_quadrature(mu, nu, x).map(|e| e.value),
    }
}

/// ψ_{μ,k} for k ≤ 2 in closed form.
fn wendland_closed(mu: f64, k: u32, x: f64) -> f64 {
    let y = 1.0 - x;
    match k {
        0 => y.powf(mu),
        1 => y.powf(mu + 1.0) * (1.0 + (mu + 1.0) * x) / ((mu + 1.0) * (mu + 2.0)),
        2 => {
            let m2 = mu + 2.0;
            y.powf(mu + 2.0) * (3.0 + 3.0 * m2 * x + (m2 * m2 - 1.0) * x * x)
                / ((mu + 1.0) * m2 * (mu + 3.0) * (mu + 4.0))
        }
        _ => unreachable!("closed forms cover k <= 2"),
    }
}

/// Wendland function ψ_{μ,k} = I^k (1−x)^μ_+, unnormalized (the k-fold
/// Montée of the Askey function). k ≤ 2 are closed-form piecewise
/// polynomials; larger k use ψ_{μ,k} = μ h_{μ,k+1}/(2^k k!).
pub fn wendland_eval(mu: f64, k: u32, x: f64) -> Result<f64> {
    positive("mu", mu)?;
    let x = x.abs();
    if x >= 1.0 {
        return Ok(0.0);
    }
    if k <= 2 {
        return Ok(wendland_closed(mu, k, x));
    }
    let kf = k as f64;
    let norm = 2f64.powi(k as i32) * specfn::gamma_fn(kf + 1.0)?;
    Ok(mu * h_quadrature(mu, kf + 1.0, x)?.value / norm)
}

/// ψ_{μ,k} scaled so that its polynomial factor starts with 1:
/// (1−x)^μ, (1−x)^{μ+1}(1+(μ+1)x), (1−x)^{μ+2}(1+(μ+2)x+((μ+2)²−1)x²/3).
pub fn wendland_table_form(mu: f64, k: u32, x: f64) -> Result<f64> {
    let c = match k {
        0 => 1.0,
        1 => 1.0 / ((mu + 1.0) * (mu + 2.0)),
        2 => 3.0 / ((mu + 1.0) * (mu + 2.0) * (mu + 3.0) * (mu + 4.0)),
        _ => return Err(Error::domain("tabulated Wendland forms exist for k <= 2 only")),
    };
    Ok(wendland_eval(mu, k, x)? / c)
}
