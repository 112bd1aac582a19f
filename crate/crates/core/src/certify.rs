//! Positive-definiteness certification for difference kernels
//! f = β₂^ε h_{μ,ν}(·/β₂) − β₁^ε h_{μ,ν}(·/β₁) in ℝ^m.
//!
//! Rule-based verdicts come from sufficient/necessary parameter conditions.
//! Numeric checks (spectral monotonicity, finite-difference complete
//! monotonicity, Gram eigenvalues) can refute with a witness; when they pass
//! they are evidence on a finite grid, and certificates say so.

use std::fmt;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interp::{build_gram, PointSet};
use crate::kernels::{DiffParams, RadialKernel};
use crate::par::{self, Exec};
use crate::quad::{self, Estimate};
use crate::spectral::{Backend, SpectralDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::Undecided => "undecided",
        })
    }
}

/// What backs a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    /// A proven parameter condition.
    Rule,
    /// A numeric check on a finite grid.
    Numeric,
    /// Random Gram matrices.
    Empirical,
}

/// A numeric counterexample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// t^{ε+m}𝔉_m(h)(t) drops by `drop` between `t_prev` and `t`.
    SpectralDecrease {
        t_prev: f64,
        t: f64,
        drop: f64,
        tolerance: f64,
    },
    /// (−1)^n Δ_h^n f(x) = `value` < −`tolerance`.
    FiniteDifference {
        x: f64,
        h: f64,
        order: u32,
        value: f64,
        tolerance: f64,
    },
    /// Smallest and largest Gram eigenvalue.
    Eigenvalues { lambda_min: f64, lambda_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    /// Short label of the rule or check that decided.
    pub rule: String,
    pub witness: Option<Witness>,
    pub m: u32,
    pub evidence: Evidence,
    pub note: Option<String>,
}

impl Certificate {
    fn rule(verdict: Verdict, rule: &str, m: u32) -> Self {
        Certificate {
            verdict,
            rule: rule.to_string(),
            witness: None,
            m,
            evidence: Evidence::Rule,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ev = match self.evidence {
            Evidence::Rule => "rule",
            Evidence::Numeric => "numeric evidence, grid-limited",
            Evidence::Empirical => "empirical",
        };
        write!(
            f,
            "verdict: {}\nrule: {}\nevidence: {}\nm: {}",
            self.verdict, self.rule, ev, self.m
        )?;
        match self.witness {
            Some(Witness::SpectralDecrease { t_prev, t, drop, tolerance }) => write!(
                f,
                "\nwitness: t^(eps+m) F_m(h)(t) decreases between t={t_prev:.9e} and t={t:.9e} by {drop:.6e} (tolerance {tolerance:.3e})"
            )?,
            Some(Witness::FiniteDifference { x, h, order, value, tolerance }) => write!(
                f,
                "\nwitness: (-1)^{order} finite difference at x={x:.9e}, h={h:.3e} equals {value:.6e} (tolerance {tolerance:.3e})"
            )?,
            Some(Witness::Eigenvalues { lambda_min, lambda_max }) => {
                write!(f, "\nwitness: lambda_min={lambda_min:.6e}, lambda_max={lambda_max:.6e}")?
            }
            None => {}
        }
        if let Some(n) = &self.note {
            write!(f, "\nnote: {n}")?;
        }
        Ok(())
    }
}

/// Relative slack used when comparing ε with 2ν−1.
const EQ_SLACK: f64 = 1e-12;

fn eps_threshold(nu: f64) -> f64 {
    2.0 * nu - 1.0
}

fn eps_cmp(eps: f64, nu: f64) -> std::cmp::Ordering {
    let th = eps_threshold(nu);
    if (eps - th).abs() <= EQ_SLACK * th.abs().max(1.0) {
        std::cmp::Ordering::Equal
    } else {
        eps.total_cmp(&th)
    }
}

/// Smallest μ for which every ε ≥ 2ν−1 gives a positive definite kernel in ℝ^m.
pub fn mu_bound(m: u32, nu: f64) -> f64 {
    0.5 * (m as f64 - 1.0) + nu + 3.0
}

fn check_problem_params(m: u32, mu: f64, nu: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(mu > 0.0 && nu > 0.5 && mu + nu > 1.0) {
        return Err(Error::domain(format!(
            "need mu > 0, nu > 1/2, mu + nu > 1; got mu={mu}, nu={nu}"
        )));
    }
    Ok(())
}

/// The mixed condition for a given n ∈ {1, 2, 3}.
fn mixed_condition(m: u32, mu: f64, nu: f64, eps: f64, n: u32) -> bool {
    let mf = m as f64;
    let nf = n as f64;
    let p = 2f64.powi(n as i32 - 1);
    let eps_ok = eps >= (mf + (2.0 * nu - 1.0) * (p + 1.0)) / p - EQ_SLACK;
    let shift = 0.5 * (mf - 1.0) + nu + 1.0 - nf;
    let mu_ok = mu - nf >= (mf - 1.0 + 2.0 * nu + 2.0 - 2.0 * nf).min(shift.max(1.0));
    eps_ok && shift > 0.0 && mu_ok
}

/// Parameter rules for f_{μ,ν,ε,β₁,β₂} ∈ Φ_m for all β₂ > β₁ > 0.
pub fn certify_sufficient(m: u32, mu: f64, nu: f64, eps: f64) -> Result<Certificate> {
    use std::cmp::Ordering::*;
    check_problem_params(m, mu, nu)?;
    let ord = eps_cmp(eps, nu);
    if ord == Less {
        return Ok(Certificate::rule(Verdict::Refuted, "eps-necessary", m)
            .with_note(format!("eps = {eps} < 2nu - 1 = {}", eps_threshold(nu))));
    }
    let bound = mu_bound(m, nu);
    if mu >= bound {
        return Ok(Certificate::rule(Verdict::Certified, "mu-sufficient", m)
            .with_note(format!("eps >= 2nu - 1 and mu >= (m-1)/2 + nu + 3 = {bound}")));
    }
    if ord == Equal {
        return Ok(Certificate::rule(Verdict::Refuted, "mu-boundary-iff", m)
            .with_note(format!("eps = 2nu - 1 requires mu >= {bound}")));
    }
    for n in 1..=3 {
        if mixed_condition(m, mu, nu, eps, n) {
            return Ok(Certificate::rule(
                Verdict::Certified,
                &format!("mixed-sufficient-n{n}"),
                m,
            ));
        }
    }
    Ok(Certificate::rule(Verdict::Undecided, "outside-hypotheses", m)
        .with_note("between the necessary and the sufficient conditions; no rule applies"))
}

/// A complete-monotonicity question answered from known facts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CmQuery {
    /// x^{−μ} (1+x²)^{−ν}
    Power { mu: f64, nu: f64 },
    /// (a + x²) / (x^n (1+x²)^n)
    Rational { a: f64, n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmVerdict {
    Cm,
    NotCm,
    Unknown,
}

pub fn cm_rule(q: CmQuery) -> CmVerdict {
    match q {
        CmQuery::Power { mu, nu } => {
            let cm = (nu >= 1.0 && mu >= nu) || (nu > 0.0 && nu < 1.0 && mu >= 1.0) || (nu > 0.0 && mu >= 2.0 * nu);
            if cm {
                return CmVerdict::Cm;
            }
            let not_cm = (mu <= 0.0 && nu != 0.0) || mu < nu || (mu > 0.0 && mu == nu && mu < 1.0);
            if not_cm {
                CmVerdict::NotCm
            } else {
                CmVerdict::Unknown
            }
        }
        CmQuery::Rational { a, n } => {
            if !(1..=3).contains(&n) {
                return CmVerdict::Unknown;
            }
            if a >= 1.0 / (2f64.powi(n as i32 - 1) + 1.0) {
                CmVerdict::Cm
            } else {
                CmVerdict::NotCm
            }
        }
    }
}

/// Default grid for spectral monotonicity: 2000 uniform points in [0.01, 50].
pub fn default_t_grid() -> Vec<f64> {
    let n = 2000;
    (0..n)
        .map(|i| 0.01 + (50.0 - 0.01) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Checks that t^{ε+m} 𝔉_m(h_{μ,ν})(t) is nondecreasing on the grid.
pub fn check_spectral_monotone(m: u32, mu: f64, nu: f64, eps: f64, t_grid: &[f64]) -> Result<Certificate> {
    check_spectral_monotone_with(m, mu, nu, eps, t_grid, Exec::default())
}

pub fn check_spectral_monotone_with(
    m: u32,
    mu: f64,
    nu: f64,
    eps: f64,
    t_grid: &[f64],
    exec: Exec,
) -> Result<Certificate> {
    if t_grid.len() < 2 || t_grid[0] <= 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input("t grid must be positive and strictly increasing".into()));
    }
    let sd = SpectralDensity::new(RadialKernel::h(mu, nu)?, m, Backend::Auto)?;
    let vals = match sd.eval_grid(t_grid, exec) {
        Ok(v) => v,
        Err(e) => {
            return Ok(Certificate {
                verdict: Verdict::Undecided,
                rule: "spectral-monotone".into(),
                witness: None,
                m,
                evidence: Evidence::Numeric,
                note: Some(format!("spectral evaluation failed: {e}")),
            })
        }
    };
    let power = eps + m as f64;
    for i in 1..t_grid.len() {
        let (a, b) = (&vals[i - 1], &vals[i]);
        // Compare t_i^p F_i with t_{i-1}^p F_{i-1} after dividing by t_{i-1}^p.
        let r = (t_grid[i] / t_grid[i - 1]).powf(power);
        let diff = r * b.value - a.value;
        let tol = 10.0 * (r * b.error + a.error) + 1e-13 * (r * b.value.abs() + a.value.abs());
        if diff < -tol {
            let scale = t_grid[i - 1].powf(power);
            let (drop, tolerance) = if scale.is_finite() && scale > 0.0 {
                (-diff * scale, tol * scale)
            } else {
                (-diff, tol)
            };
            return Ok(Certificate {
                verdict: Verdict::Refuted,
                rule: "spectral-monotone".into(),
                witness: Some(Witness::SpectralDecrease {
                    t_prev: t_grid[i - 1],
                    t: t_grid[i],
                    drop,
                    tolerance,
                }),
                m,
                evidence: Evidence::Numeric,
                note: None,
            });
        }
    }
    Ok(Certificate {
        verdict: Verdict::Certified,
        rule: "spectral-monotone".into(),
        witness: None,
        m,
        evidence: Evidence::Numeric,
        note: Some(format!(
            "nondecreasing on {} points in [{}, {}]; evidence, not proof",
            t_grid.len(),
            t_grid[0],
            t_grid[t_grid.len() - 1]
        )),
    })
}

/// Result of a finite-difference complete-monotonicity scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CmCheck {
    ConsistentWithCm,
    NotCm(Witness),
}

/// Step sizes, as fractions of x, used for every difference order.
pub const CM_STEP_FRACTIONS: [f64; 5] = [1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0];
pub const CM_MAX_ORDER: u32 = 12;

/// Default x grid: 80 log-spaced points in [0.01, 100].
pub fn default_x_grid() -> Vec<f64> {
    let n = 80;
    (0..n).map(|i| 0.01 * 1e4f64.powf(i as f64 / (n - 1) as f64)).collect()
}

fn binomials(n: u32) -> Vec<f64> {
    let mut c = vec![1.0f64; n as usize + 1];
    for k in 1..=n as usize {
        c[k] = c[k - 1] * (n as usize + 1 - k) as f64 / k as f64;
    }
    c
}

/// Scans (−1)^n Δ_h^n f(x) ≥ −tol for n = 0..=max_order, every x in the
/// grid and every step in [`CM_STEP_FRACTIONS`]. The forward difference of a
/// completely monotone function has sign (−1)^n for every step, so a
/// violation beyond rounding is a certificate that f is not CM.
pub fn check_cm_numeric<F: Fn(f64) -> f64 + Sync>(f: F, max_order: u32, x_grid: &[f64]) -> Result<CmCheck> {
    check_cm_numeric_with(f, max_order, x_grid, Exec::default())
}

pub fn check_cm_numeric_with<F: Fn(f64) -> f64 + Sync>(
    f: F,
    max_order: u32,
    x_grid: &[f64],
    exec: Exec,
) -> Result<CmCheck> {
    if max_order > CM_MAX_ORDER {
        return Err(Error::Input(format!(
            "max_order must be at most {CM_MAX_ORDER}, got {max_order}"
        )));
    }
    if x_grid.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Input("x grid must be positive".into()));
    }
    let table: Vec<Vec<f64>> = (0..=max_order).map(binomials).collect();
    let found = par::map(exec, x_grid, |&x| {
        for frac in CM_STEP_FRACTIONS {
            let h = x * frac;
            let fs: Vec<f64> = (0..=max_order).map(|k| f(x + k as f64 * h)).collect();
            if let Some(bad) = fs.iter().find(|v| !v.is_finite()) {
                return Some(Err(Error::Input(format!("function is not finite near x={x}: {bad}"))));
            }
            for n in 0..=max_order {
                let c = &table[n as usize];
                let mut s = 0.0;
                let mut mag = 0.0;
                for k in 0..=n as usize {
                    // (−1)^n Δ^n f(x) = Σ_k (−1)^k C(n,k) f(x+kh)
                    let term = c[k] * fs[k];
                    if k % 2 == 0 {
                        s += term;
                    } else {
                        s -= term;
                    }
                    mag += term.abs();
                }
                let tol = 8.0 * 1e-15 * mag;
                if s < -tol {
                    return Some(Ok(Witness::FiniteDifference {
                        x,
                        h,
                        order: n,
                        value: s,
                        tolerance: tol,
                    }));
                }
            }
        }
        None
    });
    match found.into_iter().flatten().next() {
        Some(r) => r.map(CmCheck::NotCm),
        None => Ok(CmCheck::ConsistentWithCm),
    }
}

/// (ε−2ν+1+(ε+m)x²) / (x^μ (1+x²)^{(m−1)/2+ν+1}), completely monotone
/// exactly when the difference kernel is positive definite in ℝ^m for all
/// β₂ > β₁ > 0.
pub fn spectral_cm_target(m: u32, mu: f64, nu: f64, eps: f64) -> impl Fn(f64) -> f64 + Sync + Send + Copy {
    let mf = m as f64;
    let p = 0.5 * (mf - 1.0) + nu + 1.0;
    move |x: f64| (eps - 2.0 * nu + 1.0 + (eps + mf) * x * x) / (x.powf(mu) * (1.0 + x * x).powf(p))
}

/// x^{−μ} [ (1+x²)^{−n} − a^{2ν−1−ε} (1+a²x²)^{−n} ], n = (m−1)/2+ν, which is
/// completely monotone exactly when the kernel with β₂/β₁ = a is positive
/// definite in ℝ^m.
pub fn fixed_scale_target(m: u32, mu: f64, nu: f64, eps: f64, a: f64) -> impl Fn(f64) -> f64 + Sync + Send + Copy {
    let n = 0.5 * (m as f64 - 1.0) + nu;
    let la = (2.0 * nu - 1.0 - eps) * a.ln();
    move |x: f64| {
        let l1 = -n * (x * x).ln_1p();
        let l2 = la - n * (a * a * x * x).ln_1p();
        -l1.exp() * (l2 - l1).exp_m1() / x.powf(mu)
    }
}

/// ∫₁^a (ε−2ν+1+(ε+m)x²t²) t^{2ν−ε−2} / (x^μ (1+x²t²)^{(m−1)/2+ν+1}) dt, a
/// scale mixture of [`spectral_cm_target`] equal to [`fixed_scale_target`].
pub fn fixed_scale_mixture(m: u32, mu: f64, nu: f64, eps: f64, a: f64, x: f64) -> Result<Estimate> {
    let mf = m as f64;
    let p = 0.5 * (mf - 1.0) + nu + 1.0;
    quad::gauss_kronrod(
        |t| {
            let xt2 = x * x * t * t;
            (eps - 2.0 * nu + 1.0 + (eps + mf) * xt2) * t.powf(2.0 * nu - eps - 2.0)
                / (x.powf(mu) * (1.0 + xt2).powf(p))
        },
        1.0,
        a,
        1e-13,
        0.0,
    )
}

/// Positive definiteness in ℝ^m for the fixed ratio a = β₂/β₁ > 1.
pub fn certify_fixed_scale(m: u32, mu: f64, nu: f64, eps: f64, a: f64) -> Result<Certificate> {
    check_problem_params(m, mu, nu)?;
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::domain(format!("scale ratio a must exceed 1, got {a}")));
    }
    if eps_cmp(eps, nu) == std::cmp::Ordering::Less {
        return Ok(
            Certificate::rule(Verdict::Refuted, "fixed-scale-necessary", m).with_note(format!(
                "eps = {eps} < 2nu - 1 = {} with beta2 > beta1",
                eps_threshold(nu)
            )),
        );
    }
    let f = fixed_scale_target(m, mu, nu, eps, a);
    let out = match check_cm_numeric(f, CM_MAX_ORDER, &default_x_grid())? {
        CmCheck::ConsistentWithCm => Certificate {
            verdict: Verdict::Certified,
            rule: "fixed-scale-cm".into(),
            witness: None,
            m,
            evidence: Evidence::Numeric,
            note: Some(format!(
                "finite differences up to order {CM_MAX_ORDER} consistent with complete monotonicity"
            )),
        },
        CmCheck::NotCm(w) => Certificate {
            verdict: Verdict::Refuted,
            rule: "fixed-scale-cm".into(),
            witness: Some(w),
            m,
            evidence: Evidence::Numeric,
            note: None,
        },
    };
    Ok(out)
}

/// Rule-based verdict, escalated to numeric checks when no rule applies.
/// A numeric witness refutes; passing numeric checks leaves the verdict
/// undecided with a note, since grids prove nothing.
pub fn certify_escalating(m: u32, mu: f64, nu: f64, eps: f64) -> Result<Certificate> {
    let c = certify_sufficient(m, mu, nu, eps)?;
    if c.verdict != Verdict::Undecided {
        return Ok(c);
    }
    let s = check_spectral_monotone(m, mu, nu, eps, &default_t_grid())?;
    if s.verdict == Verdict::Refuted {
        return Ok(s);
    }
    match check_cm_numeric(spectral_cm_target(m, mu, nu, eps), CM_MAX_ORDER, &default_x_grid())? {
        CmCheck::NotCm(w) => Ok(Certificate {
            verdict: Verdict::Refuted,
            rule: "cm-numeric".into(),
            witness: Some(w),
            m,
            evidence: Evidence::Numeric,
            note: None,
        }),
        CmCheck::ConsistentWithCm => Ok(Certificate {
            verdict: Verdict::Undecided,
            rule: "outside-hypotheses".into(),
            witness: None,
            m,
            evidence: Evidence::Numeric,
            note: Some("no rule applies; spectral monotonicity and finite-difference checks found no violation".into()),
        }),
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_range(k: nalgebra::DMatrix<f64>) -> (f64, f64) {
    if k.nrows() == 0 {
        return (0.0, 0.0);
    }
    let e = SymmetricEigen::new(k).eigenvalues;
    let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Relative eigenvalue floor below which a Gram matrix counts as indefinite.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

/// Uniform random points in [0, side]^m, redrawn until pairwise distinct.
pub fn random_points(m: u32, n: usize, side: f64, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.random::<f64>() * side).collect())
            .collect();
        if let Ok(ps) = PointSet::new(m as usize, pts) {
            return ps;
        }
    }
}

/// Empirical check: Gram matrix of the difference kernel on random points
/// in [0, 3·max(β₁,β₂)]^m.
pub fn psd_matrix_check(d: &DiffParams, m: u32, n_points: usize, seed: u64) -> Result<Certificate> {
    if n_points == 0 || n_points > 500 {
        return Err(Error::Input(format!("n_points must be in 1..=500, got {n_points}")));
    }
    if m == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let k = RadialKernel::difference(*d);
    let ps = random_points(m, n_points, 3.0 * d.support(), seed);
    let g = build_gram(&ps, &k, Exec::default())?;
    let (lo, hi) = eigen_range(g.matrix);
    let witness = Witness::Eigenvalues {
        lambda_min: lo,
        lambda_max: hi,
    };
    let refuted = lo < -EIGEN_TOLERANCE * hi.max(0.0);
    Ok(Certificate {
        verdict: if refuted { Verdict::Refuted } else { Verdict::Certified },
        rule: "gram-eigen".into(),
        witness: Some(witness),
        m,
        evidence: Evidence::Empirical,
        note: Some(format!("{n_points} points, seed {seed}")),
    })
}
