//! Data behind the Wendland smoothness table and the three-panel figure of
//! Wendland functions against their weighted differences.

use crate::error::Result;
use crate::kernels::{DiffParams, RadialKernel};
use crate::par::{self, Exec};
use crate::smoothness::{predict_order, Order};

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub k: u32,
    /// ψ_{μ,k} with its polynomial factor normalized to start at 1.
    pub wendland: &'static str,
    /// Smoothness of ψ_{μ,k} at the origin.
    pub before: u32,
    /// Smoothness of f_{μ,k+1,2k+1,β₁,β₂} at the origin for μ ∉ {1, 2}.
    pub after: Order,
}

pub const TABLE1_NOTE: &str =
    "for mu in {1, 2} the difference kernel is an even polynomial near the origin, so D_after is infinite";

/// Rows k = 0, 1, 2; `after` comes from [`predict_order`] at a generic μ.
pub fn table1() -> Result<Vec<Table1Row>> {
    const FORMS: [&str; 3] = [
        "(1-x)_+^mu",
        "(1-x)_+^(mu+1) (1+(mu+1)x)",
        "(1-x)_+^(mu+2) (1+(mu+2)x+((mu+2)^2-1)x^2/3)",
    ];
    (0..3u32)
        .map(|k| {
            let nu = k as f64 + 1.0;
            Ok(Table1Row {
                k,
                wendland: FORMS[k as usize],
                before: 2 * k,
                after: predict_order(3.5, nu, 2.0 * nu - 1.0)?,
            })
        })
        .collect()
}

/// One panel: normalized Wendland curves at β = 1 and β = 0.75 and the
/// normalized difference kernel, sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePanel {
    pub k: u32,
    pub mu: f64,
    pub diff: DiffParams,
    pub x: Vec<f64>,
    pub wendland_unit: Vec<f64>,
    pub wendland_short: Vec<f64>,
    pub difference: Vec<f64>,
}

pub const FIGURE_SAMPLES: usize = 512;
pub const FIGURE_X_MAX: f64 = 1.05;
pub const FIGURE_BETA1: f64 = 0.75;
pub const FIGURE_BETA2: f64 = 1.0;

/// The kernels of panel k in dimension d: ψ_{μ,k}, ψ_{μ,k}(·/0.75) and
/// f_{μ,k+1,2k+1,0.75,1} with μ = (d+1)/2 + k + 3.
pub fn figure1_kernels(k: u32, d: u32) -> Result<(f64, RadialKernel, RadialKernel, DiffParams)> {
    let mu = 0.5 * (d as f64 + 1.0) + k as f64 + 3.0;
    let nu = k as f64 + 1.0;
    let w = RadialKernel::wendland(mu, k)?;
    let ws = w.clone().scaled(FIGURE_BETA1)?;
    let diff = DiffParams::new(mu, nu, 2.0 * nu - 1.0, FIGURE_BETA1, FIGURE_BETA2)?;
    Ok((mu, w, ws, diff))
}

fn normalized(k: &RadialKernel, xs: &[f64], exec: Exec) -> Result<Vec<f64>> {
    let v0 = k.eval(0.0)?;
    Ok(k.eval_grid(xs, exec)?.into_iter().map(|v| v / v0).collect())
}

pub fn figure1(d: u32, exec: Exec) -> Result<Vec<FigurePanel>> {
    let x: Vec<f64> = (0..FIGURE_SAMPLES)
        .map(|i| FIGURE_X_MAX * i as f64 / (FIGURE_SAMPLES - 1) as f64)
        .collect();
    (0..3u32)
        .map(|k| {
            let (mu, w, ws, diff) = figure1_kernels(k, d)?;
            let f = RadialKernel::difference(diff);
            let curves = par::try_map(exec, &[&w, &ws, &f], |kern| normalized(kern, &x, Exec::Sequential))?;
            let mut it = curves.into_iter();
            Ok(FigurePanel {
                k,
                mu,
                diff,
                x: x.clone(),
                wendland_unit: it.next().unwrap_or_default(),
                wendland_short: it.next().unwrap_or_default(),
                difference: it.next().unwrap_or_default(),
            })
        })
        .collect()
}
