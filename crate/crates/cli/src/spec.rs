//! Textual kernel specifications such as `h:mu=2,nu=1` or
//! `diff:mu=4.5,nu=1,eps=1,b1=0.75,b2=1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use buhmann::{BuhmannParams, DiffParams, RadialKernel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Buhmann(BuhmannParams),
    H { mu: f64, nu: f64 },
    Wendland { mu: f64, k: u32 },
    Askey { mu: f64 },
    Diff(DiffParams),
}

const FAMILIES: &str = "buhmann, h, wendland, askey, diff";

struct Fields<'a> {
    family: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(family: &'a str, body: &'a str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("{family}: expected name=value, got {item:?}"))?;
            if map.insert(k.trim(), v.trim()).is_some() {
                bail!("{family}: field {:?} given twice", k.trim());
            }
        }
        Ok(Fields { family, map })
    }

    fn real(&mut self, name: &str) -> Result<f64> {
        let raw = self
            .map
            .remove(name)
            .ok_or_else(|| anyhow!("{}: missing field {name:?}", self.family))?;
        raw.parse()
            .map_err(|_| anyhow!("{}: field {name:?} is not a number: {raw:?}", self.family))
    }

    fn uint(&mut self, name: &str) -> Result<u32> {
        let raw = self
            .map
            .remove(name)
            .ok_or_else(|| anyhow!("{}: missing field {name:?}", self.family))?;
        raw.parse().map_err(|_| {
            anyhow!(
                "{}: field {name:?} must be a nonnegative integer, got {raw:?}",
                self.family
            )
        })
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            bail!("{}: unknown field {k:?}", self.family);
        }
        Ok(())
    }
}

fn check<T>(family: &str, field: &str, r: buhmann::Result<T>) -> Result<T> {
    r.with_context(|| format!("{family}: invalid {field}"))
}

impl FromStr for KernelSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, body) = s.split_once(':').unwrap_or((s, ""));
        let family = family.trim();
        let mut f = Fields::parse(family, body)?;
        let spec = match family {
            "buhmann" => {
                let (delta, mu, nu, alpha) = (f.real("delta")?, f.real("mu")?, f.real("nu")?, f.real("alpha")?);
                KernelSpec::Buhmann(check(family, "parameters", BuhmannParams::new(delta, mu, nu, alpha))?)
            }
            "h" => {
                let (mu, nu) = (f.real("mu")?, f.real("nu")?);
                check(family, "mu/nu", RadialKernel::h(mu, nu))?;
                KernelSpec::H { mu, nu }
            }
            "wendland" => {
                let (mu, k) = (f.real("mu")?, f.uint("k")?);
                check(family, "mu", RadialKernel::wendland(mu, k))?;
                KernelSpec::Wendland { mu, k }
            }
            "askey" => {
                let mu = f.real("mu")?;
                check(family, "mu", RadialKernel::askey(mu))?;
                KernelSpec::Askey { mu }
            }
            "diff" => {
                let (mu, nu, eps) = (f.real("mu")?, f.real("nu")?, f.real("eps")?);
                let (b1, b2) = (f.real("b1")?, f.real("b2")?);
                KernelSpec::Diff(check(family, "parameters", DiffParams::new(mu, nu, eps, b1, b2))?)
            }
            other => bail!("unknown kernel family {other:?} (expected one of {FAMILIES})"),
        };
        f.finish()?;
        Ok(spec)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Buhmann(p) => write!(f, "buhmann:delta={},mu={},nu={},alpha={}", p.delta, p.mu, p.nu, p.alpha),
            KernelSpec::H { mu, nu } => write!(f, "h:mu={mu},nu={nu}"),
            KernelSpec::Wendland { mu, k } => write!(f, "wendland:mu={mu},k={k}"),
            KernelSpec::Askey { mu } => write!(f, "askey:mu={mu}"),
            KernelSpec::Diff(d) => write!(
                f,
                "diff:mu={},nu={},eps={},b1={},b2={}",
                d.mu, d.nu, d.eps, d.beta1, d.beta2
            ),
        }
    }
}

impl KernelSpec {
    pub fn kernel(&self) -> Result<RadialKernel> {
        Ok(match *self {
            KernelSpec::Buhmann(p) => RadialKernel::buhmann(p),
            KernelSpec::H { mu, nu } => RadialKernel::h(mu, nu)?,
            KernelSpec::Wendland { mu, k } => RadialKernel::wendland(mu, k)?,
            KernelSpec::Askey { mu } => RadialKernel::askey(mu)?,
            KernelSpec::Diff(d) => RadialKernel::difference(d),
        })
    }
}

/// `min:max:n` sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            bail!("grid must look like min:max:n, got {s:?}");
        };
        let min: f64 = a
            .trim()
            .parse()
            .map_err(|_| anyhow!("grid min is not a number: {a:?}"))?;
        let max: f64 = b
            .trim()
            .parse()
            .map_err(|_| anyhow!("grid max is not a number: {b:?}"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| anyhow!("grid size is not an integer: {n:?}"))?;
        if n < 2 {
            bail!("grid needs at least 2 points, got {n}");
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            bail!("grid needs finite min < max, got {min}..{max}");
        }
        Ok(Grid { min, max, n })
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}
