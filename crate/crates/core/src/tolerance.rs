use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Accuracy targets shared by the series and quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    /// Absolute floor below which differences are treated as zero.
    pub abs: f64,
    pub max_terms: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-12,
            abs: 1e-300,
            max_terms: 10_000,
        }
    }
}

pub const ENV_VAR: &str = "BUHMANN_TOL";

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_terms: usize) -> Result<Self> {
        if !(rel > 0.0) || !rel.is_finite() {
            return Err(Error::Input(format!("relative tolerance must be positive, got {rel}")));
        }
        if !(abs >= 0.0) {
            return Err(Error::Input(format!(
                "absolute tolerance must be nonnegative, got {abs}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::Input("max_terms must be at least 1".into()));
        }
        Ok(Tolerance { rel, abs, max_terms })
    }

    pub fn with_rel(self, rel: f64) -> Self {
        Tolerance { rel, ..self }
    }

    /// Process-wide default; `BUHMANN_TOL` replaces the relative tolerance.
    /// The variable is read once.
    pub fn global() -> Tolerance {
        static GLOBAL: OnceLock<Tolerance> = OnceLock::new();
        *GLOBAL.get_or_init(|| {
            let base = Tolerance::default();
            match std::env::var(ENV_VAR) {
                Ok(s) => match s.trim().parse::<f64>() {
                    Ok(r) if r > 0.0 && r < 1.0 => base.with_rel(r),
                    _ => base,
                },
                Err(_) => base,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(Tolerance::new(0.0, 0.0, 10).is_err());
        assert!(Tolerance::new(1e-10, 0.0, 0).is_err());
        assert!(Tolerance::new(f64::NAN, 0.0, 1).is_err());
        assert!(Tolerance::new(1e-10, 0.0, 1).is_ok());
    }
}
