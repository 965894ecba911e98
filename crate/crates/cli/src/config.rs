use serde::Serialize;

use crate::CliError;

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Base sample count per suite.
    pub samples: usize,
    /// Series order for oracle comparisons.
    pub truncation: usize,
    pub atol: f64,
    pub rtol: f64,
    /// Samples stay inside `|q| < 1 - boundary_margin`.
    pub boundary_margin: f64,
    /// Replaces every check tolerance when set.
    pub tol: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            samples: 1000,
            truncation: 64,
            atol: 1e-12,
            rtol: 1e-9,
            boundary_margin: 1e-3,
            tol: None,
        }
    }
}

impl RunConfig {
    pub fn validate(self) -> Result<Self, CliError> {
        if self.samples < 1 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if !(self.boundary_margin > 0.0 && self.boundary_margin < 1.0) {
            return Err(CliError::Usage(format!("boundary margin must lie in (0, 1), got {}", self.boundary_margin)));
        }
        if !(self.atol > 0.0 && self.rtol > 0.0) {
            return Err(CliError::Usage("--atol and --rtol must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        if self.truncation < 1 {
            return Err(CliError::Usage("--truncation must be at least 1".into()));
        }
        Ok(self)
    }

    /// The check tolerance: `--tol` if given, else `default`.
    pub fn tolerance(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default().validate().unwrap();
        assert_eq!((c.seed, c.samples, c.truncation), (7, 1000, 64));
        assert_eq!(c.tolerance(1e-11), 1e-11);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            RunConfig { samples: 0, ..Default::default() },
            RunConfig { boundary_margin: 1.0, ..Default::default() },
            RunConfig { atol: 0.0, ..Default::default() },
            RunConfig { tol: Some(-1.0), ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn tol_overrides() {
        let c = RunConfig { tol: Some(1e-20), ..Default::default() };
        assert_eq!(c.tolerance(1e-11), 1e-20);
    }
}
