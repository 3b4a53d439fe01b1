use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds used whenever a numerical value has to be turned into a
/// discrete decision (rank, equality of angles, equality of matrices).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative threshold on singular values: `s <= eps_rank * s_max` counts as zero.
    pub eps_rank: f64,
    /// Angles closer than this (radians) are considered equal.
    pub eps_angle: f64,
    /// Entrywise / norm threshold for matrix comparisons.
    pub eps_entry: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_rank: 1e-8,
            eps_angle: 1e-7,
            eps_entry: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(eps_rank: f64, eps_angle: f64, eps_entry: f64) -> Result<Self> {
        let tol = Tolerance {
            eps_rank,
            eps_angle,
            eps_entry,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_rank", self.eps_rank),
            ("eps_angle", self.eps_angle),
            ("eps_entry", self.eps_entry),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} must lie in (0, 1e-3)"
                )));
            }
        }
        Ok(())
    }

    pub fn with_eps_angle(mut self, eps_angle: f64) -> Result<Self> {
        self.eps_angle = eps_angle;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eps_rank(mut self, eps_rank: f64) -> Result<Self> {
        self.eps_rank = eps_rank;
        self.validate()?;
        Ok(self)
    }
}
