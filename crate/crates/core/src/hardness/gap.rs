//! Width-gap certificate between satisfiable and unsatisfiable reductions.
//!
//! A satisfiable formula reaches width exactly `1/sqrt(l+1)`. An
//! unsatisfiable one is capped by the chord bound
//! `sqrt(12 a^2 x / (12 a^2 + x))` with `x = 1/(l+1)`, using the all-active
//! clause norm `||q||^2 = 12 a^2`; clauses with repeated literals have
//! smaller norms, and the bound is monotone in `||q||`, so it still holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub sat_width: f64,
    pub unsat_width_bound: f64,
    pub epsilon_star: f64,
}

pub fn gap_certificate(l: usize, alpha: f64) -> Result<GapCertificate> {
    if l == 0 {
        return Err(Error::InvalidParam("l must be >= 1".into()));
    }
    if !(alpha.is_finite() && alpha > 0.5) {
        return Err(Error::InvalidParam(format!(
            "gap certificate requires alpha > 1/2, got {alpha}"
        )));
    }
    let x = 1.0 / (l as f64 + 1.0);
    let sat_width = x.sqrt();
    let q_sq = 12.0 * alpha * alpha;
    let unsat_width_bound = (q_sq * x / (q_sq + x)).sqrt();
    let epsilon_star = 1.0 - unsat_width_bound / sat_width;
    Ok(GapCertificate {
        sat_width,
        unsat_width_bound,
        epsilon_star,
    })
}
