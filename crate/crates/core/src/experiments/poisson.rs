//! `Σ_{n∈Z} (−1)^n·sinc²(εn) = 0`: the integer sum of a function whose
//! spectrum lies in `[π−2ε, π+2ε] ⊂ [0, 2π]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponential::sinc;

pub const MIN_TRUNCATION: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub epsilon: f64,
    pub truncation: u64,
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub passes: bool,
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= PI / 2.0 {
        Ok(())
    } else {
        Err(Error::param("epsilon", format!("must lie in (0, π/2], got {eps}")))
    }
}

pub(crate) fn check_truncation(m: u64) -> Result<()> {
    if m >= MIN_TRUNCATION {
        Ok(())
    } else {
        Err(Error::param("truncation", format!("must be at least {MIN_TRUNCATION}, got {m}")))
    }
}

/// `Σ_{|n|≤M} f(n)` for `f(x) = e^{iπx}·(sin(εx)/(εx))²`, against
/// `2/(ε²M)` plus a summation rounding allowance `(2M+1)·ε_mach`.
pub fn poisson_sum_check(epsilon: f64, truncation: u64) -> Result<PoissonReport> {
    check_epsilon(epsilon)?;
    check_truncation(truncation)?;
    let half: f64 = (1..=truncation)
        .map(|n| {
            let s = sinc(epsilon * n as f64);
            if n % 2 == 0 { s * s } else { -s * s }
        })
        .sum();
    let partial_sum = 1.0 + 2.0 * half;
    let m = truncation as f64;
    let tail_bound = 2.0 / (epsilon * epsilon * m) + (2.0 * m + 1.0) * f64::EPSILON;
    Ok(PoissonReport {
        epsilon,
        truncation,
        partial_sum,
        tail_bound,
        passes: partial_sum.abs() <= tail_bound,
    })
}
