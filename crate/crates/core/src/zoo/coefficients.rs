//! Nonnegative decreasing coefficient sequences with integral-test tails.

use serde::{Deserialize, Serialize};

use crate::error::{HqrError, Result};
use crate::series::CoefficientSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum CoefficientRule {
    /// `a_n = 1/(n+1)`.
    HarmonicTail,
    /// `a_n = 1/((n+1) log²(n+2))`.
    LogDamped,
    /// `a_n = ρ^n`, `ρ ∈ (0, 1)`.
    Geometric { ratio: f64 },
}

impl CoefficientRule {
    pub fn validate(&self) -> Result<()> {
        if let CoefficientRule::Geometric { ratio } = *self {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(HqrError::ParameterOutOfDomain {
                    name: "ratio".into(),
                    value: ratio,
                    domain: "(0, 1)",
                });
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, n: usize) -> f64 {
        let n1 = n as f64 + 1.0;
        match *self {
            CoefficientRule::HarmonicTail => 1.0 / n1,
            CoefficientRule::LogDamped => 1.0 / (n1 * (n as f64 + 2.0).ln().powi(2)),
            CoefficientRule::Geometric { ratio } => ratio.powi(n as i32),
        }
    }

    /// Upper bound on `Σ_{n > cutoff} (n+1)^{p−2} a_n^p` for `0 < p ≤ 2`.
    pub fn weighted_tail(&self, cutoff: usize, p: f64) -> Option<f64> {
        if !(p > 0.0 && p <= 2.0) {
            return None;
        }
        let k1 = cutoff as f64 + 1.0;
        Some(match *self {
            // Terms are (n+1)^{-2}; Σ_{j ≥ K+2} j^{-2} ≤ ∫_{K+1}^∞ x^{-2} dx.
            CoefficientRule::HarmonicTail => 1.0 / k1,
            // Terms are (n+1)^{-2} log^{-2p}(n+2) ≤ (n+1)^{-2} log^{-2p}(K+3) past the cutoff.
            CoefficientRule::LogDamped => (cutoff as f64 + 3.0).ln().powf(-2.0 * p) / k1,
            // (n+1)^{p-2} ≤ 1 leaves a geometric tail in ρ^p.
            CoefficientRule::Geometric { ratio } => {
                let q = ratio.powf(p);
                q.powf(k1) / (1.0 - q)
            }
        })
    }
}

/// `a_0..=a_N` of `rule` as a real series.
pub fn make_coefficient_family(rule: CoefficientRule, degree: usize) -> Result<CoefficientSeries> {
    rule.validate()?;
    let coeffs: Vec<f64> = (0..=degree).map(|n| rule.coefficient(n)).collect();
    CoefficientSeries::from_real(&coeffs)
}
