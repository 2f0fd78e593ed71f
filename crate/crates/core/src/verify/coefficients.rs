use std::collections::BTreeMap;

use super::{build_report, Evaluated, InequalityReport, TheoremId, Verdict};
use crate::error::{HqrError, Result};
use crate::means::compensated_sum;
use crate::series::CoefficientSeries;
use crate::zoo::{CoefficientRule, Family};

/// Tail size below which a coefficient series is flagged as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSum {
    pub partial_sum: f64,
    /// Integral-test bound on the remainder, when the coefficient rule is known.
    pub tail_bound: Option<f64>,
}

/// `Σ_{n ≤ cutoff} (n+1)^{p−2} |a_n|^p`, with the tail bound of `rule` if given.
pub fn hl_coefficient_sum(
    a: &CoefficientSeries,
    p: f64,
    cutoff: usize,
    rule: Option<CoefficientRule>,
) -> Result<CoefficientSum> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(HqrError::InvalidExponent {
            p, domain: "(0, ∞)"
        });
    }
    if cutoff > a.degree() {
        return Err(HqrError::CutoffBeyondDegree {
            cutoff,
            degree: a.degree(),
        });
    }
    let partial_sum = compensated_sum(
        a.coeffs()[..=cutoff]
            .iter()
            .enumerate()
            .map(|(n, c)| (n as f64 + 1.0).powf(p - 2.0) * c.norm().powf(p)),
    );
    Ok(CoefficientSum {
        partial_sum,
        tail_bound: rule.and_then(|rule| rule.weighted_tail(cutoff, p)),
    })
}

/// Checks that coefficients are real, nonnegative and nonincreasing from `start`.
fn require_decreasing(s: &CoefficientSeries, start: usize, name: &str) -> Result<()> {
    let coeffs = &s.coeffs()[start.min(s.coeffs().len())..];
    if let Some(n) = coeffs.iter().position(|c| c.im != 0.0 || c.re < 0.0) {
        return Err(HqrError::hypothesis(
            "nonnegative real coefficients",
            format!("{name}_{} = {}", n + start, coeffs[n]),
        ));
    }
    if let Some(n) = coeffs.windows(2).position(|w| w[1].re > w[0].re) {
        return Err(HqrError::hypothesis(
            "nonincreasing coefficients",
            format!("{name}_{} < {name}_{}", n + start, n + start + 1),
        ));
    }
    Ok(())
}

/// `Σ_{n ≤ cutoff} (a_n + b_n)/(n+1)` for nonincreasing nonnegative
/// coefficients of `h` and `g` (`b_0 = 0` is exempt from monotonicity).
///
/// `lhs` is the partial sum and `rhs` adds the tail bound when both rules
/// are known. Metadata records the Cauchy gap between the cutoff and its
/// half, and `converged` = 1 when the tail (or, lacking one, the gap) is
/// below [`CONVERGENCE_THRESHOLD`].
pub fn check_decreasing_coefficient_sum(
    family: &Family,
    cutoff: usize,
    r: f64,
    h_rule: Option<CoefficientRule>,
    g_rule: Option<CoefficientRule>,
) -> Result<InequalityReport> {
    let (h, g) = (family.map.h(), family.map.g());
    require_decreasing(h, 0, "a")?;
    require_decreasing(g, 1, "b")?;
    let degree = family.map.degree();
    if cutoff > degree {
        return Err(HqrError::CutoffBeyondDegree { cutoff, degree });
    }
    let partial =
        |k: usize| compensated_sum((0..=k).map(|n| (h.coeff(n).re + g.coeff(n).re) / (n as f64 + 1.0)));
    let total = partial(cutoff);
    let half = partial(cutoff / 2);
    let g_is_zero = g.coeffs().iter().all(|c| c.norm() == 0.0);
    let tail = match (h_rule, g_rule) {
        (Some(hr), _) if g_is_zero => hr.weighted_tail(cutoff, 1.0),
        (Some(hr), Some(gr)) => hr
            .weighted_tail(cutoff, 1.0)
            .zip(gr.weighted_tail(cutoff, 1.0))
            .map(|(a, b)| a + b),
        _ => None,
    };
    let gap = total - half;
    let converged = tail.unwrap_or(gap) < CONVERGENCE_THRESHOLD;
    let mut metadata = BTreeMap::from([
        ("cutoff".to_string(), cutoff as f64),
        ("half_cutoff_sum".to_string(), half),
        ("cauchy_gap".to_string(), gap),
        ("converged".to_string(), if converged { 1.0 } else { 0.0 }),
    ]);
    if let Some(t) = tail {
        metadata.insert("tail_bound".into(), t);
    }
    let sides = Evaluated {
        lhs: total,
        rhs: total + tail.unwrap_or(0.0),
        truncation: 0.0,
        doubling_delta: 0.0,
    };
    Ok(build_report(
        TheoremId::DecreasingCoefficientSum,
        family,
        r,
        Some(1.0),
        &sides,
        Verdict::ReportOnly,
        metadata,
    ))
}
