//! Inequality checkers with explicit error budgets.
//!
//! Every checker evaluates both sides on a grid of `M` points and again on
//! `2M`. The budget of a strict check is
//! `SAFETY_FACTOR · (doubling change + truncation sensitivity) + ROUNDOFF · scale`
//! and the verdict follows [`Verdict::strict`].

mod checks;
mod coefficients;
mod suite;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HqrError, Result};
use crate::means::{log_plus, DOUBLING_TOLERANCE};
use crate::zoo::Family;

pub use checks::{
    check_analytic_sum_h1, check_converse_bound, check_kolmogorov_classical, check_kolmogorov_hqr,
    check_riesz_hqr_ratio, check_riesz_identity, check_riesz_ratio, check_zygmund_classical,
    check_zygmund_hqr, check_zygmund_hqr_experimental, cosine_constant, run_check, secant_constant,
    CheckOptions, STABILIZATION_THRESHOLD,
};
pub use coefficients::{
    check_decreasing_coefficient_sum, hl_coefficient_sum, CoefficientSum, CONVERGENCE_THRESHOLD,
};
pub use suite::{
    run_suite, standard_suite, CellError, SuiteCell, SuiteOutcome, KOLMOGOROV_P, RIESZ_P, STANDARD_ALPHA,
    STANDARD_K, STANDARD_M, STANDARD_RADII, STANDARD_TILT,
};

pub const SAFETY_FACTOR: f64 = 10.0;
/// Relative floating-point floor added to every budget.
pub const ROUNDOFF: f64 = 1e-12;
/// Slack allowed when a sampled `u ≥ 1` (or `u ≤ −1`) is validated.
pub const FLOOR_SLACK: f64 = 1e-9;
/// Largest `|v(0)|` accepted as `v(0) = 0`.
pub const ORIGIN_SLACK: f64 = 1e-12;
/// Slack between the sampled `|ω|` and a family's documented `k`.
pub const DILATATION_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// `M_1(f) ≤ K² (1/2π)∫|u|log⁺|u| + |u(0)|(1 − K² log|u(0)|)` for `u ≥ 1` or `u ≤ −1`.
    ZygmundHqr,
    /// The same bound on families with `u ≥ C`, `C < 1`; margins only.
    ZygmundHqrExperimental,
    /// `M_1(v) ≤ (1/2π)∫|u|log⁺|u| + 3e` for a conjugate pair.
    ZygmundClassical,
    /// `M_p(v)/M_p(u)`, `1 < p < ∞`.
    RieszRatio,
    /// `M_2(v)² + u(0)² = M_2(u)²`.
    RieszIdentity,
    /// `M_p(v)/M_1(u)`, `0 < p < 1`.
    KolmogorovClassical,
    /// `M_p^p(v) ≤ sec(pπ/2)(K² M_1^p(u) − (K²−1) M_p^p(u))`.
    KolmogorovHqrUpper,
    /// `(2−K²) M_1^p(u) ≤ (2−K²) M_p^p(u) + cos(pπ/2) M_p^p(v)`, reported with
    /// the `M_p^p(u)` term moved to the left.
    KolmogorovHqrLower,
    /// `M_p(v)/M_p(u)` for quasiregular `f` with `u ≥ 0`, `1 < p ≤ 2`.
    RieszHqrRatio,
    /// Radial profile of `M_1(F)`, `F = h + g`, when `Im h` does not vanish.
    AnalyticSumH1,
    /// `(1/2π)∫u log u ≤ (π/2) M_1(F) + |h(0) log h(0)|` for `u ≥ 1`.
    ConverseBound,
    /// `Σ (a_n + b_n)/(n+1)` for nonincreasing nonnegative coefficients.
    DecreasingCoefficientSum,
}

/// Printable range and membership test for a check's exponent.
pub type ExponentDomain = (&'static str, fn(f64) -> bool);

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::ZygmundHqr,
        TheoremId::ZygmundHqrExperimental,
        TheoremId::ZygmundClassical,
        TheoremId::RieszRatio,
        TheoremId::RieszIdentity,
        TheoremId::KolmogorovClassical,
        TheoremId::KolmogorovHqrUpper,
        TheoremId::KolmogorovHqrLower,
        TheoremId::RieszHqrRatio,
        TheoremId::AnalyticSumH1,
        TheoremId::ConverseBound,
        TheoremId::DecreasingCoefficientSum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::ZygmundHqr => "zygmund-hqr",
            TheoremId::ZygmundHqrExperimental => "zygmund-hqr-experimental",
            TheoremId::ZygmundClassical => "zygmund-classical",
            TheoremId::RieszRatio => "riesz-ratio",
            TheoremId::RieszIdentity => "riesz-identity",
            TheoremId::KolmogorovClassical => "kolmogorov-classical",
            TheoremId::KolmogorovHqrUpper => "kolmogorov-hqr-upper",
            TheoremId::KolmogorovHqrLower => "kolmogorov-hqr-lower",
            TheoremId::RieszHqrRatio => "riesz-hqr-ratio",
            TheoremId::AnalyticSumH1 => "analytic-sum-h1",
            TheoremId::ConverseBound => "converse-bound",
            TheoremId::DecreasingCoefficientSum => "decreasing-coefficient-sum",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Checks whose verdict can be `fail`.
    pub fn is_strict(&self) -> bool {
        matches!(
            self,
            TheoremId::ZygmundHqr
                | TheoremId::ZygmundClassical
                | TheoremId::RieszIdentity
                | TheoremId::KolmogorovHqrUpper
                | TheoremId::KolmogorovHqrLower
                | TheoremId::ConverseBound
        )
    }

    /// Whether the check takes an exponent, and its admissible range.
    pub fn exponent_domain(&self) -> Option<ExponentDomain> {
        match self {
            TheoremId::RieszRatio => Some(("(1, ∞)", |p| p > 1.0 && p.is_finite())),
            TheoremId::KolmogorovClassical
            | TheoremId::KolmogorovHqrUpper
            | TheoremId::KolmogorovHqrLower => Some(("(0, 1)", |p| p > 0.0 && p < 1.0)),
            TheoremId::RieszHqrRatio => Some(("(1, 2]", |p| p > 1.0 && p <= 2.0)),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
    UnderResolved,
}

impl Verdict {
    /// `margin ≥ −budget` passes when the grid is resolved. On an unresolved
    /// grid only margins outside `[−budget, budget)` are decided.
    pub fn strict(margin: f64, budget: f64, resolved: bool) -> Self {
        if !margin.is_finite() || margin < -budget {
            Verdict::Fail
        } else if resolved || margin >= budget {
            Verdict::Pass
        } else {
            Verdict::UnderResolved
        }
    }

    /// Two-sided version for identities: `|margin| ≤ budget`.
    pub fn identity(margin: f64, budget: f64, resolved: bool) -> Self {
        if !margin.is_finite() || margin.abs() > budget {
            if resolved {
                Verdict::Fail
            } else {
                Verdict::UnderResolved
            }
        } else {
            Verdict::Pass
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::ReportOnly => "report-only",
            Verdict::UnderResolved => "under-resolved",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated inequality. `margin = rhs − lhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    pub family_id: String,
    pub params: BTreeMap<String, f64>,
    pub r: f64,
    pub p: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub error_budget: f64,
    pub verdict: Verdict,
    pub metadata: BTreeMap<String, f64>,
}

impl InequalityReport {
    /// Parameters flattened as `k=v;k=v`, in key order.
    pub fn params_flat(&self) -> String {
        flatten_params(&self.params)
    }

    /// `lhs / rhs`, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs)
    }

    fn sort_key(&self) -> (TheoremId, &str, String, f64, f64) {
        (
            self.theorem_id,
            &self.family_id,
            self.params_flat(),
            self.r,
            self.p.unwrap_or(f64::NEG_INFINITY),
        )
    }

    /// Deterministic ordering: theorem, family, parameters, `r`, `p`.
    pub fn compare(&self, other: &Self) -> std::cmp::Ordering {
        let (a0, a1, a2, a3, a4) = self.sort_key();
        let (b0, b1, b2, b3, b4) = other.sort_key();
        a0.cmp(&b0)
            .then_with(|| a1.cmp(b1))
            .then_with(|| a2.cmp(&b2))
            .then_with(|| a3.total_cmp(&b3))
            .then_with(|| a4.total_cmp(&b4))
    }
}

pub fn flatten_params(params: &BTreeMap<String, f64>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Both sides at one grid size plus how far the neglected series tail can
/// move `rhs − lhs`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub truncation: f64,
}

/// Sides at `M` with the change seen at `2M`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Evaluated {
    pub lhs: f64,
    pub rhs: f64,
    pub truncation: f64,
    pub doubling_delta: f64,
}

impl Evaluated {
    /// Sides on the default grid, with the change on the doubled grid as `doubling_delta`.
    pub(crate) fn from_pair(coarse: Sides, fine: Sides) -> Self {
        Self {
            lhs: coarse.lhs,
            rhs: coarse.rhs,
            truncation: coarse.truncation,
            doubling_delta: (fine.lhs - coarse.lhs).abs() + (fine.rhs - coarse.rhs).abs(),
        }
    }

    pub fn scale(&self) -> f64 {
        self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }

    pub fn budget(&self) -> f64 {
        SAFETY_FACTOR * (self.doubling_delta + self.truncation) + ROUNDOFF * self.scale()
    }

    pub fn resolved(&self) -> bool {
        self.doubling_delta <= DOUBLING_TOLERANCE * self.scale()
    }
}

pub(crate) fn evaluate_doubled(m: usize, compute: impl Fn(usize) -> Result<Sides>) -> Result<Evaluated> {
    if m == 0 {
        return Err(HqrError::EmptyGrid);
    }
    Ok(Evaluated::from_pair(compute(m)?, compute(2 * m)?))
}

/// Assembles a report for `family` from evaluated sides.
pub(crate) fn build_report(
    theorem_id: TheoremId,
    family: &Family,
    r: f64,
    p: Option<f64>,
    sides: &Evaluated,
    verdict: Verdict,
    mut metadata: BTreeMap<String, f64>,
) -> InequalityReport {
    let margin = sides.rhs - sides.lhs;
    metadata.insert("doubling_delta".into(), sides.doubling_delta);
    metadata.insert("truncation".into(), sides.truncation);
    metadata.insert("degree".into(), family.map.degree() as f64);
    if family.info.lift != 0.0 {
        metadata.insert("lift".into(), family.info.lift);
    }
    metadata.retain(|_, v| v.is_finite());
    InequalityReport {
        theorem_id,
        family_id: family.spec.label(),
        params: family.spec.params.clone(),
        r,
        p,
        lhs: sides.lhs,
        rhs: sides.rhs,
        margin,
        error_budget: sides.budget(),
        verdict,
        metadata,
    }
}

/// Bound on the change of `(1/2π)∫|u|log⁺|u|` when every sample moves by at most `tb`.
pub(crate) fn zygmund_sensitivity(tb: f64, max_abs: f64) -> f64 {
    if tb == 0.0 {
        return 0.0;
    }
    tb * (1.0 + log_plus(max_abs + tb))
}

/// Bound on the change of `|x|^p` when `x` moves by at most `tb`.
pub(crate) fn power_sensitivity(x: f64, p: f64, tb: f64) -> f64 {
    if tb == 0.0 {
        return 0.0;
    }
    let a = x.abs();
    if p >= 1.0 {
        p * tb * (a + tb).powf(p - 1.0)
    } else if a > tb {
        tb.powf(p).min(p * tb * (a - tb).powf(p - 1.0))
    } else {
        tb.powf(p)
    }
}

/// Bound on the change of `M_p^p` over samples that each move by at most `tb`.
pub(crate) fn power_mean_sensitivity(values: &[f64], p: f64, tb: f64) -> f64 {
    if tb == 0.0 || values.is_empty() {
        return 0.0;
    }
    values.iter().map(|&x| power_sensitivity(x, p, tb)).sum::<f64>() / values.len() as f64
}
