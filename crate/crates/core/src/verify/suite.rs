use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{flatten_params, run_check, CheckOptions, InequalityReport, TheoremId, Verdict};
use crate::zoo::FamilySpec;

pub const STANDARD_RADII: [f64; 3] = [0.5, 0.9, 0.99];
pub const STANDARD_K: [f64; 3] = [0.0, 0.2, 0.5];
pub const STANDARD_M: [u32; 3] = [0, 1, 3];
pub const STANDARD_ALPHA: [f64; 3] = [0.3, 0.5, 0.9];
pub const STANDARD_TILT: [f64; 3] = [0.5, 1.0, 2.0];
pub const KOLMOGOROV_P: [f64; 3] = [0.3, 0.5, 0.7];
pub const RIESZ_P: [f64; 2] = [1.5, 2.0];

/// One theorem on one family at one radius and exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCell {
    pub theorem_id: TheoremId,
    pub family: FamilySpec,
    pub r: f64,
    pub p: Option<f64>,
    /// Build with the floor `c ≥ 1` relaxed.
    #[serde(default)]
    pub relaxed: bool,
}

/// A cell that produced an error instead of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub theorem_id: TheoremId,
    pub family_id: String,
    pub params: BTreeMap<String, f64>,
    pub r: f64,
    pub p: Option<f64>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub reports: Vec<InequalityReport>,
    pub errors: Vec<CellError>,
}

impl SuiteOutcome {
    /// No errors, and no report with verdict `fail` or `under-resolved`.
    pub fn all_strict_pass(&self) -> bool {
        self.errors.is_empty()
            && self
                .reports
                .iter()
                .all(|r| !matches!(r.verdict, Verdict::Fail | Verdict::UnderResolved))
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == verdict).count()
    }
}

fn cell(theorem_id: TheoremId, family: &FamilySpec, r: f64, p: Option<f64>) -> SuiteCell {
    SuiteCell {
        theorem_id,
        family: family.clone(),
        r,
        p,
        relaxed: false,
    }
}

/// Families with `u ≥ 1` and a documented dilatation bound.
fn floor_families() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for k in STANDARD_K {
        out.push(FamilySpec::shifted_halfplane(1.0, k));
    }
    for k in STANDARD_K {
        for m in STANDARD_M {
            out.push(FamilySpec::variable_dilatation(1.0, k, m));
        }
    }
    for alpha in STANDARD_ALPHA {
        out.push(FamilySpec::poisson(alpha, 1.0));
    }
    out
}

fn negated_families() -> Vec<FamilySpec> {
    floor_families()
        .into_iter()
        .filter(|f| f.family_id != crate::zoo::FamilyId::Poisson)
        .map(FamilySpec::negated)
        .collect()
}

fn tilted_families() -> Vec<FamilySpec> {
    STANDARD_TILT
        .iter()
        .map(|&s| FamilySpec::tilted_halfplane(1.0, s))
        .collect()
}

/// Every theorem on every applicable family of the standard grid.
pub fn standard_suite() -> Vec<SuiteCell> {
    let floor = floor_families();
    let negated = negated_families();
    let tilted = tilted_families();
    let all: Vec<&FamilySpec> = floor.iter().chain(&negated).chain(&tilted).collect();
    let mut cells = Vec::new();
    for r in STANDARD_RADII {
        for f in floor.iter().chain(&negated) {
            cells.push(cell(TheoremId::ZygmundHqr, f, r, None));
        }
        for f in &all {
            cells.push(cell(TheoremId::ZygmundClassical, f, r, None));
            cells.push(cell(TheoremId::RieszIdentity, f, r, None));
            cells.push(cell(TheoremId::KolmogorovClassical, f, r, Some(0.5)));
            for p in RIESZ_P {
                cells.push(cell(TheoremId::RieszRatio, f, r, Some(p)));
            }
        }
        for f in &floor {
            for p in KOLMOGOROV_P {
                cells.push(cell(TheoremId::KolmogorovHqrUpper, f, r, Some(p)));
                cells.push(cell(TheoremId::KolmogorovHqrLower, f, r, Some(p)));
            }
            for p in RIESZ_P {
                cells.push(cell(TheoremId::RieszHqrRatio, f, r, Some(p)));
            }
        }
        for f in floor.iter().chain(&tilted) {
            cells.push(cell(TheoremId::ConverseBound, f, r, None));
        }
        for f in &tilted {
            cells.push(cell(TheoremId::AnalyticSumH1, f, r, None));
        }
        for c in [0.25, 0.5] {
            for k in STANDARD_K {
                let mut experimental = cell(
                    TheoremId::ZygmundHqrExperimental,
                    &FamilySpec::shifted_halfplane(c, k),
                    r,
                    None,
                );
                experimental.relaxed = true;
                cells.push(experimental);
            }
        }
    }
    cells
}

fn run_cell(cell: &SuiteCell, opts: CheckOptions) -> Result<Vec<InequalityReport>, CellError> {
    let built = if cell.relaxed {
        cell.family.build_relaxed(cell.r)
    } else {
        cell.family.build(cell.r)
    };
    built
        .and_then(|family| run_check(cell.theorem_id, &family, cell.r, cell.p, opts))
        .map_err(|e| CellError {
            theorem_id: cell.theorem_id,
            family_id: cell.family.label(),
            params: cell.family.params.clone(),
            r: cell.r,
            p: cell.p,
            message: e.to_string(),
        })
}

/// Runs all cells in parallel; reports and errors come back sorted.
pub fn run_suite(cells: &[SuiteCell], opts: CheckOptions) -> SuiteOutcome {
    let results: Vec<_> = cells.par_iter().map(|c| run_cell(c, opts)).collect();
    let mut outcome = SuiteOutcome::default();
    for result in results {
        match result {
            Ok(reports) => outcome.reports.extend(reports),
            Err(e) => outcome.errors.push(e),
        }
    }
    outcome.reports.sort_by(|a, b| a.compare(b));
    outcome.errors.sort_by(|a, b| {
        (a.theorem_id, &a.family_id, flatten_params(&a.params))
            .cmp(&(b.theorem_id, &b.family_id, flatten_params(&b.params)))
            .then_with(|| a.r.total_cmp(&b.r))
            .then_with(|| a.p.unwrap_or(0.0).total_cmp(&b.p.unwrap_or(0.0)))
    });
    outcome
}
