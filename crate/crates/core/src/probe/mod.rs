//! Worst-case search for `lhs / rhs` of the checked inequalities over family
//! parameters and radii: a deterministic grid sweep followed by a
//! Nelder–Mead refinement from the best cell.

pub mod simplex;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HqrError, Result};
use crate::verify::{ratio, run_check, CheckOptions, InequalityReport, TheoremId};
use crate::zoo::{FamilyId, FamilySpec};

/// Largest radius a probe may visit.
pub const R_CAP: f64 = 0.999;
pub const R_MIN: f64 = 0.05;
pub const DEFAULT_STEPS: usize = 200;

/// A bounded coordinate of the search space with the values used by the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub grid: Vec<f64>,
}

impl Coordinate {
    pub fn new(name: &str, lo: f64, hi: f64, grid: &[f64]) -> Self {
        Self {
            name: name.to_string(),
            lo,
            hi,
            grid: grid.to_vec(),
        }
    }

    fn to_unit(&self, x: f64) -> f64 {
        if self.hi > self.lo {
            ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    fn at_unit(&self, t: f64) -> f64 {
        self.lo + t.clamp(0.0, 1.0) * (self.hi - self.lo)
    }
}

/// Where a probe searches: one theorem on one family, free coordinates
/// (family parameters, `r`, and `p` when the theorem takes one) and fixed
/// family parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpace {
    pub theorem_id: TheoremId,
    pub family_id: FamilyId,
    pub coordinates: Vec<Coordinate>,
    pub fixed: BTreeMap<String, f64>,
}

/// Parameter values of one evaluation, including `r` and possibly `p`.
pub type Point = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub family_id: FamilyId,
    pub point: Point,
    pub ratio: f64,
    /// `error_budget / |rhs|` of the report behind `ratio`.
    pub relative_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub theorem_id: TheoremId,
    pub family_id: FamilyId,
    pub best_ratio: f64,
    pub argmax: Point,
    pub evaluations: usize,
    /// Relative budget at the argmax: a strict theorem is contradicted only
    /// if `best_ratio > 1 + error_budget`.
    pub error_budget: f64,
    pub r_cap: f64,
    /// Points skipped because a hypothesis failed there.
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

impl ProbeResult {
    /// True unless the probe found `ratio > 1 + budget` for a strict theorem.
    pub fn within_budget(&self) -> bool {
        !self.theorem_id.is_strict() || self.best_ratio <= 1.0 + self.error_budget
    }

    fn from_trace(
        space: &ProbeSpace,
        trace: Vec<TraceEntry>,
        skipped: usize,
        keep_trace: bool,
    ) -> Result<Self> {
        let best = trace
            .iter()
            .fold(None::<&TraceEntry>, |acc, e| match acc {
                Some(b) if b.ratio >= e.ratio => Some(b),
                _ => Some(e),
            })
            .ok_or(HqrError::EmptyProbeGrid)?;
        Ok(Self {
            theorem_id: space.theorem_id,
            family_id: best.family_id,
            best_ratio: best.ratio,
            argmax: best.point.clone(),
            evaluations: trace.len() + skipped,
            error_budget: best.relative_budget,
            r_cap: R_CAP,
            skipped,
            trace: keep_trace.then_some(trace),
        })
    }
}

impl ProbeSpace {
    pub fn new(theorem_id: TheoremId, family_id: FamilyId) -> Self {
        Self {
            theorem_id,
            family_id,
            coordinates: Vec::new(),
            fixed: BTreeMap::new(),
        }
    }

    pub fn with(mut self, coordinate: Coordinate) -> Self {
        self.coordinates.push(coordinate);
        self
    }

    pub fn fix(mut self, name: &str, value: f64) -> Self {
        self.fixed.insert(name.to_string(), value);
        self
    }

    fn default_radius() -> Coordinate {
        Coordinate::new("r", R_MIN, R_CAP, &[0.5, 0.9, 0.99, R_CAP])
    }

    fn spec_at(&self, point: &Point) -> FamilySpec {
        let mut spec = FamilySpec::new(self.family_id, &[]);
        spec.params = self.fixed.clone();
        for (name, value) in point {
            if name != "r" && name != "p" {
                spec.params.insert(name.clone(), *value);
            }
        }
        spec
    }

    /// Runs the theorem's check at `point` and returns its report.
    pub fn report_at(&self, point: &Point, opts: CheckOptions) -> Result<InequalityReport> {
        let r = point
            .get("r")
            .copied()
            .ok_or_else(|| HqrError::MissingParameter("r".into()))?;
        if r.is_nan() || r > R_CAP {
            return Err(HqrError::ParameterOutOfDomain {
                name: "r".into(),
                value: r,
                domain: "[0, r_cap]",
            });
        }
        let p = point.get("p").copied();
        let family = self.spec_at(point).build(r)?;
        let mut reports = run_check(self.theorem_id, &family, r, p, opts)?;
        Ok(reports.remove(0))
    }

    /// `lhs / rhs` at `point` with the report's relative budget.
    pub fn evaluate(&self, point: &Point, opts: CheckOptions) -> Result<TraceEntry> {
        let report = self.report_at(point, opts)?;
        let value = if report.rhs > 0.0 {
            ratio(report.lhs, report.rhs)
        } else if report.lhs <= report.rhs {
            // Both sides nonpositive: the inequality holds trivially.
            0.0
        } else {
            f64::INFINITY
        };
        Ok(TraceEntry {
            family_id: self.family_id,
            point: point.clone(),
            ratio: value,
            relative_budget: report.error_budget / report.rhs.abs().max(f64::MIN_POSITIVE),
        })
    }

    fn cells(&self) -> Vec<Point> {
        let mut cells = vec![Point::new()];
        for c in &self.coordinates {
            cells = cells
                .into_iter()
                .flat_map(|cell| {
                    c.grid.iter().map(move |&v| {
                        let mut next = cell.clone();
                        next.insert(c.name.clone(), v);
                        next
                    })
                })
                .collect();
        }
        if self.coordinates.is_empty() || self.coordinates.iter().any(|c| c.grid.is_empty()) {
            return Vec::new();
        }
        cells
    }

    fn to_unit(&self, point: &Point) -> Vec<f64> {
        self.coordinates
            .iter()
            .map(|c| c.to_unit(point.get(&c.name).copied().unwrap_or(c.lo)))
            .collect()
    }

    fn at_unit(&self, x: &[f64]) -> Point {
        self.coordinates
            .iter()
            .zip(x)
            .map(|(c, &t)| (c.name.clone(), c.at_unit(t)))
            .collect()
    }
}

fn skip_hypothesis(result: Result<TraceEntry>) -> Result<Option<TraceEntry>> {
    match result {
        Ok(entry) => Ok(Some(entry)),
        Err(e) if e.is_hypothesis_violation() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates every cell of the space's coordinate grids in parallel; the
/// trace keeps grid order. Cells violating a hypothesis are skipped.
pub fn grid_sweep(space: &ProbeSpace, opts: CheckOptions, keep_trace: bool) -> Result<ProbeResult> {
    let cells = space.cells();
    if cells.is_empty() {
        return Err(HqrError::EmptyProbeGrid);
    }
    let results: Vec<Result<Option<TraceEntry>>> = cells
        .par_iter()
        .map(|cell| skip_hypothesis(space.evaluate(cell, opts)))
        .collect();
    let mut trace = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for result in results {
        match result? {
            Some(entry) => trace.push(entry),
            None => skipped += 1,
        }
    }
    ProbeResult::from_trace(space, trace, skipped, keep_trace)
}

/// Nelder–Mead refinement from `start` in normalized coordinates, using at
/// most `steps` evaluations. The start is the first evaluation, so the
/// result never falls below it.
pub fn refine_max(
    space: &ProbeSpace,
    start: &Point,
    steps: usize,
    opts: CheckOptions,
    keep_trace: bool,
) -> Result<ProbeResult> {
    let first = space.evaluate(start, opts)?;
    if steps == 0 {
        return Err(HqrError::EmptyProbeGrid);
    }
    let mut trace = vec![first];
    let mut skipped = 0;
    let mut failure = None;
    simplex::maximize(
        |x| {
            if trace.len() + skipped == 1 && x == space.to_unit(start).as_slice() {
                return trace[0].ratio;
            }
            let point = space.at_unit(x);
            match skip_hypothesis(space.evaluate(&point, opts)) {
                Ok(Some(entry)) => {
                    let value = entry.ratio;
                    trace.push(entry);
                    value
                }
                Ok(None) => {
                    skipped += 1;
                    f64::NEG_INFINITY
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        &space.to_unit(start),
        steps,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    ProbeResult::from_trace(space, trace, skipped, keep_trace)
}

/// Sweep followed by refinement from the sweep's best cell; the result
/// covers both phases.
pub fn probe_space(
    space: &ProbeSpace,
    steps: usize,
    opts: CheckOptions,
    keep_trace: bool,
) -> Result<ProbeResult> {
    let sweep = grid_sweep(space, opts, true)?;
    let refined = refine_max(space, &sweep.argmax, steps, opts, true)?;
    let mut trace = sweep.trace.unwrap_or_default();
    trace.extend(refined.trace.unwrap_or_default());
    ProbeResult::from_trace(space, trace, sweep.skipped + refined.skipped, keep_trace)
}

/// Sweeps every default space of `theorem`, then refines from the best
/// cell found in any of them.
pub fn probe_theorem(
    theorem: TheoremId,
    steps: usize,
    opts: CheckOptions,
    keep_trace: bool,
) -> Result<ProbeResult> {
    probe_spaces(&default_spaces(theorem), steps, opts, keep_trace)
}

/// Sweeps all `spaces`, then refines from the best cell found in any of
/// them. Spaces where every cell violates a hypothesis are dropped.
pub fn probe_spaces(
    spaces: &[ProbeSpace],
    steps: usize,
    opts: CheckOptions,
    keep_trace: bool,
) -> Result<ProbeResult> {
    let mut best: Option<(&ProbeSpace, ProbeResult)> = None;
    let mut trace = Vec::new();
    let mut skipped = 0;
    for space in spaces {
        let sweep = match grid_sweep(space, opts, true) {
            Ok(sweep) => sweep,
            Err(HqrError::EmptyProbeGrid) => continue,
            Err(e) => return Err(e),
        };
        skipped += sweep.skipped;
        if best.as_ref().is_none_or(|(_, b)| sweep.best_ratio > b.best_ratio) {
            best = Some((space, sweep.clone()));
        }
        trace.extend(sweep.trace.unwrap_or_default());
    }
    let (space, sweep) = best.ok_or(HqrError::EmptyProbeGrid)?;
    let refined = refine_max(space, &sweep.argmax, steps, opts, true)?;
    trace.extend(refined.trace.unwrap_or_default());
    ProbeResult::from_trace(space, trace, skipped + refined.skipped, keep_trace)
}

/// Search spaces used when a theorem is probed without an explicit space.
pub fn default_spaces(theorem: TheoremId) -> Vec<ProbeSpace> {
    let c = || Coordinate::new("c", 1.0, 4.0, &[1.0, 1.5, 2.5, 4.0]);
    let k = || Coordinate::new("k", 0.0, 0.9, &[0.0, 0.3, 0.6, 0.9]);
    let alpha = || Coordinate::new("alpha", 0.05, 0.95, &[0.1, 0.5, 0.9, 0.95]);
    let p = || Coordinate::new("p", 0.05, 0.95, &[0.1, 0.5, 0.9]);
    let s = || Coordinate::new("s", 0.05, 5.0, &[0.1, 0.5, 1.0, 3.0]);
    let r = ProbeSpace::default_radius;
    let halfplane = || {
        ProbeSpace::new(theorem, FamilyId::ShiftedHalfplane)
            .with(c())
            .with(k())
            .with(r())
    };
    let variable = || {
        ProbeSpace::new(theorem, FamilyId::VariableDilatation)
            .with(c())
            .with(k())
            .with(r())
            .fix("m", 1.0)
    };
    let poisson = || {
        ProbeSpace::new(theorem, FamilyId::Poisson)
            .with(alpha())
            .with(c())
            .with(r())
    };
    let tilted = || {
        ProbeSpace::new(theorem, FamilyId::TiltedHalfplane)
            .with(c())
            .with(s())
            .with(r())
    };
    match theorem {
        TheoremId::ZygmundHqr => vec![halfplane(), variable(), poisson()],
        TheoremId::ZygmundClassical => vec![halfplane(), poisson(), tilted()],
        TheoremId::RieszIdentity => vec![halfplane(), tilted()],
        TheoremId::KolmogorovHqrUpper | TheoremId::KolmogorovHqrLower => {
            vec![halfplane().with(p()), poisson().with(p())]
        }
        TheoremId::ConverseBound => vec![halfplane(), poisson(), tilted()],
        _ => Vec::new(),
    }
}

/// Strict theorems with a default probe space.
pub fn probed_theorems() -> Vec<TheoremId> {
    TheoremId::ALL
        .into_iter()
        .filter(|t| t.is_strict() && !default_spaces(*t).is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::HarmonicMap;
    use crate::series::CoefficientSeries;
    use crate::verify::check_zygmund_hqr;
    use crate::zoo::Family;

    fn point(pairs: &[(&str, f64)]) -> Point {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn ratio_on_two_plus_z_is_below_one() {
        let map = HarmonicMap::analytic(CoefficientSeries::from_real(&[2.0, 1.0]).unwrap());
        let family = Family::custom(map);
        for r in [0.5, 0.9] {
            let report = check_zygmund_hqr(&family, r, CheckOptions::default()).unwrap();
            assert!(report.ratio() < 1.0);
        }
    }

    #[test]
    fn empty_grid_is_an_error() {
        let space = ProbeSpace::new(TheoremId::ZygmundHqr, FamilyId::ShiftedHalfplane);
        assert_eq!(
            grid_sweep(&space, CheckOptions::default(), false).unwrap_err(),
            HqrError::EmptyProbeGrid
        );
        let hollow = space.with(Coordinate::new("k", 0.0, 0.9, &[]));
        assert!(grid_sweep(&hollow, CheckOptions::default(), false).is_err());
    }

    #[test]
    fn sweep_trace_counts_cells() {
        let space = ProbeSpace::new(TheoremId::ZygmundHqr, FamilyId::ShiftedHalfplane)
            .fix("c", 1.0)
            .with(Coordinate::new("k", 0.0, 0.9, &[0.0, 0.2, 0.5]))
            .with(Coordinate::new("r", R_MIN, R_CAP, &[0.5]));
        let result = grid_sweep(&space, CheckOptions::default(), true).unwrap();
        assert_eq!(result.trace.as_ref().unwrap().len(), 3 - result.skipped);
        assert_eq!(result.evaluations, 3);
        let max = result
            .trace
            .as_ref()
            .unwrap()
            .iter()
            .map(|e| e.ratio)
            .fold(f64::MIN, f64::max);
        assert_eq!(result.best_ratio, max);
        assert!(result.within_budget());
    }

    #[test]
    fn sweep_skips_hypothesis_failures() {
        // c < 1 builds only in relaxed mode, so use the tilted family, which
        // is not quasiregular, on the main bound.
        let space = ProbeSpace::new(TheoremId::ZygmundHqr, FamilyId::TiltedHalfplane)
            .fix("c", 1.0)
            .with(Coordinate::new("s", 0.1, 1.0, &[0.1, 1.0]))
            .with(Coordinate::new("r", R_MIN, R_CAP, &[0.5]));
        let err = grid_sweep(&space, CheckOptions::default(), false).unwrap_err();
        assert_eq!(err, HqrError::EmptyProbeGrid);
    }

    #[test]
    fn refinement_does_not_decrease_and_is_deterministic() {
        let space = ProbeSpace::new(TheoremId::ZygmundHqr, FamilyId::ShiftedHalfplane)
            .with(Coordinate::new("c", 1.0, 4.0, &[1.0]))
            .with(Coordinate::new("k", 0.0, 0.9, &[0.0]))
            .with(Coordinate::new("r", R_MIN, 0.9, &[0.5]));
        let start = point(&[("c", 1.5), ("k", 0.1), ("r", 0.5)]);
        let opts = CheckOptions::default();
        let start_ratio = space.evaluate(&start, opts).unwrap().ratio;
        let a = refine_max(&space, &start, 30, opts, true).unwrap();
        let b = refine_max(&space, &start, 30, opts, true).unwrap();
        assert!(a.best_ratio >= start_ratio - 1e-12);
        assert!(a.evaluations <= 30);
        assert_eq!(a, b);
        assert!(a.within_budget());
    }

    #[test]
    fn kolmogorov_ratio_grows_as_k_shrinks() {
        let space = ProbeSpace::new(TheoremId::KolmogorovHqrUpper, FamilyId::ShiftedHalfplane).fix("c", 1.0);
        let opts = CheckOptions::default();
        let at = |k| {
            space
                .evaluate(&point(&[("k", k), ("r", 0.99), ("p", 0.5)]), opts)
                .unwrap()
                .ratio
        };
        assert!(at(0.01) >= at(0.5));
    }

    #[test]
    fn default_spaces_cover_strict_theorems() {
        let probed = probed_theorems();
        for t in TheoremId::ALL.into_iter().filter(TheoremId::is_strict) {
            assert!(probed.contains(&t), "{t}");
        }
    }

    #[test]
    fn result_serializes_without_trace_by_default() {
        let space = ProbeSpace::new(TheoremId::ConverseBound, FamilyId::TiltedHalfplane)
            .fix("c", 1.0)
            .with(Coordinate::new("s", 0.05, 5.0, &[1.0]))
            .with(Coordinate::new("r", R_MIN, R_CAP, &[0.5]));
        let result = grid_sweep(&space, CheckOptions::default(), false).unwrap();
        let json = serde_json::to_value(&result).unwrap();
        assert!(json.get("trace").is_none());
        assert_eq!(json["r_cap"], 0.999);
        assert_eq!(json["theorem_id"], "converse-bound");
    }
}
