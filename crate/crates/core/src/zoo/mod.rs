//! Parameterized test mappings and the metadata the verifier dispatches on.
//!
//! Every family is built around the half-plane map `P(z) = (1+z)/(1−z)`
//! (coefficients `1, 2, 2, …`) or the Poisson extension of `|θ|^{−α}`.
//! Truncation degrees are chosen per radius so that the neglected tail is
//! below [`TRUNCATION_TOLERANCE`] on the circle being tested.

mod coefficients;
pub mod poisson;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use coefficients::{make_coefficient_family, CoefficientRule};

use crate::error::{HqrError, Result};
use crate::harmonic::{eval_harmonic, HarmonicMap};
use crate::series::{check_radius, grid_size_for_degree, CoefficientSeries};

pub const DEFAULT_DEGREE: usize = 256;
/// Largest truncation tail accepted when the degree is chosen automatically.
pub const TRUNCATION_TOLERANCE: f64 = 1e-13;
pub const MAX_AUTO_DEGREE: usize = 1 << 17;
/// Distance kept above the requested floor when a family is lifted.
pub const LIFT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    /// `h = c + k + P`, `g = k (h − h(0))`.
    ShiftedHalfplane,
    /// `h = c + k + P`, `g' = k z^m h'`.
    VariableDilatation,
    /// `u = c + Poisson extension of |θ|^{−α}`, `g = 0`.
    Poisson,
    /// `h = c + 1 + i s P`, `g = (1 − i s)(P − 1)`: `Re f = c + Re P`, `Im h > 0`.
    TiltedHalfplane,
    /// Any map supplied directly.
    Custom,
}

impl FamilyId {
    pub const REGISTRY: [FamilyId; 4] = [
        FamilyId::ShiftedHalfplane,
        FamilyId::VariableDilatation,
        FamilyId::Poisson,
        FamilyId::TiltedHalfplane,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::ShiftedHalfplane => "shifted-halfplane",
            FamilyId::VariableDilatation => "variable-dilatation",
            FamilyId::Poisson => "poisson",
            FamilyId::TiltedHalfplane => "tilted-halfplane",
            FamilyId::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::REGISTRY
            .into_iter()
            .chain([FamilyId::Custom])
            .find(|f| f.name() == name)
            .ok_or_else(|| HqrError::UnknownFamily(name.to_string()))
    }

    /// `(name, domain)` for every parameter, in the order the CLI lists them.
    pub fn parameter_domains(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            FamilyId::ShiftedHalfplane => &[("c", "[1, ∞)"), ("k", "[0, 1)")],
            FamilyId::VariableDilatation => &[("c", "[1, ∞)"), ("k", "[0, 1)"), ("m", "{0, 1, 2, …}")],
            FamilyId::Poisson => &[("alpha", "(0, 1)"), ("c", "[1, ∞)")],
            FamilyId::TiltedHalfplane => &[("c", "[1, ∞)"), ("s", "(0, ∞)")],
            FamilyId::Custom => &[],
        }
    }

    pub fn guarantees(&self) -> &'static str {
        match self {
            FamilyId::ShiftedHalfplane => "u >= c; omega = k; v(0) = 0; u(0) = c + 1 + k",
            FamilyId::VariableDilatation => "u >= c on the tested disk (lifted); omega = k z^m; v(0) = 0",
            FamilyId::Poisson => {
                "u >= c + pi^-alpha; analytic; v(0) = 0; Zygmund functional grows as alpha -> 1"
            }
            FamilyId::TiltedHalfplane => "u >= c; Im h > 0; v(0) = s; not sense-preserving",
            FamilyId::Custom => "none",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Family name, parameters and truncation degree (`None` chooses it per radius).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family_id: FamilyId,
    pub params: BTreeMap<String, f64>,
    pub degree: Option<usize>,
    /// Build `e^{iπ} f` instead of `f`.
    #[serde(default)]
    pub negated: bool,
}

impl FamilySpec {
    pub fn new(family_id: FamilyId, params: &[(&str, f64)]) -> Self {
        Self {
            family_id,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            degree: None,
            negated: false,
        }
    }

    pub fn shifted_halfplane(c: f64, k: f64) -> Self {
        Self::new(FamilyId::ShiftedHalfplane, &[("c", c), ("k", k)])
    }

    pub fn variable_dilatation(c: f64, k: f64, m: u32) -> Self {
        Self::new(
            FamilyId::VariableDilatation,
            &[("c", c), ("k", k), ("m", m as f64)],
        )
    }

    pub fn poisson(alpha: f64, c: f64) -> Self {
        Self::new(FamilyId::Poisson, &[("alpha", alpha), ("c", c)])
    }

    pub fn tilted_halfplane(c: f64, s: f64) -> Self {
        Self::new(FamilyId::TiltedHalfplane, &[("c", c), ("s", s)])
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn negated(mut self) -> Self {
        self.negated = !self.negated;
        self
    }

    /// Name used in reports, e.g. `negated-shifted-halfplane`.
    pub fn label(&self) -> String {
        if self.negated {
            format!("negated-{}", self.family_id)
        } else {
            self.family_id.to_string()
        }
    }

    pub fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| HqrError::MissingParameter(name.to_string()))
    }

    fn checked(&self, name: &str, domain: &'static str, ok: impl Fn(f64) -> bool) -> Result<f64> {
        let value = self.param(name)?;
        if ok(value) {
            Ok(value)
        } else {
            Err(HqrError::ParameterOutOfDomain {
                name: name.to_string(),
                value,
                domain,
            })
        }
    }

    /// Checks the parameters against the family's documented domain.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(false)
    }

    /// Validates parameters; `relaxed_floor` allows `c < 1`.
    pub fn validate_with(&self, relaxed_floor: bool) -> Result<()> {
        let allowed: Vec<&str> = self.family_id.parameter_domains().iter().map(|d| d.0).collect();
        if let Some(extra) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(HqrError::ParameterOutOfDomain {
                name: extra.clone(),
                value: self.params[extra],
                domain: "parameters of this family",
            });
        }
        let floor_ok = |c: f64| c.is_finite() && (relaxed_floor || c >= 1.0);
        match self.family_id {
            FamilyId::ShiftedHalfplane => {
                self.checked("c", "[1, ∞)", floor_ok)?;
                self.checked("k", "[0, 1)", |k| (0.0..1.0).contains(&k))?;
            }
            FamilyId::VariableDilatation => {
                self.checked("c", "[1, ∞)", floor_ok)?;
                self.checked("k", "[0, 1)", |k| (0.0..1.0).contains(&k))?;
                self.checked("m", "{0, 1, 2, …}", |m| {
                    m >= 0.0 && m.fract() == 0.0 && m <= 64.0
                })?;
            }
            FamilyId::Poisson => {
                self.checked("alpha", "(0, 1)", |a| a > 0.0 && a < 1.0)?;
                self.checked("c", "[1, ∞)", floor_ok)?;
            }
            FamilyId::TiltedHalfplane => {
                self.checked("c", "[1, ∞)", floor_ok)?;
                self.checked("s", "(0, ∞)", |s| s > 0.0 && s.is_finite())?;
            }
            FamilyId::Custom => {
                return Err(HqrError::UnknownFamily(
                    "custom families have no generator".into(),
                ))
            }
        }
        Ok(())
    }

    /// Coefficient amplitude `A` of the truncation tail `A r^{N+1}/(1−r)`.
    fn tail_amplitude(&self) -> Result<f64> {
        Ok(match self.family_id {
            FamilyId::ShiftedHalfplane | FamilyId::VariableDilatation => 2.0 * (1.0 + self.param("k")?),
            FamilyId::Poisson => poisson::coefficient_bound(self.param("alpha")?),
            FamilyId::TiltedHalfplane => {
                let s = self.param("s")?;
                2.0 * (s + (1.0 + s * s).sqrt())
            }
            FamilyId::Custom => 0.0,
        })
    }

    /// Builds the family for tests on circles of radius up to `r`.
    pub fn build(&self, r: f64) -> Result<Family> {
        self.build_with(r, false)
    }

    /// As [`FamilySpec::build`] but accepts floors `c < 1`.
    pub fn build_relaxed(&self, r: f64) -> Result<Family> {
        self.build_with(r, true)
    }

    fn build_with(&self, r: f64, relaxed_floor: bool) -> Result<Family> {
        check_radius(r)?;
        self.validate_with(relaxed_floor)?;
        let amplitude = self.tail_amplitude()?;
        let degree = self.degree.unwrap_or_else(|| auto_degree(r, amplitude));
        let mut family = match self.family_id {
            FamilyId::ShiftedHalfplane => {
                let c = self.param("c")?;
                let k = self.param("k")?;
                let map = shifted_halfplane_map(c, k, degree);
                Family::from_parts(
                    self.clone(),
                    map,
                    FamilyInfo {
                        analytic_k: Some(k),
                        u_floor: Some(c),
                        ..FamilyInfo::default()
                    },
                )
            }
            FamilyId::VariableDilatation => {
                let c = self.param("c")?;
                let k = self.param("k")?;
                let m = self.param("m")? as usize;
                let raw = variable_dilatation_map(c, k, m, degree);
                let lift = lift_needed(&raw, c, r)?;
                let map = raw.add_constant(Complex64::new(lift, 0.0));
                Family::from_parts(
                    self.clone(),
                    map,
                    FamilyInfo {
                        analytic_k: Some(k),
                        dilatation_power: m as u32,
                        u_floor: Some(c),
                        floor_radius: r,
                        lift,
                        ..FamilyInfo::default()
                    },
                )
            }
            FamilyId::Poisson => {
                let alpha = self.param("alpha")?;
                let c = self.param("c")?;
                let map = poisson_map(alpha, c, degree);
                Family::from_parts(
                    self.clone(),
                    map,
                    FamilyInfo {
                        analytic_k: Some(0.0),
                        u_floor: Some(c),
                        ..FamilyInfo::default()
                    },
                )
            }
            FamilyId::TiltedHalfplane => {
                let c = self.param("c")?;
                let s = self.param("s")?;
                let map = tilted_halfplane_map(c, s, degree);
                Family::from_parts(
                    self.clone(),
                    map,
                    FamilyInfo {
                        u_floor: Some(c),
                        im_h_sign: 1.0,
                        ..FamilyInfo::default()
                    },
                )
            }
            FamilyId::Custom => unreachable!("rejected by validate"),
        };
        family.info.tail_amplitude = amplitude;
        family.info.degree = degree;
        if self.negated {
            family = family.negate_in_place();
        }
        Ok(family)
    }
}

/// Hypotheses a family satisfies by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInfo {
    /// `sup |ω|` over the disk, when known in closed form.
    pub analytic_k: Option<f64>,
    /// `m` in `ω = k z^m`.
    pub dilatation_power: u32,
    /// `u ≥ floor`.
    pub u_floor: Option<f64>,
    /// `u ≤ ceiling`.
    pub u_ceiling: Option<f64>,
    /// Sign of `Im h` when it never vanishes, else 0.
    pub im_h_sign: f64,
    /// Radius up to which the floor/ceiling is guaranteed (1 for the whole disk).
    pub floor_radius: f64,
    /// Real constant added to `h` to reach the floor.
    pub lift: f64,
    pub tail_amplitude: f64,
    pub degree: usize,
}

impl Default for FamilyInfo {
    fn default() -> Self {
        Self {
            analytic_k: None,
            dilatation_power: 0,
            u_floor: None,
            u_ceiling: None,
            im_h_sign: 0.0,
            floor_radius: 1.0,
            lift: 0.0,
            tail_amplitude: 0.0,
            degree: 0,
        }
    }
}

/// A generated map together with its spec and metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub spec: FamilySpec,
    pub map: HarmonicMap,
    pub info: FamilyInfo,
}

impl Family {
    fn from_parts(spec: FamilySpec, map: HarmonicMap, info: FamilyInfo) -> Self {
        Self { spec, map, info }
    }

    /// Wraps an arbitrary map; no hypotheses are assumed.
    pub fn custom(map: HarmonicMap) -> Self {
        let degree = map.degree();
        Self {
            spec: FamilySpec::new(FamilyId::Custom, &[]),
            map,
            info: FamilyInfo {
                degree,
                ..FamilyInfo::default()
            },
        }
    }

    /// `K = (1+k)/(1−k)` from the closed-form `k`.
    pub fn analytic_big_k(&self) -> Option<f64> {
        self.info.analytic_k.map(crate::harmonic::distortion_from_k)
    }

    /// `A r^{N+1}/(1−r)`: bound on what truncation dropped on `|z| = r`.
    pub fn truncation_bound(&self, r: f64) -> f64 {
        if self.info.tail_amplitude == 0.0 {
            return 0.0;
        }
        self.info.tail_amplitude * r.powi(self.info.degree as i32 + 1) / (1.0 - r)
    }

    pub fn u0(&self) -> f64 {
        self.map.u0()
    }

    fn negate_in_place(mut self) -> Self {
        self.map = self.map.negate();
        let info = &mut self.info;
        std::mem::swap(&mut info.u_floor, &mut info.u_ceiling);
        info.u_floor = info.u_floor.map(|c| -c);
        info.u_ceiling = info.u_ceiling.map(|c| -c);
        info.im_h_sign = -info.im_h_sign;
        self
    }
}

/// `e^{iπ} f` of the family described by `spec`, built for radius `r`.
pub fn make_negative_variant(spec: &FamilySpec, r: f64) -> Result<Family> {
    let mut negated = spec.clone();
    negated.negated = !spec.negated;
    negated.build(r)
}

/// Smallest degree `N ≥ 256` with `A r^{N+1}/(1−r) ≤ TRUNCATION_TOLERANCE`.
pub fn auto_degree(r: f64, amplitude: f64) -> usize {
    if r <= 0.0 || amplitude <= 0.0 {
        return DEFAULT_DEGREE;
    }
    let needed = (TRUNCATION_TOLERANCE * (1.0 - r) / amplitude).ln() / r.ln();
    let n = needed.ceil().max(0.0) as usize;
    n.saturating_sub(1).clamp(DEFAULT_DEGREE, MAX_AUTO_DEGREE)
}

/// `P(z) = (1+z)/(1−z)` truncated at degree `n`.
fn halfplane_series(n: usize) -> CoefficientSeries {
    let mut coeffs = vec![2.0; n + 1];
    coeffs[0] = 1.0;
    CoefficientSeries::from_real(&coeffs).expect("finite")
}

/// `h(0) = c + 1 + k` so that `u = c + (1+k) Re P` with no offset from `g`.
fn halfplane_h(c: f64, k: f64, n: usize) -> CoefficientSeries {
    halfplane_series(n).with_constant(Complex64::new(c + 1.0 + k, 0.0))
}

fn shifted_halfplane_map(c: f64, k: f64, n: usize) -> HarmonicMap {
    let h = halfplane_h(c, k, n);
    let g = &(&h - &CoefficientSeries::constant(h.coeff(0))) * k;
    HarmonicMap::new(h, g).expect("g(0) = 0")
}

fn variable_dilatation_map(c: f64, k: f64, m: usize, n: usize) -> HarmonicMap {
    let h = halfplane_h(c, k, n);
    let g = (&h.derivative().shift_up(m) * k).antiderivative();
    HarmonicMap::new(h, g).expect("antiderivative vanishes at 0")
}

fn poisson_map(alpha: f64, c: f64, n: usize) -> HarmonicMap {
    let a = poisson::cosine_coefficients(alpha, n);
    let mut coeffs = a.clone();
    coeffs[0] = c + a[0] / 2.0;
    HarmonicMap::analytic(CoefficientSeries::from_real(&coeffs).expect("finite"))
}

fn tilted_halfplane_map(c: f64, s: f64, n: usize) -> HarmonicMap {
    let p = halfplane_series(n);
    let h = (&p * Complex64::new(0.0, s)).with_constant(Complex64::new(c + 1.0, s));
    let g = &(&p - &CoefficientSeries::constant(Complex64::new(1.0, 0.0))) * Complex64::new(1.0, -s);
    HarmonicMap::new(h, g).expect("g(0) = 0")
}

/// Real constant that brings the sampled minimum of `u` on `|z| = r` to
/// `floor + LIFT_MARGIN`; zero when the map already clears the floor.
///
/// `u` is harmonic, so its minimum over `|z| ≤ r` sits on the circle.
fn lift_needed(map: &HarmonicMap, floor: f64, r: f64) -> Result<f64> {
    let m = grid_size_for_degree(map.degree());
    let u = eval_harmonic(map, r, m)?.re();
    let min_u = u.values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((floor + LIFT_MARGIN - min_u).max(0.0))
}

/// `h = c + k + (1+z)/(1−z)` truncated at `N`, `g = k (h − h(0))`, so that
/// `u = c + (1+k) Re((1+z)/(1−z)) ≥ c` and `u(0) = c + 1 + k`.
pub fn make_shifted_halfplane(c: f64, k: f64, degree: usize) -> Result<HarmonicMap> {
    FamilySpec::shifted_halfplane(c, k).validate()?;
    Ok(shifted_halfplane_map(c, k, degree))
}

/// `h` as in [`make_shifted_halfplane`], `g = ∫ k ζ^m h'(ζ) dζ`, so `ω = k z^m`.
///
/// No lift is applied; [`FamilySpec::build`] adds the constant that keeps
/// `u ≥ c` on the tested disk.
pub fn make_variable_dilatation(c: f64, k: f64, m: u32, degree: usize) -> Result<HarmonicMap> {
    FamilySpec::variable_dilatation(c, k, m).validate()?;
    Ok(variable_dilatation_map(c, k, m as usize, degree))
}

/// `u = c + Poisson extension of |θ|^{−α}`, analytic completion with `v(0) = 0`.
pub fn make_poisson_family(alpha: f64, c: f64, degree: usize) -> Result<HarmonicMap> {
    FamilySpec::poisson(alpha, c).validate()?;
    Ok(poisson_map(alpha, c, degree))
}

/// `Re f = c + Re P` with `Im h = s Re P > 0`.
pub fn make_tilted_halfplane(c: f64, s: f64, degree: usize) -> Result<HarmonicMap> {
    FamilySpec::tilted_halfplane(c, s).validate()?;
    Ok(tilted_halfplane_map(c, s, degree))
}
