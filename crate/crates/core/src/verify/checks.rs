use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;

use super::{
    build_report, evaluate_doubled, power_mean_sensitivity, power_sensitivity, ratio, zygmund_sensitivity,
    Evaluated, InequalityReport, Sides, TheoremId, Verdict, DILATATION_SLACK, FLOOR_SLACK, ORIGIN_SLACK,
};
use crate::error::{HqrError, Result};
use crate::harmonic::{
    conjugate_of_real_part, distortion_from_k, estimate_quasiregularity, eval_harmonic, EPS_ZERO,
};
use crate::means::{check_radii, integral_mean, pth_power_mean, zygmund_functional};
use crate::series::{check_radius, eval_analytic, grid_size_for_degree, CircleSamples, CoefficientSeries};
use crate::zoo::Family;

/// Grid override shared by all checkers; `None` uses the default for the map's degree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub grid: Option<usize>,
}

impl CheckOptions {
    fn grid_for(&self, family: &Family) -> usize {
        self.grid
            .unwrap_or_else(|| grid_size_for_degree(family.map.degree()))
    }
}

/// `sec(pπ/2)`.
pub fn secant_constant(p: f64) -> f64 {
    1.0 / (p * PI / 2.0).cos()
}

/// `cos(pπ/2)`.
pub fn cosine_constant(p: f64) -> f64 {
    (p * PI / 2.0).cos()
}

fn range(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// `+1` when `u ≥ 1` on the samples, `−1` when `u ≤ −1`.
fn unit_floor_side(u: &[f64]) -> Result<f64> {
    let (lo, hi) = range(u);
    if lo >= 1.0 - FLOOR_SLACK {
        Ok(1.0)
    } else if hi <= -1.0 + FLOOR_SLACK {
        Ok(-1.0)
    } else {
        Err(HqrError::hypothesis(
            "u >= 1 or u <= -1",
            format!("sampled u ranges over [{lo}, {hi}]"),
        ))
    }
}

fn require_normalized(family: &Family) -> Result<()> {
    let v0 = family.map.v0();
    if v0.abs() > ORIGIN_SLACK {
        return Err(HqrError::hypothesis("v(0) = 0", format!("v(0) = {v0}")));
    }
    Ok(())
}

fn require_exponent(p: f64, domain: &'static str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(HqrError::InvalidExponent { p, domain })
    }
}

/// `K` used by strict checks and the sampled estimate behind it.
struct Distortion {
    big_k: f64,
    k_hat: f64,
}

impl Distortion {
    fn record(&self, metadata: &mut BTreeMap<String, f64>) {
        metadata.insert("big_k".into(), self.big_k);
        metadata.insert("k_hat".into(), self.k_hat);
        if self.k_hat < 1.0 {
            metadata.insert("big_k_hat".into(), distortion_from_k(self.k_hat));
        }
    }
}

/// Prefers the family's documented `k`; the sampled `|ω|` must not exceed it.
/// Maps with `g ≡ 0` are analytic and get `K = 1` without sampling `ω`.
fn distortion(family: &Family, r: f64, m: usize) -> Result<Distortion> {
    if family.map.g().coeffs().iter().all(|c| c.norm() == 0.0) {
        return Ok(Distortion {
            big_k: 1.0,
            k_hat: 0.0,
        });
    }
    let estimate = estimate_quasiregularity(&family.map, &[r], m).map_err(|e| match e {
        HqrError::DegenerateDilatation { index, modulus } => HqrError::hypothesis(
            "quasiregular",
            format!("h' vanishes at sample {index} (|h'| = {modulus})"),
        ),
        other => other,
    })?;
    let k_hat = estimate.k_hat;
    match family.info.analytic_k {
        Some(k) if k_hat > k + DILATATION_SLACK => Err(HqrError::hypothesis(
            "quasiregular",
            format!("sampled |omega| = {k_hat} exceeds documented k = {k}"),
        )),
        Some(k) => Ok(Distortion {
            big_k: distortion_from_k(k),
            k_hat,
        }),
        None if estimate.valid => Ok(Distortion {
            big_k: estimate.big_k_hat,
            k_hat,
        }),
        None => Err(HqrError::hypothesis(
            "quasiregular",
            format!("sampled |omega| reaches {k_hat}"),
        )),
    }
}

/// `U = u + i ṽ` for `u = Re f`, with `ṽ` the conjugate normalized at 0.
fn conjugate_pair(family: &Family) -> CoefficientSeries {
    conjugate_of_real_part(&family.map.analytic_sum())
}

fn zygmund_hqr_sides(family: &Family, r: f64, m: usize, big_k: f64) -> Result<Evaluated> {
    let k2 = big_k * big_k;
    let a0 = family.map.u0().abs();
    let constant = a0 * (1.0 - k2 * a0.ln());
    let tb = family.truncation_bound(r);
    evaluate_doubled(m, |grid| {
        let f = eval_harmonic(&family.map, r, grid)?;
        let u = f.re();
        Ok(Sides {
            lhs: integral_mean(&f, 1.0)?,
            rhs: k2 * zygmund_functional(&u) + constant,
            truncation: tb + k2 * zygmund_sensitivity(tb, max_abs(&u.values)),
        })
    })
}

/// `M_1(r, f) ≤ K² (1/2π)∫|u|log⁺|u| dθ + |u(0)|(1 − K² log|u(0)|)`.
///
/// Requires `u ≥ 1` or `u ≤ −1` on the sampled circle, `v(0) = 0` and
/// `|ω| < 1`.
pub fn check_zygmund_hqr(family: &Family, r: f64, opts: CheckOptions) -> Result<InequalityReport> {
    check_radius(r)?;
    let m = opts.grid_for(family);
    let u = eval_harmonic(&family.map, r, m)?.re();
    let side = unit_floor_side(&u.values)?;
    require_normalized(family)?;
    let d = distortion(family, r, m)?;
    let sides = zygmund_hqr_sides(family, r, m, d.big_k)?;

    let (lo, hi) = range(&u.values);
    let mut metadata = BTreeMap::from([
        ("u0".to_string(), family.map.u0()),
        ("min_u".to_string(), lo),
        ("max_u".to_string(), hi),
        ("u_sign".to_string(), side),
        ("grid".to_string(), m as f64),
    ]);
    d.record(&mut metadata);
    let verdict = Verdict::strict(sides.rhs - sides.lhs, sides.budget(), sides.resolved());
    Ok(build_report(
        TheoremId::ZygmundHqr,
        family,
        r,
        None,
        &sides,
        verdict,
        metadata,
    ))
}

/// The same bound on maps with `u ≥ C` for some `C < 1`; margins are
/// recorded without a verdict.
pub fn check_zygmund_hqr_experimental(
    family: &Family,
    r: f64,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    check_radius(r)?;
    let m = opts.grid_for(family);
    let u = eval_harmonic(&family.map, r, m)?.re();
    require_normalized(family)?;
    let d = distortion(family, r, m)?;
    let sides = zygmund_hqr_sides(family, r, m, d.big_k)?;
    let (lo, hi) = range(&u.values);
    let mut metadata = BTreeMap::from([
        ("u0".to_string(), family.map.u0()),
        ("min_u".to_string(), lo),
        ("max_u".to_string(), hi),
        ("grid".to_string(), m as f64),
    ]);
    d.record(&mut metadata);
    Ok(build_report(
        TheoremId::ZygmundHqrExperimental,
        family,
        r,
        None,
        &sides,
        Verdict::ReportOnly,
        metadata,
    ))
}

/// `M_1(r, ṽ) ≤ (1/2π)∫|u|log⁺|u| dθ + 3e` for `u = Re f` and its
/// conjugate `ṽ` with `ṽ(0) = 0`.
pub fn check_zygmund_classical(family: &Family, r: f64, opts: CheckOptions) -> Result<InequalityReport> {
    check_radius(r)?;
    let m = opts.grid_for(family);
    let pair = conjugate_pair(family);
    let tb = family.truncation_bound(r);
    let sides = evaluate_doubled(m, |grid| {
        let s = eval_analytic(&pair, r, grid)?;
        let u = s.re();
        Ok(Sides {
            lhs: integral_mean(&s.im(), 1.0)?,
            rhs: zygmund_functional(&u) + 3.0 * E,
            truncation: tb + zygmund_sensitivity(tb, max_abs(&u.values)),
        })
    })?;
    let metadata = BTreeMap::from([("grid".to_string(), m as f64)]);
    let verdict = Verdict::strict(sides.rhs - sides.lhs, sides.budget(), sides.resolved());
    Ok(build_report(
        TheoremId::ZygmundClassical,
        family,
        r,
        None,
        &sides,
        verdict,
        metadata,
    ))
}

fn conjugate_ratio(
    theorem: TheoremId,
    family: &Family,
    p: f64,
    rhs_exponent: f64,
    r: f64,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    check_radius(r)?;
    let m = opts.grid_for(family);
    let pair = conjugate_pair(family);
    let tb = family.truncation_bound(r);
    let sides = evaluate_doubled(m, |grid| {
        let s = eval_analytic(&pair, r, grid)?;
        Ok(Sides {
            lhs: integral_mean(&s.im(), p)?,
            rhs: integral_mean(&s.re(), rhs_exponent)?,
            truncation: 2.0 * tb,
        })
    })?;
    let metadata = BTreeMap::from([
        ("ratio".to_string(), ratio(sides.lhs, sides.rhs)),
        ("grid".to_string(), m as f64),
    ]);
    Ok(build_report(
        theorem,
        family,
        r,
        Some(p),
        &sides,
        Verdict::ReportOnly,
        metadata,
    ))
}

/// Ratio `M_p(r, ṽ) / M_p(r, u)` for `1 < p < ∞`.
pub fn check_riesz_ratio(family: &Family, p: f64, r: f64, opts: CheckOptions) -> Result<InequalityReport> {
    require_exponent(p, "(1, ∞)", p > 1.0 && p.is_finite())?;
    conjugate_ratio(TheoremId::RieszRatio, family, p, p, r, opts)
}

/// Ratio `M_p(r, ṽ) / M_1(r, u)` for `0 < p < 1`.
pub fn check_kolmogorov_classical(
    family: &Family,
    p: f64,
    r: f64,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    require_exponent(p, "(0, 1)", p > 0.0 && p < 1.0)?;
    conjugate_ratio(TheoremId::KolmogorovClassical, family, p, 1.0, r, opts)
}

/// `M_2(r, ṽ)² + u(0)² = M_2(r, u)²`, checked two-sided.
pub fn check_riesz_identity(family: &Family, r: f64, opts: CheckOptions) -> Result<InequalityReport> {
    check_radius(r)?;
    let m = opts.grid_for(family);
    let pair = conjugate_pair(family);
    let u0 = pair.coeff(0).re;
    let tb = family.truncation_bound(r);
    let sides = evaluate_doubled(m, |grid| {
        let s = eval_analytic(&pair, r, grid)?;
        let mv = pth_power_mean(&s.im(), 2.0)?;
        let mu = pth_power_mean(&s.re(), 2.0)?;
        Ok(Sides {
            lhs: mv + u0 * u0,
            rhs: mu,
            truncation: (2.0 * mv.sqrt() + tb) * tb + (2.0 * mu.sqrt() + tb) * tb,
        })
    })?;
    let metadata = BTreeMap::from([("u0".to_string(), u0), ("grid".to_string(), m as f64)]);
    let verdict = Verdict::identity(sides.rhs - sides.lhs, sides.budget(), sides.resolved());
    Ok(build_report(
        TheoremId::RieszIdentity,
        family,
        r,
        Some(2.0),
        &sides,
        verdict,
        metadata,
    ))
}

struct PowerMeans {
    m1p: f64,
    mpu: f64,
    mpv: f64,
    sens_m1p: f64,
    sens_u: f64,
    sens_v: f64,
}

fn power_means(f: &CircleSamples<Complex64>, p: f64, tb: f64) -> Result<PowerMeans> {
    let u = f.re();
    let v = f.im();
    let m1 = integral_mean(&u, 1.0)?;
    Ok(PowerMeans {
        m1p: m1.powf(p),
        mpu: pth_power_mean(&u, p)?,
        mpv: pth_power_mean(&v, p)?,
        sens_m1p: power_sensitivity(m1, p, tb),
        sens_u: power_mean_sensitivity(&u.values, p, tb),
        sens_v: power_mean_sensitivity(&v.values, p, tb),
    })
}

/// Both quasiregular Kolmogorov-type inequalities for `0 < p < 1`:
///
/// * upper: `M_p^p(v) ≤ sec(pπ/2)(K² M_1^p(u) − (K²−1) M_p^p(u))`;
/// * lower: `(2−K²) M_1^p(u) ≤ (2−K²) M_p^p(u) + cos(pπ/2) M_p^p(v)`,
///   reported as `(2−K²)(M_1^p(u) − M_p^p(u)) ≤ cos(pπ/2) M_p^p(v)`.
///
/// `M_1^p` is `(M_1)^p` and `M_p^p` is the p-th power mean.
pub fn check_kolmogorov_hqr(
    family: &Family,
    p: f64,
    r: f64,
    opts: CheckOptions,
) -> Result<(InequalityReport, InequalityReport)> {
    require_exponent(p, "(0, 1)", p > 0.0 && p < 1.0)?;
    check_radius(r)?;
    let m = opts.grid_for(family);
    let u = eval_harmonic(&family.map, r, m)?.re();
    let (lo, hi) = range(&u.values);
    if lo <= 0.0 {
        return Err(HqrError::hypothesis("u > 0", format!("sampled min u = {lo}")));
    }
    require_normalized(family)?;
    let d = distortion(family, r, m)?;
    let k2 = d.big_k * d.big_k;
    let sec = secant_constant(p);
    let cos = cosine_constant(p);
    let tb = family.truncation_bound(r);

    let coarse = power_means(&eval_harmonic(&family.map, r, m)?, p, tb)?;
    let fine = power_means(&eval_harmonic(&family.map, r, 2 * m)?, p, tb)?;
    let upper_sides = |pm: &PowerMeans| Sides {
        lhs: pm.mpv,
        rhs: sec * (k2 * pm.m1p - (k2 - 1.0) * pm.mpu),
        truncation: pm.sens_v + sec * (k2 * pm.sens_m1p + (k2 - 1.0) * pm.sens_u),
    };
    // Rearranged as (2−K²)(M_1^p − M_p^p(u)) ≤ cos(pπ/2) M_p^p(v): the margin is
    // unchanged and both sides are nonnegative when K² < 2.
    let lower_sides = |pm: &PowerMeans| Sides {
        lhs: (2.0 - k2) * (pm.m1p - pm.mpu),
        rhs: cos * pm.mpv,
        truncation: (2.0 - k2).abs() * (pm.sens_m1p + pm.sens_u) + cos * pm.sens_v,
    };
    let upper = Evaluated::from_pair(upper_sides(&coarse), upper_sides(&fine));
    let lower = Evaluated::from_pair(lower_sides(&coarse), lower_sides(&fine));
    let literal = &coarse;

    let mut metadata = BTreeMap::from([
        ("sec".to_string(), sec),
        ("cos".to_string(), cos),
        ("u0".to_string(), family.map.u0()),
        ("min_u".to_string(), lo),
        ("max_u".to_string(), hi),
        ("grid".to_string(), m as f64),
    ]);
    d.record(&mut metadata);
    let report = |theorem, sides: &Evaluated, metadata: BTreeMap<String, f64>| {
        let verdict = Verdict::strict(sides.rhs - sides.lhs, sides.budget(), sides.resolved());
        build_report(theorem, family, r, Some(p), sides, verdict, metadata)
    };
    let mut lower_metadata = metadata.clone();
    lower_metadata.insert("literal_lhs".into(), (2.0 - k2) * literal.m1p);
    lower_metadata.insert("literal_rhs".into(), (2.0 - k2) * literal.mpu + cos * literal.mpv);
    Ok((
        report(TheoremId::KolmogorovHqrUpper, &upper, metadata),
        report(TheoremId::KolmogorovHqrLower, &lower, lower_metadata),
    ))
}

/// Ratio `M_p(r, v) / M_p(r, u)` for quasiregular `f` with `u ≥ 0`, `v(0) = 0`, `1 < p ≤ 2`.
pub fn check_riesz_hqr_ratio(
    family: &Family,
    p: f64,
    r: f64,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    require_exponent(p, "(1, 2]", p > 1.0 && p <= 2.0)?;
    check_radius(r)?;
    let m = opts.grid_for(family);
    let u = eval_harmonic(&family.map, r, m)?.re();
    let (lo, _) = range(&u.values);
    if lo < -FLOOR_SLACK {
        return Err(HqrError::hypothesis("u >= 0", format!("sampled min u = {lo}")));
    }
    require_normalized(family)?;
    let d = distortion(family, r, m)?;
    let tb = family.truncation_bound(r);
    let sides = evaluate_doubled(m, |grid| {
        let f = eval_harmonic(&family.map, r, grid)?;
        Ok(Sides {
            lhs: integral_mean(&f.im(), p)?,
            rhs: integral_mean(&f.re(), p)?,
            truncation: 2.0 * tb,
        })
    })?;
    let mut metadata = BTreeMap::from([
        ("ratio".to_string(), ratio(sides.lhs, sides.rhs)),
        ("grid".to_string(), m as f64),
    ]);
    d.record(&mut metadata);
    Ok(build_report(
        TheoremId::RieszHqrRatio,
        family,
        r,
        Some(p),
        &sides,
        Verdict::ReportOnly,
        metadata,
    ))
}

/// Relative growth of the final step below which a profile counts as bounded.
pub const STABILIZATION_THRESHOLD: f64 = 0.05;

/// Tabulates `M_1(r, F)`, `F = h + g`, over `radii` when `Im h` does not
/// vanish on any sampled circle.
///
/// The report sits at the last radius with `lhs = M_1(F)` and
/// `rhs = M_1(f)`; `bounded` is 1 when the last step grows by less than
/// [`STABILIZATION_THRESHOLD`].
pub fn check_analytic_sum_h1(family: &Family, radii: &[f64], opts: CheckOptions) -> Result<InequalityReport> {
    check_radii(radii)?;
    let m = opts.grid_for(family);
    let sum = family.map.analytic_sum();
    let mut min_abs_im_h = f64::INFINITY;
    let mut profile = Vec::with_capacity(radii.len());
    for &r in radii {
        let im_h = family.map.h().eval_circle(r, m)?.im();
        let local = im_h.values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        if local <= EPS_ZERO {
            return Err(HqrError::hypothesis(
                "Im h nonvanishing",
                format!("min |Im h| = {local} on |z| = {r}"),
            ));
        }
        min_abs_im_h = min_abs_im_h.min(local);
        profile.push(integral_mean(&eval_analytic(&sum, r, m)?, 1.0)?);
    }
    let r = *radii.last().expect("checked nonempty");
    let tb = family.truncation_bound(r);
    let sides = evaluate_doubled(m, |grid| {
        Ok(Sides {
            lhs: integral_mean(&eval_analytic(&sum, r, grid)?, 1.0)?,
            rhs: integral_mean(&eval_harmonic(&family.map, r, grid)?, 1.0)?,
            truncation: 2.0 * tb,
        })
    })?;
    let increase = match profile.as_slice() {
        [.., a, b] => (b - a) / a.abs().max(f64::MIN_POSITIVE),
        _ => 0.0,
    };
    let mut metadata = BTreeMap::from([
        ("min_abs_im_h".to_string(), min_abs_im_h),
        ("relative_increase".to_string(), increase),
        (
            "bounded".to_string(),
            if increase < STABILIZATION_THRESHOLD {
                1.0
            } else {
                0.0
            },
        ),
        ("grid".to_string(), m as f64),
    ]);
    for (r, value) in radii.iter().zip(&profile) {
        metadata.insert(format!("m1_analytic_sum@{r}"), *value);
    }
    Ok(build_report(
        TheoremId::AnalyticSumH1,
        family,
        r,
        Some(1.0),
        &sides,
        Verdict::ReportOnly,
        metadata,
    ))
}

/// `(1/2π)∫u log u dθ ≤ (π/2) M_1(r, F) + |h(0) log h(0)|` for `u ≥ 1`,
/// `F = h + g`, principal logarithm.
pub fn check_converse_bound(family: &Family, r: f64, opts: CheckOptions) -> Result<InequalityReport> {
    check_radius(r)?;
    let m = opts.grid_for(family);
    let u = eval_harmonic(&family.map, r, m)?.re();
    let (lo, hi) = range(&u.values);
    if lo < 1.0 - FLOOR_SLACK {
        return Err(HqrError::hypothesis("u >= 1", format!("sampled min u = {lo}")));
    }
    let h0 = family.map.h().coeff(0);
    if h0.im == 0.0 && h0.re <= 0.0 {
        return Err(HqrError::hypothesis(
            "h(0) off the branch cut",
            format!("h(0) = {h0}"),
        ));
    }
    let constant = (h0 * h0.ln()).norm();
    let sum = family.map.analytic_sum();
    let tb = family.truncation_bound(r);
    let sides = evaluate_doubled(m, |grid| {
        let u = eval_harmonic(&family.map, r, grid)?.re();
        Ok(Sides {
            lhs: zygmund_functional(&u),
            rhs: PI / 2.0 * integral_mean(&eval_analytic(&sum, r, grid)?, 1.0)? + constant,
            truncation: zygmund_sensitivity(tb, hi) + PI / 2.0 * tb,
        })
    })?;
    let im_h = family.map.h().eval_circle(r, m)?.im();
    let min_abs_im_h = im_h.values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let metadata = BTreeMap::from([
        ("min_u".to_string(), lo),
        ("h0_re".to_string(), h0.re),
        ("h0_im".to_string(), h0.im),
        ("min_abs_im_h".to_string(), min_abs_im_h),
        (
            "im_h_nonvanishing".to_string(),
            if min_abs_im_h > EPS_ZERO { 1.0 } else { 0.0 },
        ),
        ("grid".to_string(), m as f64),
    ]);
    let verdict = Verdict::strict(sides.rhs - sides.lhs, sides.budget(), sides.resolved());
    Ok(build_report(
        TheoremId::ConverseBound,
        family,
        r,
        None,
        &sides,
        verdict,
        metadata,
    ))
}

/// Radii used when the profile check is run at a single `r`:
/// `1 − 2^{−j} < r` followed by `r`, at least two of them.
fn profile_radii(r: f64) -> Vec<f64> {
    let mut radii: Vec<f64> = (1..=10)
        .map(|j| 1.0 - 0.5f64.powi(j))
        .filter(|&x| x < r)
        .collect();
    if radii.is_empty() {
        radii.push(r / 2.0);
    }
    radii.push(r);
    radii
}

/// Runs one theorem on one family; `p` is required exactly when the theorem
/// takes an exponent.
pub fn run_check(
    theorem: TheoremId,
    family: &Family,
    r: f64,
    p: Option<f64>,
    opts: CheckOptions,
) -> Result<Vec<InequalityReport>> {
    let exponent = || match (theorem.exponent_domain(), p) {
        (Some((domain, ok)), Some(p)) => require_exponent(p, domain, ok(p)).map(|_| p),
        (Some(_), None) => Err(HqrError::MissingParameter("p".into())),
        (None, _) => Ok(f64::NAN),
    };
    Ok(match theorem {
        TheoremId::ZygmundHqr => vec![check_zygmund_hqr(family, r, opts)?],
        TheoremId::ZygmundHqrExperimental => vec![check_zygmund_hqr_experimental(family, r, opts)?],
        TheoremId::ZygmundClassical => vec![check_zygmund_classical(family, r, opts)?],
        TheoremId::RieszRatio => vec![check_riesz_ratio(family, exponent()?, r, opts)?],
        TheoremId::RieszIdentity => vec![check_riesz_identity(family, r, opts)?],
        TheoremId::KolmogorovClassical => vec![check_kolmogorov_classical(family, exponent()?, r, opts)?],
        TheoremId::KolmogorovHqrUpper => vec![check_kolmogorov_hqr(family, exponent()?, r, opts)?.0],
        TheoremId::KolmogorovHqrLower => vec![check_kolmogorov_hqr(family, exponent()?, r, opts)?.1],
        TheoremId::RieszHqrRatio => vec![check_riesz_hqr_ratio(family, exponent()?, r, opts)?],
        TheoremId::AnalyticSumH1 => vec![check_analytic_sum_h1(family, &profile_radii(r), opts)?],
        TheoremId::ConverseBound => vec![check_converse_bound(family, r, opts)?],
        TheoremId::DecreasingCoefficientSum => vec![super::check_decreasing_coefficient_sum(
            family,
            family.map.degree(),
            r,
            None,
            None,
        )?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::HarmonicMap;
    use crate::zoo::FamilySpec;

    fn analytic(coeffs: &[f64]) -> Family {
        Family::custom(HarmonicMap::analytic(
            CoefficientSeries::from_real(coeffs).unwrap(),
        ))
    }

    const OPTS: CheckOptions = CheckOptions { grid: None };

    #[test]
    fn zygmund_hqr_on_two_plus_z() {
        let report = check_zygmund_hqr(&analytic(&[2.0, 1.0]), 0.9, OPTS).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.margin >= 0.0);
        assert_eq!(report.metadata["big_k"], 1.0);
    }

    #[test]
    fn zygmund_hqr_constant_term_at_unit_origin() {
        // u(0) = 1: the constant term is exactly 1.
        let family = analytic(&[1.0]);
        let report = check_zygmund_hqr(&family, 0.5, OPTS).unwrap();
        assert_eq!(report.rhs, 1.0);
        assert_eq!(report.lhs, 1.0);
    }

    #[test]
    fn zygmund_hqr_shifted_halfplane_k_half() {
        let family = FamilySpec::shifted_halfplane(1.0, 0.5).build(0.99).unwrap();
        let report = check_zygmund_hqr(&family, 0.99, OPTS).unwrap();
        assert!((report.metadata["big_k"] - 3.0).abs() < 1e-15);
        assert!(report.margin >= -report.error_budget);
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn zygmund_hqr_hypothesis_guards() {
        let below = analytic(&[0.5, 0.1]);
        assert!(check_zygmund_hqr(&below, 0.5, OPTS)
            .unwrap_err()
            .is_hypothesis_violation());
        let shifted = Family::custom(HarmonicMap::analytic(
            CoefficientSeries::new(vec![Complex64::new(2.0, 1.0), Complex64::new(0.1, 0.0)]).unwrap(),
        ));
        assert!(check_zygmund_hqr(&shifted, 0.5, OPTS)
            .unwrap_err()
            .is_hypothesis_violation());
        let tilted = FamilySpec::tilted_halfplane(1.0, 1.0).build(0.5).unwrap();
        assert!(check_zygmund_hqr(&tilted, 0.5, OPTS)
            .unwrap_err()
            .is_hypothesis_violation());
    }

    #[test]
    fn negation_keeps_both_sides() {
        let spec = FamilySpec::variable_dilatation(1.0, 0.2, 1);
        let base = spec.build(0.9).unwrap();
        let neg = spec.clone().negated().build(0.9).unwrap();
        let a = check_zygmund_hqr(&base, 0.9, OPTS).unwrap();
        let b = check_zygmund_hqr(&neg, 0.9, OPTS).unwrap();
        assert!((a.lhs - b.lhs).abs() <= 1e-10 * a.lhs);
        assert!((a.rhs - b.rhs).abs() <= 1e-10 * a.rhs.abs());
        assert_eq!(b.family_id, "negated-variable-dilatation");
        assert_eq!(b.metadata["u_sign"], -1.0);
    }

    #[test]
    fn zygmund_classical_examples() {
        let zero = check_zygmund_classical(&analytic(&[0.0]), 0.5, OPTS).unwrap();
        assert_eq!(zero.lhs, 0.0);
        assert!((zero.rhs - 3.0 * E).abs() < 1e-15);
        assert_eq!(zero.verdict, Verdict::Pass);
        let r = 0.7;
        let linear = check_zygmund_classical(&analytic(&[1.0, 1.0]), r, OPTS).unwrap();
        // |sin θ| has kinks, so the trapezoidal error is second order and
        // about 4/3 of the measured doubling change.
        let err = (linear.lhs - 2.0 * r / PI).abs();
        assert!(err <= 2.0 * linear.metadata["doubling_delta"], "{err}");
        assert_eq!(linear.verdict, Verdict::Pass);
    }

    #[test]
    fn zygmund_classical_poisson() {
        let family = FamilySpec::poisson(0.9, 1.0).build(0.99).unwrap();
        let report = check_zygmund_classical(&family, 0.99, OPTS).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn riesz_examples() {
        let centered = analytic(&[0.0, 1.0, -0.5]);
        let report = check_riesz_ratio(&centered, 2.0, 0.8, OPTS).unwrap();
        assert!(report.ratio() <= 1.0 + 1e-9);
        assert_eq!(report.verdict, Verdict::ReportOnly);

        let r = 0.6;
        let shifted = analytic(&[3.0, 1.0]);
        let report = check_riesz_ratio(&shifted, 2.0, r, OPTS).unwrap();
        let m2u_sq = 9.0 + r * r / 2.0;
        let expected = (1.0 - 9.0 / m2u_sq).sqrt();
        assert!((report.ratio() - expected).abs() < 1e-9);

        let half = FamilySpec::shifted_halfplane(1.0, 0.0).build(0.9).unwrap();
        let report = check_riesz_ratio(&half, 1.5, 0.9, OPTS).unwrap();
        assert!(report.ratio().is_finite());

        assert!(matches!(
            check_riesz_ratio(&half, 1.0, 0.9, OPTS),
            Err(HqrError::InvalidExponent { .. })
        ));
    }

    #[test]
    fn riesz_identity_passes() {
        for spec in [
            FamilySpec::shifted_halfplane(1.0, 0.5),
            FamilySpec::tilted_halfplane(1.0, 2.0),
            FamilySpec::poisson(0.5, 1.0),
        ] {
            let family = spec.build(0.9).unwrap();
            let report = check_riesz_identity(&family, 0.9, OPTS).unwrap();
            assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
        }
    }

    #[test]
    fn kolmogorov_classical_examples() {
        let one = check_kolmogorov_classical(&analytic(&[1.0]), 0.5, 0.9, OPTS).unwrap();
        assert_eq!(one.lhs, 0.0);
        assert_eq!(one.ratio(), 0.0);
        let family = FamilySpec::shifted_halfplane(1.0, 0.0).build(0.999).unwrap();
        let mut ratios = Vec::new();
        for r in [0.5, 0.9, 0.99, 0.999] {
            for p in [0.5, 0.9] {
                let report = check_kolmogorov_classical(&family, p, r, OPTS).unwrap();
                assert!(report.ratio().is_finite());
                if p == 0.5 {
                    ratios.push(report.ratio());
                }
            }
        }
        assert!(ratios.iter().all(|&x| x < 2.0), "{ratios:?}");
        assert!(check_kolmogorov_classical(&family, 1.0, 0.5, OPTS).is_err());
    }

    #[test]
    fn kolmogorov_constants() {
        assert!((secant_constant(0.5) - 2f64.sqrt()).abs() <= f64::EPSILON * 2.0);
        assert!((cosine_constant(0.5) - 0.5f64.sqrt()).abs() <= f64::EPSILON);
    }

    #[test]
    fn kolmogorov_hqr_examples() {
        for (k, r) in [(0.0, 0.9), (0.2, 0.9), (0.5, 0.99)] {
            let family = FamilySpec::shifted_halfplane(1.0, k).build(r).unwrap();
            let (upper, lower) = check_kolmogorov_hqr(&family, 0.5, r, OPTS).unwrap();
            assert_eq!(upper.verdict, Verdict::Pass, "{upper:?}");
            assert_eq!(lower.verdict, Verdict::Pass, "{lower:?}");
            if k == 0.0 {
                // K = 1 leaves sec(pπ/2)·M_1^p(u) on the right.
                let m = grid_size_for_degree(family.info.degree);
                let m1 = integral_mean(&eval_harmonic(&family.map, r, m).unwrap().re(), 1.0).unwrap();
                assert!((upper.rhs - 2f64.sqrt() * m1.sqrt()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn riesz_hqr_ratio_examples() {
        let centered = analytic(&[0.0, 1.0]);
        let err = check_riesz_hqr_ratio(&centered, 2.0, 0.5, OPTS).unwrap_err();
        assert!(err.is_hypothesis_violation());
        let family = FamilySpec::shifted_halfplane(1.0, 0.5).build(0.9).unwrap();
        for p in [1.5, 2.0] {
            let report = check_riesz_hqr_ratio(&family, p, 0.9, OPTS).unwrap();
            assert!(report.ratio().is_finite() && report.ratio() > 0.0);
            assert_eq!(report.metadata["big_k"], 3.0);
        }
        let analytic_pos = analytic(&[1.0, 0.5]);
        let report = check_riesz_hqr_ratio(&analytic_pos, 2.0, 0.9, OPTS).unwrap();
        assert!(report.ratio() <= 1.0);
    }

    #[test]
    fn analytic_sum_profile() {
        // h = i(2 + P), g = 0.3 (h − h(0)).
        let n = 400;
        let mut coeffs = vec![Complex64::new(0.0, 2.0); n + 1];
        coeffs[0] = Complex64::new(0.0, 3.0);
        let h = CoefficientSeries::new(coeffs).unwrap();
        let g = &(&h - &CoefficientSeries::constant(h.coeff(0))) * 0.3;
        let family = Family::custom(HarmonicMap::new(h, g).unwrap());
        let report = check_analytic_sum_h1(&family, &[0.5, 0.75, 0.9], OPTS).unwrap();
        assert!(report.metadata["min_abs_im_h"] >= 2.0);
        assert_eq!(report.verdict, Verdict::ReportOnly);

        let analytic_map = analytic(&[2.0, 1.0]);
        let err = check_analytic_sum_h1(&analytic_map, &[0.5, 0.9], OPTS).unwrap_err();
        assert!(err.is_hypothesis_violation());
    }

    #[test]
    fn analytic_sum_of_analytic_map_matches_f() {
        let h = CoefficientSeries::new(vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)]).unwrap();
        let family = Family::custom(HarmonicMap::analytic(h));
        let report = check_analytic_sum_h1(&family, &[0.5, 0.9], OPTS).unwrap();
        assert_eq!(report.lhs, report.rhs);
    }

    #[test]
    fn converse_examples() {
        let one = check_converse_bound(&analytic(&[1.0]), 0.5, OPTS).unwrap();
        assert_eq!(one.lhs, 0.0);
        assert!((one.rhs - PI / 2.0).abs() < 1e-15);
        assert_eq!(one.verdict, Verdict::Pass);

        let linear = check_converse_bound(&analytic(&[2.0, 1.0]), 0.5, OPTS).unwrap();
        assert_eq!(linear.verdict, Verdict::Pass);

        // h(0) = c + i on the shifted half-plane.
        let base = FamilySpec::shifted_halfplane(1.0, 0.2).build(0.99).unwrap();
        let lifted = Family::custom(base.map.add_constant(Complex64::new(0.0, 1.0)));
        let report = check_converse_bound(&lifted, 0.99, OPTS).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);

        let tilted = FamilySpec::tilted_halfplane(1.0, 1.0).build(0.99).unwrap();
        let report = check_converse_bound(&tilted, 0.99, OPTS).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.metadata["im_h_nonvanishing"], 1.0);
    }

    #[test]
    fn run_check_requires_exponent() {
        let family = analytic(&[2.0, 1.0]);
        assert!(matches!(
            run_check(TheoremId::KolmogorovHqrUpper, &family, 0.5, None, OPTS),
            Err(HqrError::MissingParameter(_))
        ));
        let reports = run_check(TheoremId::ZygmundHqr, &family, 0.5, None, OPTS).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(
            profile_radii(0.99),
            vec![0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375, 0.99]
        );
    }

    #[test]
    fn reports_are_reproducible() {
        let family = FamilySpec::poisson(0.5, 1.0).build(0.9).unwrap();
        let a = check_zygmund_hqr(&family, 0.9, OPTS).unwrap();
        let b = check_zygmund_hqr(&family, 0.9, OPTS).unwrap();
        assert_eq!(a.lhs.to_bits(), b.lhs.to_bits());
        assert_eq!(a.rhs.to_bits(), b.rhs.to_bits());
    }
}
