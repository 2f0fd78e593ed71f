//! Integral means on circles, the Zygmund functional, and radial profiles.
//!
//! All circle integrals use the equal-weight periodic trapezoidal rule, so
//! `(1/2π) ∫ φ dθ` becomes the plain average of the samples.

use serde::{Deserialize, Serialize};

use crate::error::{HqrError, Result};
use crate::harmonic::{eval_harmonic, HarmonicMap};
use crate::series::{eval_analytic, grid_size_for_degree, CircleSamples, CoefficientSeries};

/// Relative change tolerated when a grid is doubled.
pub const DOUBLING_TOLERANCE: f64 = 1e-8;

/// Anything that has a modulus.
pub trait Magnitude: Copy {
    fn magnitude(self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Magnitude for num_complex::Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// `log⁺ x = max(log x, 0)`, exactly zero for `x ≤ 1`.
pub fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// `M_p(r, ·)` from circle samples. `p = f64::INFINITY` gives the sampled maximum.
pub fn integral_mean<T: Magnitude>(samples: &CircleSamples<T>, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(samples.values.iter().map(|v| v.magnitude()).fold(0.0, f64::max));
    }
    let power = pth_power_mean(samples, p)?;
    Ok(if p == 1.0 { power } else { power.powf(1.0 / p) })
}

/// `M_p^p(r, ·)`, the p-th power mean without the root; `0 < p < 1` is allowed.
pub fn pth_power_mean<T: Magnitude>(samples: &CircleSamples<T>, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(HqrError::InvalidExponent {
            p, domain: "(0, ∞)"
        });
    }
    if samples.values.is_empty() {
        return Err(HqrError::EmptyGrid);
    }
    let values = samples.values.iter().map(|v| v.magnitude());
    let total = if p == 1.0 {
        compensated_sum(values)
    } else if p == 2.0 {
        compensated_sum(values.map(|a| a * a))
    } else {
        compensated_sum(values.map(|a| a.powf(p)))
    };
    Ok(total / samples.values.len() as f64)
}

/// Neumaier's compensated sum.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Parseval: `M_2(r, Σ c_n z^n) = (Σ |c_n|² r^{2n})^{1/2}`.
pub fn m2_exact(s: &CoefficientSeries, r: f64) -> f64 {
    let r2 = r * r;
    let mut weight = 1.0;
    let mut total = 0.0;
    for c in s.coeffs() {
        total += c.norm_sqr() * weight;
        weight *= r2;
    }
    total.sqrt()
}

/// `(1/2π) ∫ |u| log⁺|u| dθ` from real samples.
pub fn zygmund_functional(u: &CircleSamples<f64>) -> f64 {
    if u.values.is_empty() {
        return 0.0;
    }
    let total = compensated_sum(u.values.iter().map(|v| {
        let a = v.abs();
        a * log_plus(a)
    }));
    total / u.values.len() as f64
}

/// Value computed on a grid of `M` points together with its change when the
/// grid is doubled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub value: f64,
    pub doubling_delta: f64,
}

impl Resolved {
    pub fn relative_delta(&self) -> f64 {
        self.doubling_delta / self.value.abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_resolved(&self) -> bool {
        self.doubling_delta <= DOUBLING_TOLERANCE * self.value.abs().max(1e-300)
    }
}

/// Runs `compute` on grids `m` and `2m`.
pub fn with_doubling(m: usize, compute: impl Fn(usize) -> Result<f64>) -> Result<Resolved> {
    let value = compute(m)?;
    let refined = compute(2 * m)?;
    Ok(Resolved {
        value,
        doubling_delta: (refined - value).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `M_p(r, f)`.
    MeanOfF,
    /// `M_p(r, u)` with `u = Re f`.
    MeanOfU,
    /// `M_p(r, v)` with `v = Im f`.
    MeanOfV,
    /// `M_p(r, F)` with `F = h + g`.
    MeanOfAnalyticSum,
    /// `(1/2π) ∫ |u| log⁺|u| dθ`.
    ZygmundOfU,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::MeanOfF,
        Quantity::MeanOfU,
        Quantity::MeanOfV,
        Quantity::MeanOfAnalyticSum,
        Quantity::ZygmundOfU,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Quantity::MeanOfF => "mean-of-f",
            Quantity::MeanOfU => "mean-of-u",
            Quantity::MeanOfV => "mean-of-v",
            Quantity::MeanOfAnalyticSum => "mean-of-analytic-sum",
            Quantity::ZygmundOfU => "zygmund-of-u",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.tag() == tag)
    }

    /// The quantity on the circle `|z| = r` with `m` samples.
    pub fn evaluate(&self, map: &HarmonicMap, p: f64, r: f64, m: usize) -> Result<f64> {
        match self {
            Quantity::MeanOfF => integral_mean(&eval_harmonic(map, r, m)?, p),
            Quantity::MeanOfU => integral_mean(&eval_harmonic(map, r, m)?.re(), p),
            Quantity::MeanOfV => integral_mean(&eval_harmonic(map, r, m)?.im(), p),
            Quantity::MeanOfAnalyticSum => integral_mean(&eval_analytic(&map.analytic_sum(), r, m)?, p),
            Quantity::ZygmundOfU => Ok(zygmund_functional(&eval_harmonic(map, r, m)?.re())),
        }
    }
}

/// A quantity tabulated over increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub quantity_tag: String,
}

impl RadialProfile {
    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn first(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

/// `r_j = 1 − 2^{−j}` for `j = 1..=count`.
pub fn default_radii(count: u32) -> Vec<f64> {
    (1..=count).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    let in_range = radii.iter().all(|r| (0.0..1.0).contains(r));
    if radii.is_empty() || !increasing || !in_range {
        return Err(HqrError::InvalidRadii);
    }
    Ok(())
}

/// Tabulates `quantity` over `radii` using the default grid for the map's degree.
pub fn radial_profile(map: &HarmonicMap, quantity: Quantity, p: f64, radii: &[f64]) -> Result<RadialProfile> {
    radial_profile_on_grid(map, quantity, p, radii, grid_size_for_degree(map.degree()))
}

/// [`radial_profile`] with an explicit circle grid of `m` samples.
pub fn radial_profile_on_grid(
    map: &HarmonicMap,
    quantity: Quantity,
    p: f64,
    radii: &[f64],
    m: usize,
) -> Result<RadialProfile> {
    check_radii(radii)?;
    let values = radii
        .iter()
        .map(|&r| quantity.evaluate(map, p, r, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile {
        radii: radii.to_vec(),
        values,
        quantity_tag: format!("{}(p={})", quantity.tag(), p),
    })
}

/// True iff the profile never drops by more than `1e-12` (relative) between
/// consecutive radii.
pub fn monotone_flag(profile: &RadialProfile) -> bool {
    profile
        .values
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let var: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn constant_samples(c: Complex64, m: usize) -> CircleSamples<Complex64> {
        CircleSamples {
            radius: 0.5,
            values: vec![c; m],
        }
    }

    #[test]
    fn constant_samples_have_constant_means() {
        let c = Complex64::new(3.0, -4.0);
        let s = constant_samples(c, 17);
        for p in [0.3, 1.0, 2.0, 7.5, f64::INFINITY] {
            assert!((integral_mean(&s, p).unwrap() - 5.0).abs() < 1e-13);
        }
        assert!((pth_power_mean(&s, 0.5).unwrap() - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn identity_on_circle() {
        let z = eval_analytic(&CoefficientSeries::monomial(1), 0.9, 64).unwrap();
        assert!((integral_mean(&z, 7.0).unwrap() - 0.9).abs() < 1e-14);
    }

    #[test]
    fn parseval_small_case() {
        let s = CoefficientSeries::from_real(&[1.0, 1.0]).unwrap();
        let samples = eval_analytic(&s, 0.5, 1024).unwrap();
        let expected = 1.25f64.sqrt();
        assert!((integral_mean(&samples, 2.0).unwrap() - expected).abs() < 1e-9);
        assert!((m2_exact(&s, 0.5) - expected).abs() < 1e-15);
        let z = CoefficientSeries::monomial(1);
        assert!((m2_exact(&z, 0.37) - 0.37).abs() < 1e-16);
    }

    #[test]
    fn rejects_nonpositive_exponent() {
        let s = constant_samples(Complex64::new(1.0, 0.0), 4);
        assert!(integral_mean(&s, 0.0).is_err());
        assert!(pth_power_mean(&s, -1.0).is_err());
        assert!(pth_power_mean(&s, f64::NAN).is_err());
    }

    #[test]
    fn zygmund_functional_examples() {
        let ones = CircleSamples {
            radius: 0.5,
            values: vec![1.0; 32],
        };
        assert_eq!(zygmund_functional(&ones), 0.0);
        let small = CircleSamples {
            radius: 0.5,
            values: vec![0.3, -0.9, 1.0, -1.0],
        };
        assert_eq!(zygmund_functional(&small), 0.0);
        let e = CircleSamples {
            radius: 0.5,
            values: vec![std::f64::consts::E; 32],
        };
        assert!((zygmund_functional(&e) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn zygmund_of_shifted_cosine_matches_dense_grid() {
        let sampled = |m: usize| CircleSamples {
            radius: 0.0,
            values: (0..m)
                .map(|j| 2.0 + (std::f64::consts::TAU * j as f64 / m as f64).cos())
                .collect(),
        };
        let coarse = zygmund_functional(&sampled(1024));
        let dense = zygmund_functional(&sampled(10240));
        assert!((coarse - dense).abs() < 1e-9);
    }

    #[test]
    fn default_radii_approach_one() {
        let radii = default_radii(10);
        assert_eq!(radii.len(), 10);
        assert_eq!(radii[0], 0.5);
        assert_eq!(radii[9], 1.0 - 1.0 / 1024.0);
    }

    #[test]
    fn profile_of_identity_equals_radii() {
        let map = HarmonicMap::analytic(CoefficientSeries::monomial(1));
        let radii: Vec<f64> = (1..=9).map(|j| j as f64 / 10.0).collect();
        let profile = radial_profile(&map, Quantity::MeanOfF, 1.0, &radii).unwrap();
        for (r, v) in radii.iter().zip(&profile.values) {
            assert!((r - v).abs() < 1e-14, "{r} vs {v}");
        }
        assert!(monotone_flag(&profile));
    }

    #[test]
    fn constant_profile_is_monotone() {
        let map = HarmonicMap::analytic(CoefficientSeries::constant(Complex64::new(2.0, 1.0)));
        let profile = radial_profile(&map, Quantity::MeanOfF, 3.0, &[0.1, 0.5, 0.9]).unwrap();
        assert!(monotone_flag(&profile));
    }

    #[test]
    fn decreasing_profile_is_flagged() {
        let profile = RadialProfile {
            radii: vec![0.1, 0.2],
            values: vec![1.0, 0.99],
            quantity_tag: "x".into(),
        };
        assert!(!monotone_flag(&profile));
    }

    #[test]
    fn quantity_tags_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(Quantity::from_tag(q.tag()), Some(q));
        }
    }
}
