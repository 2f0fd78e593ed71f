//! Harmonic maps `f = h + conj(g)` on the disk and their complex dilatation.

use num_complex::Complex64;

use crate::error::{HqrError, Result};
use crate::series::{check_radius, eval_analytic, eval_with_conjugate, CircleSamples, CoefficientSeries};

/// Denominator guard for `h'`, `u` and `|f|`.
pub const EPS_ZERO: f64 = 1e-12;
/// A dilatation estimate within this distance of 1 is not accepted as quasiregular.
pub const EPS_MARGIN: f64 = 1e-9;

/// `f = h + conj(g)` with the normalization `g(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMap {
    h: CoefficientSeries,
    g: CoefficientSeries,
}

impl HarmonicMap {
    pub fn new(h: CoefficientSeries, g: CoefficientSeries) -> Result<Self> {
        let g0 = g.coeff(0);
        if g0 != Complex64::new(0.0, 0.0) {
            return Err(HqrError::UnnormalizedCoanalytic(g0));
        }
        Ok(Self { h, g })
    }

    /// `f = h` (zero co-analytic part).
    pub fn analytic(h: CoefficientSeries) -> Self {
        Self {
            h,
            g: CoefficientSeries::zero(),
        }
    }

    pub fn h(&self) -> &CoefficientSeries {
        &self.h
    }

    pub fn g(&self) -> &CoefficientSeries {
        &self.g
    }

    pub fn degree(&self) -> usize {
        self.h.degree().max(self.g.degree())
    }

    /// `F = h + g`, the analytic function with `Re F = Re f`.
    pub fn analytic_sum(&self) -> CoefficientSeries {
        &self.h + &self.g
    }

    /// `u(0) = Re h(0)`.
    pub fn u0(&self) -> f64 {
        self.h.coeff(0).re
    }

    /// `v(0) = Im h(0)`.
    pub fn v0(&self) -> f64 {
        self.h.coeff(0).im
    }

    /// `e^{iπ} f`: both parts change sign.
    pub fn negate(&self) -> Self {
        Self {
            h: -&self.h,
            g: -&self.g,
        }
    }

    /// `e^{iα} f = e^{iα} h + conj(e^{-iα} g)`.
    pub fn rotate(&self, alpha: f64) -> Self {
        Self {
            h: &self.h * Complex64::from_polar(1.0, alpha),
            g: &self.g * Complex64::from_polar(1.0, -alpha),
        }
    }

    /// `f + c`, absorbed into `h` so that `g(0) = 0` survives.
    pub fn add_constant(&self, c: Complex64) -> Self {
        Self {
            h: self.h.with_constant(self.h.coeff(0) + c),
            g: self.g.clone(),
        }
    }

    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.h.eval_at(z) + self.g.eval_at(z).conj()
    }

    pub fn u_at(&self, z: Complex64) -> f64 {
        self.eval_at(z).re
    }

    /// `(h'(z), g'(z))`.
    pub fn derivatives_at(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.h.derivative().eval_at(z), self.g.derivative().eval_at(z))
    }
}

/// Samples of `f = h + conj(g)` on the circle `|z| = r`.
pub fn eval_harmonic(map: &HarmonicMap, r: f64, m: usize) -> Result<CircleSamples<Complex64>> {
    eval_with_conjugate(&map.h, &map.g, r, m)
}

/// Normalizes an analytic completion `U` of `u` so that `Im U(0) = 0`.
///
/// `Im` of the result is then the conjugate `v` of `u` with `v(0) = 0`.
pub fn conjugate_of_real_part(u: &CoefficientSeries) -> CoefficientSeries {
    u.with_constant(Complex64::new(u.coeff(0).re, 0.0))
}

/// `ω = g'/h'` on the circle `|z| = r`.
pub fn dilatation_samples(map: &HarmonicMap, r: f64, m: usize) -> Result<CircleSamples<Complex64>> {
    let hp = eval_analytic(&map.h.derivative(), r, m)?;
    let gp = eval_analytic(&map.g.derivative(), r, m)?;
    let mut values = Vec::with_capacity(m);
    for (index, (a, b)) in hp.values.iter().zip(&gp.values).enumerate() {
        let modulus = a.norm();
        if modulus < EPS_ZERO {
            return Err(HqrError::DegenerateDilatation { index, modulus });
        }
        values.push(b / a);
    }
    Ok(CircleSamples { radius: r, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiregularityEstimate {
    /// Largest sampled `|ω|`.
    pub k_hat: f64,
    /// `(1 + k̂)/(1 − k̂)`, infinite when the estimate is not valid.
    pub big_k_hat: f64,
    /// `(r, θ)` of the maximizing sample.
    pub attained_at: (f64, f64),
    pub valid: bool,
}

pub fn distortion_from_k(k: f64) -> f64 {
    (1.0 + k) / (1.0 - k)
}

/// Largest sampled `|ω|` over the circles in `radii`.
///
/// `ω` is analytic where `h' ≠ 0`, so the maximum over the disk of the
/// outermost radius sits on that circle; scanning every circle costs little
/// and guards against a non-monotone grid of radii.
pub fn estimate_quasiregularity(
    map: &HarmonicMap,
    radii: &[f64],
    m: usize,
) -> Result<QuasiregularityEstimate> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HqrError::InvalidRadii);
    }
    let mut k_hat = 0.0_f64;
    let mut attained_at = (radii[0], 0.0);
    for &r in radii {
        check_radius(r)?;
        let omega = dilatation_samples(map, r, m)?;
        for (j, w) in omega.values.iter().enumerate() {
            let modulus = w.norm();
            if modulus > k_hat {
                k_hat = modulus;
                attained_at = (r, omega.theta(j));
            }
        }
    }
    let valid = k_hat < 1.0 - EPS_MARGIN;
    Ok(QuasiregularityEstimate {
        k_hat,
        big_k_hat: if valid {
            distortion_from_k(k_hat)
        } else {
            f64::INFINITY
        },
        attained_at,
        valid,
    })
}
