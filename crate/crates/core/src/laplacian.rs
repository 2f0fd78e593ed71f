//! Laplacians of `u log u` and `|f|`, a five-point finite-difference oracle
//! for them, and the disk form of Green's identity
//! `r ∫ ∂φ/∂r dθ = ∬_{|z|≤r} Δφ dx dy`.

use std::f64::consts::TAU;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{HqrError, Result};
use crate::harmonic::{HarmonicMap, EPS_ZERO};
use crate::series::check_radius;

pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Five-point Laplacian `(φ(z±h) + φ(z±ih) − 4φ(z)) / h²`.
pub fn laplacian_fd(field: impl Fn(Complex64) -> f64, z: Complex64, step: f64) -> Result<f64> {
    if step.is_nan() || step <= 0.0 || z.norm() + step >= 1.0 {
        return Err(HqrError::StencilOutsideDisk { z, step });
    }
    let dx = Complex64::new(step, 0.0);
    let dy = Complex64::new(0.0, step);
    let sum = field(z + dx) + field(z - dx) + field(z + dy) + field(z - dy) - 4.0 * field(z);
    Ok(sum / (step * step))
}

/// Richardson combination of the five-point stencil at `step` and `step / 2`,
/// fourth order in `step`.
pub fn laplacian_fd_richardson(field: impl Fn(Complex64) -> f64, z: Complex64, step: f64) -> Result<f64> {
    let coarse = laplacian_fd(&field, z, step)?;
    let fine = laplacian_fd(&field, z, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `Δ(u log u) = |h' + g'|² / u`.
pub fn laplacian_ulogu_exact(map: &HarmonicMap, z: Complex64) -> Result<f64> {
    let u = map.u_at(z);
    if u <= EPS_ZERO {
        return Err(HqrError::NonpositiveU { z, value: u });
    }
    let (hp, gp) = map.derivatives_at(z);
    Ok((hp + gp).norm_sqr() / u)
}

/// `Δ|f| = (|f|²(|h'|² + |g'|²) − 2 Re(conj(h') g' f²)) / |f|³`.
pub fn laplacian_absf_exact(map: &HarmonicMap, z: Complex64) -> Result<f64> {
    let f = map.eval_at(z);
    let modulus = f.norm();
    if modulus <= EPS_ZERO {
        return Err(HqrError::ZeroModulus { z, modulus });
    }
    let (hp, gp) = map.derivatives_at(z);
    let cross = (hp.conj() * gp * f * f).re;
    Ok((modulus * modulus * (hp.norm_sqr() + gp.norm_sqr()) - 2.0 * cross) / modulus.powi(3))
}

/// Both Laplacians at a point together with the pointwise bounds
/// `Δ(u log u) ≥ (1−k)²|h'|²/u` and `Δ|f| ≤ (1+k)²|h'|²/|f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub ulogu: f64,
    pub absf: f64,
    pub ulogu_lower: f64,
    pub absf_upper: f64,
}

impl Sandwich {
    /// `K² Δ(u log u) − Δ|f|`, nonnegative for a `K`-quasiregular map with `u > 0`.
    pub fn slack(&self, big_k: f64) -> f64 {
        big_k * big_k * self.ulogu - self.absf
    }

    pub fn scale(&self) -> f64 {
        self.ulogu.abs().max(self.absf.abs()).max(1.0)
    }
}

pub fn pointwise_sandwich(map: &HarmonicMap, z: Complex64, k: f64) -> Result<Sandwich> {
    let ulogu = laplacian_ulogu_exact(map, z)?;
    let absf = laplacian_absf_exact(map, z)?;
    let hp = map.h().derivative().eval_at(z).norm_sqr();
    Ok(Sandwich {
        ulogu,
        absf,
        ulogu_lower: (1.0 - k).powi(2) * hp / map.u_at(z),
        absf_upper: (1.0 + k).powi(2) * hp / map.eval_at(z).norm(),
    })
}

/// Two sides of Green's identity on the disk `|z| ≤ r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSides {
    /// `r ∫ ∂φ/∂r dθ`.
    pub flux: f64,
    /// `∬ Δφ dx dy`.
    pub area: f64,
}

impl GreenSides {
    pub fn residual(&self) -> f64 {
        (self.flux - self.area).abs() / self.flux.abs().max(1.0)
    }
}

/// Green's identity with a caller-supplied Laplacian.
///
/// The flux uses a central difference in `r` and the trapezoidal rule in
/// `θ`; the area integral uses `ring_count` Gauss–Legendre rings in `ρ`
/// with the trapezoidal rule on each ring.
pub fn green_identity_sides(
    field: impl Fn(Complex64) -> f64,
    laplacian: impl Fn(Complex64) -> Result<f64>,
    r: f64,
    m: usize,
    ring_count: usize,
) -> Result<GreenSides> {
    check_radius(r)?;
    if m == 0 || ring_count < 2 {
        return Err(HqrError::EmptyGrid);
    }
    let dr = 1e-4_f64.min((1.0 - r) / 2.0);
    let dtheta = TAU / m as f64;
    let mut flux = 0.0;
    for j in 0..m {
        let e = Complex64::from_polar(1.0, j as f64 * dtheta);
        flux += (field(e * (r + dr)) - field(e * (r - dr))) / (2.0 * dr);
    }
    flux *= r * dtheta;

    let rule = GaussLegendre::new(ring_count).expect("ring_count >= 2");
    let mut area = 0.0;
    for &(x, w) in rule.as_node_weight_pairs() {
        let rho = 0.5 * r * (x + 1.0);
        let mut ring = 0.0;
        for j in 0..m {
            ring += laplacian(Complex64::from_polar(rho, j as f64 * dtheta))?;
        }
        area += 0.5 * r * w * rho * ring * dtheta;
    }
    Ok(GreenSides { flux, area })
}

/// Relative residual `|flux − area| / max(|flux|, 1)` of Green's identity,
/// with `Δφ` from the Richardson-extrapolated five-point stencil.
pub fn green_identity_residual(
    field: impl Fn(Complex64) -> f64,
    r: f64,
    m: usize,
    ring_count: usize,
) -> Result<f64> {
    let step = DEFAULT_FD_STEP.min((1.0 - r) / 4.0);
    let sides = green_identity_sides(
        &field,
        |z| laplacian_fd_richardson(&field, z, step),
        r,
        m,
        ring_count,
    )?;
    Ok(sides.residual())
}
