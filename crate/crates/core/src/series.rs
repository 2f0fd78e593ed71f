//! Truncated power series on the unit disk and their samples on circles.
//!
//! A [`CoefficientSeries`] holds `c_0..c_N` of `Σ c_n z^n`. Circle evaluation
//! goes through an inverse FFT of the damped coefficients `c_n r^n`, which is
//! the same sum Horner's rule would produce at each root of unity; single
//! points use Horner directly.

use std::cell::RefCell;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{HqrError, Result};

/// Smallest circle grid ever used.
pub const MIN_GRID: usize = 1024;
/// Samples per coefficient on a circle grid.
pub const OVERSAMPLING: usize = 8;

/// Default circle grid for a series of degree `degree`: `max(1024, 8 (N + 1))`
/// rounded up to the next 5-smooth size, which keeps the FFT on its fast paths.
pub fn grid_size_for_degree(degree: usize) -> usize {
    next_smooth(MIN_GRID.max(OVERSAMPLING * (degree + 1)))
}

/// Smallest `m ≥ n` whose prime factors are all 2, 3 or 5.
pub fn next_smooth(n: usize) -> usize {
    (n.max(1)..)
        .find(|&m| {
            let mut m = m;
            for q in [2, 3, 5] {
                while m % q == 0 {
                    m /= q;
                }
            }
            m == 1
        })
        .expect("5-smooth numbers are unbounded")
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    coeffs: Vec<Complex64>,
}

impl CoefficientSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(HqrError::EmptySeries);
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(HqrError::NonFiniteCoefficient { index });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    /// The monomial `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `c_n`, zero beyond the degree.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// `Σ n c_n z^{n-1}`; the derivative of a constant is the zero series.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c * n as f64)
            .collect();
        Self { coeffs }
    }

    /// `Σ c_n z^{n+1} / (n + 1)` with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(self.coeffs.iter().enumerate().map(|(n, c)| c / (n as f64 + 1.0)));
        Self { coeffs }
    }

    /// Same series with the constant term replaced.
    pub fn with_constant(&self, c: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = c;
        Self { coeffs }
    }

    /// Multiplies by `z^m`.
    pub fn shift_up(&self, m: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Horner evaluation at a single point.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Samples of the series on `|z| = r` at `θ_j = 2πj/M`.
    pub fn eval_circle(&self, r: f64, m: usize) -> Result<CircleSamples<Complex64>> {
        eval_analytic(self, r, m)
    }

    /// `Σ |c_n| r^n`, the natural scale for rounding bounds.
    pub fn abs_sum(&self, r: f64) -> f64 {
        let mut rn = 1.0;
        let mut total = 0.0;
        for c in &self.coeffs {
            total += c.norm() * rn;
            rn *= r;
        }
        total
    }
}

impl Add for &CoefficientSeries {
    type Output = CoefficientSeries;

    fn add(self, other: &CoefficientSeries) -> CoefficientSeries {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect();
        CoefficientSeries { coeffs }
    }
}

impl Sub for &CoefficientSeries {
    type Output = CoefficientSeries;

    fn sub(self, other: &CoefficientSeries) -> CoefficientSeries {
        self + &(-other)
    }
}

impl Neg for &CoefficientSeries {
    type Output = CoefficientSeries;

    fn neg(self) -> CoefficientSeries {
        CoefficientSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<Complex64> for &CoefficientSeries {
    type Output = CoefficientSeries;

    fn mul(self, s: Complex64) -> CoefficientSeries {
        CoefficientSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

impl Mul<f64> for &CoefficientSeries {
    type Output = CoefficientSeries;

    fn mul(self, s: f64) -> CoefficientSeries {
        self * Complex64::new(s, 0.0)
    }
}

/// Values of a function on `M` equispaced points of the circle `|z| = radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSamples<T> {
    pub radius: f64,
    pub values: Vec<T>,
}

impl<T: Copy> CircleSamples<T> {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> CircleSamples<U> {
        CircleSamples {
            radius: self.radius,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Angle of sample `j`.
    pub fn theta(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.values.len() as f64
    }

    /// Point `r e^{iθ_j}` of sample `j`.
    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius, self.theta(j))
    }
}

impl CircleSamples<Complex64> {
    pub fn re(&self) -> CircleSamples<f64> {
        self.map(|v| v.re)
    }

    pub fn im(&self) -> CircleSamples<f64> {
        self.map(|v| v.im)
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(HqrError::RadiusOutOfRange(r))
    }
}

/// Evaluates `Σ c_n (r e^{2πij/M})^n` for `j = 0..M`.
///
/// Coefficients with `n >= M` fold onto `n mod M`, which is exact on the grid.
pub fn eval_analytic(s: &CoefficientSeries, r: f64, m: usize) -> Result<CircleSamples<Complex64>> {
    eval_folded(s, None, r, m)
}

/// Evaluates `h + conj(g)` on the circle with a single FFT: `conj(g)` only
/// carries negative frequencies, so both series share one buffer.
pub fn eval_with_conjugate(
    h: &CoefficientSeries,
    g: &CoefficientSeries,
    r: f64,
    m: usize,
) -> Result<CircleSamples<Complex64>> {
    eval_folded(h, Some(g), r, m)
}

fn eval_folded(
    h: &CoefficientSeries,
    g: Option<&CoefficientSeries>,
    r: f64,
    m: usize,
) -> Result<CircleSamples<Complex64>> {
    check_radius(r)?;
    if m == 0 {
        return Err(HqrError::EmptyGrid);
    }
    let mut buffer = vec![Complex64::new(0.0, 0.0); m];
    let mut fold = |coeffs: &[Complex64], index: &dyn Fn(usize) -> usize, conj: bool| {
        let mut rn = 1.0_f64;
        for (n, c) in coeffs.iter().enumerate() {
            if rn == 0.0 {
                break;
            }
            let c = if conj { c.conj() } else { *c };
            buffer[index(n)] += c * rn;
            rn *= r;
        }
    };
    fold(&h.coeffs, &|n| n % m, false);
    if let Some(g) = g {
        fold(&g.coeffs, &|n| (m - n % m) % m, true);
    }
    if m > 1 {
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m));
        fft.process(&mut buffer);
    }
    Ok(CircleSamples {
        radius: r,
        values: buffer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_examples() {
        let s = CoefficientSeries::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(s.derivative().coeffs(), &[c(1.0, 0.0)]);
        let s = CoefficientSeries::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.derivative().coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
        let s = CoefficientSeries::constant(c(3.0, -1.0));
        assert_eq!(s.derivative().coeffs(), &[c(0.0, 0.0)]);
        assert_eq!(s.derivative().degree(), 0);
    }

    #[test]
    fn antiderivative_examples() {
        let s = CoefficientSeries::from_real(&[1.0]).unwrap();
        assert_eq!(s.antiderivative().coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        let s = CoefficientSeries::from_real(&[0.0, 2.0]).unwrap();
        assert_eq!(
            s.antiderivative().coeffs(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert_eq!(CoefficientSeries::new(vec![]), Err(HqrError::EmptySeries));
        assert_eq!(
            CoefficientSeries::from_real(&[1.0, f64::NAN]),
            Err(HqrError::NonFiniteCoefficient { index: 1 })
        );
    }

    #[test]
    fn eval_examples() {
        let s = CoefficientSeries::from_real(&[1.0, 1.0]).unwrap();
        let samples = eval_analytic(&s, 0.5, 1).unwrap();
        assert_eq!(samples.values, vec![c(1.5, 0.0)]);

        let z = CoefficientSeries::monomial(1);
        for m in [1, 7, 64] {
            let samples = eval_analytic(&z, 0.9, m).unwrap();
            for v in &samples.values {
                assert!((v.norm() - 0.9).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn geometric_series_at_half() {
        // 1/(1 - z) truncated at N = 200; tail r^201/(1-r) is far below 1e-12.
        let s = CoefficientSeries::from_real(&[1.0; 201]).unwrap();
        let samples = eval_analytic(&s, 0.5, 512).unwrap();
        assert!((samples.values[0] - c(2.0, 0.0)).norm() < 1e-12);
        let direct = (1.0 - 0.5f64.powi(201)) / 0.5;
        assert!((samples.values[0].re - direct).abs() < 1e-14);
    }

    #[test]
    fn rejects_radius_at_boundary() {
        let s = CoefficientSeries::monomial(1);
        assert_eq!(eval_analytic(&s, 1.0, 8), Err(HqrError::RadiusOutOfRange(1.0)));
        assert_eq!(eval_analytic(&s, 0.5, 0), Err(HqrError::EmptyGrid));
    }

    #[test]
    fn folding_matches_horner_when_degree_exceeds_grid() {
        let coeffs: Vec<_> = (0..40)
            .map(|n| c(1.0 / (n as f64 + 1.0), (n % 3) as f64))
            .collect();
        let s = CoefficientSeries::new(coeffs).unwrap();
        let samples = eval_analytic(&s, 0.8, 16).unwrap();
        for j in 0..16 {
            let direct = s.eval_at(samples.point(j));
            assert!((samples.values[j] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_size_rule() {
        assert_eq!(grid_size_for_degree(0), 1024);
        assert_eq!(grid_size_for_degree(127), 1024);
        assert_eq!(grid_size_for_degree(256), 2160);
        assert_eq!(next_smooth(2056), 2160);
        assert_eq!(next_smooth(4096), 4096);
    }
}
