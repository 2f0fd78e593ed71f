//! Cosine coefficients of `φ(θ) = |θ|^{−α}` on `[−π, π]` by quadrature.
//!
//! `a_n = (2/π) ∫_0^π θ^{−α} cos(nθ) dθ`. The interval is cut into `P`
//! equal panels. The first panel holds the singularity and is integrated
//! after the substitution `θ = w s^q`, `q = 1/(1−α)`, which turns
//! `θ^{−α} dθ` into `w^{1−α} q ds`. On the remaining panels a fixed
//! Gauss–Legendre rule is used; for each node offset the panel sum over
//! `p` is a DFT in `n`, so all coefficients come out of a handful of FFTs.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rustfft::FftPlanner;

const PANEL_NODES: usize = 16;
const SINGULAR_NODES: usize = 64;

/// `a_0..=a_N` for `|θ|^{−α}`, `α ∈ (0, 1)`.
pub fn cosine_coefficients(alpha: f64, n_max: usize) -> Vec<f64> {
    let panels = (n_max + 1).max(256).next_power_of_two();
    let width = PI / panels as f64;
    let q = 1.0 / (1.0 - alpha);

    let mut sums = vec![0.0_f64; n_max + 1];

    let singular = GaussLegendre::new(SINGULAR_NODES).expect("degree >= 2");
    let prefactor = width.powf(1.0 - alpha) * q;
    for &(x, w) in singular.as_node_weight_pairs() {
        let s = 0.5 * (x + 1.0);
        let theta = width * s.powf(q);
        let weight = 0.5 * w * prefactor;
        let step = Complex64::from_polar(1.0, theta);
        let mut phase = Complex64::new(1.0, 0.0);
        for sum in sums.iter_mut() {
            *sum += weight * phase.re;
            phase *= step;
        }
    }

    let len = 2 * panels;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(len);
    let rule = GaussLegendre::new(PANEL_NODES).expect("degree >= 2");
    let mut buffer = vec![Complex64::new(0.0, 0.0); len];
    for &(x, w) in rule.as_node_weight_pairs() {
        let t = 0.5 * (x + 1.0);
        buffer.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (p, slot) in buffer.iter_mut().enumerate().take(panels).skip(1) {
            let theta = width * (p as f64 + t);
            *slot = Complex64::new(0.5 * w * width * theta.powf(-alpha), 0.0);
        }
        fft.process(&mut buffer);
        let step = Complex64::from_polar(1.0, width * t);
        let mut offset = Complex64::new(1.0, 0.0);
        for (n, sum) in sums.iter_mut().enumerate() {
            *sum += (offset * buffer[n]).re;
            offset *= step;
        }
    }

    sums.into_iter().map(|s| 2.0 / PI * s).collect()
}

/// `(1/2π) ∫_{−π}^{π} |θ|^{−α} dθ = π^{−α}/(1−α)`.
pub fn boundary_mean(alpha: f64) -> f64 {
    PI.powf(-alpha) / (1.0 - alpha)
}

/// Bound `|a_n| ≤ B n^{α−1}` from the second mean value theorem.
pub fn coefficient_bound(alpha: f64) -> f64 {
    let half = PI / 2.0;
    2.0 / PI * (half.powf(1.0 - alpha) / (1.0 - alpha) + 2.0 * half.powf(-alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference: `a_n = (2/π) n^{α−1} ∫_0^{nπ} t^{−α} cos t dt`,
    /// with the integral split at every half period and each piece done by
    /// adaptive Simpson after removing the singularity at 0 analytically.
    fn reference(alpha: f64, n: usize) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
            let right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
            if depth == 0 || (left + right - whole).abs() < 1e-15 {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(f, a, m, depth - 1) + simpson(f, m, b, depth - 1)
            }
        }
        if n == 0 {
            return 2.0 / PI * PI.powf(1.0 - alpha) / (1.0 - alpha);
        }
        // ∫_0^δ t^{−α} cos t dt ≈ δ^{1−α}/(1−α) − δ^{3−α}/(2(3−α)) + δ^{5−α}/(24(5−α)).
        let delta = 1e-2_f64;
        let mut total = delta.powf(1.0 - alpha) / (1.0 - alpha)
            - delta.powf(3.0 - alpha) / (2.0 * (3.0 - alpha))
            + delta.powf(5.0 - alpha) / (24.0 * (5.0 - alpha));
        let f = |t: f64| t.powf(-alpha) * t.cos();
        let end = n as f64 * PI;
        let mut a = delta;
        let mut b = (PI / 2.0).min(end);
        while a < end {
            total += simpson(&f, a, b, 40);
            a = b;
            b = (b + PI / 2.0).min(end);
        }
        2.0 / PI * (n as f64).powf(alpha - 1.0) * total
    }

    #[test]
    fn matches_reference_values() {
        for alpha in [0.3, 0.5, 0.9] {
            let coeffs = cosine_coefficients(alpha, 300);
            for n in [0, 1, 2, 7, 64, 300] {
                let expected = reference(alpha, n);
                assert!(
                    (coeffs[n] - expected).abs() < 1e-9 * expected.abs().max(1.0),
                    "alpha {alpha} n {n}: {} vs {expected}",
                    coeffs[n]
                );
            }
        }
    }

    #[test]
    fn constant_term_is_twice_the_mean() {
        for alpha in [0.1, 0.5, 0.95] {
            let coeffs = cosine_coefficients(alpha, 10);
            assert!((coeffs[0] / 2.0 - boundary_mean(alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_respect_bound() {
        let alpha = 0.5;
        let bound = coefficient_bound(alpha);
        let coeffs = cosine_coefficients(alpha, 2000);
        for (n, a) in coeffs.iter().enumerate().skip(1) {
            assert!(a.abs() <= bound * (n as f64).powf(alpha - 1.0));
        }
    }
}
