//! Closed-form total variation between two univariate Gaussians.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::expfam::Gaussian;
use crate::logpoly::quadratic_roots;
use crate::special::erf_unchecked;

/// Relative gap between the two standard deviations below which the pair is
/// treated as equal-variance.
const EQUAL_SIGMA_RTOL: f64 = 1e-12;

/// `Phi_1(x) - Phi_2(x)`, taken from the tail where both CDFs are small.
fn cdf_gap(g1: &Gaussian, g2: &Gaussian, x: f64) -> f64 {
    let z1 = (x - g1.mu()) / g1.sigma();
    let z2 = (x - g2.mu()) / g2.sigma();
    if z1 + z2 > 0.0 {
        g2.sf(x) - g1.sf(x)
    } else {
        g1.cdf(x) - g2.cdf(x)
    }
}

/// `TV(N(mu1, s1), N(mu2, s2))`.
///
/// The densities cross at the roots of `a x^2 + b x + c = 0` with
/// `a = 1/s1^2 - 1/s2^2`, `b = 2 (mu2/s2^2 - mu1/s1^2)` and
/// `c = (mu1/s1)^2 - (mu2/s2)^2 + 2 ln(s1/s2)`; the distance is the sum of
/// `|Phi_1 - Phi_2|` at the crossings. Equal variances have the single
/// crossing `(mu1 + mu2)/2` and `TV = erf(|mu1 - mu2| / (2 s sqrt 2))`.
pub fn gaussian_tv_exact(g1: &Gaussian, g2: &Gaussian) -> f64 {
    let (m1, s1, m2, s2) = (g1.mu(), g1.sigma(), g2.mu(), g2.sigma());
    if m1 == m2 && s1 == s2 {
        return 0.0;
    }
    if (s1 - s2).abs() < EQUAL_SIGMA_RTOL * s1.max(s2) {
        let s = 0.5 * (s1 + s2);
        return erf_unchecked((m1 - m2).abs() / (2.0 * s) * FRAC_1_SQRT_2);
    }
    // Order the pair canonically so that the result is exactly symmetric.
    let (g1, g2) = if (s1, m1) < (s2, m2) { (g1, g2) } else { (g2, g1) };
    let (m1, s1, m2, s2) = (g1.mu(), g1.sigma(), g2.mu(), g2.sigma());
    let (v1, v2) = (s1 * s1, s2 * s2);
    let a = 1.0 / v1 - 1.0 / v2;
    let b = 2.0 * (m2 / v2 - m1 / v1);
    let c = (m1 / s1).powi(2) - (m2 / s2).powi(2) + 2.0 * (s1 / s2).ln();
    let roots = quadratic_roots(a, b, c);
    let tv: f64 = roots.iter().map(|&x| cdf_gap(g1, g2, x).abs()).sum();
    tv.clamp(0.0, 1.0)
}
