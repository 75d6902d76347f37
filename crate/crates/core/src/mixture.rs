//! Finite mixtures `m(x) = sum_i w_i p_i(x)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expfam::{Component, Family, SupportClass};
use crate::sum::compensated_sum;

/// Weights whose sum is within this distance of 1 are renormalized; others
/// are rejected.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

/// A finite mixture of [`Component`]s.
///
/// Normalized mixtures have strictly positive weights summing to 1. A
/// positive-measure mixture (see [`Mixture::measure`]) only requires
/// nonnegative weights and is meant for weight-level comparisons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mixture {
    components: Vec<Component>,
    weights: Vec<f64>,
    #[serde(skip)]
    ln_weights: Vec<f64>,
    #[serde(skip)]
    normalized: bool,
}

impl Mixture {
    pub fn new(components: Vec<Component>, weights: Vec<f64>) -> Result<Self> {
        check_shapes(&components, &weights)?;
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::argument(format!(
                    "weight {i} must be finite and > 0, got {w}"
                )));
            }
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::argument(format!(
                "weights sum to {total}, expected 1 (tolerance {WEIGHT_SUM_TOLERANCE})"
            )));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        Ok(Self::assemble(components, weights, true))
    }

    /// Mixture with nonnegative weights that need not sum to one.
    pub fn measure(components: Vec<Component>, weights: Vec<f64>) -> Result<Self> {
        check_shapes(&components, &weights)?;
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::argument(format!(
                    "weight {i} must be finite and >= 0, got {w}"
                )));
            }
        }
        Ok(Self::assemble(components, weights, false))
    }

    /// Equal-weight mixture.
    pub fn uniform(components: Vec<Component>) -> Result<Self> {
        let k = components.len();
        Self::new(components, vec![1.0 / k as f64; k.max(1)])
    }

    pub fn single(component: Component) -> Self {
        Self::assemble(vec![component], vec![1.0], true)
    }

    fn assemble(components: Vec<Component>, weights: Vec<f64>, normalized: bool) -> Self {
        let ln_weights = weights.iter().map(|w| w.ln()).collect();
        Self {
            components,
            weights,
            ln_weights,
            normalized,
        }
    }

    /// Concatenation of two mixtures scaled by `alpha` and `1 - alpha`.
    pub fn blend(a: &Mixture, b: &Mixture, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::argument(format!("blend weight must lie in (0, 1), got {alpha}")));
        }
        let components = a.components.iter().chain(&b.components).copied().collect();
        let weights = a
            .weights
            .iter()
            .map(|w| w * alpha)
            .chain(b.weights.iter().map(|w| w * (1.0 - alpha)))
            .collect();
        Self::new(components, weights)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `Real` if any component lives on the whole line.
    pub fn support(&self) -> SupportClass {
        if self.components.iter().any(|c| c.support() == SupportClass::Real) {
            SupportClass::Real
        } else {
            SupportClass::Positive
        }
    }

    /// The single family shared by all components, if any.
    pub fn family(&self) -> Option<Family> {
        let first = self.components.first()?.family();
        self.components
            .iter()
            .all(|c| c.family() == first)
            .then_some(first)
    }

    /// `ln(w_i p_i(x))`.
    pub fn weighted_ln_pdf(&self, i: usize, x: f64) -> f64 {
        self.ln_weights[i] + self.components[i].ln_pdf(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * c.pdf(x))
            .sum()
    }

    /// `ln m(x)` by log-sum-exp, finite wherever some component is positive
    /// even when every density underflows.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let terms: Vec<f64> = (0..self.len()).map(|i| self.weighted_ln_pdf(i, x)).collect();
        let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
    }

    /// Mass of `[a, b]`, `sum_i w_i (F_i(b) - F_i(a))`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::argument(format!("mass requires a <= b, got [{a}, {b}]")));
        }
        Ok(self.mass_unchecked(a, b))
    }

    pub(crate) fn mass_unchecked(&self, a: f64, b: f64) -> f64 {
        compensated_sum(
            self.components
                .iter()
                .zip(&self.weights)
                .map(|(c, w)| w * c.mass_unchecked(a, b)),
        )
    }

    /// `n` iid draws: a component index by weight, then a component draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        if n == 0 {
            return Vec::new();
        }
        let index = WeightedIndex::new(&self.weights).expect("validated weights");
        (0..n)
            .map(|_| self.components[index.sample(rng)].sample(rng))
            .collect()
    }
}

fn check_shapes(components: &[Component], weights: &[f64]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::argument("a mixture needs at least one component"));
    }
    if components.len() != weights.len() {
        return Err(Error::argument(format!(
            "{} components but {} weights",
            components.len(),
            weights.len()
        )));
    }
    Ok(())
}

/// `sum_i w_i p_i(x)`.
pub fn mixture_pdf(m: &Mixture, x: f64) -> f64 {
    m.pdf(x)
}

/// Mass of `[a, b]` under `m`.
pub fn mixture_mass(m: &Mixture, a: f64, b: f64) -> Result<f64> {
    m.mass(a, b)
}

/// `n` deterministic draws from `m`.
pub fn sample_mixture<R: Rng + ?Sized>(m: &Mixture, rng: &mut R, n: usize) -> Vec<f64> {
    m.sample(rng, n)
}
