//! Univariate exponential-family components.
//!
//! Each component is stored in its source parameterization and can be
//! mapped to its natural form `carrier(x) * exp(theta . t(x) - F(theta))`:
//!
//! | family   | theta                      | t(x)       | carrier |
//! |----------|----------------------------|------------|---------|
//! | Gaussian | `(mu/s^2, -1/(2 s^2))`     | `(x, x^2)` | 1       |
//! | Gamma    | `(shape - 1, -rate)`       | `(ln x, x)`| 1       |
//! | Rayleigh | `-1/(2 scale^2)`           | `x^2`      | `x`     |

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logpoly::LogPoly;
use crate::special::{erfc_unchecked, incomplete_gamma_pair, log_gamma_unchecked};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Exponential family a component belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Gamma,
    Rayleigh,
}

impl Family {
    /// Number of sufficient statistics.
    pub fn stat_arity(self) -> usize {
        match self {
            Family::Gaussian | Family::Gamma => 2,
            Family::Rayleigh => 1,
        }
    }

    pub fn support(self) -> SupportClass {
        match self {
            Family::Gaussian => SupportClass::Real,
            Family::Gamma | Family::Rayleigh => SupportClass::Positive,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Gaussian => "gaussian",
            Family::Gamma => "gamma",
            Family::Rayleigh => "rayleigh",
        })
    }
}

/// Support of a density: the whole line or the open half-line `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportClass {
    Real,
    Positive,
}

impl SupportClass {
    /// Infimum of the support.
    pub fn lower(self) -> f64 {
        match self {
            SupportClass::Real => f64::NEG_INFINITY,
            SupportClass::Positive => 0.0,
        }
    }
}

fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::parameter(field, format!("must be finite and > 0, got {v}")))
    }
}

/// Normal distribution `N(mu, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    mu: f64,
    sigma: f64,
}

impl Gaussian {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::parameter("mu", format!("must be finite, got {mu}")));
        }
        check_positive("sigma", sigma)?;
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn standardize(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }

    pub fn cdf(&self, x: f64) -> f64 {
        0.5 * erfc_unchecked(-self.standardize(x) * FRAC_1_SQRT_2)
    }

    pub fn sf(&self, x: f64) -> f64 {
        0.5 * erfc_unchecked(self.standardize(x) * FRAC_1_SQRT_2)
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        let (za, zb) = (self.standardize(a), self.standardize(b));
        if zb <= 0.0 {
            self.cdf(b) - self.cdf(a)
        } else if za >= 0.0 {
            self.sf(a) - self.sf(b)
        } else {
            1.0 - self.cdf(a) - self.sf(b)
        }
    }
}

/// Gamma distribution with density `rate^shape x^(shape-1) e^(-rate x) / G(shape)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma {
    shape: f64,
    rate: f64,
}

impl Gamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        check_positive("shape", shape)?;
        check_positive("rate", rate)?;
        Ok(Self { shape, rate })
    }

    /// Shape/scale constructor, `rate = 1 / scale`.
    pub fn with_scale(shape: f64, scale: f64) -> Result<Self> {
        check_positive("scale", scale)?;
        Self::new(shape, 1.0 / scale)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn pq(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            (0.0, 1.0)
        } else {
            incomplete_gamma_pair(self.shape, self.rate * x)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.pq(x).0
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.pq(x).1
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        let (pa, qa) = self.pq(a);
        let (pb, qb) = self.pq(b);
        if pb < 0.5 {
            pb - pa
        } else {
            qa - qb
        }
    }
}

/// Rayleigh distribution with density `(x / s^2) exp(-x^2 / (2 s^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rayleigh {
    scale: f64,
}

impl Rayleigh {
    pub fn new(scale: f64) -> Result<Self> {
        check_positive("scale", scale)?;
        Ok(Self { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn half_z2(&self, x: f64) -> f64 {
        let z = x.max(0.0) / self.scale;
        0.5 * z * z
    }

    pub fn cdf(&self, x: f64) -> f64 {
        -(-self.half_z2(x)).exp_m1()
    }

    pub fn sf(&self, x: f64) -> f64 {
        (-self.half_z2(x)).exp()
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        if self.sf(b) > 0.5 {
            self.cdf(b) - self.cdf(a)
        } else {
            self.sf(a) - self.sf(b)
        }
    }
}

/// One mixture component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Component {
    Gaussian(Gaussian),
    Gamma(Gamma),
    Rayleigh(Rayleigh),
}

/// Natural-parameter view of a component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaturalForm {
    pub family: Family,
    pub theta: Vec<f64>,
    pub log_normalizer: f64,
    pub stat_arity: usize,
}

impl NaturalForm {
    /// `t(x)`. Only meaningful inside the support.
    pub fn sufficient_statistic(&self, x: f64) -> Vec<f64> {
        match self.family {
            Family::Gaussian => vec![x, x * x],
            Family::Gamma => vec![x.ln(), x],
            Family::Rayleigh => vec![x * x],
        }
    }

    /// `ln carrier(x)`.
    pub fn log_carrier(&self, x: f64) -> f64 {
        match self.family {
            Family::Rayleigh => x.ln(),
            _ => 0.0,
        }
    }

    /// Density rebuilt from `(theta, F, carrier)`; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        if self.family.support() == SupportClass::Positive && x <= 0.0 {
            return 0.0;
        }
        let dot: f64 = self
            .theta
            .iter()
            .zip(self.sufficient_statistic(x))
            .map(|(a, b)| a * b)
            .sum();
        (self.log_carrier(x) + dot - self.log_normalizer).exp()
    }
}

impl Component {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        Gaussian::new(mu, sigma).map(Component::Gaussian)
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Gamma::new(shape, rate).map(Component::Gamma)
    }

    pub fn rayleigh(scale: f64) -> Result<Self> {
        Rayleigh::new(scale).map(Component::Rayleigh)
    }

    pub fn family(&self) -> Family {
        match self {
            Component::Gaussian(_) => Family::Gaussian,
            Component::Gamma(_) => Family::Gamma,
            Component::Rayleigh(_) => Family::Rayleigh,
        }
    }

    pub fn support(&self) -> SupportClass {
        self.family().support()
    }

    /// Log-density from the source parameterization; `-inf` outside the
    /// support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match self {
            Component::Gaussian(g) => {
                let z = g.standardize(x);
                -0.5 * z * z - g.sigma.ln() - LN_SQRT_2PI
            }
            Component::Gamma(g) => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                g.shape * g.rate.ln() + (g.shape - 1.0) * x.ln()
                    - g.rate * x
                    - log_gamma_unchecked(g.shape)
            }
            Component::Rayleigh(r) => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                x.ln() - 2.0 * r.scale.ln() - r.half_z2(x)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Component::Gaussian(g) => g.cdf(x),
            Component::Gamma(g) => g.cdf(x),
            Component::Rayleigh(r) => r.cdf(x),
        }
    }

    /// Mass of `[a, b]`, i.e. `cdf(b) - cdf(a)`, evaluated on whichever tail
    /// keeps relative precision. Infinite endpoints are allowed.
    pub fn interval_mass(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::argument(format!(
                "interval_mass requires a <= b, got [{a}, {b}]"
            )));
        }
        Ok(self.mass_unchecked(a, b))
    }

    pub(crate) fn mass_unchecked(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        let m = match self {
            Component::Gaussian(g) => g.mass(a, b),
            Component::Gamma(g) => g.mass(a, b),
            Component::Rayleigh(r) => r.mass(a, b),
        };
        m.clamp(0.0, 1.0)
    }

    pub fn natural_form(&self) -> NaturalForm {
        match self {
            Component::Gaussian(g) => {
                let var = g.sigma * g.sigma;
                NaturalForm {
                    family: Family::Gaussian,
                    theta: vec![g.mu / var, -0.5 / var],
                    log_normalizer: 0.5 * g.mu * g.mu / var + g.sigma.ln() + LN_SQRT_2PI,
                    stat_arity: 2,
                }
            }
            Component::Gamma(g) => NaturalForm {
                family: Family::Gamma,
                theta: vec![g.shape - 1.0, -g.rate],
                log_normalizer: log_gamma_unchecked(g.shape) - g.shape * g.rate.ln(),
                stat_arity: 2,
            },
            Component::Rayleigh(r) => NaturalForm {
                family: Family::Rayleigh,
                theta: vec![-0.5 / (r.scale * r.scale)],
                log_normalizer: 2.0 * r.scale.ln(),
                stat_arity: 1,
            },
        }
    }

    /// `ln(weight * p(x))` expressed through the natural form.
    pub(crate) fn log_poly(&self, weight: f64) -> LogPoly {
        let nf = self.natural_form();
        let constant = weight.ln() - nf.log_normalizer;
        match nf.family {
            Family::Gaussian => LogPoly {
                constant,
                linear: nf.theta[0],
                quadratic: nf.theta[1],
                log: 0.0,
                positive: false,
            },
            Family::Gamma => LogPoly {
                constant,
                linear: nf.theta[1],
                quadratic: 0.0,
                log: nf.theta[0],
                positive: true,
            },
            Family::Rayleigh => LogPoly {
                constant,
                linear: 0.0,
                quadratic: nf.theta[0],
                log: 1.0,
                positive: true,
            },
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Component::Gaussian(g) => g.mu,
            Component::Gamma(g) => g.shape / g.rate,
            Component::Rayleigh(r) => r.scale * (PI / 2.0).sqrt(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Component::Gaussian(g) => g.sigma * g.sigma,
            Component::Gamma(g) => g.shape / (g.rate * g.rate),
            Component::Rayleigh(r) => (4.0 - PI) / 2.0 * r.scale * r.scale,
        }
    }

    /// One draw. Rayleigh uses the inverse CDF `s sqrt(-2 ln(1 - u))`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Component::Gaussian(g) => rand_distr::Normal::new(g.mu, g.sigma)
                .expect("validated parameters")
                .sample(rng),
            Component::Gamma(g) => rand_distr::Gamma::new(g.shape, 1.0 / g.rate)
                .expect("validated parameters")
                .sample(rng),
            Component::Rayleigh(r) => {
                let u: f64 = rng.random();
                r.scale * (-2.0 * (-u).ln_1p()).sqrt()
            }
        }
    }
}

/// Solutions of `ln(w1 p1(x)) = ln(w2 p2(x))`.
#[derive(Debug, Clone, PartialEq)]
pub enum Crossings {
    /// Sorted crossing points inside the common support.
    Points(Vec<f64>),
    /// The two weighted densities coincide everywhere.
    EverywhereEqual,
}

/// Points of the common support where the two weighted densities are equal.
///
/// Gaussian pairs reduce to a quadratic (solved in closed form), Gamma and
/// Rayleigh pairs to `c1 ln x + c2 x + c3` and `c1 ln x + c2 x^2 + c3`,
/// solved by bracketing on monotone pieces and bisection to full precision.
pub fn weighted_log_density_crossings(
    c1: &Component,
    w1: f64,
    c2: &Component,
    w2: f64,
) -> Result<Crossings> {
    for w in [w1, w2] {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::argument(format!("weights must be finite and > 0, got {w}")));
        }
    }
    if c1.support() != c2.support() {
        return Err(Error::argument(format!(
            "incompatible supports: {} on {:?} vs {} on {:?}",
            c1.family(),
            c1.support(),
            c2.family(),
            c2.support()
        )));
    }
    let diff = c1.log_poly(w1).sub(&c2.log_poly(w2));
    if diff.is_zero() {
        return Ok(Crossings::EverywhereEqual);
    }
    Ok(Crossings::Points(diff.roots(c1.support().lower(), f64::INFINITY)))
}

/// Exact infimum and supremum over `interval` of
/// `g(x) = delta_theta . t(x) - delta_log_normalizer` (+ `ln carrier(x)` when
/// `carrier_delta` is set), with `t` the sufficient statistic of `family`.
///
/// Endpoints may be infinite; the result may then be infinite too.
pub fn exponent_range(
    family: Family,
    delta_theta: &[f64],
    delta_log_normalizer: f64,
    carrier_delta: bool,
    interval: (f64, f64),
) -> Result<(f64, f64)> {
    if delta_theta.len() != family.stat_arity() {
        return Err(Error::argument(format!(
            "{family} expects {} natural parameters, got {}",
            family.stat_arity(),
            delta_theta.len()
        )));
    }
    let (a, b) = interval;
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::argument(format!("invalid interval [{a}, {b}]")));
    }
    let carrier = if carrier_delta && family == Family::Rayleigh {
        1.0
    } else {
        0.0
    };
    let g = match family {
        Family::Gaussian => LogPoly {
            constant: -delta_log_normalizer,
            linear: delta_theta[0],
            quadratic: delta_theta[1],
            log: 0.0,
            positive: false,
        },
        Family::Gamma => LogPoly {
            constant: -delta_log_normalizer,
            linear: delta_theta[1],
            quadratic: 0.0,
            log: delta_theta[0],
            positive: true,
        },
        Family::Rayleigh => LogPoly {
            constant: -delta_log_normalizer,
            linear: 0.0,
            quadratic: delta_theta[0],
            log: carrier,
            positive: true,
        },
    };
    Ok(g.range(a, b))
}
