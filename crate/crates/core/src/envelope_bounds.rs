//! Deterministic TV bounds from an envelope decomposition.
//!
//! Two bound families are computed on every elementary interval `I_s`:
//!
//! * **Envelope bounds.** With `u` the highest weighted component of `m` on
//!   `I_s`, `w_u p_u <= m <= k w_u p_u` there (and likewise for `m'`). The
//!   min/max of these envelope pieces are integrated exactly through CDF
//!   differences, after splitting at their crossings. This brackets both
//!   `h = int min(m, m')` and `H = int max(m, m')`, hence `TV = 1 - h = H - 1`.
//! * **Density-ratio bounds.** For a reference component `r_s`, every
//!   `p_i / r_s` is enclosed in `[A_s^i, B_s^i]` by an exact exponent
//!   range, so `(m - m') / r_s` lies in `[L_s, U_s]` and
//!   `|m - m'| / r_s` in `[mu_s, Omega_s]`. Integrating against `r_s` gives
//!   per-interval lower and upper contributions.
//!
//! The ratio step needs every component in one exponential family.

use serde::Serialize;

use crate::envelope::{decompose, probe_point, refine, ElementaryInterval, EnvelopeDecomposition};
use crate::error::Result;
use crate::expfam::{Component, SupportClass};
use crate::mixture::Mixture;
use crate::sum::{compensated_sum, CompensatedSum};

/// Reference masses below this are treated as unusable (subnormal range).
const MIN_REFERENCE_MASS: f64 = 1e-290;

/// Default number of pieces each elementary interval is split into.
pub const DEFAULT_REFINE_FACTOR: usize = 10;

/// Which component serves as reference measure `r_s` on each interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceChoice {
    /// Upper-envelope component of `m`.
    FirstUpper,
    /// Whichever of the two upper-envelope components is higher at the
    /// interval probe point.
    JointUpper,
    /// Both upper-envelope components; the tighter contribution is kept.
    #[default]
    BestOfBoth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsConfig {
    pub refine_factor: usize,
    pub reference: ReferenceChoice,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            refine_factor: DEFAULT_REFINE_FACTOR,
            reference: ReferenceChoice::default(),
        }
    }
}

/// Envelope integrals on one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeIntegrals {
    /// `int min(lower_m, lower_m')`: lower bound on the local `h`.
    pub h_lower: f64,
    /// `int min(upper_m, upper_m')`: upper bound on the local `h`.
    pub h_upper: f64,
    /// `int max(lower_m, lower_m')`: lower bound on the local `H`.
    pub big_h_lower: f64,
    /// `int max(upper_m, upper_m')`: upper bound on the local `H`.
    pub big_h_upper: f64,
    /// Exact masses of `m` and `m'` on the interval.
    pub mass: f64,
    pub mass_prime: f64,
}

impl EnvelopeIntegrals {
    /// Upper bound on `1/2 int_I |m - m'|` from the local envelopes.
    pub fn tv_upper(&self) -> f64 {
        let half = 0.5 * (self.mass + self.mass_prime);
        (half - self.h_lower).min(self.big_h_upper - half).min(half).max(0.0)
    }
}

/// Global envelope bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasicBounds {
    /// Lower bound shared by `h` and `H`.
    pub a: f64,
    /// Upper bound shared by `h` and `H`.
    pub b: f64,
    /// TV lower bound `max(1 - h_upper, H_lower - 1, 0)`.
    pub l: f64,
    /// TV upper bound `min(1 - h_lower, H_upper - 1, 1)`.
    pub u: f64,
    pub h_lower: f64,
    pub h_upper: f64,
    pub big_h_lower: f64,
    pub big_h_upper: f64,
    #[serde(skip)]
    pub per_interval: Vec<EnvelopeIntegrals>,
}

/// `int_a^b min(c1 p1, c2 p2)` and `int_a^b max(c1 p1, c2 p2)` for scale
/// factors `c1, c2`, exact up to CDF accuracy.
fn min_max_integral(
    p1: &Component,
    c1: f64,
    p2: &Component,
    c2: f64,
    a: f64,
    b: f64,
) -> (f64, f64) {
    let masses = |lo: f64, hi: f64| (c1 * p1.mass_unchecked(lo, hi), c2 * p2.mass_unchecked(lo, hi));
    let both_cover = |c: &Component| c.support() == SupportClass::Real || a >= 0.0;
    if !(both_cover(p1) && both_cover(p2)) {
        // one density vanishes identically on [a, b]
        let (m1, m2) = masses(a, b);
        return (0.0, m1 + m2);
    }
    let diff = p1.log_poly(c1).sub(&p2.log_poly(c2));
    let mut edges = vec![a];
    edges.extend(diff.roots(a, b));
    edges.push(b);
    let (mut lo, mut hi) = (CompensatedSum::new(), CompensatedSum::new());
    for e in edges.windows(2) {
        if e[0] >= e[1] {
            continue;
        }
        let x = probe_point(e[0], e[1]);
        let x = if e[0] == 0.0 && !e[1].is_finite() { 1.0 } else { x };
        let (m1, m2) = masses(e[0], e[1]);
        let first_is_lower = c1.ln() + p1.ln_pdf(x) <= c2.ln() + p2.ln_pdf(x);
        if first_is_lower {
            lo.add(m1);
            hi.add(m2);
        } else {
            lo.add(m2);
            hi.add(m1);
        }
    }
    (lo.value(), hi.value())
}

fn interval_integrals(iv: &ElementaryInterval, m: &Mixture, m_prime: &Mixture) -> EnvelopeIntegrals {
    let (p, w) = (&m.components()[iv.upper], m.weights()[iv.upper]);
    let (q, wq) = (&m_prime.components()[iv.upper_prime], m_prime.weights()[iv.upper_prime]);
    let (k, kq) = (m.len() as f64, m_prime.len() as f64);
    let (h_lower, big_h_lower) = min_max_integral(p, w, q, wq, iv.a, iv.b);
    let (h_upper, big_h_upper) = min_max_integral(p, k * w, q, kq * wq, iv.a, iv.b);
    let mass = m.mass_unchecked(iv.a, iv.b);
    let mass_prime = m_prime.mass_unchecked(iv.a, iv.b);
    // min(m, m') <= min(M, M') and max(m, m') >= max(M, M') hold locally too
    EnvelopeIntegrals {
        h_lower: h_lower.min(mass.min(mass_prime)),
        h_upper: h_upper.min(mass.min(mass_prime)),
        big_h_lower: big_h_lower.max(mass.max(mass_prime)),
        big_h_upper: big_h_upper.min(mass + mass_prime),
        mass,
        mass_prime,
    }
}

/// Envelope bounds `(A, B, L, U)` plus their `h`/`H` split.
///
/// `A <= h, H <= B`, and `L <= TV <= U`.
pub fn basic_envelope_bounds(
    dec: &EnvelopeDecomposition,
    m: &Mixture,
    m_prime: &Mixture,
) -> Result<BasicBounds> {
    dec.check_matches(m, m_prime)?;
    let per_interval: Vec<EnvelopeIntegrals> = dec
        .intervals()
        .iter()
        .map(|iv| interval_integrals(iv, m, m_prime))
        .collect();
    let total = |f: fn(&EnvelopeIntegrals) -> f64| compensated_sum(per_interval.iter().map(f));
    let h_lower = total(|s| s.h_lower);
    let h_upper = total(|s| s.h_upper);
    let big_h_lower = total(|s| s.big_h_lower);
    let big_h_upper = total(|s| s.big_h_upper);
    let l = (1.0 - h_upper).max(big_h_lower - 1.0).clamp(0.0, 1.0);
    let u = (1.0 - h_lower).min(big_h_upper - 1.0).clamp(0.0, 1.0);
    Ok(BasicBounds {
        a: h_lower,
        b: big_h_upper,
        l,
        u,
        h_lower,
        h_upper,
        big_h_lower,
        big_h_upper,
        per_interval,
    })
}

/// Which mixture a reference component was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MixtureSide {
    First,
    Second,
}

/// How an interval's upper contribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Ratio,
    Envelope,
}

/// Per-interval ratio diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalDiagnostics {
    pub a: f64,
    pub b: f64,
    pub l_s: f64,
    pub u_s: f64,
    pub mu_s: f64,
    pub omega_s: f64,
    pub reference_side: MixtureSide,
    pub reference_index: usize,
    pub reference_mass: f64,
    /// `1/2 mu_s int r_s`.
    pub lower: f64,
    /// `min(1/2 Omega_s int r_s, envelope bound)`.
    pub upper: f64,
    pub method_used: IntervalMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioBounds {
    pub lower: f64,
    pub upper: f64,
    pub per_interval: Vec<IntervalDiagnostics>,
}

/// Returned when the density-ratio step does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinementUnavailable {
    pub reason: String,
}

impl std::fmt::Display for RefinementUnavailable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ratio refinement unavailable: {}", self.reason)
    }
}

/// `[A, B]` enclosing `p / reference` on `[a, b]`.
fn ratio_range(p: &Component, reference: &Component, a: f64, b: f64) -> (f64, f64) {
    let g = p.log_poly(1.0).sub(&reference.log_poly(1.0));
    let (lo, hi) = g.range(a, b);
    (lo.exp(), hi.exp())
}

/// Ratio bounds for one interval and one reference.
fn ratio_interval(
    iv: &ElementaryInterval,
    m: &Mixture,
    m_prime: &Mixture,
    side: MixtureSide,
    index: usize,
    envelope_upper: f64,
) -> IntervalDiagnostics {
    let reference = match side {
        MixtureSide::First => &m.components()[index],
        MixtureSide::Second => &m_prime.components()[index],
    };
    let (a, b) = (iv.a, iv.b);
    let ranges = |mix: &Mixture| -> Vec<(f64, f64, f64)> {
        mix.components()
            .iter()
            .zip(mix.weights())
            .map(|(c, &w)| {
                let (lo, hi) = ratio_range(c, reference, a, b);
                (w, lo, hi)
            })
            .collect()
    };
    let (rm, rq) = (ranges(m), ranges(m_prime));
    let weighted = |v: &[(f64, f64, f64)], upper: bool| {
        compensated_sum(v.iter().map(|&(w, lo, hi)| w * if upper { hi } else { lo }))
    };
    let l_s = weighted(&rm, false) - weighted(&rq, true);
    let u_s = weighted(&rm, true) - weighted(&rq, false);
    let (mu_s, omega_s) = if l_s.is_nan() || u_s.is_nan() {
        (0.0, f64::INFINITY)
    } else if l_s * u_s < 0.0 {
        (0.0, l_s.abs().max(u_s.abs()))
    } else {
        (l_s.abs().min(u_s.abs()), l_s.abs().max(u_s.abs()))
    };
    let reference_mass = reference.mass_unchecked(a, b);
    let usable = reference_mass >= MIN_REFERENCE_MASS;
    let lower = if usable && mu_s.is_finite() {
        0.5 * mu_s * reference_mass
    } else {
        0.0
    };
    let ratio_upper = 0.5 * omega_s * reference_mass;
    let (upper, method_used) = if usable && ratio_upper.is_finite() && ratio_upper < envelope_upper
    {
        (ratio_upper, IntervalMethod::Ratio)
    } else {
        (envelope_upper, IntervalMethod::Envelope)
    };
    IntervalDiagnostics {
        a,
        b,
        l_s,
        u_s,
        mu_s,
        omega_s,
        reference_side: side,
        reference_index: index,
        reference_mass,
        lower,
        upper,
        method_used,
    }
}

fn ratio_from_envelopes(
    dec: &EnvelopeDecomposition,
    m: &Mixture,
    m_prime: &Mixture,
    envelopes: &[EnvelopeIntegrals],
    choice: ReferenceChoice,
) -> std::result::Result<RatioBounds, RefinementUnavailable> {
    let family = match (m.family(), m_prime.family()) {
        (Some(f), Some(g)) if f == g => f,
        _ => {
            return Err(RefinementUnavailable {
                reason: "components do not all belong to one exponential family".into(),
            })
        }
    };
    let _ = family;
    let per_interval: Vec<IntervalDiagnostics> = dec
        .intervals()
        .iter()
        .zip(envelopes)
        .map(|(iv, env)| {
            let env_upper = env.tv_upper();
            let first = || ratio_interval(iv, m, m_prime, MixtureSide::First, iv.upper, env_upper);
            let second =
                || ratio_interval(iv, m, m_prime, MixtureSide::Second, iv.upper_prime, env_upper);
            match choice {
                ReferenceChoice::FirstUpper => first(),
                ReferenceChoice::JointUpper => {
                    let x = iv.probe();
                    if m.weighted_ln_pdf(iv.upper, x) >= m_prime.weighted_ln_pdf(iv.upper_prime, x)
                    {
                        first()
                    } else {
                        second()
                    }
                }
                ReferenceChoice::BestOfBoth => {
                    let (d1, d2) = (first(), second());
                    let mut best = if d2.upper < d1.upper { d2.clone() } else { d1.clone() };
                    best.lower = d1.lower.max(d2.lower);
                    best
                }
            }
        })
        .collect();
    let lower = compensated_sum(per_interval.iter().map(|d| d.lower));
    let upper = compensated_sum(per_interval.iter().map(|d| d.upper));
    Ok(RatioBounds {
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        per_interval,
    })
}

/// Density-ratio bounds using the classic reference choice (upper-envelope
/// component of `m`) on each interval.
///
/// Intervals on which some ratio is unbounded keep their `mu_s` lower
/// contribution and fall back to the envelope upper bound.
pub fn ratio_bounds(
    dec: &EnvelopeDecomposition,
    m: &Mixture,
    m_prime: &Mixture,
) -> Result<std::result::Result<RatioBounds, RefinementUnavailable>> {
    ratio_bounds_with(dec, m, m_prime, ReferenceChoice::FirstUpper)
}

pub fn ratio_bounds_with(
    dec: &EnvelopeDecomposition,
    m: &Mixture,
    m_prime: &Mixture,
    choice: ReferenceChoice,
) -> Result<std::result::Result<RatioBounds, RefinementUnavailable>> {
    let basic = basic_envelope_bounds(dec, m, m_prime)?;
    Ok(ratio_from_envelopes(dec, m, m_prime, &basic.per_interval, choice))
}

/// Which bound family produced an aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Envelope,
    Ratio,
}

/// Deterministic TV interval and its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub celb: f64,
    pub ceub: f64,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub envelope_lower: f64,
    pub envelope_upper: f64,
    pub h_lower: f64,
    pub h_upper: f64,
    pub big_h_lower: f64,
    pub big_h_upper: f64,
    pub ratio_lower: Option<f64>,
    pub ratio_upper: Option<f64>,
    pub ratio_unavailable: Option<String>,
    pub per_interval: Vec<IntervalDiagnostics>,
    pub bayes_error_lo: f64,
    pub bayes_error_hi: f64,
    pub refine_factor: usize,
    pub interval_count: usize,
}

/// CELB/CEUB with the default configuration and `refine_factor`.
pub fn celb_ceub(m: &Mixture, m_prime: &Mixture, refine_factor: usize) -> BoundReport {
    celb_ceub_with(
        m,
        m_prime,
        &BoundsConfig {
            refine_factor,
            ..BoundsConfig::default()
        },
    )
}

/// Decompose, refine, then combine the envelope and ratio bounds.
pub fn celb_ceub_with(m: &Mixture, m_prime: &Mixture, config: &BoundsConfig) -> BoundReport {
    let dec = decompose(m, m_prime);
    let dec = refine(&dec, config.refine_factor.max(1)).expect("factor >= 1");
    let basic = basic_envelope_bounds(&dec, m, m_prime).expect("decomposition built from inputs");
    let ratio = ratio_from_envelopes(&dec, m, m_prime, &basic.per_interval, config.reference);

    let (mut celb, mut lower_method) = (basic.l, BoundMethod::Envelope);
    let (mut ceub, mut upper_method) = (basic.u, BoundMethod::Envelope);
    let (ratio_lower, ratio_upper, ratio_unavailable, per_interval) = match ratio {
        Ok(r) => {
            if r.lower > celb {
                celb = r.lower;
                lower_method = BoundMethod::Ratio;
            }
            if r.upper < ceub {
                ceub = r.upper;
                upper_method = BoundMethod::Ratio;
            }
            (Some(r.lower), Some(r.upper), None, r.per_interval)
        }
        Err(e) => (None, None, Some(e.reason), Vec::new()),
    };
    // identical inputs have TV = 0 exactly; do not let rounding suggest otherwise
    let celb = if m == m_prime { 0.0 } else { celb.clamp(0.0, 1.0) };
    let ceub = ceub.clamp(0.0, 1.0).max(celb);
    BoundReport {
        celb,
        ceub,
        lower_method,
        upper_method,
        a: basic.a,
        b: basic.b,
        envelope_lower: basic.l,
        envelope_upper: basic.u,
        h_lower: basic.h_lower,
        h_upper: basic.h_upper,
        big_h_lower: basic.big_h_lower,
        big_h_upper: basic.big_h_upper,
        ratio_lower,
        ratio_upper,
        ratio_unavailable,
        per_interval,
        bayes_error_lo: 0.5 * (1.0 - ceub),
        bayes_error_hi: 0.5 * (1.0 - celb),
        refine_factor: config.refine_factor.max(1),
        interval_count: dec.len(),
    }
}
