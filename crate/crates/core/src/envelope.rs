//! Elementary-interval decomposition of the support.
//!
//! On each elementary interval the pointwise lowest and highest weighted
//! component (`w_i p_i`) of both mixtures is fixed. Breakpoints are the
//! pairwise crossings of weighted component log-densities within each
//! mixture, plus 0 when half-line components share a line support.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expfam::SupportClass;
use crate::mixture::Mixture;

/// Breakpoints closer than this (relative) are merged.
const DEDUP_RTOL: f64 = 1e-12;

/// One interval with its constant envelope indices (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementaryInterval {
    pub a: f64,
    pub b: f64,
    /// Lowest weighted component of `m`.
    pub lower: usize,
    /// Highest weighted component of `m`.
    pub upper: usize,
    pub lower_prime: usize,
    pub upper_prime: usize,
}

impl ElementaryInterval {
    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    /// Interior point used to read off envelope indices.
    pub fn probe(&self) -> f64 {
        probe_point(self.a, self.b)
    }
}

/// `(a + b) / 2` for finite intervals, one unit inside the finite end for
/// half-infinite ones.
pub(crate) fn probe_point(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    }
}

/// Ordered tiling of the common support by elementary intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeDecomposition {
    intervals: Vec<ElementaryInterval>,
    support: SupportClass,
    sizes: (usize, usize),
}

impl EnvelopeDecomposition {
    pub fn intervals(&self) -> &[ElementaryInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn support(&self) -> SupportClass {
        self.support
    }

    /// Component counts `(k, k')` of the mixtures it was built from.
    pub fn sizes(&self) -> (usize, usize) {
        self.sizes
    }

    pub(crate) fn check_matches(&self, m: &Mixture, m_prime: &Mixture) -> Result<()> {
        if self.sizes != (m.len(), m_prime.len()) {
            return Err(Error::argument(format!(
                "decomposition built for mixtures of sizes {:?}, got ({}, {})",
                self.sizes,
                m.len(),
                m_prime.len()
            )));
        }
        Ok(())
    }

    /// CSV table `a,b,l,u,l_prime,u_prime` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,l,u,l_prime,u_prime\n");
        for iv in &self.intervals {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                crate::cli::fmt_f64(iv.a),
                crate::cli::fmt_f64(iv.b),
                iv.lower,
                iv.upper,
                iv.lower_prime,
                iv.upper_prime
            ));
        }
        out
    }
}

/// Indices of the lowest and highest weighted component at `x`; ties go to
/// the lowest index.
pub(crate) fn envelope_indices(m: &Mixture, x: f64) -> (usize, usize) {
    let (mut lo, mut hi) = (0, 0);
    let (mut lo_v, mut hi_v) = (m.weighted_ln_pdf(0, x), m.weighted_ln_pdf(0, x));
    for i in 1..m.len() {
        let v = m.weighted_ln_pdf(i, x);
        if v < lo_v {
            lo = i;
            lo_v = v;
        }
        if v > hi_v {
            hi = i;
            hi_v = v;
        }
    }
    (lo, hi)
}

fn crossings_within(m: &Mixture, lower: f64, out: &mut Vec<f64>) {
    let comps = m.components();
    let w = m.weights();
    for i in 0..comps.len() {
        if w[i] == 0.0 {
            continue;
        }
        let pi = comps[i].log_poly(w[i]);
        for j in i + 1..comps.len() {
            if w[j] == 0.0 {
                continue;
            }
            let diff = pi.sub(&comps[j].log_poly(w[j]));
            out.extend(diff.roots(lower, f64::INFINITY));
        }
    }
}

/// Decomposes the common support of `m` and `m_prime` into elementary
/// intervals.
pub fn decompose(m: &Mixture, m_prime: &Mixture) -> EnvelopeDecomposition {
    let support = if m.support() == SupportClass::Real || m_prime.support() == SupportClass::Real
    {
        SupportClass::Real
    } else {
        SupportClass::Positive
    };
    let lower = support.lower();
    let mut cuts = Vec::new();
    crossings_within(m, lower, &mut cuts);
    crossings_within(m_prime, lower, &mut cuts);
    let mixed_support = support == SupportClass::Real
        && m.components()
            .iter()
            .chain(m_prime.components())
            .any(|c| c.support() == SupportClass::Positive);
    if mixed_support {
        cuts.push(0.0);
    }
    cuts.retain(|x| x.is_finite() && *x > lower);
    cuts.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(cuts.len());
    for x in cuts {
        match merged.last() {
            Some(&prev) if (x - prev).abs() <= DEDUP_RTOL * x.abs().max(prev.abs()) => {}
            _ => merged.push(x),
        }
    }

    let mut edges = Vec::with_capacity(merged.len() + 2);
    edges.push(lower);
    edges.extend(merged);
    edges.push(f64::INFINITY);
    let intervals = edges
        .windows(2)
        .map(|e| {
            let x = probe_point(e[0], e[1]);
            let x = if support == SupportClass::Positive && e[0] == 0.0 && !e[1].is_finite() {
                1.0
            } else {
                x
            };
            let (lower, upper) = envelope_indices(m, x);
            let (lower_prime, upper_prime) = envelope_indices(m_prime, x);
            ElementaryInterval {
                a: e[0],
                b: e[1],
                lower,
                upper,
                lower_prime,
                upper_prime,
            }
        })
        .collect();
    EnvelopeDecomposition {
        intervals,
        support,
        sizes: (m.len(), m_prime.len()),
    }
}

/// Splits every finite interval into `factor` equal pieces that inherit
/// their parent's indices. Half-infinite intervals are kept whole.
pub fn refine(dec: &EnvelopeDecomposition, factor: usize) -> Result<EnvelopeDecomposition> {
    if factor == 0 {
        return Err(Error::argument("refine factor must be >= 1"));
    }
    let mut intervals = Vec::with_capacity(dec.intervals.len() * factor);
    for iv in &dec.intervals {
        if factor == 1 || !iv.is_finite() {
            intervals.push(*iv);
            continue;
        }
        let width = iv.b - iv.a;
        for j in 0..factor {
            let a = if j == 0 {
                iv.a
            } else {
                iv.a + width * j as f64 / factor as f64
            };
            let b = if j + 1 == factor {
                iv.b
            } else {
                iv.a + width * (j + 1) as f64 / factor as f64
            };
            intervals.push(ElementaryInterval { a, b, ..*iv });
        }
    }
    Ok(EnvelopeDecomposition {
        intervals,
        support: dec.support,
        sizes: dec.sizes,
    })
}
