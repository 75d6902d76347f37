//! Mixture-pair input files.
//!
//! The format is TOML with two arrays of tables, `m` and `m_prime`, one
//! table per component, and an optional top-level `label`:
//!
//! ```toml
//! label = "two gaussians"
//!
//! [[m]]
//! family = "gaussian"
//! mu = 0.0
//! sigma = 1.0
//! weight = 1.0
//!
//! [[m_prime]]
//! family = "gamma"
//! shape = 2.0
//! rate = 1.5        # or: scale = 0.6667
//! weight = 0.5
//!
//! [[m_prime]]
//! family = "rayleigh"
//! sigma = 1.0
//! weight = 0.5
//! ```
//!
//! Parameters per family: `gaussian` takes `mu`, `sigma`; `gamma` takes
//! `shape` and exactly one of `rate`, `scale`; `rayleigh` takes `sigma`.
//! Weights must be positive and sum to 1 within 1e-6; they are renormalized.

use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::expfam::{Component, Gamma};
use crate::mixture::{Mixture, WEIGHT_SUM_TOLERANCE};

use super::CliError;

/// Two validated mixtures read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePairSpec {
    pub label: Option<String>,
    pub m: Mixture,
    pub m_prime: Mixture,
}

impl MixturePairSpec {
    /// Non-fatal remarks about the input, e.g. that the density-ratio
    /// refinement cannot be applied.
    pub fn warnings(&self) -> Vec<String> {
        let homogeneous = matches!(
            (self.m.family(), self.m_prime.family()),
            (Some(a), Some(b)) if a == b
        );
        if homogeneous {
            Vec::new()
        } else {
            vec!["mixing component families: ratio refinement unavailable".into()]
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    label: Option<String>,
    m: Spanned<Vec<Spanned<RawComponent>>>,
    m_prime: Spanned<Vec<Spanned<RawComponent>>>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    weight: f64,
}

#[derive(Serialize)]
struct OutFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    m: Vec<RawComponent>,
    m_prime: Vec<RawComponent>,
}

fn line_of(text: &str, span: &Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

fn require(value: Option<f64>, field: &str, ctx: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{ctx}: missing field `{field}`")))
}

fn reject_extra(
    c: &RawComponent,
    allowed: &[&str],
    ctx: &str,
) -> Result<(), CliError> {
    let present = [
        ("mu", c.mu),
        ("sigma", c.sigma),
        ("shape", c.shape),
        ("rate", c.rate),
        ("scale", c.scale),
    ];
    for (name, v) in present {
        if v.is_some() && !allowed.contains(&name) {
            return Err(CliError::Usage(format!(
                "{ctx}: field `{name}` does not apply to family `{}`",
                c.family
            )));
        }
    }
    Ok(())
}

fn build_component(c: &RawComponent, ctx: &str) -> Result<Component, CliError> {
    let param_err = |e: crate::Error| CliError::Usage(format!("{ctx}: {e}"));
    match c.family.as_str() {
        "gaussian" => {
            reject_extra(c, &["mu", "sigma"], ctx)?;
            Component::gaussian(require(c.mu, "mu", ctx)?, require(c.sigma, "sigma", ctx)?)
                .map_err(param_err)
        }
        "gamma" => {
            reject_extra(c, &["shape", "rate", "scale"], ctx)?;
            let shape = require(c.shape, "shape", ctx)?;
            let g = match (c.rate, c.scale) {
                (Some(rate), None) => Gamma::new(shape, rate),
                (None, Some(scale)) => Gamma::with_scale(shape, scale),
                _ => {
                    return Err(CliError::Usage(format!(
                        "{ctx}: gamma needs exactly one of `rate` or `scale`"
                    )))
                }
            };
            g.map(Component::Gamma).map_err(param_err)
        }
        "rayleigh" => {
            reject_extra(c, &["sigma"], ctx)?;
            Component::rayleigh(require(c.sigma, "sigma", ctx)?).map_err(param_err)
        }
        other => Err(CliError::Usage(format!(
            "{ctx}: unknown family `{other}` (expected gaussian, gamma or rayleigh)"
        ))),
    }
}

fn build_mixture(
    text: &str,
    name: &str,
    raw: &Spanned<Vec<Spanned<RawComponent>>>,
) -> Result<Mixture, CliError> {
    let items = raw.get_ref();
    if items.is_empty() {
        return Err(CliError::Usage(format!(
            "mixture `{name}` (line {}): needs at least one component",
            line_of(text, &raw.span())
        )));
    }
    let mut components = Vec::with_capacity(items.len());
    let mut weights = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let ctx = format!(
            "mixture `{name}`, component {} (line {})",
            i + 1,
            line_of(text, &item.span())
        );
        let c = item.get_ref();
        components.push(build_component(c, &ctx)?);
        if !(c.weight.is_finite() && c.weight > 0.0) {
            return Err(CliError::Usage(format!(
                "{ctx}: field `weight` must be positive, got {}",
                c.weight
            )));
        }
        weights.push(c.weight);
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(CliError::Usage(format!(
            "mixture `{name}` (line {}): weights sum to {total}, expected 1 within {WEIGHT_SUM_TOLERANCE}",
            line_of(text, &items[0].span())
        )));
    }
    Mixture::new(components, weights).map_err(|e| CliError::Usage(format!("mixture `{name}`: {e}")))
}

/// Parses the text of a mixture-pair file.
pub fn parse_mixture_str(text: &str) -> Result<MixturePairSpec, CliError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let at = e
            .span()
            .map(|s| format!(" (line {})", line_of(text, &s)))
            .unwrap_or_default();
        CliError::Usage(format!("malformed mixture file{at}: {}", e.message()))
    })?;
    Ok(MixturePairSpec {
        m: build_mixture(text, "m", &raw.m)?,
        m_prime: build_mixture(text, "m_prime", &raw.m_prime)?,
        label: raw.label,
    })
}

pub fn parse_mixture_file(path: &Path) -> Result<MixturePairSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_mixture_str(&text).map_err(|e| match e {
        CliError::Usage(s) => CliError::Usage(format!("{}: {s}", path.display())),
        other => other,
    })
}

fn raw_component(c: &Component, weight: f64) -> RawComponent {
    let mut r = RawComponent {
        family: c.family().to_string(),
        weight,
        ..RawComponent::default()
    };
    match c {
        Component::Gaussian(g) => {
            r.mu = Some(g.mu());
            r.sigma = Some(g.sigma());
        }
        Component::Gamma(g) => {
            r.shape = Some(g.shape());
            r.rate = Some(g.rate());
        }
        Component::Rayleigh(g) => r.sigma = Some(g.scale()),
    }
    r
}

/// TOML text that parses back to the same pair (Gamma written with `rate`).
pub fn serialize_mixture_pair(spec: &MixturePairSpec) -> String {
    let side = |m: &Mixture| -> Vec<RawComponent> {
        m.components()
            .iter()
            .zip(m.weights())
            .map(|(c, &w)| raw_component(c, w))
            .collect()
    };
    let out = OutFile {
        label: spec.label.clone(),
        m: side(&spec.m),
        m_prime: side(&spec.m_prime),
    };
    toml::to_string(&out).expect("plain tables of numbers and strings serialize")
}
