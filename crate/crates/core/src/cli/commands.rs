//! Subcommand implementations. Each returns the text destined for stdout
//! (or the `--out` file) so that it can be tested without a process.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::envelope::{decompose, refine, EnvelopeDecomposition};
use crate::envelope_bounds::{celb_ceub, BoundReport};
use crate::estimators::{mc_kl, mc_tv, pinsker_upper, MCEstimate};
use crate::exact_tv::gaussian_tv_exact;
use crate::expfam::Component;
use crate::mixture::Mixture;
use crate::quantization::{cgqlb, sample_partition, shared_component_upper, Partition};

use super::experiment::{render_csv, run_trials, ExperimentConfig};
use super::input::MixturePairSpec;
use super::{fmt_f64, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Text,
    Json,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn header(spec: &MixturePairSpec) -> String {
    let mut out = String::new();
    if let Some(label) = &spec.label {
        out.push_str(&format!("label           {label}\n"));
    }
    for w in spec.warnings() {
        out.push_str(&format!("warning         {w}\n"));
    }
    out
}

fn line(out: &mut String, key: &str, value: f64) {
    out.push_str(&format!("{key:<16}{}\n", fmt_f64(value)));
}

#[derive(Serialize)]
struct BoundsOutput<'a> {
    label: Option<&'a str>,
    warnings: Vec<String>,
    #[serde(flatten)]
    report: &'a BoundReport,
    wall_time_s: f64,
}

/// CELB/CEUB with diagnostics.
pub fn run_bounds(
    spec: &MixturePairSpec,
    refine_factor: usize,
    mode: OutputMode,
) -> Result<String, CliError> {
    if refine_factor == 0 {
        return Err(CliError::Usage("--refine must be >= 1".into()));
    }
    let start = Instant::now();
    let report = celb_ceub(&spec.m, &spec.m_prime, refine_factor);
    let wall = start.elapsed().as_secs_f64();
    if mode == OutputMode::Json {
        return Ok(json(&BoundsOutput {
            label: spec.label.as_deref(),
            warnings: spec.warnings(),
            report: &report,
            wall_time_s: wall,
        }));
    }
    let mut out = header(spec);
    line(&mut out, "celb", report.celb);
    line(&mut out, "ceub", report.ceub);
    out.push_str(&format!("{:<16}{:?}\n", "lower_method", report.lower_method).to_lowercase());
    out.push_str(&format!("{:<16}{:?}\n", "upper_method", report.upper_method).to_lowercase());
    line(&mut out, "A", report.a);
    line(&mut out, "B", report.b);
    line(&mut out, "envelope_lower", report.envelope_lower);
    line(&mut out, "envelope_upper", report.envelope_upper);
    match (report.ratio_lower, report.ratio_upper) {
        (Some(lo), Some(hi)) => {
            line(&mut out, "ratio_lower", lo);
            line(&mut out, "ratio_upper", hi);
        }
        _ => out.push_str(&format!(
            "{:<16}{}\n",
            "ratio",
            report.ratio_unavailable.as_deref().unwrap_or("unavailable")
        )),
    }
    line(&mut out, "bayes_error_lo", report.bayes_error_lo);
    line(&mut out, "bayes_error_hi", report.bayes_error_hi);
    out.push_str(&format!("{:<16}{}\n", "refine", report.refine_factor));
    out.push_str(&format!("{:<16}{}\n", "intervals", report.interval_count));
    out.push_str(&format!("{:<16}{wall:.6}\n", "wall_time_s"));
    Ok(out)
}

/// `[lo, hi]` covering the bulk of both mixtures: component means
/// plus/minus six standard deviations (clipped at 0 for half-line families).
pub fn plot_range(m: &Mixture, m_prime: &Mixture) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in m.components().iter().chain(m_prime.components()) {
        let (mean, sd) = (c.mean(), c.variance().sqrt());
        let floor = c.support().lower();
        lo = lo.min((mean - 6.0 * sd).max(floor));
        hi = hi.max(mean + 6.0 * sd);
    }
    (lo, hi)
}

fn uniform_partition(lo: f64, hi: f64, bins: usize) -> Result<Partition, CliError> {
    if bins < 2 {
        return Ok(Partition::trivial());
    }
    let cuts = (1..bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
    Ok(Partition::new(cuts)?)
}

#[derive(Serialize)]
struct CgqlbOutput {
    cgqlb: f64,
    cells: usize,
    partition: &'static str,
    shared_component_upper: Option<f64>,
}

/// CGQLB on a sampled partition (`samples` draws) or, with `bins`, on an
/// equal-width grid over [`plot_range`].
pub fn run_cgqlb(
    spec: &MixturePairSpec,
    samples: usize,
    seed: u64,
    bins: Option<usize>,
    mode: OutputMode,
) -> Result<String, CliError> {
    let (m, mp) = (&spec.m, &spec.m_prime);
    let (partition, kind) = match bins {
        Some(b) => {
            let (lo, hi) = plot_range(m, mp);
            (uniform_partition(lo, hi, b)?, "uniform")
        }
        None => (sample_partition(m, mp, samples, seed)?, "sampled"),
    };
    let out = CgqlbOutput {
        cgqlb: cgqlb(m, mp, &partition),
        cells: partition.cell_count(),
        partition: kind,
        shared_component_upper: shared_component_upper(m, mp).ok(),
    };
    if mode == OutputMode::Json {
        return Ok(json(&out));
    }
    let mut text = header(spec);
    line(&mut text, "cgqlb", out.cgqlb);
    text.push_str(&format!("{:<16}{} ({kind})\n", "cells", out.cells));
    if let Some(u) = out.shared_component_upper {
        line(&mut text, "shared_upper", u);
    }
    Ok(text)
}

#[derive(Serialize)]
struct McOutput {
    tv: MCEstimate,
    kl: MCEstimate,
    pinsker: f64,
}

/// Monte Carlo TV and KL estimates plus the Pinsker value.
pub fn run_mc(
    spec: &MixturePairSpec,
    samples: usize,
    seed: u64,
    mode: OutputMode,
) -> Result<String, CliError> {
    let tv = mc_tv(&spec.m, &spec.m_prime, samples, seed, None)?;
    let kl = mc_kl(&spec.m, &spec.m_prime, samples, seed.wrapping_add(1))?;
    let pinsker = pinsker_upper(kl.mean.max(0.0))?;
    let out = McOutput { tv, kl, pinsker };
    if mode == OutputMode::Json {
        return Ok(json(&out));
    }
    let mut text = header(spec);
    line(&mut text, "mc_tv", tv.mean);
    line(&mut text, "mc_tv_se", tv.std_error);
    line(&mut text, "mc_tv_ci95_lo", tv.ci95_lo);
    line(&mut text, "mc_tv_ci95_hi", tv.ci95_hi);
    line(&mut text, "mc_kl", kl.mean);
    line(&mut text, "mc_kl_se", kl.std_error);
    line(&mut text, "pinsker", pinsker);
    text.push_str(&format!("{:<16}{}\n{:<16}{}\n", "samples", samples, "seed", seed));
    Ok(text)
}

/// Closed-form TV; both mixtures must be a single Gaussian.
pub fn run_exact(spec: &MixturePairSpec, mode: OutputMode) -> Result<String, CliError> {
    let tv = match (spec.m.components(), spec.m_prime.components()) {
        ([Component::Gaussian(a)], [Component::Gaussian(b)]) => gaussian_tv_exact(a, b),
        _ => {
            return Err(CliError::Usage(
                "exact TV needs a single Gaussian component on each side".into(),
            ))
        }
    };
    if mode == OutputMode::Json {
        return Ok(json(&serde_json::json!({ "exact_tv": tv })));
    }
    let mut text = header(spec);
    line(&mut text, "exact_tv", tv);
    Ok(text)
}

/// Where the grid table goes when the interval table is written to `path`:
/// `env.csv` becomes `env.grid.csv`.
pub fn grid_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.grid.csv"))
}

/// Density table `x,m,m_prime,lower_m,upper_m,lower_m_prime,upper_m_prime`
/// on `points` equally spaced abscissae. Envelope values are read off the
/// decomposition's index assignments.
pub fn envelope_grid(
    dec: &EnvelopeDecomposition,
    m: &Mixture,
    m_prime: &Mixture,
    points: usize,
) -> String {
    let (lo, hi) = plot_range(m, m_prime);
    let mut out = String::from("x,m,m_prime,lower_m,upper_m,lower_m_prime,upper_m_prime\n");
    let ivs = dec.intervals();
    let mut s = 0;
    for i in 0..points {
        let x = if points == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        };
        while s + 1 < ivs.len() && x >= ivs[s].b {
            s += 1;
        }
        let iv = ivs[s];
        let val = |mix: &Mixture, j: usize| mix.weighted_ln_pdf(j, x).exp();
        let row = [
            x,
            m.pdf(x),
            m_prime.pdf(x),
            val(m, iv.lower),
            val(m, iv.upper),
            val(m_prime, iv.lower_prime),
            val(m_prime, iv.upper_prime),
        ];
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes the interval table to `path` and the density grid next to it
/// (see [`grid_path`]). Returns a short summary.
pub fn run_envelope_dump(
    spec: &MixturePairSpec,
    refine_factor: usize,
    points: usize,
    path: &Path,
) -> Result<String, CliError> {
    if refine_factor == 0 {
        return Err(CliError::Usage("--refine must be >= 1".into()));
    }
    let dec = refine(&decompose(&spec.m, &spec.m_prime), refine_factor)?;
    let write = |p: &Path, text: &str| {
        std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    };
    write(path, &dec.to_csv())?;
    let gp = grid_path(path);
    write(&gp, &envelope_grid(&dec, &spec.m, &spec.m_prime, points))?;
    Ok(format!(
        "{}wrote {} intervals to {}\nwrote {points} grid points to {}\n",
        header(spec),
        dec.len(),
        path.display(),
        gp.display()
    ))
}

/// The random-mixture benchmark as CSV.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let rows = run_trials(cfg)?;
    Ok(render_csv(cfg, &rows))
}
