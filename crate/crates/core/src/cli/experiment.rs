//! Random-mixture benchmark protocol.
//!
//! Each trial draws two equal-weight Gaussian mixtures with `k` components.
//! Means come from `N(0, 1)` (dataset 1) or `N(0, 5^2)` (dataset 2), and each
//! component precision `1/sigma^2` from a Gamma distribution, shape 5 and
//! scale 0.2 by default. Every trial reports CELB, CEUB, CGQLB on a sampled
//! partition, the Monte Carlo TV estimate and the Pinsker value of the
//! Monte Carlo KL.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::envelope_bounds::{celb_ceub, DEFAULT_REFINE_FACTOR};
use crate::estimators::{mc_kl, mc_tv, pinsker_upper};
use crate::exact_tv::gaussian_tv_exact;
use crate::expfam::Component;
use crate::mixture::Mixture;
use crate::quantization::{cgqlb, sample_partition};

use super::{fmt_f64, CliError};

pub const DEFAULT_CGQ_SAMPLES: usize = 100;
pub const DEFAULT_MC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dataset {
    One,
    Two,
}

impl Dataset {
    pub fn mean_std(self) -> f64 {
        match self {
            Dataset::One => 1.0,
            Dataset::Two => 5.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "1" | "dataset1" => Ok(Dataset::One),
            "2" | "dataset2" => Ok(Dataset::Two),
            _ => Err(CliError::Usage(format!("unknown dataset `{s}` (expected 1 or 2)"))),
        }
    }

    fn id(self) -> u8 {
        match self {
            Dataset::One => 1,
            Dataset::Two => 2,
        }
    }
}

/// How the second Gamma parameter of the precision prior is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaParam {
    Scale,
    Rate,
}

/// Prior on component precisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionPrior {
    pub shape: f64,
    pub second: f64,
    pub param: GammaParam,
}

impl Default for PrecisionPrior {
    fn default() -> Self {
        Self {
            shape: 5.0,
            second: 0.2,
            param: GammaParam::Scale,
        }
    }
}

impl PrecisionPrior {
    fn scale(&self) -> f64 {
        match self.param {
            GammaParam::Scale => self.second,
            GammaParam::Rate => 1.0 / self.second,
        }
    }
}

/// Equal-weight `k`-component Gaussian mixture from the protocol.
pub fn random_gmm<R: Rng + ?Sized>(
    rng: &mut R,
    dataset: Dataset,
    k: usize,
    prior: &PrecisionPrior,
) -> Mixture {
    let means = Normal::new(0.0, dataset.mean_std()).expect("positive std");
    let precision =
        rand_distr::Gamma::new(prior.shape, prior.scale()).expect("validated precision prior");
    let comps = (0..k)
        .map(|_| {
            let mu = means.sample(rng);
            let tau: f64 = precision.sample(rng);
            Component::gaussian(mu, 1.0 / tau.sqrt()).expect("positive precision")
        })
        .collect();
    Mixture::uniform(comps).expect("k >= 1")
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Gamma mixture with shape and rate log-uniform on `[0.2, 5]`.
pub fn random_gamma_mixture<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Mixture {
    let comps = (0..k)
        .map(|_| {
            let shape = log_uniform(rng, 0.2, 5.0);
            let rate = log_uniform(rng, 0.2, 5.0);
            Component::gamma(shape, rate).expect("positive parameters")
        })
        .collect();
    Mixture::new(comps, random_weights(rng, k)).expect("normalized weights")
}

/// Rayleigh mixture with scales log-uniform on `[0.2, 5]`.
pub fn random_rayleigh_mixture<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Mixture {
    let comps = (0..k)
        .map(|_| Component::rayleigh(log_uniform(rng, 0.2, 5.0)).expect("positive scale"))
        .collect();
    Mixture::new(comps, random_weights(rng, k)).expect("normalized weights")
}

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub mc_n: usize,
    pub cgq_n: usize,
    pub refine: usize,
    pub prior: PrecisionPrior,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: Dataset::One,
            k: 2,
            trials: 10,
            seed: 0,
            mc_n: DEFAULT_MC_SAMPLES,
            cgq_n: DEFAULT_CGQ_SAMPLES,
            refine: DEFAULT_REFINE_FACTOR,
            prior: PrecisionPrior::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub celb: f64,
    pub ceub: f64,
    pub cgqlb: f64,
    pub mc_tv: f64,
    pub mc_std_error: f64,
    pub mc_kl: f64,
    pub pinsker: f64,
    /// Closed form, only for single-component pairs.
    pub exact_tv: Option<f64>,
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRow, CliError> {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let m = random_gmm(&mut rng, cfg.dataset, cfg.k, &cfg.prior);
    let mp = random_gmm(&mut rng, cfg.dataset, cfg.k, &cfg.prior);
    let (cgq_seed, mc_seed, kl_seed) = (rng.next_u64(), rng.next_u64(), rng.next_u64());
    let report = celb_ceub(&m, &mp, cfg.refine);
    let cgq = cgqlb(&m, &mp, &sample_partition(&m, &mp, cfg.cgq_n, cgq_seed)?);
    let mc = mc_tv(&m, &mp, cfg.mc_n, mc_seed, None)?;
    let kl = mc_kl(&m, &mp, cfg.mc_n, kl_seed)?;
    let exact_tv = match (m.components(), mp.components()) {
        ([Component::Gaussian(a)], [Component::Gaussian(b)]) => Some(gaussian_tv_exact(a, b)),
        _ => None,
    };
    Ok(TrialRow {
        trial,
        celb: report.celb,
        ceub: report.ceub,
        cgqlb: cgq,
        mc_tv: mc.mean,
        mc_std_error: mc.std_error,
        mc_kl: kl.mean,
        // a negative sampled KL carries no information; report 0
        pinsker: pinsker_upper(kl.mean.max(0.0))?,
        exact_tv,
    })
}

/// Runs all trials (in parallel, rows ordered by trial index).
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRow>, CliError> {
    if cfg.k == 0 || cfg.trials == 0 {
        return Err(CliError::Usage("k and trials must be >= 1".into()));
    }
    if !(cfg.prior.shape > 0.0 && cfg.prior.second > 0.0) {
        return Err(CliError::Usage("precision prior parameters must be positive".into()));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// CSV with one row per trial followed by `mean`, `std`, `rel_mean` and
/// `rel_std` summary rows; the relative rows divide each method by the
/// trial's Monte Carlo estimate.
pub fn render_csv(cfg: &ExperimentConfig, rows: &[TrialRow]) -> String {
    let with_exact = rows.iter().all(|r| r.exact_tv.is_some());
    let mut out = String::from("trial,dataset,k,celb,ceub,cgqlb,mc_tv,mc_std_error,mc_kl,pinsker");
    if with_exact {
        out.push_str(",exact_tv");
    }
    out.push('\n');
    let method_values = |r: &TrialRow| -> Vec<f64> {
        let mut v = vec![r.celb, r.ceub, r.cgqlb, r.mc_tv, r.mc_std_error, r.mc_kl, r.pinsker];
        if let Some(e) = r.exact_tv.filter(|_| with_exact) {
            v.push(e);
        }
        v
    };
    let push_row = |out: &mut String, label: &str, values: &[f64]| {
        out.push_str(&format!("{label},{},{}", cfg.dataset.id(), cfg.k));
        for v in values {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    };
    let table: Vec<Vec<f64>> = rows.iter().map(method_values).collect();
    for (r, values) in rows.iter().zip(&table) {
        push_row(&mut out, &r.trial.to_string(), values);
    }
    let cols = table.first().map_or(0, Vec::len);
    let column = |j: usize| -> Vec<f64> { table.iter().map(|v| v[j]).collect() };
    let relative = |j: usize| -> Vec<f64> {
        rows.iter().zip(&table).map(|(r, v)| v[j] / r.mc_tv).collect()
    };
    let (mut mean, mut std, mut rel_mean, mut rel_std) = (vec![], vec![], vec![], vec![]);
    for j in 0..cols {
        let (a, b) = mean_std(&column(j));
        let (c, d) = mean_std(&relative(j));
        mean.push(a);
        std.push(b);
        rel_mean.push(c);
        rel_std.push(d);
    }
    push_row(&mut out, "mean", &mean);
    push_row(&mut out, "std", &std);
    push_row(&mut out, "rel_mean", &rel_mean);
    push_row(&mut out, "rel_std", &rel_std);
    out
}
