//! Monte Carlo baselines: importance-sampled TV, sampled KL, and the
//! Pinsker bound `TV <= sqrt(KL / 2)` (natural logarithms throughout).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::Mixture;
use crate::sum::CompensatedSum;

const Z95: f64 = 1.96;

/// Sample mean with its standard error and a normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub n: usize,
    pub seed: u64,
}

impl MCEstimate {
    fn from_samples(values: &[f64], seed: u64) -> Self {
        let n = values.len();
        let mean = values.iter().copied().collect::<CompensatedSum>().value() / n as f64;
        let std_error = if n > 1 {
            let ss: CompensatedSum = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (ss.value() / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            ci95_lo: mean - Z95 * std_error,
            ci95_hi: mean + Z95 * std_error,
            n,
            seed,
        }
    }
}

/// Importance-sampling estimate of `TV(m, m')` from `n` draws of
/// `proposal` (default: the equal blend of `m` and `m'`).
pub fn mc_tv(
    m: &Mixture,
    m_prime: &Mixture,
    n: usize,
    seed: u64,
    proposal: Option<&Mixture>,
) -> Result<MCEstimate> {
    if n == 0 {
        return Err(Error::argument("sample count must be >= 1"));
    }
    let blend;
    let r = match proposal {
        Some(p) => p,
        None => {
            blend = Mixture::blend(m, m_prime, 0.5)?;
            &blend
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = r.sample(&mut rng, n);
    let mut values = Vec::with_capacity(n);
    for x in xs {
        let gap = (m.pdf(x) - m_prime.pdf(x)).abs();
        if gap == 0.0 {
            values.push(0.0);
            continue;
        }
        let rx = r.pdf(x);
        if rx <= 0.0 {
            return Err(Error::Numerical(format!(
                "proposal density vanishes at {x} where the integrand is {gap}"
            )));
        }
        values.push(0.5 * gap / rx);
    }
    Ok(MCEstimate::from_samples(&values, seed))
}

/// Sample estimate of `KL(m : m') = E_m[ln m - ln m']` in nats.
pub fn mc_kl(m: &Mixture, m_prime: &Mixture, n: usize, seed: u64) -> Result<MCEstimate> {
    if n == 0 {
        return Err(Error::argument("sample count must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = m.sample(&mut rng, n);
    let mut values = Vec::with_capacity(n);
    for x in xs {
        let lq = m_prime.ln_pdf(x);
        if lq == f64::NEG_INFINITY {
            return Err(Error::Numerical(format!("second density vanishes at {x}")));
        }
        values.push(m.ln_pdf(x) - lq);
    }
    Ok(MCEstimate::from_samples(&values, seed))
}

/// `sqrt(kl / 2)`, uncapped.
pub fn pinsker_upper(kl: f64) -> Result<f64> {
    if kl.is_nan() || kl < 0.0 {
        return Err(Error::argument(format!("KL must be >= 0, got {kl}")));
    }
    Ok((0.5 * kl).sqrt())
}
