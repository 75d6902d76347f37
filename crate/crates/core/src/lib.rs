//! # tvbounds
//!
//! Guaranteed deterministic lower and upper bounds on the total variation
//! distance between univariate mixtures of Gaussian, Gamma and Rayleigh
//! components, together with the closed-form TV between two Gaussians and
//! Monte Carlo baselines.
//!
//! The main entry points are:
//!
//! - [`envelope_bounds::celb_ceub`]: envelope decomposition plus density-ratio
//!   refinement, giving an interval that always contains `TV(m, m')`.
//! - [`quantization::cgqlb`]: the coarse-grained lower bound obtained by
//!   lumping both mixtures onto a partition.
//! - [`exact_tv::gaussian_tv_exact`]: closed form for two Gaussians.
//! - [`estimators::mc_tv`] / [`estimators::mc_kl`]: stochastic baselines.
//!
//! ```
//! use tvbounds::{Component, Mixture, envelope_bounds::celb_ceub};
//!
//! let m = Mixture::new(
//!     vec![Component::gaussian(-1.0, 1.0).unwrap(), Component::gaussian(1.0, 0.5).unwrap()],
//!     vec![0.5, 0.5],
//! ).unwrap();
//! let m_prime = Mixture::single(Component::gaussian(0.0, 1.5).unwrap());
//! let report = celb_ceub(&m, &m_prime, 10);
//! assert!(report.celb <= report.ceub);
//! ```

pub mod cli;
pub mod envelope;
pub mod envelope_bounds;
pub mod error;
pub mod estimators;
pub mod exact_tv;
pub mod expfam;
pub mod mixture;
pub mod quantization;
pub mod special;

mod logpoly;
mod sum;

pub use error::{Error, Result};
pub use expfam::{Component, Family, Gamma, Gaussian, NaturalForm, Rayleigh, SupportClass};
pub use mixture::Mixture;
