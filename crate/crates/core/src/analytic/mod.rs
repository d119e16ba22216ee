//! Closed-form and integral formulas for success probability, throughput,
//! optimal access probabilities and full-duplex throughput gain.
//!
//! [`Analysis`] evaluates `G` and `F` once for a configuration and answers
//! every query from them. The free functions are thin conveniences that
//! build an `Analysis` with the default quadrature tolerances.

mod config;
mod functionals;
mod optimize;
mod search;

pub use config::{MacProfile, NetworkConfig, MAC_SUM_TOL};
pub use functionals::{f_fn, g_fn, k_fn, k_fn_with, SANDWICH_SLACK};
pub use optimize::{GainBranch, GainReport, OptimumReport, Regime};
pub use search::{simplex_search, SimplexSearch};

use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

/// Lower and upper bound on the success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessBounds {
    pub lower: f64,
    pub upper: f64,
}

/// A configuration together with its interference functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analysis {
    config: NetworkConfig,
    g: f64,
    f: f64,
}

impl Analysis {
    pub fn new(config: NetworkConfig) -> Result<Self> {
        Self::with_spec(config, &QuadratureSpec::default())
    }

    pub fn with_spec(config: NetworkConfig, spec: &QuadratureSpec) -> Result<Self> {
        config.validate()?;
        let s = config.s();
        let g = g_fn(s, config.alpha)?;
        let f = f_fn(s, config.alpha, config.r_link, spec)?;
        Ok(Self { config, g, f })
    }

    /// Same (θ, R, α) at another density. `G` and `F` do not depend on λ,
    /// so they are reused.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(Self {
            config: self.config.with_lambda(lambda)?,
            ..*self
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn delta(&self) -> f64 {
        self.config.delta()
    }

    pub fn success_probability(&self, mac: &MacProfile) -> f64 {
        let lambda = self.config.lambda;
        (-lambda * mac.p1 * self.g).exp() * (-lambda * mac.p2 * self.f).exp()
    }

    pub fn success_bounds(&self, mac: &MacProfile) -> SuccessBounds {
        let lambda = self.config.lambda;
        let delta = self.delta();
        SuccessBounds {
            lower: (-lambda * (mac.p1 + 2.0 * mac.p2) * self.g).exp(),
            upper: (-lambda * (mac.p1 + mac.p2 * (1.0 + delta)) * self.g).exp(),
        }
    }

    /// Success probability when both endpoints of an interfering pair are
    /// treated as equidistant from the receiver. Coincides with the upper
    /// bound.
    pub fn ps_colocated_approx(&self, mac: &MacProfile) -> f64 {
        let lambda = self.config.lambda;
        let hd = (-lambda * mac.p1 * self.g).exp();
        let fd = (-lambda * mac.p2 * (1.0 + self.delta()) * self.g).exp();
        hd * fd
    }

    /// `(p1 + 2 p2) exp(-λ (p1 G + p2 F))`, without validating the MAPs.
    pub fn throughput_at(&self, p1: f64, p2: f64) -> f64 {
        let lambda = self.config.lambda;
        (p1 + 2.0 * p2) * (-(lambda * p1 * self.g + lambda * p2 * self.f)).exp()
    }

    pub fn throughput(&self, mac: &MacProfile) -> f64 {
        self.throughput_at(mac.p1, mac.p2)
    }

    pub fn throughput_hd(&self, p1: f64) -> Result<f64> {
        check_probability("p1", p1)?;
        Ok(self.throughput_at(p1, 0.0))
    }

    pub fn throughput_fd(&self, p2: f64) -> Result<f64> {
        check_probability("p2", p2)?;
        Ok(self.throughput_at(0.0, p2))
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must lie in [0, 1], got {p}")))
    }
}

pub fn success_probability(config: &NetworkConfig, mac: &MacProfile) -> Result<f64> {
    Ok(Analysis::new(*config)?.success_probability(mac))
}

/// Bounds need only `G`; no quadrature is performed.
pub fn success_bounds(config: &NetworkConfig, mac: &MacProfile) -> Result<SuccessBounds> {
    config.validate()?;
    let g = g_fn(config.s(), config.alpha)?;
    let delta = config.delta();
    let lambda = config.lambda;
    Ok(SuccessBounds {
        lower: (-lambda * (mac.p1 + 2.0 * mac.p2) * g).exp(),
        upper: (-lambda * (mac.p1 + mac.p2 * (1.0 + delta)) * g).exp(),
    })
}

pub fn ps_colocated_approx(config: &NetworkConfig, mac: &MacProfile) -> Result<f64> {
    config.validate()?;
    let g = g_fn(config.s(), config.alpha)?;
    let lambda = config.lambda;
    Ok((-lambda * mac.p1 * g).exp() * (-lambda * mac.p2 * (1.0 + config.delta()) * g).exp())
}

pub fn throughput(config: &NetworkConfig, mac: &MacProfile) -> Result<f64> {
    Ok(Analysis::new(*config)?.throughput(mac))
}

pub fn throughput_hd(config: &NetworkConfig, p1: f64) -> Result<f64> {
    Analysis::new(*config)?.throughput_hd(p1)
}

pub fn throughput_fd(config: &NetworkConfig, p2: f64) -> Result<f64> {
    Analysis::new(*config)?.throughput_fd(p2)
}

pub fn optimal_hd(config: &NetworkConfig) -> Result<OptimumReport> {
    config.validate()?;
    let g = g_fn(config.s(), config.alpha)?;
    Ok(optimize::hd_optimum(config.lambda * g))
}

pub fn optimal_fd(config: &NetworkConfig) -> Result<OptimumReport> {
    Ok(Analysis::new(*config)?.optimal_fd())
}

pub fn optimal_mixed(config: &NetworkConfig) -> Result<OptimumReport> {
    Ok(Analysis::new(*config)?.optimal_mixed())
}

pub fn throughput_gain(config: &NetworkConfig) -> Result<GainReport> {
    Analysis::new(*config)?.throughput_gain()
}
