use std::f64::consts::E;
use std::fmt;

use super::Analysis;
use crate::error::{Error, Result};

/// Whether the optimal access probability is below one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every link transmits (`λ·X < 1`).
    Unsaturated,
    /// Access probability is throttled to `1/(λ·X)`.
    Saturated,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Unsaturated => "unsaturated",
            Regime::Saturated => "saturated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumReport {
    pub p1_opt: f64,
    pub p2_opt: f64,
    pub t_max: f64,
    pub regime: Regime,
}

/// Which closed form of the throughput gain applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainBranch {
    /// `λF < 1` and `λG < 1`.
    BothUnsaturated,
    /// `λF ≥ 1` and `λG < 1`.
    FdSaturated,
    /// `λF ≥ 1` and `λG ≥ 1`.
    BothSaturated,
}

impl fmt::Display for GainBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainBranch::BothUnsaturated => "both_unsaturated",
            GainBranch::FdSaturated => "fd_saturated",
            GainBranch::BothSaturated => "both_saturated",
        })
    }
}

/// Ratio of the best FD-only throughput to the best HD-only throughput,
/// with closed-form bounds that depend on `G` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub tg: f64,
    pub lower: f64,
    pub upper: f64,
    pub branch: GainBranch,
}

/// Relative slack between the quadrature-based gain and its G-only bounds.
const GAIN_SLACK: f64 = 1e-6;

/// Maximizes `p e^{-load·p}` on [0, 1] scaled by `streams`.
fn single_mode(load: f64, streams: f64) -> (f64, f64, Regime) {
    if load >= 1.0 {
        (1.0 / load, streams / (load * E), Regime::Saturated)
    } else {
        (1.0, streams * (-load).exp(), Regime::Unsaturated)
    }
}

pub(super) fn hd_optimum(lambda_g: f64) -> OptimumReport {
    let (p1_opt, t_max, regime) = single_mode(lambda_g, 1.0);
    OptimumReport {
        p1_opt,
        p2_opt: 0.0,
        t_max,
        regime,
    }
}

impl Analysis {
    pub fn optimal_hd(&self) -> OptimumReport {
        hd_optimum(self.config().lambda * self.g())
    }

    pub fn optimal_fd(&self) -> OptimumReport {
        let (p2_opt, t_max, regime) = single_mode(self.config().lambda * self.f(), 2.0);
        OptimumReport {
            p1_opt: 0.0,
            p2_opt,
            t_max,
            regime,
        }
    }

    /// Joint optimum over `(p1, p2)`: all active links run full-duplex.
    pub fn optimal_mixed(&self) -> OptimumReport {
        self.optimal_fd()
    }

    pub fn throughput_gain(&self) -> Result<GainReport> {
        let lambda = self.config().lambda;
        let (g, f, delta) = (self.g(), self.f(), self.delta());
        let (lg, lf) = (lambda * g, lambda * f);

        let report = match (lf >= 1.0, lg >= 1.0) {
            (false, false) => GainReport {
                tg: 2.0 * (lambda * (g - f)).exp(),
                lower: 2.0 * (-lg).exp(),
                upper: 2.0 * (-delta * lg).exp(),
                branch: GainBranch::BothUnsaturated,
            },
            (true, false) => {
                let e = (lg - 1.0).exp();
                GainReport {
                    tg: 2.0 / lf * e,
                    lower: e / lg,
                    upper: 2.0 * e / ((1.0 + delta) * lg),
                    branch: GainBranch::FdSaturated,
                }
            }
            (true, true) => GainReport {
                tg: 2.0 * g / f,
                lower: 1.0,
                upper: 2.0 / (1.0 + delta),
                branch: GainBranch::BothSaturated,
            },
            (false, true) => {
                return Err(Error::Consistency(format!(
                    "λG = {lg} ≥ 1 while λF = {lf} < 1, but F > G"
                )))
            }
        };

        if report.lower > report.upper
            || report.tg < report.lower * (1.0 - GAIN_SLACK)
            || report.tg > report.upper * (1.0 + GAIN_SLACK)
        {
            return Err(Error::Consistency(format!(
                "throughput gain {} outside [{}, {}] in branch {}",
                report.tg, report.lower, report.upper, report.branch
            )));
        }
        Ok(report)
    }
}
