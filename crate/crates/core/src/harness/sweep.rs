use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use super::format::fmt_sig;
use crate::analytic::{Analysis, MacProfile, NetworkConfig, SANDWICH_SLACK};
use crate::error::{Error, Result};
use crate::mcsim::{estimate_ps, Execution, SimSettings};

/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 15;

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Lambda,
    Theta,
    Alpha,
    RLink,
    P1,
    P2,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Lambda => "lambda",
            SweepVariable::Theta => "theta",
            SweepVariable::Alpha => "alpha",
            SweepVariable::RLink => "r_link",
            SweepVariable::P1 => "p1",
            SweepVariable::P2 => "p2",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lambda" => SweepVariable::Lambda,
            "theta" => SweepVariable::Theta,
            "alpha" => SweepVariable::Alpha,
            "r" | "r_link" => SweepVariable::RLink,
            "p1" => SweepVariable::P1,
            "p2" => SweepVariable::P2,
            other => {
                return Err(Error::domain(format!(
                    "unknown sweep variable {other:?} (expected lambda, theta, alpha, r, p1 or p2)"
                )))
            }
        })
    }
}

/// Access probabilities used at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacChoice {
    Fixed(MacProfile),
    /// The throughput-optimal profile of each grid point.
    Optimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: NetworkConfig,
    pub mac: MacChoice,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub sim: Option<SimSettings>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::domain("sweep grid is empty"));
        }
        if let Some(x) = self.grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::domain(format!("sweep grid value {x} is not finite")));
        }
        if let Some(w) = self.grid.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "sweep grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        if matches!(self.variable, SweepVariable::P1 | SweepVariable::P2)
            && self.mac == MacChoice::Optimize
        {
            return Err(Error::domain(format!(
                "cannot sweep {} while optimizing the access probabilities",
                self.variable
            )));
        }
        if let Some(sim) = &self.sim {
            sim.validate()?;
        }
        Ok(())
    }

    /// Configuration and fixed access profile at grid value `x`.
    fn point(&self, x: f64) -> Result<(NetworkConfig, Option<MacProfile>)> {
        let mut config = self.base;
        let mut mac = match self.mac {
            MacChoice::Fixed(m) => Some(m),
            MacChoice::Optimize => None,
        };
        match self.variable {
            SweepVariable::Lambda => config.lambda = x,
            SweepVariable::Theta => config.theta = x,
            SweepVariable::Alpha => config.alpha = x,
            SweepVariable::RLink => config.r_link = x,
            SweepVariable::P1 => mac = mac.map(|m| MacProfile::from_access(x, m.p2)).transpose()?,
            SweepVariable::P2 => mac = mac.map(|m| MacProfile::from_access(m.p1, x)).transpose()?,
        }
        config.validate()?;
        Ok((config, mac))
    }
}

/// Analytic and simulated quantities at one grid point.
///
/// `p1_opt` and `t_hd_max` describe the best half-duplex-only network,
/// `p2_opt` and `t_fd_max` the best full-duplex-only one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub mac: MacProfile,
    pub ps: f64,
    pub ps_lower: f64,
    pub ps_upper: f64,
    pub throughput: f64,
    pub t_hd_max: f64,
    pub t_fd_max: f64,
    pub p1_opt: f64,
    pub p2_opt: f64,
    pub tg: f64,
    pub tg_lower: f64,
    pub tg_upper: f64,
    pub inv_f: f64,
    pub inv_g: f64,
    pub ps_sim_mean: Option<f64>,
    pub ps_sim_half_width: Option<f64>,
}

/// A CSV column of a [`SweepResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    X,
    P0,
    P1,
    P2,
    Ps,
    PsLower,
    PsUpper,
    Throughput,
    THdMax,
    TFdMax,
    P1Opt,
    P2Opt,
    Tg,
    TgLower,
    TgUpper,
    PsSimMean,
    PsSimHalfWidth,
}

impl Column {
    pub const ANALYTIC: [Column; 15] = [
        Column::X,
        Column::P0,
        Column::P1,
        Column::P2,
        Column::Ps,
        Column::PsLower,
        Column::PsUpper,
        Column::Throughput,
        Column::THdMax,
        Column::TFdMax,
        Column::P1Opt,
        Column::P2Opt,
        Column::Tg,
        Column::TgLower,
        Column::TgUpper,
    ];

    pub fn header(self, variable: SweepVariable) -> &'static str {
        match self {
            Column::X => variable.name(),
            Column::P0 => "p0",
            Column::P1 => "p1",
            Column::P2 => "p2",
            Column::Ps => "ps",
            Column::PsLower => "ps_lower",
            Column::PsUpper => "ps_upper",
            Column::Throughput => "T",
            Column::THdMax => "t_hd_max",
            Column::TFdMax => "t_fd_max",
            Column::P1Opt => "p1_opt",
            Column::P2Opt => "p2_opt",
            Column::Tg => "tg",
            Column::TgLower => "tg_lower",
            Column::TgUpper => "tg_upper",
            Column::PsSimMean => "ps_sim",
            Column::PsSimHalfWidth => "ps_sim_hw",
        }
    }

    pub fn value(self, row: &SweepRow) -> Option<f64> {
        Some(match self {
            Column::X => row.x,
            Column::P0 => row.mac.p0,
            Column::P1 => row.mac.p1,
            Column::P2 => row.mac.p2,
            Column::Ps => row.ps,
            Column::PsLower => row.ps_lower,
            Column::PsUpper => row.ps_upper,
            Column::Throughput => row.throughput,
            Column::THdMax => row.t_hd_max,
            Column::TFdMax => row.t_fd_max,
            Column::P1Opt => row.p1_opt,
            Column::P2Opt => row.p2_opt,
            Column::Tg => row.tg,
            Column::TgLower => row.tg_lower,
            Column::TgUpper => row.tg_upper,
            Column::PsSimMean => return row.ps_sim_mean,
            Column::PsSimHalfWidth => return row.ps_sim_half_width,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn has_sim(&self) -> bool {
        self.rows.iter().any(|r| r.ps_sim_mean.is_some())
    }

    /// Every analytic column, plus the simulated ones when present.
    pub fn default_columns(&self) -> Vec<Column> {
        let mut cols = Column::ANALYTIC.to_vec();
        if self.has_sim() {
            cols.extend([Column::PsSimMean, Column::PsSimHalfWidth]);
        }
        cols
    }

    /// Writes a header line and one line per row. Missing values are left
    /// empty.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W, columns: &[Column]) -> io::Result<()> {
        let header: Vec<_> = columns.iter().map(|c| c.header(self.variable)).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let fields: Vec<_> = columns
                .iter()
                .map(|c| {
                    c.value(row)
                        .map(|v| fmt_sig(v, CSV_DIGITS))
                        .unwrap_or_default()
                })
                .collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Checks `lower ≤ value ≤ upper` up to a relative slack.
fn check_sandwich(name: &str, lower: f64, value: f64, upper: f64, slack: f64) -> Result<()> {
    if lower > upper * (1.0 + slack)
        || value < lower * (1.0 - slack)
        || value > upper * (1.0 + slack)
    {
        return Err(Error::Consistency(format!(
            "{name} = {value} outside [{lower}, {upper}]"
        )));
    }
    Ok(())
}

fn evaluate(spec: &SweepSpec, x: f64, exec: Execution) -> Result<SweepRow> {
    let (config, fixed) = spec.point(x)?;
    let analysis = Analysis::new(config)?;
    let hd = analysis.optimal_hd();
    let fd = analysis.optimal_fd();
    let mac = match fixed {
        Some(m) => m,
        None => {
            let best = analysis.optimal_mixed();
            MacProfile::from_access(best.p1_opt, best.p2_opt)?
        }
    };
    let gain = analysis.throughput_gain()?;
    let ps = analysis.success_probability(&mac);
    let bounds = analysis.success_bounds(&mac);

    // F is only guaranteed inside its sandwich up to SANDWICH_SLACK, which
    // moves p_s by at most this much in log terms.
    let slack = config.lambda * mac.p2 * analysis.f() * SANDWICH_SLACK + 1e-12;
    check_sandwich("ps", bounds.lower, ps, bounds.upper, slack)?;

    let sim = match &spec.sim {
        Some(settings) => Some(estimate_ps(&config, &mac, settings, exec)?),
        None => None,
    };

    Ok(SweepRow {
        x,
        mac,
        ps,
        ps_lower: bounds.lower,
        ps_upper: bounds.upper,
        throughput: analysis.throughput(&mac),
        t_hd_max: hd.t_max,
        t_fd_max: fd.t_max,
        p1_opt: hd.p1_opt,
        p2_opt: fd.p2_opt,
        tg: gain.tg,
        tg_lower: gain.lower,
        tg_upper: gain.upper,
        inv_f: 1.0 / analysis.f(),
        inv_g: 1.0 / analysis.g(),
        ps_sim_mean: sim.map(|e| e.mean),
        ps_sim_half_width: sim.map(|e| e.half_width_95),
    })
}

/// Evaluates every grid point. Rows come back in grid order whatever the
/// execution mode.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let rows = exec
        .map(spec.grid.len(), |i| {
            let x = spec.grid[i];
            evaluate(spec, x, exec).map_err(|e| e.context(format!("at {} = {x}", spec.variable)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        variable: spec.variable,
        rows,
    })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) || n < 2 {
        return Err(Error::domain(format!(
            "log grid needs 0 < lo < hi and at least two points, got [{lo}, {hi}] with {n}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(hi > lo && lo.is_finite() && hi.is_finite()) || n < 2 {
        return Err(Error::domain(format!(
            "linear grid needs lo < hi and at least two points, got [{lo}, {hi}] with {n}"
        )));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}
