use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::format::fmt_sig;
use super::sweep::{log_grid, run_sweep, Column, MacChoice, SweepResult, SweepSpec, SweepVariable};
use crate::analytic::{MacProfile, NetworkConfig};
use crate::error::{Error, Result};
use crate::mcsim::{Execution, SimSettings};

/// Trials per point for the simulated curve of figure 1.
pub const FIG1_DEFAULT_TRIALS: u64 = 100_000;

/// Decoding thresholds drawn in figure 4.
pub const FIG4_THETAS: [f64; 2] = [1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub trials: u64,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            trials: FIG1_DEFAULT_TRIALS,
            seed: 0,
            exec: Execution::Parallel,
        }
    }
}

/// Files written for one figure, and the sweeps behind them.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub files: Vec<PathBuf>,
    pub sweeps: Vec<SweepResult>,
}

fn reference_config(theta: f64) -> Result<NetworkConfig> {
    NetworkConfig::new(0.1, theta, 1.0, 4.0)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))
}

fn write_csv(path: &Path, sweep: &SweepResult, columns: &[Column]) -> Result<()> {
    let file = fs::File::create(path)
        .map_err(|e| Error::domain(format!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    sweep
        .write_csv(&mut out, columns)
        .and_then(|_| std::io::Write::flush(&mut out))
        .map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))
}

fn meta_header(figure: &str, config: &NetworkConfig) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "figure={figure}");
    let _ = writeln!(m, "tool=fdnet {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "alpha={}", config.alpha);
    let _ = writeln!(m, "r_link={}", config.r_link);
    m
}

fn prepare(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::domain(format!("cannot create {}: {e}", out_dir.display())))
}

fn non_increasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] <= w[0])
}

/// Success probability against density for `p1 = p2 = 1/2`: simulation,
/// quadrature and both closed-form bounds.
pub fn figure1(out_dir: &Path, opts: &FigureOptions) -> Result<FigureOutput> {
    prepare(out_dir)?;
    let base = reference_config(1.0)?;
    let mac = MacProfile::new(0.0, 0.5, 0.5)?;
    let spec = SweepSpec {
        base,
        mac: MacChoice::Fixed(mac),
        variable: SweepVariable::Lambda,
        grid: log_grid(0.01, 1.0, 20)?,
        sim: Some(SimSettings::new(opts.trials, opts.seed)),
    };
    let sweep = run_sweep(&spec, opts.exec)?;

    let csv = out_dir.join("fig1.csv");
    let columns = [
        Column::X,
        Column::PsSimMean,
        Column::PsSimHalfWidth,
        Column::Ps,
        Column::PsLower,
        Column::PsUpper,
    ];
    write_csv(&csv, &sweep, &columns)?;

    let gp = out_dir.join("fig1.gp");
    write_file(
        &gp,
        "set datafile separator ','\n\
         set logscale x\n\
         set xlabel 'node density'\n\
         set ylabel 'success probability'\n\
         set key top right\n\
         plot 'fig1.csv' using 1:2:3 with yerrorbars title 'simulation', \\\n\
         \x20    '' using 1:4 with lines title 'analytic', \\\n\
         \x20    '' using 1:5 with lines dashtype 2 title 'lower bound', \\\n\
         \x20    '' using 1:6 with lines dashtype 3 title 'upper bound'\n",
    )?;

    let mut meta = meta_header("fig1", &base);
    let _ = writeln!(meta, "theta={}", base.theta);
    let _ = writeln!(meta, "p0={}\np1={}\np2={}", mac.p0, mac.p1, mac.p2);
    let _ = writeln!(meta, "lambda_grid=log,0.01,1,20");
    let _ = writeln!(meta, "trials={}", opts.trials);
    let _ = writeln!(meta, "seed={}", opts.seed);
    let _ = writeln!(meta, "window=default");
    let meta_path = out_dir.join("fig1.meta");
    write_file(&meta_path, &meta)?;

    for row in &sweep.rows {
        let (m, hw) = (
            row.ps_sim_mean.unwrap_or(f64::NAN),
            row.ps_sim_half_width.unwrap_or(0.0),
        );
        if !(m >= row.ps_lower - 3.0 * hw && m <= row.ps_upper + 3.0 * hw) {
            return Err(Error::Consistency(format!(
                "simulated p_s = {m} ± {hw} at lambda = {} outside [{}, {}]",
                row.x, row.ps_lower, row.ps_upper
            )));
        }
    }

    Ok(FigureOutput {
        files: vec![csv, gp, meta_path],
        sweeps: vec![sweep],
    })
}

/// Optimal half-duplex and full-duplex access probabilities against density.
pub fn figure3(out_dir: &Path, opts: &FigureOptions) -> Result<FigureOutput> {
    prepare(out_dir)?;
    let base = reference_config(1.0)?;
    let spec = SweepSpec {
        base,
        mac: MacChoice::Optimize,
        variable: SweepVariable::Lambda,
        grid: log_grid(0.01, 10.0, 40)?,
        sim: None,
    };
    let sweep = run_sweep(&spec, opts.exec)?;

    if !non_increasing(sweep.rows.iter().map(|r| r.p1_opt))
        || !non_increasing(sweep.rows.iter().map(|r| r.p2_opt))
    {
        return Err(Error::Consistency(
            "optimal access probability increases with density".into(),
        ));
    }
    if let Some(r) = sweep.rows.iter().find(|r| r.p2_opt > r.p1_opt) {
        return Err(Error::Consistency(format!(
            "p2_opt = {} exceeds p1_opt = {} at lambda = {}",
            r.p2_opt, r.p1_opt, r.x
        )));
    }

    let csv = out_dir.join("fig3.csv");
    write_csv(&csv, &sweep, &[Column::X, Column::P1Opt, Column::P2Opt])?;

    let (inv_f, inv_g) = (sweep.rows[0].inv_f, sweep.rows[0].inv_g);
    let gp = out_dir.join("fig3.gp");
    write_file(
        &gp,
        &format!(
            "set datafile separator ','\n\
             set logscale xy\n\
             set xlabel 'node density'\n\
             set ylabel 'optimal access probability'\n\
             set arrow from {f},graph 0 to {f},graph 1 nohead dashtype 2\n\
             set arrow from {g},graph 0 to {g},graph 1 nohead dashtype 3\n\
             plot 'fig3.csv' using 1:2 with lines title 'half-duplex', \\\n\
             \x20    '' using 1:3 with lines title 'full-duplex'\n",
            f = fmt_sig(inv_f, 15),
            g = fmt_sig(inv_g, 15),
        ),
    )?;

    let mut meta = meta_header("fig3", &base);
    let _ = writeln!(meta, "theta={}", base.theta);
    let _ = writeln!(meta, "lambda_grid=log,0.01,10,40");
    let _ = writeln!(meta, "inv_f={}", fmt_sig(inv_f, 15));
    let _ = writeln!(meta, "inv_g={}", fmt_sig(inv_g, 15));
    let meta_path = out_dir.join("fig3.meta");
    write_file(&meta_path, &meta)?;

    Ok(FigureOutput {
        files: vec![csv, gp, meta_path],
        sweeps: vec![sweep],
    })
}

/// Full-duplex throughput gain and its bounds against density, one curve
/// per threshold in [`FIG4_THETAS`].
pub fn figure4(out_dir: &Path, opts: &FigureOptions) -> Result<FigureOutput> {
    prepare(out_dir)?;
    let mut files = Vec::new();
    let mut sweeps = Vec::new();
    let mut meta = meta_header("fig4", &reference_config(1.0)?);
    let _ = writeln!(meta, "lambda_grid=log,0.001,10,40");
    let thetas: Vec<String> = FIG4_THETAS.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(meta, "thetas={}", thetas.join(","));
    let mut plot = String::from(
        "set datafile separator ','\n\
         set logscale x\n\
         set xlabel 'node density'\n\
         set ylabel 'throughput gain'\n\
         plot ",
    );

    for (k, &theta) in FIG4_THETAS.iter().enumerate() {
        let spec = SweepSpec {
            base: reference_config(theta)?,
            mac: MacChoice::Optimize,
            variable: SweepVariable::Lambda,
            grid: log_grid(1e-3, 10.0, 40)?,
            sim: None,
        };
        let sweep = run_sweep(&spec, opts.exec)?;
        let (inv_f, inv_g) = (sweep.rows[0].inv_f, sweep.rows[0].inv_g);

        if !non_increasing(sweep.rows.iter().map(|r| r.tg)) {
            return Err(Error::Consistency(format!(
                "throughput gain increases with density at theta = {theta}"
            )));
        }
        let saturated: Vec<f64> = sweep
            .rows
            .iter()
            .filter(|r| r.x >= inv_g)
            .map(|r| r.tg)
            .collect();
        if let Some(&first) = saturated.first() {
            if saturated.iter().any(|tg| (tg - first).abs() > 1e-9) {
                return Err(Error::Consistency(format!(
                    "throughput gain not constant above 1/G at theta = {theta}"
                )));
            }
        }

        let name = format!("fig4_theta{}.csv", thetas[k]);
        let csv = out_dir.join(&name);
        write_csv(
            &csv,
            &sweep,
            &[Column::X, Column::Tg, Column::TgLower, Column::TgUpper],
        )?;
        files.push(csv);

        let t = &thetas[k];
        let _ = writeln!(meta, "inv_f_theta{t}={}", fmt_sig(inv_f, 15));
        let _ = writeln!(meta, "inv_g_theta{t}={}", fmt_sig(inv_g, 15));
        if k > 0 {
            plot.push_str(", \\\n     ");
        }
        let _ = write!(
            plot,
            "'{name}' using 1:2 with lines title 'theta={t}', \\\n\
             \x20    '' using 1:3 with lines dashtype 2 title 'lower, theta={t}', \\\n\
             \x20    '' using 1:4 with lines dashtype 3 title 'upper, theta={t}'"
        );
        sweeps.push(sweep);
    }
    plot.push('\n');

    let gp = out_dir.join("fig4.gp");
    write_file(&gp, &plot)?;
    let meta_path = out_dir.join("fig4.meta");
    write_file(&meta_path, &meta)?;
    files.push(gp);
    files.push(meta_path);
    Ok(FigureOutput { files, sweeps })
}
