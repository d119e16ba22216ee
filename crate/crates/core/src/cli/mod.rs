//! Command-line front end.
//!
//! Every scalar result is printed as a `name=value` line with 12 significant
//! digits. Settings are taken from flags first, then from the `--config`
//! file, then (for the seed only) from `FDNET_SEED`, then from defaults.
//!
//! Exit codes: 0 on success, 2 for usage and domain errors, 3 for numerical
//! failures, 1 for I/O errors.

mod config_file;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{f_fn, Analysis, MacProfile, NetworkConfig};
use crate::error::Error;
use crate::harness::{
    self, fmt_sig, log_grid, run_sweep, FigureOptions, MacChoice, SweepSpec, SweepVariable,
    FIG1_DEFAULT_TRIALS,
};
use crate::mcsim::{estimate_laplace_fd, estimate_ps, Execution, SimSettings};
use crate::numerics::QuadratureSpec;
use config_file::FileConfig;

/// Environment variable holding the default master seed.
pub const SEED_ENV: &str = "FDNET_SEED";

/// Significant digits of printed scalars.
pub const PRINT_DIGITS: usize = 12;

const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

enum Failure {
    Usage(String),
    Numerical(Error),
    Io(std::io::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_domain() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e)
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fdnet",
    version,
    about = "Success probability, throughput and full-duplex gain of ALOHA networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct NetArgs {
    /// Link density.
    #[arg(long)]
    lambda: Option<f64>,
    /// SIR decoding threshold [default: 1].
    #[arg(long)]
    theta: Option<f64>,
    /// Link distance [default: 1].
    #[arg(long = "r")]
    r: Option<f64>,
    /// Path-loss exponent, above 2 [default: 4].
    #[arg(long)]
    alpha: Option<f64>,
    /// Probability a link is silent [default: 1 - p1 - p2].
    #[arg(long)]
    p0: Option<f64>,
    /// Probability a link transmits half-duplex [default: 0].
    #[arg(long)]
    p1: Option<f64>,
    /// Probability a link transmits full-duplex [default: 0].
    #[arg(long)]
    p2: Option<f64>,
    /// File of key=value settings; flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct SimArgs {
    /// Monte Carlo trials [default: 100000].
    #[arg(long)]
    trials: Option<u64>,
    /// Simulation window radius [default: chosen from the configuration].
    #[arg(long)]
    window: Option<f64>,
    /// Master seed [default: $FDNET_SEED, else 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureName {
    Fig1,
    Fig3,
    Fig4,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Success probability of the typical link.
    Ps(NetArgs),
    /// Success probability with its lower and upper bounds.
    Bounds(NetArgs),
    /// Throughput at the given access probabilities.
    Throughput(NetArgs),
    /// Throughput-optimal access probabilities.
    Optimize(NetArgs),
    /// Full-duplex throughput gain with its bounds.
    Gain(NetArgs),
    /// Monte Carlo estimate of the success probability, or of the
    /// full-duplex interference Laplace transform with --laplace.
    Simulate {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Estimate E[exp(-S I)] with every link full-duplex.
        #[arg(long, value_name = "S")]
        laplace: Option<f64>,
    },
    /// Sweep one parameter and write CSV.
    Sweep {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Swept parameter: lambda, theta, alpha, r, p1 or p2.
        #[arg(long = "var")]
        var: String,
        /// Comma-separated grid values.
        #[arg(
            long,
            conflicts_with = "log_grid",
            required_unless_present = "log_grid"
        )]
        grid: Option<String>,
        /// Log-spaced grid as LO,HI,N.
        #[arg(long = "log-grid")]
        log_grid: Option<String>,
        /// Use the throughput-optimal access probabilities at each point.
        #[arg(long)]
        optimize: bool,
        /// Output file [default: standard output].
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Write the data, plot script and metadata of a reference figure.
    Figure {
        #[arg(value_enum)]
        which: FigureName,
        #[arg(long = "out-dir", default_value = ".")]
        out_dir: PathBuf,
        /// Trials per simulated point [default: 100000].
        #[arg(long)]
        trials: Option<u64>,
        /// Master seed [default: $FDNET_SEED, else 0].
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads [default: all cores].
        #[arg(long)]
        threads: Option<usize>,
    },
}

/// Fully resolved settings for one invocation.
struct Resolved {
    config: NetworkConfig,
    mac: MacProfile,
    trials: Option<u64>,
    window: Option<f64>,
    seed: u64,
    threads: Option<usize>,
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &FileConfig,
    key: &str,
) -> Result<Option<T>, UsageError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

fn env_seed(env: Option<&str>) -> Result<Option<u64>, UsageError> {
    env.map(|v| {
        v.trim()
            .parse()
            .map_err(|_| UsageError(format!("{SEED_ENV} must be an unsigned integer, got {v:?}")))
    })
    .transpose()
}

fn load_file(path: &Option<PathBuf>) -> Result<FileConfig, UsageError> {
    match path {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::default()),
    }
}

fn resolve(
    net: &NetArgs,
    sim: Option<&SimArgs>,
    env: Option<&str>,
    lambda_fallback: Option<f64>,
) -> Result<Resolved, Failure> {
    let file = load_file(&net.config)?;
    let lambda = pick(net.lambda, &file, "lambda")?
        .or(lambda_fallback)
        .ok_or_else(|| UsageError("--lambda is required (flag or config file)".into()))?;
    let config = NetworkConfig::new(
        lambda,
        pick(net.theta, &file, "theta")?.unwrap_or(1.0),
        pick(net.r, &file, "r")?.unwrap_or(1.0),
        pick(net.alpha, &file, "alpha")?.unwrap_or(4.0),
    )?;

    let p1 = pick(net.p1, &file, "p1")?.unwrap_or(0.0);
    let p2 = pick(net.p2, &file, "p2")?.unwrap_or(0.0);
    let mac = match pick(net.p0, &file, "p0")? {
        Some(p0) => MacProfile::new(p0, p1, p2)?,
        None => MacProfile::from_access(p1, p2)?,
    };

    let (flag_trials, flag_window, flag_seed, flag_threads) = match sim {
        Some(s) => (s.trials, s.window, s.seed, s.threads),
        None => (None, None, None, None),
    };
    let seed = match pick(flag_seed, &file, "seed")? {
        Some(s) => s,
        None => env_seed(env)?.unwrap_or(0),
    };
    Ok(Resolved {
        config,
        mac,
        trials: pick(flag_trials, &file, "trials")?,
        window: pick(flag_window, &file, "window")?,
        seed,
        threads: pick(flag_threads, &file, "threads")?,
    })
}

impl Resolved {
    fn settings(&self) -> Result<SimSettings, Failure> {
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Failure::Usage("--trials must be at least 1".into()));
        }
        let mut s = SimSettings::new(trials, self.seed);
        if let Some(w) = self.window {
            s = s.with_window(w);
        }
        s.validate()?;
        Ok(s)
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
}

impl Printer<'_> {
    fn num(&mut self, name: &str, value: f64) -> std::io::Result<()> {
        writeln!(self.out, "{name}={}", fmt_sig(value, PRINT_DIGITS))
    }

    fn text(&mut self, name: &str, value: impl fmt::Display) -> std::io::Result<()> {
        writeln!(self.out, "{name}={value}")
    }
}

/// Runs `f` on a dedicated pool when a thread count is requested.
fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, Failure> {
    match threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Failure::Usage(format!("cannot start {n} threads: {e}"))),
        _ => Ok(f()),
    }
}

fn parse_grid(grid: Option<&str>, log: Option<&str>) -> Result<Vec<f64>, Failure> {
    let parse = |s: &str| -> Result<f64, UsageError> {
        s.trim()
            .parse()
            .map_err(|_| UsageError(format!("cannot parse grid value {s:?}")))
    };
    if let Some(g) = grid {
        return Ok(g.split(',').map(parse).collect::<Result<_, _>>()?);
    }
    let spec = log.unwrap_or_default();
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::Usage(format!(
            "--log-grid expects LO,HI,N, got {spec:?}"
        )));
    }
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("cannot parse point count {:?}", parts[2])))?;
    Ok(log_grid(parse(parts[0])?, parse(parts[1])?, n)?)
}

fn execute(cli: Cli, env: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    let mut p = Printer { out };
    match cli.command {
        Command::Ps(net) => {
            let r = resolve(&net, None, env, None)?;
            let a = Analysis::new(r.config)?;
            p.num("ps", a.success_probability(&r.mac))?;
        }
        Command::Bounds(net) => {
            let r = resolve(&net, None, env, None)?;
            let a = Analysis::new(r.config)?;
            let b = a.success_bounds(&r.mac);
            p.num("ps_lower", b.lower)?;
            p.num("ps", a.success_probability(&r.mac))?;
            p.num("ps_upper", b.upper)?;
            p.num("ps_colocated", a.ps_colocated_approx(&r.mac))?;
        }
        Command::Throughput(net) => {
            let r = resolve(&net, None, env, None)?;
            let a = Analysis::new(r.config)?;
            p.num("ps", a.success_probability(&r.mac))?;
            p.num("T", a.throughput(&r.mac))?;
        }
        Command::Optimize(net) => {
            let r = resolve(&net, None, env, None)?;
            let a = Analysis::new(r.config)?;
            let best = a.optimal_mixed();
            let hd = a.optimal_hd();
            p.num("p1_opt", best.p1_opt)?;
            p.num("p2_opt", best.p2_opt)?;
            p.num("t_max", best.t_max)?;
            p.text("regime", best.regime)?;
            p.num("hd_p1_opt", hd.p1_opt)?;
            p.num("hd_t_max", hd.t_max)?;
            p.text("hd_regime", hd.regime)?;
        }
        Command::Gain(net) => {
            let r = resolve(&net, None, env, None)?;
            let a = Analysis::new(r.config)?;
            let g = a.throughput_gain()?;
            p.num("tg", g.tg)?;
            p.num("tg_lower", g.lower)?;
            p.num("tg_upper", g.upper)?;
            p.text("branch", g.branch)?;
            p.num("inv_f", 1.0 / a.f())?;
            p.num("inv_g", 1.0 / a.g())?;
        }
        Command::Simulate { net, sim, laplace } => {
            let r = resolve(&net, Some(&sim), env, None)?;
            let settings = r.settings()?;
            match laplace {
                Some(s_arg) => {
                    let est = with_threads(r.threads, || {
                        estimate_laplace_fd(&r.config, s_arg, &settings, Execution::Parallel)
                    })??;
                    let c = &r.config;
                    let f = f_fn(s_arg, c.alpha, c.r_link, &QuadratureSpec::default())?;
                    p.num("laplace_sim", est.mean)?;
                    p.num("laplace_sim_half_width", est.half_width_95)?;
                    p.num("laplace", (-c.lambda * f).exp())?;
                    p.text("trials", est.n_trials)?;
                    p.text("seed", est.seed)?;
                    p.num("window", est.window_radius)?;
                }
                None => {
                    let est = with_threads(r.threads, || {
                        estimate_ps(&r.config, &r.mac, &settings, Execution::Parallel)
                    })??;
                    let a = Analysis::new(r.config)?;
                    let b = a.success_bounds(&r.mac);
                    p.num("ps_sim", est.mean)?;
                    p.num("ps_sim_half_width", est.half_width_95)?;
                    p.num("ps", a.success_probability(&r.mac))?;
                    p.num("ps_lower", b.lower)?;
                    p.num("ps_upper", b.upper)?;
                    p.text("trials", est.n_trials)?;
                    p.text("seed", est.seed)?;
                    p.num("window", est.window_radius)?;
                }
            }
        }
        Command::Sweep {
            net,
            sim,
            var,
            grid,
            log_grid,
            optimize,
            out: path,
        } => {
            let variable: SweepVariable = var.parse()?;
            let grid = parse_grid(grid.as_deref(), log_grid.as_deref())?;
            let fallback = (variable == SweepVariable::Lambda).then(|| grid[0]);
            let r = resolve(&net, Some(&sim), env, fallback)?;
            let spec = SweepSpec {
                base: r.config,
                mac: if optimize {
                    MacChoice::Optimize
                } else {
                    MacChoice::Fixed(r.mac)
                },
                variable,
                grid,
                sim: match r.trials {
                    Some(_) => Some(r.settings()?),
                    None => None,
                },
            };
            let result = with_threads(r.threads, || run_sweep(&spec, Execution::Parallel))??;
            let columns = result.default_columns();
            match path {
                Some(path) => {
                    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
                    result.write_csv(&mut file, &columns)?;
                    file.flush()?;
                    p.text("file", path.display())?;
                }
                None => result.write_csv(p.out, &columns)?,
            }
        }
        Command::Figure {
            which,
            out_dir,
            trials,
            seed,
            threads,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => env_seed(env)?.unwrap_or(0),
            };
            let trials = trials.unwrap_or(FIG1_DEFAULT_TRIALS);
            if trials == 0 {
                return Err(Failure::Usage("--trials must be at least 1".into()));
            }
            let opts = FigureOptions {
                trials,
                seed,
                exec: Execution::Parallel,
            };
            let output = with_threads(threads, || match which {
                FigureName::Fig1 => harness::figure1(&out_dir, &opts),
                FigureName::Fig3 => harness::figure3(&out_dir, &opts),
                FigureName::Fig4 => harness::figure4(&out_dir, &opts),
            })??;
            for f in &output.files {
                p.text("file", f.display())?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. `env_seed` stands in for `FDNET_SEED`.
pub fn run_with<I, T>(
    args: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(cli, env_seed, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Numerical(e)) => {
            let _ = writeln!(err, "numerical failure: {e}");
            3
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "i/o error: {e}");
            1
        }
    }
}

/// [`run_with`] reading the seed from the process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    run_with(args, env.as_deref(), out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], env: Option<&str>) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("fdnet").chain(args.iter().copied());
        let code = run_with(argv, env, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn value(out: &str, key: &str) -> f64 {
        out.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("{key} missing in {out}"))
            .parse()
            .unwrap()
    }

    #[test]
    fn ps_hd_closed_form() {
        let (code, out, _) = call(
            &[
                "ps", "--lambda", "0.1", "--theta", "1", "--r", "1", "--alpha", "4", "--p1", "1",
                "--p2", "0",
            ],
            None,
        );
        assert_eq!(code, 0);
        assert_eq!(out, "ps=0.610498025266\n");
    }

    #[test]
    fn optimize_saturated() {
        let (code, out, _) = call(&["optimize", "--lambda", "1"], None);
        assert_eq!(code, 0);
        assert!(out.contains("p1_opt=0\n"));
        assert!(out.contains("regime=saturated\n"));
        let f = Analysis::new(NetworkConfig::new(1.0, 1.0, 1.0, 4.0).unwrap())
            .unwrap()
            .f();
        assert!((value(&out, "p2_opt") - 1.0 / f).abs() < 1e-11);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(
            call(
                &["simulate", "--lambda", "0.1", "--p1", "1", "--trials", "0"],
                None
            )
            .0,
            2
        );
        assert_eq!(call(&["ps", "--p1", "1"], None).0, 2);
        assert_eq!(call(&["ps", "--lambda", "0.1", "--alpha", "2"], None).0, 2);
        assert_eq!(
            call(
                &["ps", "--lambda", "0.1", "--p1", "0.7", "--p2", "0.7"],
                None
            )
            .0,
            2
        );
        assert_eq!(call(&["ps", "--lambda", "x"], None).0, 2);
        assert_eq!(call(&["nonsense"], None).0, 2);
        assert_eq!(call(&["sweep", "--var", "beta", "--grid", "1"], None).0, 2);
        assert_eq!(
            call(
                &["simulate", "--lambda", "0.1", "--trials", "5"],
                Some("abc")
            )
            .0,
            2
        );
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"], None);
        assert_eq!(code, 0);
        assert!(out.contains("simulate"));
    }

    #[test]
    fn bounds_are_ordered() {
        let (code, out, _) = call(
            &["bounds", "--lambda", "0.1", "--p1", "0.5", "--p2", "0.5"],
            None,
        );
        assert_eq!(code, 0);
        let (lo, ps, hi) = (
            value(&out, "ps_lower"),
            value(&out, "ps"),
            value(&out, "ps_upper"),
        );
        assert!(lo < ps && ps < hi);
        assert_eq!(value(&out, "ps_colocated"), hi);
    }

    #[test]
    fn seed_precedence() {
        let args = [
            "simulate", "--lambda", "0.05", "--p1", "1", "--trials", "50",
        ];
        let (_, out, _) = call(&args, None);
        assert_eq!(value(&out, "seed"), 0.0);
        let (_, out, _) = call(&args, Some("9"));
        assert_eq!(value(&out, "seed"), 9.0);
        let mut with_flag = args.to_vec();
        with_flag.extend(["--seed", "4"]);
        let (_, out, _) = call(&with_flag, Some("9"));
        assert_eq!(value(&out, "seed"), 4.0);
    }

    #[test]
    fn config_file_and_flag_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.cfg");
        std::fs::write(&path, "lambda=1\np1=1\nseed=3\n").unwrap();
        let path = path.to_str().unwrap();
        let (code, from_file, _) = call(&["ps", "--config", path], None);
        assert_eq!(code, 0);
        let (_, direct, _) = call(&["ps", "--lambda", "1", "--p1", "1"], None);
        assert_eq!(from_file, direct);
        let (_, overridden, _) = call(&["ps", "--config", path, "--lambda", "0.1"], None);
        assert_eq!(overridden, "ps=0.610498025266\n");

        let (_, out, _) = call(&["simulate", "--config", path, "--trials", "10"], Some("9"));
        assert_eq!(value(&out, "seed"), 3.0);
    }

    #[test]
    fn sweep_to_stdout() {
        let (code, out, err) = call(
            &[
                "sweep",
                "--var",
                "lambda",
                "--log-grid",
                "0.01,1,5",
                "--optimize",
            ],
            None,
        );
        assert_eq!(code, 0, "{err}");
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("lambda,p0,p1,p2,ps,"));
    }

    #[test]
    fn gain_reports_branch() {
        let (code, out, _) = call(&["gain", "--lambda", "1e-9"], None);
        assert_eq!(code, 0);
        assert!(out.contains("branch=both_unsaturated\n"));
        assert!((value(&out, "tg") - 2.0).abs() < 1e-6);
    }
}
