//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use fdnet::analytic::{f_fn, g_fn, simplex_search, Analysis, MacProfile, NetworkConfig};
use fdnet::mcsim::{estimate_laplace_fd, estimate_ps, Execution, SimSettings};
use fdnet::numerics::QuadratureSpec;

const TRIALS: u64 = 100_000;
const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn reference(lambda: f64) -> NetworkConfig {
    NetworkConfig::new(lambda, 1.0, 1.0, 4.0).unwrap()
}

fn grid_configs() -> Vec<NetworkConfig> {
    let mut out = Vec::new();
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        for theta in [0.1, 1.0, 10.0] {
            for r in [0.25, 1.0, 4.0] {
                out.push(NetworkConfig::new(1.0, theta, r, alpha).unwrap());
            }
        }
    }
    out
}

fn hd_oracle() -> Verdict {
    let config = reference(0.1);
    let mac = MacProfile::new(0.0, 1.0, 0.0).unwrap();
    let est = estimate_ps(
        &config,
        &mac,
        &SimSettings::new(TRIALS, SEED),
        Execution::Sequential,
    )
    .unwrap();
    let exact = (-0.1 * PI * PI / 2.0).exp();
    let z = (est.mean - exact) / est.half_width_95;
    verdict(
        z.abs() <= 3.0,
        format!(
            "mean {:.6} ± {:.6} vs {exact:.6} ({z:+.2} half-widths)",
            est.mean, est.half_width_95
        ),
    )
}

fn figure1_points() -> Verdict {
    let mac = MacProfile::new(0.0, 0.5, 0.5).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for lambda in [0.02, 0.05, 0.1, 0.2, 0.5] {
        let config = reference(lambda);
        let a = Analysis::new(config).unwrap();
        let b = a.success_bounds(&mac);
        let ps = a.success_probability(&mac);
        let est = estimate_ps(
            &config,
            &mac,
            &SimSettings::new(TRIALS, SEED),
            Execution::Parallel,
        )
        .unwrap();
        let hw = est.half_width_95;
        let sim_ok = est.mean >= b.lower - 3.0 * hw && est.mean <= b.upper + 3.0 * hw;
        let ana_ok = b.lower <= ps && ps <= b.upper;
        pass &= sim_ok && ana_ok;
        parts.push(format!(
            "λ={lambda}: sim {:.5}±{:.5} in [{:.5}, {:.5}]{}",
            est.mean,
            hw,
            b.lower,
            b.upper,
            if sim_ok && ana_ok { "" } else { " (outside)" }
        ));
    }
    verdict(pass, parts.join("; "))
}

fn sandwich() -> Verdict {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = f64::INFINITY;
    let mut pass = true;
    for c in grid_configs() {
        let s = c.s();
        let g = g_fn(s, c.alpha).unwrap();
        let f = f_fn(s, c.alpha, c.r_link, &spec).unwrap();
        let lo = (1.0 + c.delta()) * g;
        let hi = 2.0 * g;
        pass &= f >= lo * (1.0 - 1e-6) && f <= hi * (1.0 + 1e-6);
        worst = worst.min(((f - lo) / lo).min((hi - f) / hi));
    }
    verdict(
        pass,
        format!("36 configs, smallest relative margin {worst:.3e}"),
    )
}

fn laplace_oracle() -> Verdict {
    let config = reference(0.05);
    let f = f_fn(1.0, 4.0, 1.0, &QuadratureSpec::default()).unwrap();
    let target = (-0.05 * f).exp();
    let est = estimate_laplace_fd(
        &config,
        1.0,
        &SimSettings::new(TRIALS, SEED),
        Execution::Parallel,
    )
    .unwrap();
    let z = (est.mean - target) / est.half_width_95;
    verdict(
        z.abs() <= 3.0,
        format!(
            "mean {:.6} ± {:.6} vs exp(-0.05 F) = {target:.6} ({z:+.2} half-widths)",
            est.mean, est.half_width_95
        ),
    )
}

fn global_optimum() -> Verdict {
    let mut cases = 0;
    let mut exceed = 0;
    let mut grid_p1 = Vec::new();
    let mut refined_p1 = 0;
    for c in grid_configs() {
        let base = Analysis::new(c).unwrap();
        for lambda in [0.05, 0.3, 1.0, 5.0] {
            let a = base.with_lambda(lambda).unwrap();
            let best = a.optimal_mixed();
            let search = simplex_search(&a, 400);
            cases += 1;
            if search.best_throughput() > best.t_max + 1e-9 {
                exceed += 1;
            }
            if search.grid_best.0 != 0.0 {
                grid_p1.push(format!(
                    "(α={}, θ={}, R={}, λ={lambda}: p2*={:.2e})",
                    c.alpha, c.theta, c.r_link, best.p2_opt
                ));
            }
            if search.refined.0 != 0.0 {
                refined_p1 += 1;
            }
        }
    }
    let mut detail = format!(
        "{cases} cases; T above t_max+1e-9: {exceed}; refined argmax with p1>0: {refined_p1}; \
         401x401 grid argmax with p1>0: {}",
        grid_p1.len()
    );
    if !grid_p1.is_empty() {
        detail.push_str(&format!(
            ". Grid argmax at p1=1/400 where the full-duplex optimum p2* lies below the grid \
             resolution: {}",
            grid_p1.join(", ")
        ));
    }
    verdict(exceed == 0 && refined_p1 == 0 && grid_p1.is_empty(), detail)
}

fn lemma_branches() -> Verdict {
    let g = PI * PI / 2.0;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let low = Analysis::new(reference(0.1)).unwrap().optimal_hd();
    let high = Analysis::new(reference(1.0)).unwrap().optimal_hd();
    let errs = [
        rel(low.p1_opt, 1.0),
        rel(low.t_max, (-0.1 * g).exp()),
        rel(high.p1_opt, 1.0 / g),
        rel(high.t_max, (-1.0f64).exp() / g),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    verdict(
        worst <= 1e-9,
        format!(
            "λ=0.1: ({}, {:.9}); λ=1: ({:.9}, {:.9}); worst relative error {worst:.1e}",
            low.p1_opt, low.t_max, high.p1_opt, high.t_max
        ),
    )
}

fn gain_limits() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [1.0, 10.0] {
        let a = Analysis::new(NetworkConfig::new(1e-9, theta, 1.0, 4.0).unwrap()).unwrap();
        let tiny = a.throughput_gain().unwrap().tg;
        let tiny_ok = (tiny - 2.0).abs() <= 1e-6;

        let inv_g = 1.0 / a.g();
        let upper = 2.0 / (1.0 + a.delta());
        let mut sat = Vec::new();
        for k in 0..40 {
            let lambda = inv_g * 10f64.powf(k as f64 * 4.0 / 39.0);
            sat.push(a.with_lambda(lambda).unwrap().throughput_gain().unwrap().tg);
        }
        let spread = sat.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - sat.iter().cloned().fold(f64::INFINITY, f64::min);
        let inside = sat.iter().all(|&t| t > 1.0 && t < upper);

        let mut jump: f64 = 0.0;
        for edge in [1.0 / a.f(), inv_g] {
            let below = a
                .with_lambda(edge * (1.0 - 1e-12))
                .unwrap()
                .throughput_gain()
                .unwrap()
                .tg;
            let above = a
                .with_lambda(edge * (1.0 + 1e-12))
                .unwrap()
                .throughput_gain()
                .unwrap()
                .tg;
            jump = jump.max((below - above).abs());
        }
        pass &= tiny_ok && spread <= 1e-9 && inside && jump <= 1e-9;
        parts.push(format!(
            "θ={theta}: TG(1e-9)={tiny:.9}, saturated TG={:.9} (spread {spread:.1e}, bound {upper:.6}), \
             jump at 1/F,1/G {jump:.1e}",
            sat[0]
        ));
    }
    verdict(pass, parts.join("; "))
}

fn cli_output(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_fdnet"))
        .args(args)
        .env_remove("FDNET_SEED")
        .output()
        .expect("run fdnet");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn reproducibility() -> Verdict {
    let runs: [&[&str]; 3] = [
        &[
            "simulate", "--lambda", "0.2", "--p1", "0.5", "--p2", "0.5", "--trials", "20000",
            "--seed", "7",
        ],
        &[
            "simulate",
            "--lambda",
            "0.05",
            "--laplace",
            "1",
            "--trials",
            "20000",
            "--seed",
            "7",
        ],
        &[
            "sweep",
            "--var",
            "lambda",
            "--grid",
            "0.05,0.1,0.2",
            "--p1",
            "0.5",
            "--p2",
            "0.5",
            "--trials",
            "5000",
            "--seed",
            "7",
        ],
    ];
    let mut identical = 0;
    for args in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "2", "4"] {
            let mut a = args.to_vec();
            a.extend(["--threads", threads]);
            outputs.push(cli_output(&a));
        }
        if outputs.windows(2).all(|w| w[0] == w[1]) {
            identical += 1;
        }
    }

    let config = reference(0.2);
    let mac = MacProfile::new(0.0, 0.5, 0.5).unwrap();
    let settings = SimSettings::new(20_000, 7);
    let seq = estimate_ps(&config, &mac, &settings, Execution::Sequential).unwrap();
    let par = estimate_ps(&config, &mac, &settings, Execution::Parallel).unwrap();
    let lib_ok = seq.mean.to_bits() == par.mean.to_bits();

    verdict(
        identical == runs.len() && lib_ok,
        format!(
            "CLI outputs identical across 1/2/4 threads for {identical}/{} commands; \
             sequential vs parallel library estimate identical: {lib_ok}",
            runs.len()
        ),
    )
}

fn main() {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Check, Duration); 8] = [
        ("HD closed-form oracle", hd_oracle, Duration::from_secs(30)),
        (
            "Success probability between bounds",
            figure1_points,
            Duration::from_secs(300),
        ),
        ("F sandwich", sandwich, Duration::from_secs(10)),
        ("F Laplace oracle", laplace_oracle, Duration::from_secs(60)),
        (
            "Global optimum on the full-duplex edge",
            global_optimum,
            Duration::from_secs(120),
        ),
        (
            "Half-duplex optimum branches",
            lemma_branches,
            Duration::from_secs(10),
        ),
        (
            "Throughput gain limits",
            gain_limits,
            Duration::from_secs(10),
        ),
        (
            "Reproducibility across thread counts",
            reproducibility,
            Duration::from_secs(300),
        ),
    ];

    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = v.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {} {}: {} [{:.1}s / {}s budget] {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
