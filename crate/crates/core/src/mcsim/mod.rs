//! Monte Carlo simulation of the typical link in a Poisson field of
//! half-/full-duplex links.
//!
//! Every trial owns an independent ChaCha8 stream derived from the master
//! seed and the trial index, and trials are reduced in fixed-size batches,
//! so estimates are bit-identical for any thread count.

mod exec;
mod sampler;
mod trial;

pub use exec::Execution;
pub use sampler::{LinkSample, LinkSampler, LinkState, NetworkRealization};
pub use trial::{sir_trial, trial_rng, SirOutcome};

use rand::Rng;

use crate::analytic::{MacProfile, NetworkConfig};
use crate::error::{Error, Result};
use exec::{batch_count, batches};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

/// Truncated interference is kept below this fraction of `R^{-α}/θ`.
pub const WINDOW_TAIL_FRACTION: f64 = 1e-4;

/// Windows are capped so the expected number of links per trial stays below
/// this.
pub const MAX_EXPECTED_LINKS: f64 = 4e6;

/// A Monte Carlo mean with its normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub window_radius: f64,
}

impl Estimate {
    pub fn contains(&self, value: f64, half_widths: f64) -> bool {
        (self.mean - value).abs() <= half_widths * self.half_width_95
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub n_trials: u64,
    /// `None` selects the default window for the quantity being estimated.
    pub window_radius: Option<f64>,
    pub master_seed: u64,
}

impl SimSettings {
    pub fn new(n_trials: u64, master_seed: u64) -> Self {
        Self {
            n_trials,
            window_radius: None,
            master_seed,
        }
    }

    pub fn with_window(self, window_radius: f64) -> Self {
        Self {
            window_radius: Some(window_radius),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::domain("n_trials must be at least 1"));
        }
        if let Some(w) = self.window_radius {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::domain(format!(
                    "window radius must be positive and finite, got {w}"
                )));
            }
        }
        Ok(())
    }
}

/// Radius beyond which the mean interference, `2πλ_t W^{2-α}/(α-2)`, scaled
/// by `s`, falls below [`WINDOW_TAIL_FRACTION`].
fn tail_radius(tx_density: f64, s: f64, alpha: f64) -> f64 {
    let excess = alpha - 2.0;
    (2.0 * std::f64::consts::PI * tx_density * s / (WINDOW_TAIL_FRACTION * excess))
        .powf(1.0 / excess)
}

fn capped_window(lambda: f64, r_link: f64, tail: f64) -> f64 {
    let w = (50.0 * r_link).max(tail + r_link);
    if lambda > 0.0 {
        w.min((MAX_EXPECTED_LINKS / (lambda * std::f64::consts::PI)).sqrt())
    } else {
        w
    }
}

/// Default simulation window for success-probability trials: at least `50R`,
/// and large enough that the truncated interference is negligible against
/// the decoding threshold. The `+R` margin covers partners of links just
/// outside the window.
pub fn default_window_radius(config: &NetworkConfig, mac: &MacProfile) -> f64 {
    let tx_density = config.lambda * mac.transmitters_per_link();
    let tail = tail_radius(tx_density, config.s(), config.alpha);
    capped_window(config.lambda, config.r_link, tail)
}

/// Default window for Laplace-transform trials at argument `s_arg`.
pub fn default_laplace_window(config: &NetworkConfig, s_arg: f64) -> f64 {
    let tail = tail_radius(2.0 * config.lambda, s_arg, config.alpha);
    capped_window(config.lambda, config.r_link, tail)
}

/// Draws all links of one realization in the disk of radius `window_radius`.
pub fn sample_realization<R: Rng + ?Sized>(
    config: &NetworkConfig,
    mac: &MacProfile,
    window_radius: f64,
    rng: &mut R,
) -> NetworkRealization {
    NetworkRealization {
        links: LinkSampler::new(config.lambda, mac, window_radius, rng).collect(),
        window_radius,
        config: *config,
        mac: *mac,
    }
}

fn check_inputs(config: &NetworkConfig, settings: &SimSettings) -> Result<()> {
    config.validate()?;
    settings.validate()
}

/// Estimates the success probability of the typical link.
pub fn estimate_ps(
    config: &NetworkConfig,
    mac: &MacProfile,
    settings: &SimSettings,
    exec: Execution,
) -> Result<Estimate> {
    check_inputs(config, settings)?;
    let window = settings
        .window_radius
        .unwrap_or_else(|| default_window_radius(config, mac));
    let n = settings.n_trials;
    let seed = settings.master_seed;
    let range = batches(n);

    let successes: u64 = exec
        .map(batch_count(n), |b| {
            range(b)
                .filter(|&i| trial::sir_success(config, mac, window, &mut trial_rng(seed, i)))
                .count() as u64
        })
        .into_iter()
        .sum();

    let mean = successes as f64 / n as f64;
    Ok(Estimate {
        mean,
        half_width_95: Z95 * (mean * (1.0 - mean) / n as f64).sqrt(),
        n_trials: n,
        seed,
        window_radius: window,
    })
}

/// Estimates `E[exp(-s I₂)]`, where `I₂` is the interference at the origin
/// when every link is full-duplex.
pub fn estimate_laplace_fd(
    config: &NetworkConfig,
    s_arg: f64,
    settings: &SimSettings,
    exec: Execution,
) -> Result<Estimate> {
    check_inputs(config, settings)?;
    if !(s_arg.is_finite() && s_arg > 0.0) {
        return Err(Error::domain(format!(
            "s must be positive and finite, got {s_arg}"
        )));
    }
    let window = settings
        .window_radius
        .unwrap_or_else(|| default_laplace_window(config, s_arg));
    let n = settings.n_trials;
    let seed = settings.master_seed;
    let range = batches(n);

    // Per-batch partial sums, combined in batch order.
    let partials = exec.map(batch_count(n), |b| {
        range(b).fold((0.0, 0.0), |(sum, sum_sq), i| {
            let v = trial::laplace_sample(config, s_arg, window, &mut trial_rng(seed, i));
            (sum + v, sum_sq + v * v)
        })
    });
    let (sum, sum_sq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));

    let nf = n as f64;
    let mean = sum / nf;
    let variance = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        half_width_95: Z95 * (variance / nf).sqrt(),
        n_trials: n,
        seed,
        window_radius: window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{g_fn, Analysis};

    fn cfg(lambda: f64) -> NetworkConfig {
        NetworkConfig::new(lambda, 1.0, 1.0, 4.0).unwrap()
    }

    fn mac(p0: f64, p1: f64, p2: f64) -> MacProfile {
        MacProfile::new(p0, p1, p2).unwrap()
    }

    #[test]
    fn zero_density_is_empty() {
        let r = sample_realization(&cfg(0.0), &mac(0.0, 0.5, 0.5), 100.0, &mut trial_rng(1, 0));
        assert!(r.links.is_empty());
        assert_eq!(r.interference(), 0.0);
    }

    #[test]
    fn silent_profile_never_transmits() {
        let m = MacProfile::silent();
        let r = sample_realization(&cfg(0.1), &m, 30.0, &mut trial_rng(2, 0));
        assert!(!r.links.is_empty());
        assert_eq!(r.count(LinkState::Silent), r.links.len());
        for i in 0..200 {
            let o = sir_trial(&cfg(0.1), &m, 30.0, &mut trial_rng(2, i));
            assert!(o.success);
            assert_eq!(o.sir, f64::INFINITY);
        }
    }

    #[test]
    fn links_stay_in_window_and_are_sorted() {
        let r = sample_realization(&cfg(0.5), &mac(0.2, 0.4, 0.4), 20.0, &mut trial_rng(3, 7));
        let mut last = 0.0;
        for l in &r.links {
            let d = l.x[0].hypot(l.x[1]);
            assert!(d <= 20.0 && d >= last);
            assert!((0.0..std::f64::consts::TAU).contains(&l.phi));
            assert!(l.h_x > 0.0 && l.h_mx > 0.0);
            let m = l.partner(1.0);
            assert!(((m[0] - l.x[0]).hypot(m[1] - l.x[1]) - 1.0).abs() < 1e-12);
            last = d;
        }
    }

    #[test]
    fn larger_window_extends_the_same_links() {
        let small = sample_realization(&cfg(0.3), &mac(0.0, 0.5, 0.5), 10.0, &mut trial_rng(4, 1));
        let large = sample_realization(&cfg(0.3), &mac(0.0, 0.5, 0.5), 25.0, &mut trial_rng(4, 1));
        assert!(large.links.len() > small.links.len());
        assert_eq!(small.links[..], large.links[..small.links.len()]);
    }

    #[test]
    fn link_count_is_poisson() {
        let n = 10_000u64;
        let counts: Vec<f64> = (0..n)
            .map(|i| {
                LinkSampler::new(0.1, &MacProfile::silent(), 50.0, &mut trial_rng(5, i)).count()
                    as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let expected = 0.1 * std::f64::consts::PI * 2500.0;
        assert!(
            (mean - expected).abs() < 3.0 * (expected / n as f64).sqrt() + 1e-9,
            "{mean}"
        );
        assert!((var / mean - 1.0).abs() < 0.05, "{}", var / mean);
    }

    #[test]
    fn state_fractions_match_profile() {
        let m = mac(0.2, 0.3, 0.5);
        let mut counts = [0usize; 3];
        for i in 0..200 {
            let r = sample_realization(&cfg(0.2), &m, 30.0, &mut trial_rng(6, i));
            counts[0] += r.count(LinkState::Silent);
            counts[1] += r.count(LinkState::HalfDuplex);
            counts[2] += r.count(LinkState::FullDuplex);
        }
        let total: usize = counts.iter().sum();
        for (c, p) in counts.iter().zip([m.p0, m.p1, m.p2]) {
            let frac = *c as f64 / total as f64;
            let sigma = (p * (1.0 - p) / total as f64).sqrt();
            assert!((frac - p).abs() < 3.0 * sigma, "{frac} vs {p}");
        }
    }

    #[test]
    fn early_exit_matches_full_trial() {
        let c = cfg(0.3);
        let m = mac(0.1, 0.4, 0.5);
        for i in 0..2000 {
            let full = sir_trial(&c, &m, 40.0, &mut trial_rng(8, i)).success;
            let fast = trial::sir_success(&c, &m, 40.0, &mut trial_rng(8, i));
            assert_eq!(full, fast, "trial {i}");
        }
    }

    #[test]
    fn hd_estimate_matches_closed_form() {
        let c = cfg(0.1);
        let est = estimate_ps(
            &c,
            &mac(0.0, 1.0, 0.0),
            &SimSettings::new(20_000, 11),
            Execution::Parallel,
        )
        .unwrap();
        let exact = (-0.1 * g_fn(1.0, 4.0).unwrap()).exp();
        assert!(est.contains(exact, 3.0), "{est:?} vs {exact}");
        let hw = Z95 * (est.mean * (1.0 - est.mean) / 20_000.0).sqrt();
        assert_eq!(est.half_width_95, hw);
    }

    #[test]
    fn mixed_estimate_within_bounds() {
        let c = cfg(0.1);
        let m = mac(0.0, 0.5, 0.5);
        let est = estimate_ps(&c, &m, &SimSettings::new(20_000, 12), Execution::Parallel).unwrap();
        let b = Analysis::new(c).unwrap().success_bounds(&m);
        assert!(est.mean >= b.lower - 3.0 * est.half_width_95, "{est:?}");
        assert!(est.mean <= b.upper + 3.0 * est.half_width_95, "{est:?}");
    }

    #[test]
    fn window_doubling_is_harmless() {
        let c = cfg(0.1);
        let m = mac(0.0, 0.5, 0.5);
        let s = SimSettings::new(20_000, 13);
        let base = estimate_ps(&c, &m, &s, Execution::Parallel).unwrap();
        let wide = estimate_ps(
            &c,
            &m,
            &s.with_window(2.0 * base.window_radius),
            Execution::Parallel,
        )
        .unwrap();
        assert!((base.mean - wide.mean).abs() < base.half_width_95);
    }

    #[test]
    fn default_window_rule() {
        let c = cfg(0.1);
        let w = default_window_radius(&c, &mac(0.0, 1.0, 0.0));
        let tail = 2.0 * std::f64::consts::PI * 0.1 * w.powf(-2.0) / 2.0;
        assert!(tail <= WINDOW_TAIL_FRACTION);
        assert!(w >= 50.0);
        assert_eq!(default_window_radius(&cfg(0.0), &mac(0.0, 1.0, 0.0)), 50.0);
        let dense = cfg(1.0).with_lambda(1.0).unwrap();
        let thin_alpha = NetworkConfig {
            alpha: 2.1,
            ..dense
        };
        let capped = default_window_radius(&thin_alpha, &mac(0.0, 0.0, 1.0));
        assert!(std::f64::consts::PI * capped * capped <= MAX_EXPECTED_LINKS * (1.0 + 1e-12));
    }

    #[test]
    fn laplace_trivial_and_reference() {
        let one = estimate_laplace_fd(
            &cfg(0.0),
            1.0,
            &SimSettings::new(10, 0),
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!((one.mean, one.half_width_95), (1.0, 0.0));

        let c = cfg(0.05);
        let a = Analysis::new(c).unwrap();
        let est = estimate_laplace_fd(&c, 1.0, &SimSettings::new(20_000, 14), Execution::Parallel)
            .unwrap();
        let target = (-0.05 * a.f()).exp();
        assert!(est.contains(target, 3.0), "{est:?} vs {target}");
    }

    #[test]
    fn laplace_far_pair_limit() {
        let c = NetworkConfig::new(0.05, 1.0, 100.0, 4.0).unwrap();
        let settings = SimSettings::new(10_000, 15).with_window(156.0);
        let est = estimate_laplace_fd(&c, 1.0, &settings, Execution::Parallel).unwrap();
        let target = (-0.05 * 2.0 * g_fn(1.0, 4.0).unwrap()).exp();
        assert!(est.contains(target, 3.0), "{est:?} vs {target}");
    }

    #[test]
    fn rejects_bad_settings() {
        let c = cfg(0.1);
        let m = mac(0.0, 1.0, 0.0);
        let e = estimate_ps(&c, &m, &SimSettings::new(0, 0), Execution::Sequential).unwrap_err();
        assert!(e.is_domain());
        let s = SimSettings::new(10, 0).with_window(-1.0);
        assert!(estimate_ps(&c, &m, &s, Execution::Sequential)
            .unwrap_err()
            .is_domain());
        let s = SimSettings::new(10, 0);
        assert!(estimate_laplace_fd(&c, 0.0, &s, Execution::Sequential)
            .unwrap_err()
            .is_domain());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = cfg(0.2);
        let m = mac(0.0, 0.5, 0.5);
        let s = SimSettings::new(5_000, 16);
        assert_eq!(
            estimate_ps(&c, &m, &s, Execution::Sequential).unwrap(),
            estimate_ps(&c, &m, &s, Execution::Parallel).unwrap()
        );
        let seq = estimate_laplace_fd(&c, 1.0, &s, Execution::Sequential).unwrap();
        let par = estimate_laplace_fd(&c, 1.0, &s, Execution::Parallel).unwrap();
        assert_eq!(seq.mean.to_bits(), par.mean.to_bits());
        assert_eq!(seq.half_width_95.to_bits(), par.half_width_95.to_bits());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_change_results() {
        let c = cfg(0.2);
        let m = mac(0.0, 0.5, 0.5);
        let s = SimSettings::new(2_000, 17);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    (
                        estimate_ps(&c, &m, &s, Execution::Parallel).unwrap(),
                        estimate_laplace_fd(&c, 0.5, &s, Execution::Parallel).unwrap(),
                    )
                })
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.mean.to_bits(), b.1.mean.to_bits());
    }
}
