use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::sampler::LinkSampler;
use crate::analytic::{MacProfile, NetworkConfig};

/// Per-trial random stream: ChaCha8 keyed by the master seed, with the
/// trial index as the stream id. Draw order within a trial is fixed.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirOutcome {
    pub success: bool,
    /// `+∞` when there is no interference.
    pub sir: f64,
}

/// One typical-link experiment: receiver at the origin, desired transmitter
/// at distance `R`, interferers drawn in the window.
///
/// The desired fading is the first draw of the stream, then the links.
pub fn sir_trial<R: Rng + ?Sized>(
    config: &NetworkConfig,
    mac: &MacProfile,
    window_radius: f64,
    rng: &mut R,
) -> SirOutcome {
    let h: f64 = Exp1.sample(rng);
    let signal = h * config.r_link.powf(-config.alpha);
    let interference: f64 = LinkSampler::new(config.lambda, mac, window_radius, rng)
        .map(|l| l.interference(config.r_link, config.alpha))
        .sum();
    if interference == 0.0 {
        return SirOutcome {
            success: true,
            sir: f64::INFINITY,
        };
    }
    SirOutcome {
        success: signal > config.theta * interference,
        sir: signal / interference,
    }
}

/// Same decision as [`sir_trial`] on the same stream, but stops drawing as
/// soon as the accumulated interference already forces a failure.
pub(crate) fn sir_success<R: Rng + ?Sized>(
    config: &NetworkConfig,
    mac: &MacProfile,
    window_radius: f64,
    rng: &mut R,
) -> bool {
    let h: f64 = Exp1.sample(rng);
    let signal = h * config.r_link.powf(-config.alpha);
    let mut interference = 0.0;
    for link in LinkSampler::new(config.lambda, mac, window_radius, rng) {
        interference += link.interference(config.r_link, config.alpha);
        if config.theta * interference >= signal {
            return false;
        }
    }
    true
}

/// `exp(-s · I₂)` for one all-full-duplex realization.
pub(crate) fn laplace_sample<R: Rng + ?Sized>(
    config: &NetworkConfig,
    s_arg: f64,
    window_radius: f64,
    rng: &mut R,
) -> f64 {
    let fd_only = MacProfile {
        p0: 0.0,
        p1: 0.0,
        p2: 1.0,
    };
    let i2: f64 = LinkSampler::new(config.lambda, &fd_only, window_radius, rng)
        .map(|l| l.interference(config.r_link, config.alpha))
        .sum();
    (-s_arg * i2).exp()
}
